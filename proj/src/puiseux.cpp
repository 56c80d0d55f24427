#include "polarcurve/puiseux.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <sstream>

namespace polar {

long PuiseuxBranch::m0() const {
  if (coeffs.empty()) return 1;  // the branch y = 0
  long s = coeffs.begin()->first;
  return std::min(ram, s);
}

std::string PuiseuxBranch::str() const {
  std::ostringstream os;
  if (coeffs.empty()) {
    os << "0";
  } else {
    bool first = true;
    for (const auto& [s, a] : coeffs) {
      if (!first) os << " + ";
      first = false;
      os << "(" << a.str() << ")*x^(" << s << "/" << ram << ")";
    }
  }
  if (trunc_s >= 0) os << " + O(x^(" << trunc_s + 1 << "/" << ram << "))";
  if (multiplicity > 1) os << " [mult " << multiplicity << "]";
  return os.str();
}

PuiseuxBranch conjugate_branch(const PuiseuxBranch& b, long j) {
  PuiseuxBranch r = b;
  if (b.ram == 1 || j % b.ram == 0) return r;
  for (auto& [s, a] : r.coeffs) {
    Rat phase = rq(((s % b.ram) * (j % b.ram)) % b.ram, b.ram);
    a = a * root_of_unity(phase);
  }
  return r;
}

std::vector<std::pair<long, Scalar>> branch_series_t(const PuiseuxBranch& b, long t_bound) {
  std::vector<std::pair<long, Scalar>> out;
  for (const auto& [s, a] : b.coeffs) {
    if (s > t_bound) break;
    out.emplace_back(s, a);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Newton-Puiseux recursion.
// ---------------------------------------------------------------------------

namespace {

// substitution x -> x^q, y -> x^p (c + y), divided by x^(qk); monomials whose
// new x-degree would exceed xbound are pruned.  Since c is a root of the side
// polynomial of multiplicity m, the result vanishes to y-order m on x = 0;
// those coefficients cancel exactly and are scrubbed (they need not certify
// to zero when c is an enclosure).
BivariateGerm np_substitute(const BivariateGerm& g, long q, long p, const Scalar& c, long qk,
                            long xbound, long root_mult) {
  BivariateGerm r;
  r.trunc = -1;
  long ydeg = g.ydeg();
  std::vector<std::vector<Rat>> binom(ydeg + 1, std::vector<Rat>(ydeg + 1, Rat(0)));
  for (long n = 0; n <= ydeg; ++n) {
    binom[n][0] = 1;
    for (long t = 1; t <= n; ++t)
      binom[n][t] = binom[n - 1][t - 1] + ((t <= n - 1) ? binom[n - 1][t] : Rat(0));
  }
  std::vector<Scalar> cpow(ydeg + 1);
  cpow[0] = Scalar(1);
  for (long t = 1; t <= ydeg; ++t) cpow[t] = cpow[t - 1] * c;
  bool c_zero = c.is_exact_zero();
  for (const auto& [pt, v] : g.coeff) {
    long base = q * pt.i + p * pt.j - qk;
    if (base > xbound) continue;
    if (base < 0) throw scalar_error("newton polygon side underestimates order");
    if (c_zero) {
      auto it = r.coeff.find({base, pt.j});
      if (it == r.coeff.end())
        r.coeff[{base, pt.j}] = v;
      else
        it->second += v;
      continue;
    }
    for (long t = 0; t <= pt.j; ++t) {
      Scalar add = v * Scalar(binom[pt.j][t]) * cpow[pt.j - t];
      if (add.is_exact_zero()) continue;
      auto it = r.coeff.find({base, t});
      if (it == r.coeff.end())
        r.coeff[{base, t}] = add;
      else
        it->second += add;
    }
  }
  for (long t = 0; t < root_mult; ++t) r.coeff.erase({0, t});
  r.cleanup();
  return r;
}

struct PathStep {
  Rat exponent;  // global x-exponent of this choice
  int root_id;   // chosen root at the split; -1: exact end, -2: truncated end
};

struct Leaf {
  PuiseuxBranch branch;
  std::vector<PathStep> path;
  bool complete = false;
};

struct Engine {
  long target_s = 0;
  long max_s = 0;
  int next_root_id = 0;
  std::vector<Leaf> leaves;
  bool unfinished = false;

  void expand_node(BivariateGerm g, const Rat& off, const Int& scale,
                   std::vector<std::pair<Rat, Scalar>> prefix, std::vector<PathStep> path,
                   int depth) {
    if (depth > 1024) throw scalar_error("newton-puiseux recursion depth exceeded");
    long xd = g.x_divisibility();
    if (xd > 0) g = g.divide_x_power(xd);
    long yd = g.y_divisibility();
    if (yd > 0) {
      Leaf lf;
      lf.complete = true;
      lf.branch.multiplicity = static_cast<int>(yd);
      fill_branch(lf, prefix, -1);
      lf.path = path;
      lf.path.push_back({Rat(std::numeric_limits<long>::max()), -1});
      leaves.push_back(std::move(lf));
      g = g.divide_y_power(yd);
    }
    if (g.is_zero() || g.coeff.count({0, 0})) return;  // unit factor: done

    auto np = newton_polygon(g);
    for (size_t si = 0; si < np.sides.size(); ++si) {
      const auto& side = np.sides[si];
      long p_ = num_l(side.incl), q_ = den_l(side.incl);
      Rat global_exp = off + side.incl / Rat(scale);
      if (global_exp > Rat(target_s)) {
        long h = side.hi.j - side.lo.j;
        // h > 1: branches not yet separated; q > 1: char exponents incomplete
        if (h > 1 || q_ > 1) unfinished = true;
        Leaf lf;
        lf.complete = false;
        fill_branch(lf, prefix, target_s);
        lf.branch.multiplicity = static_cast<int>(h);
        lf.path = path;
        lf.path.push_back({global_exp, -2});
        leaves.push_back(std::move(lf));
        continue;
      }
      long j0 = side.lo.j, j1 = side.hi.j;
      std::vector<Scalar> phi(static_cast<size_t>((j1 - j0) / q_) + 1);
      for (const auto& [pt, v] : g.coeff) {
        if (Rat(pt.i) + side.incl * Rat(pt.j) == side.line_k && pt.j >= j0 && pt.j <= j1 &&
            (pt.j - j0) % q_ == 0)
          phi[static_cast<size_t>((pt.j - j0) / q_)] = v;
      }
      Poly Phi{std::move(phi)};
      long qk = num_l(Rat(q_) * side.line_k);
      auto roots = certified_roots(Phi);
      for (const auto& rc : roots) {
        if (rc.value.is_exact_zero()) continue;
        Scalar c;
        if (q_ == 1)
          c = rc.value;
        else if (q_ == 2)
          c = scalar_sqrt(rc.value, true);
        else {
          std::vector<Scalar> bin(static_cast<size_t>(q_) + 1);
          bin[0] = -rc.value;
          bin[static_cast<size_t>(q_)] = Scalar(1);
          auto rts = certified_roots(Poly{std::move(bin)});
          c = rts.front().value;
        }
        int id = next_root_id++;
        Int scale2 = scale * q_;
        Rat need = (Rat(target_s) - global_exp) * Rat(scale2);
        long xbound = need < 0 ? 0 : to_long(ceil_int(need)) + 1;
        BivariateGerm child = np_substitute(g, q_, p_, c, qk, xbound, rc.multiplicity);
        auto prefix2 = prefix;
        prefix2.emplace_back(global_exp, c);
        auto path2 = path;
        path2.push_back({global_exp, id});
        expand_node(std::move(child), global_exp, scale2, std::move(prefix2), std::move(path2),
                    depth + 1);
      }
    }
  }

  void fill_branch(Leaf& lf, const std::vector<std::pair<Rat, Scalar>>& prefix, long trunc) {
    Int n(1);
    for (const auto& [e, c] : prefix) n = lcm_int(n, den(e));
    lf.branch.ram = to_long(n);
    for (const auto& [e, c] : prefix) {
      long s = to_long(num(e) * (n / den(e)));
      auto it = lf.branch.coeffs.find(s);
      if (it == lf.branch.coeffs.end())
        lf.branch.coeffs[s] = c;
      else
        it->second += c;
    }
    lf.branch.trunc_s = trunc < 0 ? -1 : to_long(Int(trunc) * n);
  }
};

}  // namespace

ExpandResult puiseux_expand(const BivariateGerm& g_in, const ExpandOptions& opt) {
  if (g_in.is_zero()) throw scalar_error("puiseux_expand of zero germ");
  BivariateGerm g = g_in;
  ExpandResult out;

  long yd = g.y_divisibility();
  if (yd > 0) g = g.divide_y_power(yd);
  if (!g.is_zero() && g.x_divisibility() > 0)
    throw scalar_error("x = 0 is a component of the germ");

  // transversality: shear x -> x + c y when x = 0 is tangent to the germ
  if (!g.is_zero() && !g.coeff.count({0, 0})) {
    long m = g.order();
    bool tangent = true;
    for (const auto& [pt, v] : g.coeff)
      if (pt.i + pt.j == m && pt.i == 0) tangent = false;
    if (tangent) {
      for (long cc = 1; cc <= 64 && tangent; ++cc) {
        BivariateGerm sh;
        sh.trunc = g.trunc;
        for (const auto& [pt, v] : g.coeff) {
          Rat bin(1);
          for (long t = 0; t <= pt.i; ++t) {
            if (t > 0) bin *= rq(pt.i - t + 1, t);
            Scalar add = v * Scalar(bin) * Scalar(Rat(cc)).pow(t);
            auto key = LatticePoint{pt.i - t, pt.j + t};
            auto it = sh.coeff.find(key);
            if (it == sh.coeff.end())
              sh.coeff[key] = add;
            else
              it->second += add;
          }
        }
        sh.cleanup();
        bool still = true;
        for (const auto& [pt, v] : sh.coeff)
          if (pt.i + pt.j == m && pt.i == 0) still = false;
        if (!still) {
          g = std::move(sh);
          out.shear = Rat(cc);
          tangent = false;
        }
      }
      if (tangent) throw scalar_error("could not normalize tangent cone by shearing");
    }
  }

  long target = opt.target_s;
  if (target == 0 && !g.is_zero()) {
    auto np = newton_polygon(g);
    target = std::max<long>(8, 2 * std::max(np.width(), np.height()) + opt.margin_terms + 2);
  }
  if (target == 0) target = 8;

  for (;;) {
    Engine eng;
    eng.target_s = target;
    eng.max_s = opt.max_s;
    if (!g.is_zero() && !g.coeff.count({0, 0}))
      eng.expand_node(g, Rat(0), Int(1), {}, {}, 0);
    if (eng.unfinished) {
      if (target >= opt.max_s)
        throw scalar_error("insufficient truncation: branches not separated within cap s=" +
                           std::to_string(opt.max_s));
      target = std::min(opt.max_s, target * 2);
      continue;
    }
    if (yd > 0) {
      Leaf lf;
      lf.complete = true;
      lf.branch.multiplicity = static_cast<int>(yd);
      lf.branch.trunc_s = -1;
      lf.path.push_back({Rat(std::numeric_limits<long>::max()), -1});
      eng.leaves.insert(eng.leaves.begin(), std::move(lf));
    }
    size_t n = eng.leaves.size();
    out.branches.clear();
    out.coincidence.assign(n, std::vector<Rat>(n, Rat(0)));
    for (size_t a = 0; a < n; ++a) out.branches.push_back(eng.leaves[a].branch);
    for (size_t a = 0; a < n; ++a)
      for (size_t b = a + 1; b < n; ++b) {
        const auto& pa = eng.leaves[a].path;
        const auto& pb = eng.leaves[b].path;
        Rat c(0);
        bool found = false;
        for (size_t k = 0; k < std::min(pa.size(), pb.size()); ++k) {
          if (pa[k].root_id != pb[k].root_id || pa[k].exponent != pb[k].exponent) {
            c = std::min(pa[k].exponent, pb[k].exponent);
            found = true;
            break;
          }
        }
        if (!found) throw scalar_error("unseparated branches in expansion");
        out.coincidence[a][b] = out.coincidence[b][a] = c;
      }
    return out;
  }
}

// ---------------------------------------------------------------------------
// Coincidence of independently given branches (sup over conjugates).
// ---------------------------------------------------------------------------

namespace {

// decide a1 * e(ph1) == a2 * e(ph2); throws precision_error when undecidable
bool phased_equal(const Scalar& a1, const Rat& ph1, const Scalar& a2, const Rat& ph2) {
  Rat dph = ph2 - ph1;
  dph -= Rat(floor_int(dph));
  if (a1.is_exact() && a2.is_exact()) {
    if (a1.is_exact_zero() && a2.is_exact_zero()) return true;
    if (a1.is_exact_zero() || a2.is_exact_zero()) return false;
    Scalar w = a1 / a2;
    if (!w.is_exact()) {
      Sign s = certify_sign(a1 * root_of_unity(ph1) - a2 * root_of_unity(ph2));
      if (s == Sign::NonZero) return false;
      throw precision_error("phased equality undecided (mixed towers)");
    }
    if (dph == 0) return certify_sign(w - Scalar(1)) == Sign::Zero;
    long q = den_l(dph);
    Scalar wq = w.pow(q);
    if (certify_sign(wq - Scalar(1)) != Sign::Zero) return false;
    Scalar target = root_of_unity(dph);
    if (target.is_exact()) return certify_sign(w - target) == Sign::Zero;
    // both are q-th roots of unity; distinct ones are >= 2 sin(pi/q) apart
    Scalar diff = w - target;
    if (certify_sign(diff) == Sign::NonZero) return false;
    Ball b = escalate(diff.is_exact() ? diff : diff, 256).enclosure(256);
    mpfr_t up;
    mpfr_init2(up, 64);
    mpfr_hypot(up, b.re, b.im, MPFR_RNDU);
    mpfr_add(up, up, b.rad, MPFR_RNDU);
    bool close = mpfr_cmp_d(up, 1.0 / (2.0 * static_cast<double>(q) * q)) < 0;
    mpfr_clear(up);
    if (close) return true;
    throw precision_error("phased equality undecided");
  }
  Scalar z1 = a1 * root_of_unity(ph1);
  Scalar z2 = a2 * root_of_unity(ph2);
  Sign s = certify_sign(z1 - z2);
  if (s == Sign::NonZero) return false;
  throw precision_error("phased equality with inexact coefficients undecided");
}

}  // namespace

Rat coincidence(const PuiseuxBranch& a, const PuiseuxBranch& b) {
  std::vector<Rat> grid;
  for (const auto& [s, v] : a.coeffs) grid.push_back(rq(s, a.ram));
  for (const auto& [s, v] : b.coeffs) grid.push_back(rq(s, b.ram));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<std::pair<long, long>> alive;
  for (long j = 0; j < a.ram; ++j)
    for (long l = 0; l < b.ram; ++l) alive.emplace_back(j, l);

  Rat big(std::numeric_limits<long>::max());
  Rat bound_a = a.trunc_s < 0 ? big : rq(a.trunc_s, a.ram);
  Rat bound_b = b.trunc_s < 0 ? big : rq(b.trunc_s, b.ram);
  Rat bound = std::min(bound_a, bound_b);

  Rat last_death(-1);
  for (const Rat& e : grid) {
    if (e > bound) throw scalar_error("coincidence: branches agree past certified truncation");
    Scalar ca, cb;
    long sa = 0, sb = 0;
    bool ina = false, inb = false;
    {
      Rat t = e * Rat(a.ram);
      if (is_integer(t)) {
        sa = to_long(num(t));
        auto it = a.coeffs.find(sa);
        if (it != a.coeffs.end()) {
          ca = it->second;
          ina = true;
        }
      }
    }
    {
      Rat t = e * Rat(b.ram);
      if (is_integer(t)) {
        sb = to_long(num(t));
        auto it = b.coeffs.find(sb);
        if (it != b.coeffs.end()) {
          cb = it->second;
          inb = true;
        }
      }
    }
    if (!ina && !inb) continue;
    std::vector<std::pair<long, long>> next;
    for (auto& [j, l] : alive) {
      Rat pha = ina ? rq(((sa % a.ram) * j) % a.ram, a.ram) : Rat(0);
      Rat phb = inb ? rq(((sb % b.ram) * l) % b.ram, b.ram) : Rat(0);
      Scalar va = ina ? ca : Scalar();
      Scalar vb = inb ? cb : Scalar();
      if (phased_equal(va, pha, vb, phb)) next.emplace_back(j, l);
    }
    if (next.size() < alive.size()) last_death = e;
    if (next.empty()) return e;
    alive = std::move(next);
  }
  // surviving alignments mean the inputs are conjugate series of one branch;
  // the coincidence is then the sup over the distinct conjugate pairs
  if (last_death >= 0) return last_death;
  throw scalar_error(
      "coincidence undefined: branches agree on all certified terms");
}

long order_along_branch(const BivariateGerm& g, const PuiseuxBranch& b, long t_bound) {
  std::map<long, Scalar> series;
  for (const auto& [s, v] : b.coeffs)
    if (s <= t_bound) series[s] = v;
  long ydeg = g.ydeg();
  std::vector<std::map<long, Scalar>> ypow(static_cast<size_t>(ydeg) + 1);
  ypow[0][0] = Scalar(1);
  for (long j = 1; j <= ydeg; ++j) {
    std::map<long, Scalar> nxt;
    for (const auto& [e1, c1] : ypow[j - 1])
      for (const auto& [e2, c2] : series) {
        if (e1 + e2 > t_bound) continue;
        auto it = nxt.find(e1 + e2);
        if (it == nxt.end())
          nxt[e1 + e2] = c1 * c2;
        else
          it->second += c1 * c2;
      }
    ypow[j] = std::move(nxt);
  }
  std::map<long, Scalar> total;
  for (const auto& [pt, v] : g.coeff) {
    long base = pt.i * b.ram;
    if (base > t_bound) continue;
    for (const auto& [e, c] : ypow[pt.j]) {
      if (base + e > t_bound) continue;
      auto it = total.find(base + e);
      if (it == total.end())
        total[base + e] = v * c;
      else
        it->second += v * c;
    }
  }
  for (const auto& [e, c] : total) {
    Sign s = certify_sign(c);
    if (s == Sign::NonZero) return e;
    if (s == Sign::Undecided)
      throw precision_error("order_along_branch: coefficient sign undecided");
  }
  throw scalar_error("order_along_branch: vanishes to truncation order");
}

}  // namespace polar
