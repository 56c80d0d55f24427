#include "polarcurve/ramify.hpp"

#include <algorithm>
#include <numeric>

namespace polar {

namespace {

// shared exponent ladders (values with nonzero coefficients) below the
// pairwise coincidences, as used by the ramified coincidence formulas
std::vector<std::vector<Rat>> value_ladders(const EquisType& e) {
  std::vector<MarkedBranch> mb;
  for (const auto& b : e.branches) mb.push_back({b, false});
  // reuse the cluster ladder construction through a tiny local copy
  size_t n = e.size();
  std::vector<std::vector<Rat>> ladder(n);
  auto lattice_at = [&](size_t i, const Rat& x) {
    long q = 1;
    for (const Rat& v : e.branches[i].exponent_values())
      if (v < x) q = std::lcm(q, den_l(v));
    return q;
  };
  auto admissible = [&](size_t i, const Rat& x) {
    if (std::lcm(lattice_at(i, x), den_l(x)) == lattice_at(i, x)) return true;
    for (const Rat& v : e.branches[i].exponent_values())
      if (v == x) return true;
    return false;
  };
  auto add = [&](size_t i, const Rat& x) {
    auto& L = ladder[i];
    if (std::find(L.begin(), L.end(), x) == L.end()) L.push_back(x);
  };
  for (size_t i = 0; i < n; ++i)
    for (const Rat& v : e.branches[i].exponent_values()) add(i, v);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      const Rat& c = e.coinc[i][j];
      if (admissible(i, c)) add(i, c);
      if (admissible(j, c)) add(j, c);
    }
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        for (const Rat& x : ladder[j])
          if (x < e.coinc[i][j] &&
              std::find(ladder[i].begin(), ladder[i].end(), x) == ladder[i].end()) {
            ladder[i].push_back(x);
            changed = true;
          }
      }
  }
  for (auto& L : ladder) std::sort(L.begin(), L.end());
  return ladder;
}

}  // namespace

EquisType ramified_equis(const EquisType& e, long n) {
  validate_equis(e);
  size_t r = e.size();
  for (size_t i = 0; i < r; ++i)
    if (n % e.branches[i].mult0() != 0)
      throw scalar_error("ramification order not divisible by branch multiplicity");

  auto ladders = value_ladders(e);

  EquisType out;
  std::vector<std::pair<size_t, long>> who;  // (original branch, conjugate index)
  for (size_t i = 0; i < r; ++i) {
    long ni = e.branches[i].mult0();
    for (long l = 0; l < ni; ++l) {
      out.branches.push_back(branch_type_from_exponents({1}));
      who.emplace_back(i, l);
    }
  }
  size_t m = out.branches.size();
  out.coinc.assign(m, std::vector<Rat>(m, Rat(0)));

  auto frac_differs = [](const Rat& a, const Rat& b) {
    Rat d = a - b;
    return !is_integer(d);
  };

  for (size_t a = 0; a < m; ++a)
    for (size_t b = a + 1; b < m; ++b) {
      auto [i, l] = who[a];
      auto [j, s] = who[b];
      Rat c;
      if (i == j) {
        // conjugates: first characteristic value with e*(l-s) not integral
        bool found = false;
        for (const Rat& v : e.branches[i].exponent_values()) {
          if (frac_differs(v * Rat(l), v * Rat(s))) {
            c = v;
            found = true;
            break;
          }
        }
        if (!found) throw scalar_error("conjugates do not separate");
      } else {
        Rat cij = e.coinc[i][j];
        c = cij;
        // phase mismatch at a shared earlier exponent separates sooner
        for (const Rat& v : ladders[i]) {
          if (!(v < cij)) break;
          if (frac_differs(v * Rat(l), v * Rat(s))) {
            c = v;
            break;
          }
        }
      }
      out.coinc[a][b] = out.coinc[b][a] = c * Rat(n);
    }
  validate_equis(out);
  return out;
}

RamifiedGraph ramify_graph(const EquisType& e, long n, const DualGraph* gc_in) {
  RamifiedGraph out;
  out.equis = ramified_equis(e, n);
  out.graph = build_dual_graph(out.equis);
  DualGraph gc = gc_in ? *gc_in : build_dual_graph(e);
  // association: divisors of G(C~) with v~ = n*v(E), for bifurcation divisors
  // of G(C) and for E1
  out.assoc.assign(gc.vertices.size(), {});
  for (const auto& ve : gc.vertices) {
    bool relevant = gc.is_bifurcation(ve.id) || ve.id == gc.root;
    if (!relevant) continue;
    Rat target = ve.contact * Rat(n);
    for (const auto& vt : out.graph.vertices)
      if (vt.contact == target) out.assoc[static_cast<size_t>(ve.id)].push_back(vt.id);
  }
  // branch classes
  out.branch_classes.assign(e.size(), {});
  size_t idx = 0;
  for (size_t i = 0; i < e.size(); ++i) {
    long ni = e.branches[i].mult0();
    for (long l = 0; l < ni; ++l) out.branch_classes[i].push_back(static_cast<int>(idx++));
  }
  return out;
}

EquisType unramify_equising(const std::vector<PuiseuxBranch>& branches, long n) {
  size_t m = branches.size();
  if (m == 0) throw scalar_error("unramify: no branches");
  for (const auto& b : branches)
    if (b.ram != 1) throw scalar_error("unramify: input branches must be smooth");

  // classes by (a_j)^n equality across all exponents
  std::vector<int> cls(m, -1);
  int nclasses = 0;
  auto same_class = [&](const PuiseuxBranch& x, const PuiseuxBranch& y) {
    std::vector<long> grid;
    for (const auto& [s, v] : x.coeffs) grid.push_back(s);
    for (const auto& [s, v] : y.coeffs) grid.push_back(s);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (long s : grid) {
      long bx = x.trunc_s < 0 ? std::numeric_limits<long>::max() : x.trunc_s;
      long by = y.trunc_s < 0 ? std::numeric_limits<long>::max() : y.trunc_s;
      if (s > std::min(bx, by)) break;
      auto ix = x.coeffs.find(s);
      auto iy = y.coeffs.find(s);
      Scalar vx = ix == x.coeffs.end() ? Scalar() : ix->second;
      Scalar vy = iy == y.coeffs.end() ? Scalar() : iy->second;
      Scalar d = vx.pow(n) - vy.pow(n);
      Sign sg = certify_sign(d);
      if (sg == Sign::NonZero) return false;
      if (sg == Sign::Undecided) throw precision_error("unramify class relation undecided");
    }
    return true;
  };
  for (size_t a = 0; a < m; ++a) {
    for (size_t b = 0; b < a; ++b)
      if (same_class(branches[a], branches[b])) {
        cls[a] = cls[b];
        break;
      }
    if (cls[a] < 0) cls[a] = nclasses++;
  }

  // u-coincidences between all pairs
  std::vector<std::vector<long>> uc(m, std::vector<long>(m, 0));
  for (size_t a = 0; a < m; ++a)
    for (size_t b = a + 1; b < m; ++b) {
      Rat c = coincidence(branches[a], branches[b]);
      if (!is_integer(c)) throw scalar_error("unramify: non-integral coincidence");
      uc[a][b] = uc[b][a] = to_long(num(c));
    }

  EquisType out;
  std::vector<std::vector<size_t>> members(static_cast<size_t>(nclasses));
  for (size_t a = 0; a < m; ++a) members[static_cast<size_t>(cls[a])].push_back(a);
  for (auto& mem : members) {
    long ni = static_cast<long>(mem.size());
    if (n % ni != 0) throw scalar_error("unramify: class size incompatible with n");
    // characteristic exponents: distinct intra-class u-coincidences scaled
    std::vector<long> vals;
    for (size_t a = 0; a < mem.size(); ++a)
      for (size_t b = a + 1; b < mem.size(); ++b) vals.push_back(uc[mem[a]][mem[b]]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    std::vector<long> beta{ni};
    for (long v : vals) {
      Rat bv = rq(v * ni, n);
      if (!is_integer(bv)) throw scalar_error("unramify: non-integral char exponent");
      beta.push_back(to_long(num(bv)));
    }
    out.branches.push_back(branch_type_from_exponents(std::move(beta)));
  }
  size_t rr = out.branches.size();
  out.coinc.assign(rr, std::vector<Rat>(rr, Rat(0)));
  for (size_t i = 0; i < rr; ++i)
    for (size_t j = i + 1; j < rr; ++j) {
      long best = 0;
      for (size_t a : members[i])
        for (size_t b : members[j]) best = std::max(best, uc[a][b]);
      Rat c = rq(best, n);
      out.coinc[i][j] = out.coinc[j][i] = c;
    }
  validate_equis(out);
  return out;
}

}  // namespace polar
