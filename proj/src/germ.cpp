#include "polarcurve/germ.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>

namespace polar {

void BivariateGerm::set(long i, long j, Scalar v) {
  if (v.is_exact_zero())
    coeff.erase({i, j});
  else
    coeff[{i, j}] = std::move(v);
}

Scalar BivariateGerm::get(long i, long j) const {
  auto it = coeff.find({i, j});
  return it == coeff.end() ? Scalar() : it->second;
}

void BivariateGerm::cleanup() {
  for (auto it = coeff.begin(); it != coeff.end();)
    it = it->second.is_exact_zero() ? coeff.erase(it) : std::next(it);
}

namespace {
long min_trunc(long a, long b) {
  if (a < 0) return b;
  if (b < 0) return a;
  return std::min(a, b);
}
}  // namespace

BivariateGerm BivariateGerm::operator+(const BivariateGerm& o) const {
  BivariateGerm r = *this;
  r.trunc = min_trunc(trunc, o.trunc);
  for (const auto& [p, v] : o.coeff) {
    auto it = r.coeff.find(p);
    if (it == r.coeff.end())
      r.coeff[p] = v;
    else {
      it->second += v;
      if (it->second.is_exact_zero()) r.coeff.erase(it);
    }
  }
  return r;
}

BivariateGerm BivariateGerm::operator-(const BivariateGerm& o) const {
  BivariateGerm r = *this;
  r.trunc = min_trunc(trunc, o.trunc);
  for (const auto& [p, v] : o.coeff) {
    auto it = r.coeff.find(p);
    if (it == r.coeff.end())
      r.coeff[p] = -v;
    else {
      it->second -= v;
      if (it->second.is_exact_zero()) r.coeff.erase(it);
    }
  }
  return r;
}

BivariateGerm BivariateGerm::operator*(const BivariateGerm& o) const {
  BivariateGerm r;
  // a truncated factor of order m limits products to degree trunc+m'
  long t = -1;
  if (trunc >= 0) t = trunc + std::max(0L, o.order());
  if (o.trunc >= 0) {
    long t2 = o.trunc + std::max(0L, order());
    t = min_trunc(t, t2);
  }
  r.trunc = t;
  for (const auto& [p, v] : coeff)
    for (const auto& [q, w] : o.coeff) {
      long i = p.i + q.i, j = p.j + q.j;
      if (t >= 0 && i + j > t) continue;
      auto it = r.coeff.find({i, j});
      if (it == r.coeff.end())
        r.coeff[{i, j}] = v * w;
      else
        it->second += v * w;
    }
  r.cleanup();
  return r;
}

BivariateGerm BivariateGerm::operator*(const Scalar& s) const {
  BivariateGerm r;
  r.trunc = trunc;
  if (s.is_exact_zero()) return r;
  for (const auto& [p, v] : coeff) r.coeff[p] = v * s;
  r.cleanup();
  return r;
}

BivariateGerm BivariateGerm::dx() const {
  BivariateGerm r;
  r.trunc = trunc < 0 ? -1 : trunc - 1;
  for (const auto& [p, v] : coeff)
    if (p.i > 0) r.coeff[{p.i - 1, p.j}] = v * Scalar(p.i);
  return r;
}

BivariateGerm BivariateGerm::dy() const {
  BivariateGerm r;
  r.trunc = trunc < 0 ? -1 : trunc - 1;
  for (const auto& [p, v] : coeff)
    if (p.j > 0) r.coeff[{p.i, p.j - 1}] = v * Scalar(p.j);
  return r;
}

long BivariateGerm::order() const {
  long m = -1;
  for (const auto& [p, v] : coeff) {
    long d = p.i + p.j;
    if (m < 0 || d < m) m = d;
  }
  return m;
}

long BivariateGerm::max_total_degree() const {
  long m = 0;
  for (const auto& [p, v] : coeff) m = std::max(m, p.i + p.j);
  return m;
}

long BivariateGerm::ydeg() const {
  long m = -1;
  for (const auto& [p, v] : coeff) m = std::max(m, p.j);
  return m;
}

Poly BivariateGerm::coeff_of_x_power(long i) const {
  std::vector<Scalar> cs;
  for (const auto& [p, v] : coeff)
    if (p.i == i) {
      if (static_cast<long>(cs.size()) <= p.j) cs.resize(p.j + 1);
      cs[p.j] = v;
    }
  return Poly(std::move(cs));
}

Poly BivariateGerm::eval_x0() const { return coeff_of_x_power(0); }

Poly BivariateGerm::restrict_y0() const {
  std::vector<Scalar> cs;
  for (const auto& [p, v] : coeff)
    if (p.j == 0) {
      if (static_cast<long>(cs.size()) <= p.i) cs.resize(p.i + 1);
      cs[p.i] = v;
    }
  return Poly(std::move(cs));
}

BivariateGerm BivariateGerm::shift_y(const std::vector<std::pair<long, Scalar>>& s) const {
  // y -> y + sum a_k x^k, expanded with binomials
  BivariateGerm r;
  r.trunc = trunc;
  BivariateGerm shift;  // the added polynomial in x
  for (const auto& [k, a] : s) shift.set(k, 0, a);
  for (const auto& [p, v] : coeff) {
    // (y + s(x))^j
    BivariateGerm pw;
    pw.set(0, 0, Scalar(1));
    BivariateGerm ypluss = shift;
    ypluss.set(0, 1, Scalar(1));
    for (long t = 0; t < p.j; ++t) pw = pw * ypluss;
    for (const auto& [q, w] : pw.coeff) {
      long i = p.i + q.i, j = q.j;
      if (r.trunc >= 0 && i + j > r.trunc) continue;
      auto it = r.coeff.find({i, j});
      if (it == r.coeff.end())
        r.coeff[{i, j}] = v * w;
      else
        it->second += v * w;
    }
  }
  r.cleanup();
  return r;
}

BivariateGerm BivariateGerm::ramify_x(long q) const {
  BivariateGerm r;
  r.trunc = trunc < 0 ? -1 : trunc * q;
  for (const auto& [p, v] : coeff) r.coeff[{p.i * q, p.j}] = v;
  return r;
}

BivariateGerm BivariateGerm::substitute_y_xp(long p) const {
  BivariateGerm r;
  r.trunc = trunc < 0 ? -1 : trunc * (p + 1);
  for (const auto& [q, v] : coeff) r.coeff[{q.i + p * q.j, q.j}] = v;
  return r;
}

BivariateGerm BivariateGerm::divide_x_power(long k) const {
  BivariateGerm r;
  r.trunc = trunc < 0 ? -1 : trunc - k;
  for (const auto& [p, v] : coeff) {
    if (p.i < k) throw scalar_error("germ not divisible by x^" + std::to_string(k));
    r.coeff[{p.i - k, p.j}] = v;
  }
  return r;
}

BivariateGerm BivariateGerm::divide_y_power(long k) const {
  BivariateGerm r;
  r.trunc = trunc < 0 ? -1 : trunc - k;
  for (const auto& [p, v] : coeff) {
    if (p.j < k) throw scalar_error("germ not divisible by y^" + std::to_string(k));
    r.coeff[{p.i, p.j - k}] = v;
  }
  return r;
}

long BivariateGerm::x_divisibility() const {
  long m = -1;
  for (const auto& [p, v] : coeff) m = (m < 0) ? p.i : std::min(m, p.i);
  return std::max(0L, m);
}

long BivariateGerm::y_divisibility() const {
  long m = -1;
  for (const auto& [p, v] : coeff) m = (m < 0) ? p.j : std::min(m, p.j);
  return std::max(0L, m);
}

std::string BivariateGerm::str() const {
  if (coeff.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [p, v] : coeff) {
    if (!first) os << " + ";
    first = false;
    os << "(" << v.str() << ")";
    if (p.i) os << "*x^" << p.i;
    if (p.j) os << "*y^" << p.j;
  }
  if (trunc >= 0) os << " + O(deg " << trunc + 1 << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// Parsing.
// ---------------------------------------------------------------------------

namespace {

struct GermParser {
  const std::string& s;
  size_t pos = 0;
  bool tower;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char ch) {
    skip();
    if (pos < s.size() && s[pos] == ch) {
      ++pos;
      return true;
    }
    return false;
  }

  BivariateGerm expr() {
    BivariateGerm v = term();
    for (;;) {
      if (eat('+'))
        v = v + term();
      else if (eat('-'))
        v = v - term();
      else
        return v;
    }
  }

  BivariateGerm term() {
    BivariateGerm v = factor();
    for (;;) {
      if (eat('*'))
        v = v * factor();
      else if (eat('/')) {
        BivariateGerm d = factor();
        if (d.coeff.size() != 1 || !d.coeff.count({0, 0}))
          throw scalar_error("germ division only by constants");
        v = v * (Scalar(1) / d.coeff.at({0, 0}));
      } else {
        // implicit products like "2x" are not accepted; keep the grammar strict
        return v;
      }
    }
  }

  BivariateGerm factor() {
    BivariateGerm v = base();
    if (eat('^')) {
      std::string digits;
      skip();
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
        digits += s[pos++];
      if (digits.empty()) throw scalar_error("expected exponent");
      long k = std::stol(digits);
      BivariateGerm r;
      r.set(0, 0, Scalar(1));
      for (long t = 0; t < k; ++t) r = r * v;
      return r;
    }
    return v;
  }

  BivariateGerm base() {
    skip();
    if (eat('-')) {
      BivariateGerm v = factor();
      return v * Scalar(-1);
    }
    if (eat('(')) {
      BivariateGerm v = expr();
      if (!eat(')')) throw scalar_error("expected ')'");
      return v;
    }
    BivariateGerm v;
    if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      std::string digits;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
        digits += s[pos++];
      v.set(0, 0, Scalar(parse_rat(digits)));
      return v;
    }
    if (s.compare(pos, 4, "sqrt") == 0) {
      pos += 4;
      if (!eat('(')) throw scalar_error("expected '(' after sqrt");
      BivariateGerm arg = expr();
      if (!eat(')')) throw scalar_error("expected ')'");
      if (arg.coeff.size() > 1 || (arg.coeff.size() == 1 && !arg.coeff.count({0, 0})))
        throw scalar_error("sqrt of a non-constant germ");
      Scalar a = arg.coeff.empty() ? Scalar() : arg.coeff.at({0, 0});
      v.set(0, 0, scalar_sqrt(a, tower));
      return v;
    }
    if (pos < s.size() && s[pos] == 'x') {
      ++pos;
      v.set(1, 0, Scalar(1));
      return v;
    }
    if (pos < s.size() && s[pos] == 'y') {
      ++pos;
      v.set(0, 1, Scalar(1));
      return v;
    }
    if (pos < s.size() && s[pos] == 'i') {
      ++pos;
      v.set(0, 0, Scalar::i());
      return v;
    }
    throw scalar_error("germ parse error at position " + std::to_string(pos) + " in '" + s +
                       "'");
  }
};

}  // namespace

BivariateGerm parse_germ(const std::string& text, bool tower) {
  GermParser p{text, 0, tower};
  BivariateGerm g = p.expr();
  p.skip();
  if (p.pos != text.size()) throw scalar_error("trailing input in germ: " + text);
  return g;
}

// ---------------------------------------------------------------------------
// Newton polygon.
// ---------------------------------------------------------------------------

NewtonPolygon newton_polygon_of_points(std::vector<LatticePoint> pts) {
  NewtonPolygon np;
  if (pts.empty()) return np;
  // keep, per j, the minimal i
  std::map<long, long> min_i;
  for (const auto& p : pts) {
    auto it = min_i.find(p.j);
    if (it == min_i.end() || p.i < it->second) min_i[p.j] = p.i;
  }
  // candidates sorted by decreasing j; keep only staircase points (strict
  // minima of i when scanning upward in j)
  std::vector<LatticePoint> cand;
  for (auto it = min_i.rbegin(); it != min_i.rend(); ++it) cand.push_back({it->second, it->first});
  std::vector<LatticePoint> stair;
  long suffix_min = std::numeric_limits<long>::max();
  for (auto it = cand.rbegin(); it != cand.rend(); ++it) {  // increasing j
    if (it->i < suffix_min) {
      suffix_min = it->i;
      stair.push_back(*it);
    }
  }
  std::reverse(stair.begin(), stair.end());  // decreasing j, increasing i
  // convex hull over the staircase (Graham scan, keep convex-down chain)
  std::vector<LatticePoint> hull;
  auto cross = [](const LatticePoint& a, const LatticePoint& b, const LatticePoint& c) {
    // cross product of (b-a) x (c-a)
    return (b.i - a.i) * (c.j - a.j) - (b.j - a.j) * (c.i - a.i);
  };
  for (const auto& p : stair) {
    while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= 0)
      hull.pop_back();
    hull.push_back(p);
  }
  np.vertices = hull;
  for (size_t k = 0; k + 1 < hull.size(); ++k) {
    PolygonSide s;
    s.hi = hull[k];
    s.lo = hull[k + 1];
    s.incl = Rat(s.lo.i - s.hi.i, s.hi.j - s.lo.j);
    s.incl.canonicalize();
    s.line_k = Rat(s.hi.i) + s.incl * Rat(s.hi.j);
    s.line_k.canonicalize();
    np.sides.push_back(std::move(s));
  }
  return np;
}

NewtonPolygon newton_polygon(const BivariateGerm& g) {
  if (g.is_zero()) throw scalar_error("newton polygon of zero germ");
  std::vector<LatticePoint> nonzero, undecided;
  for (const auto& [p, v] : g.coeff) {
    Sign s = certify_sign(v);
    if (s == Sign::Zero) continue;
    if (s == Sign::NonZero)
      nonzero.push_back(p);
    else
      undecided.push_back(p);
  }
  if (nonzero.empty()) throw precision_error("all germ coefficients undecided");
  NewtonPolygon np = newton_polygon_of_points(nonzero);
  // a coefficient of undecided sign is harmless only strictly inside the
  // polygon region; on a side line it would pollute the side polynomial, and
  // outside it could change the hull
  for (const auto& p : undecided) {
    for (const auto& s : np.sides) {
      Rat lhs = Rat(p.i) + s.incl * Rat(p.j);
      if (lhs <= s.line_k)
        throw precision_error("undecided coefficient on or below the newton polygon");
    }
    if (!np.vertices.empty()) {
      if (p.j >= np.vertices.front().j && p.i < np.vertices.front().i)
        throw precision_error("undecided coefficient left of the newton polygon");
      if (p.i >= np.vertices.back().i && p.j < np.vertices.back().j)
        throw precision_error("undecided coefficient below the newton polygon");
    }
  }
  return np;
}

}  // namespace polar
