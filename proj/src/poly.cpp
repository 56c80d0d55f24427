#include "polarcurve/poly.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

namespace polar {

Scalar make_root_scalar(const std::vector<Scalar>& coeffs, double snap_re, double snap_im,
                        double snap_rad, mpfr_prec_t prec);

Poly Poly::monomial(Scalar s, size_t k) {
  Poly p;
  p.c.assign(k + 1, Scalar());
  p.c[k] = std::move(s);
  p.trim();
  return p;
}

void Poly::trim() {
  while (!c.empty() && c.back().is_exact_zero()) c.pop_back();
}

Scalar Poly::eval(const Scalar& x) const {
  Scalar acc;
  for (size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

Poly Poly::derivative() const {
  Poly d;
  for (size_t k = 1; k < c.size(); ++k) d.c.push_back(c[k] * Scalar(static_cast<long>(k)));
  d.trim();
  return d;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r;
  r.c.resize(std::max(c.size(), o.c.size()));
  for (size_t k = 0; k < r.c.size(); ++k) {
    if (k < c.size() && k < o.c.size())
      r.c[k] = c[k] + o.c[k];
    else if (k < c.size())
      r.c[k] = c[k];
    else
      r.c[k] = o.c[k];
  }
  r.trim();
  return r;
}

Poly Poly::operator-(const Poly& o) const {
  Poly r;
  r.c.resize(std::max(c.size(), o.c.size()));
  for (size_t k = 0; k < r.c.size(); ++k) {
    if (k < c.size() && k < o.c.size())
      r.c[k] = c[k] - o.c[k];
    else if (k < c.size())
      r.c[k] = c[k];
    else
      r.c[k] = -o.c[k];
  }
  r.trim();
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  if (is_zero() || o.is_zero()) return {};
  Poly r;
  r.c.assign(c.size() + o.c.size() - 1, Scalar());
  for (size_t i = 0; i < c.size(); ++i) {
    if (c[i].is_exact_zero()) continue;
    for (size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
  }
  r.trim();
  return r;
}

Poly Poly::operator*(const Scalar& s) const {
  Poly r;
  for (const auto& x : c) r.c.push_back(x * s);
  r.trim();
  return r;
}

Poly Poly::shifted(size_t k) const {
  if (is_zero()) return {};
  Poly r;
  r.c.assign(k, Scalar());
  r.c.insert(r.c.end(), c.begin(), c.end());
  return r;
}

bool Poly::all_exact() const {
  return std::all_of(c.begin(), c.end(), [](const Scalar& s) { return s.is_exact(); });
}

std::pair<Poly, Poly> divrem(const Poly& f, const Poly& g) {
  if (g.is_zero()) throw scalar_error("division by zero polynomial");
  certified_nonzero(g.lead());
  Poly r = f, q;
  long dg = g.degree();
  if (f.degree() >= dg) q.c.assign(f.degree() - dg + 1, Scalar());
  while (!r.is_zero() && r.degree() >= dg) {
    long k = r.degree() - dg;
    Scalar t = r.lead() / g.lead();
    q.c[k] = t;
    for (long j = 0; j <= dg; ++j) r.c[k + j] -= t * g.c[j];
    r.c.pop_back();  // leading term cancels exactly
    r.trim();
  }
  q.trim();
  return {q, r};
}

Poly poly_gcd(Poly f, Poly g) {
  f.trim();
  g.trim();
  while (!g.is_zero()) {
    auto [q, r] = divrem(f, g);
    f = std::move(g);
    g = std::move(r);
  }
  if (f.is_zero()) return f;
  Scalar inv = Scalar(1) / f.lead();
  return f * inv;
}

std::vector<std::pair<Poly, int>> squarefree_decomposition(const Poly& f) {
  std::vector<std::pair<Poly, int>> out;
  Poly a = f;
  if (a.degree() <= 0) return out;
  Poly d = a.derivative();
  Poly g = poly_gcd(a, d);
  if (g.degree() == 0) {
    out.emplace_back(a * (Scalar(1) / a.lead()), 1);
    return out;
  }
  Poly w = divrem(a, g).first;
  Poly y = divrem(d, g).first;
  Poly z = y - w.derivative();
  int m = 1;
  while (!w.is_zero() && w.degree() > 0) {
    Poly gg = poly_gcd(w, z);
    if (gg.degree() > 0) out.emplace_back(gg, m);
    w = divrem(w, gg).first;
    y = divrem(z, gg).first;
    z = y - w.derivative();
    ++m;
  }
  return out;
}

Scalar resultant(const Poly& f, const Poly& g) {
  if (f.is_zero() || g.is_zero()) return Scalar();
  Poly a = f, b = g;
  Scalar acc(1);
  bool negate = false;
  while (b.degree() > 0) {
    auto [q, r] = divrem(a, b);
    long da = a.degree(), db = b.degree(), dr = r.is_zero() ? -1 : r.degree();
    if (dr < 0) return Scalar();  // common factor
    acc = acc * b.lead().pow(da - dr);
    if ((da % 2) && (db % 2)) negate = !negate;
    a = std::move(b);
    b = std::move(r);
  }
  // b constant
  acc = acc * b.c[0].pow(a.degree());
  return negate ? -acc : acc;
}

Scalar discriminant(const Poly& f) {
  long n = f.degree();
  if (n <= 0) return Scalar();
  Scalar res = resultant(f, f.derivative());
  Scalar d = res / f.lead();
  long s = (n * (n - 1)) / 2;
  return (s % 2) ? -d : d;
}

// ---------------------------------------------------------------------------
// Root finding.
// ---------------------------------------------------------------------------

namespace {

using cplx = std::complex<double>;

std::vector<cplx> durand_kerner(const std::vector<cplx>& coeff) {
  size_t n = coeff.size() - 1;
  std::vector<cplx> a(coeff);
  cplx lead = a[n];
  for (auto& x : a) x /= lead;
  double radius = 0;
  for (size_t k = 0; k < n; ++k) radius = std::max(radius, std::pow(std::abs(a[k]), 1.0 / (n - k)));
  radius = 2 * radius + 1;
  std::vector<cplx> z(n);
  for (size_t k = 0; k < n; ++k) {
    double th = 2 * M_PI * k / n + 0.4;
    z[k] = radius * cplx(std::cos(th), std::sin(th));
  }
  auto peval = [&](cplx x) {
    cplx v = a[n];
    for (size_t k = n; k-- > 0;) v = v * x + a[k];
    return v;
  };
  for (int iter = 0; iter < 500; ++iter) {
    double worst = 0;
    for (size_t k = 0; k < n; ++k) {
      cplx d(1, 0);
      for (size_t j = 0; j < n; ++j)
        if (j != k) d *= (z[k] - z[j]);
      cplx w = peval(z[k]) / d;
      z[k] -= w;
      worst = std::max(worst, std::abs(w));
    }
    if (worst < 1e-14 * (1 + radius)) break;
  }
  return z;
}

std::vector<cplx> approx_coeffs(const Poly& f) {
  std::vector<cplx> out;
  for (const auto& s : f.c) out.emplace_back(s.approx_re(), s.approx_im());
  return out;
}

// Certified simple roots of a (conceptually squarefree) polynomial.
std::vector<Scalar> weierstrass_roots(const Poly& f) {
  size_t n = static_cast<size_t>(f.degree());
  auto z = durand_kerner(approx_coeffs(f));
  // minimal pairwise gap for isolation snapshots
  double gap = 1e300;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) gap = std::min(gap, std::abs(z[i] - z[j]));
  if (n == 1) gap = 1.0 + std::abs(z[0]);
  std::vector<Scalar> roots;
  for (size_t k = 0; k < n; ++k)
    roots.push_back(make_root_scalar(f.c, z[k].real(), z[k].imag(), gap / 2,
                                     scalar_options().default_prec));
  // certify disjointness, escalate if needed
  mpfr_prec_t p = scalar_options().default_prec;
  const mpfr_prec_t cap = scalar_options().max_prec;
  for (;;) {
    bool ok = true;
    for (size_t i = 0; i < n && ok; ++i)
      for (size_t j = i + 1; j < n && ok; ++j) {
        if (certify_sign(roots[i] - roots[j]) != Sign::NonZero) ok = false;
      }
    if (ok) return roots;
    if (p >= cap)
      throw precision_error("cannot certify root separation at precision cap");
    p = std::min(cap, p * 2);
    for (auto& r : roots) r = escalate(r, p);
  }
}

std::optional<std::vector<Scalar>> exact_roots_attempt(const Poly& f) {
  long n = f.degree();
  if (n == 1) {
    return std::vector<Scalar>{-f.c[0] / f.c[1]};
  }
  if (n == 2) {
    // (-b +- sqrt(b^2-4ac)) / 2a, exact only if the sqrt is
    Scalar disc = f.c[1] * f.c[1] - Scalar(4) * f.c[2] * f.c[0];
    if (!disc.is_exact()) return std::nullopt;
    Scalar s = scalar_sqrt(disc, true);
    if (!s.is_exact()) return std::nullopt;
    Scalar twoa = Scalar(2) * f.c[2];
    return std::vector<Scalar>{(-f.c[1] + s) / twoa, (-f.c[1] - s) / twoa};
  }
  return std::nullopt;
}

}  // namespace

std::vector<RootCluster> certified_roots(const Poly& f) {
  Poly g = f;
  g.trim();
  if (g.is_zero()) throw scalar_error("roots of the zero polynomial");
  // certified degree: strip undecidable-lead situations by certifying nonzero
  while (!g.c.empty() && certify_sign(g.c.back()) == Sign::Zero) g.c.pop_back();
  if (!g.c.empty()) certified_nonzero(g.c.back());
  std::vector<RootCluster> out;
  if (g.degree() <= 0) return out;
  // factor out T^k for an exact-zero tail
  int k0 = 0;
  while (static_cast<size_t>(k0) < g.c.size() && g.c[k0].is_exact_zero()) ++k0;
  if (k0 > 0) {
    out.push_back({Scalar(), k0});
    g.c.erase(g.c.begin(), g.c.begin() + k0);
  }
  if (g.degree() <= 0) return out;

  if (g.all_exact()) {
    auto sq = squarefree_decomposition(g);
    for (auto& [fac, mult] : sq) {
      if (auto ex = exact_roots_attempt(fac)) {
        for (auto& r : *ex) out.push_back({std::move(r), mult});
      } else {
        for (auto& r : weierstrass_roots(fac)) out.push_back({std::move(r), mult});
      }
    }
    return out;
  }
  // inexact coefficients: only certifiably simple roots are recoverable
  for (auto& r : weierstrass_roots(g)) out.push_back({std::move(r), 1});
  return out;
}

}  // namespace polar
