#pragma once

#include <utility>
#include <vector>

#include "polarcurve/scalar.hpp"

namespace polar {

// Dense univariate polynomial over Scalar; c[k] is the coefficient of T^k.
// Exact-zero coefficients above the true degree are trimmed eagerly; a ball
// coefficient is only accepted as the leading one once certified nonzero.
class Poly {
 public:
  std::vector<Scalar> c;

  Poly() = default;
  explicit Poly(std::vector<Scalar> cs) : c(std::move(cs)) { trim(); }
  static Poly constant(Scalar s) { return Poly({std::move(s)}); }
  static Poly monomial(Scalar s, size_t k);

  void trim();
  bool is_zero() const { return c.empty(); }
  long degree() const { return static_cast<long>(c.size()) - 1; }  // -1 for zero
  const Scalar& lead() const { return c.back(); }

  Scalar eval(const Scalar& x) const;
  Poly derivative() const;

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly operator*(const Scalar& s) const;
  Poly shifted(size_t k) const;  // * T^k

  bool all_exact() const;
};

// quotient/remainder; divisor lead must be certified nonzero
std::pair<Poly, Poly> divrem(const Poly& f, const Poly& g);

// monic gcd via Euclid (exact coefficients)
Poly poly_gcd(Poly f, Poly g);

// Yun squarefree decomposition: returns {(g, m)} with f ~ prod g^m, g squarefree.
std::vector<std::pair<Poly, int>> squarefree_decomposition(const Poly& f);

// res(f, g) via the Euclidean remainder sequence.
Scalar resultant(const Poly& f, const Poly& g);
Scalar discriminant(const Poly& f);

struct RootCluster {
  Scalar value;
  int multiplicity = 1;
};

// All roots with multiplicities, certified: exact where representable,
// otherwise ball enclosures with disjoint certified disks.  Throws
// precision_error when separation cannot be certified.
std::vector<RootCluster> certified_roots(const Poly& f);

}  // namespace polar
