#pragma once

#include <map>
#include <string>
#include <vector>

#include "polarcurve/poly.hpp"
#include "polarcurve/rational.hpp"
#include "polarcurve/scalar.hpp"

namespace polar {

struct LatticePoint {
  long i = 0, j = 0;
  auto operator<=>(const LatticePoint&) const = default;
};

// Germ of an analytic function as a truncated power series in x, y.
// trunc < 0 means the germ is an exact polynomial; otherwise coefficients of
// total degree > trunc are unknown.
class BivariateGerm {
 public:
  std::map<LatticePoint, Scalar> coeff;
  long trunc = -1;

  bool is_zero() const { return coeff.empty(); }

  void set(long i, long j, Scalar v);
  Scalar get(long i, long j) const;
  void cleanup();  // drop exact zeros

  BivariateGerm operator+(const BivariateGerm& o) const;
  BivariateGerm operator-(const BivariateGerm& o) const;
  BivariateGerm operator*(const BivariateGerm& o) const;
  BivariateGerm operator*(const Scalar& s) const;

  BivariateGerm dx() const;
  BivariateGerm dy() const;

  // order of vanishing at the origin (min total degree); -1 if zero
  long order() const;
  long max_total_degree() const;

  // y-degree and coefficient extraction
  long ydeg() const;
  Poly coeff_of_x_power(long i) const;  // polynomial in y
  Poly eval_x0() const;                 // f(0, y) as polynomial in y
  Poly restrict_y0() const;             // f(x, 0) as polynomial in x

  // f(x, y + s(x)) for a polynomial shift s
  BivariateGerm shift_y(const std::vector<std::pair<long, Scalar>>& s) const;
  // f(x^q, y)
  BivariateGerm ramify_x(long q) const;
  // f(x, x^p * y) with no division
  BivariateGerm substitute_y_xp(long p) const;
  // divide by x^k (throws if not divisible)
  BivariateGerm divide_x_power(long k) const;
  // divide by y^k
  BivariateGerm divide_y_power(long k) const;
  long x_divisibility() const;
  long y_divisibility() const;

  std::string str() const;
};

// Parse a polynomial expression in x and y over scalar expressions,
// e.g. "y*(y-x^2)*(2*y-(1+sqrt(-3))*x^2)".
BivariateGerm parse_germ(const std::string& text, bool tower = true);

struct PolygonSide {
  Rat incl;       // mu: the side lies on i + mu*j = k
  Rat line_k;     // k
  LatticePoint hi, lo;  // endpoints: hi has larger j
};

struct NewtonPolygon {
  std::vector<LatticePoint> vertices;  // j strictly decreasing, i strictly increasing
  std::vector<PolygonSide> sides;      // inclinations strictly increasing
  long height() const { return vertices.empty() ? 0 : vertices.front().j; }
  long width() const { return vertices.empty() ? 0 : vertices.back().i; }
};

NewtonPolygon newton_polygon_of_points(std::vector<LatticePoint> pts);
NewtonPolygon newton_polygon(const BivariateGerm& g);

}  // namespace polar
