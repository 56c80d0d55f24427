#pragma once

#include <map>
#include <optional>
#include <vector>

#include "polarcurve/germ.hpp"

namespace polar {

// One Puiseux branch y(x) = sum a_s x^(s/ram), stored once; the ram conjugate
// series arise by twisting a_s with powers of a primitive ram-th root of
// unity.
struct PuiseuxBranch {
  long ram = 1;
  std::map<long, Scalar> coeffs;  // s -> a_s
  long trunc_s = -1;              // coefficients trusted for s <= trunc_s; -1: entire
  int multiplicity = 1;           // >1 only for non-reduced germs

  bool known_complete() const { return trunc_s < 0; }
  Rat leading_exponent() const {
    return coeffs.empty() ? Rat(-1) : rq(coeffs.begin()->first, ram);
  }
  long m0() const;  // multiplicity at the origin
  std::string str() const;
};

struct ExpandOptions {
  long max_s = 400;       // hard cap on numerators of series exponents
  long margin_terms = 2;  // extra terms past the structural requirements
  long target_s = 0;      // 0: automatic
};

struct ExpandResult {
  std::vector<PuiseuxBranch> branches;
  Rat shear = Rat(0);  // applied substitution x -> x + shear*y, if any
  std::vector<std::vector<Rat>> coincidence;  // pairwise, from the splitting tree
};

// Newton-Puiseux factorization of a germ vanishing at the origin.
// Throws scalar_error for x=0 components, precision_error when root
// separation cannot be certified, and reports insufficient truncation when
// branches fail to separate under the cap.
ExpandResult puiseux_expand(const BivariateGerm& g, const ExpandOptions& opt = {});

// sup over conjugate pairs of ord_x(y_i - y_j), from the stored series.
Rat coincidence(const PuiseuxBranch& a, const PuiseuxBranch& b);

// Evaluate the germ along the branch parametrization x = t^ram and return the
// t-order of the result (oracle for intersection multiplicities).
long order_along_branch(const BivariateGerm& g, const PuiseuxBranch& b, long t_bound);

// Conjugate twist: coefficients a_s -> a_s * zeta^(s*j) with zeta = e(1/ram).
PuiseuxBranch conjugate_branch(const PuiseuxBranch& b, long j);

// The branch as (x = t^ram, y = series in t) truncated at t_bound.
std::vector<std::pair<long, Scalar>> branch_series_t(const PuiseuxBranch& b, long t_bound);

}  // namespace polar
