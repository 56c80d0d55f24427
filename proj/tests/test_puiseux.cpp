#include "doctest.h"
#include "polarcurve/equis.hpp"
#include "polarcurve/puiseux.hpp"

using namespace polar;

TEST_CASE("binomial cusp expansion") {
  auto r = puiseux_expand(parse_germ("y^2-x^3"));
  REQUIRE(r.branches.size() == 1);
  const auto& b = r.branches[0];
  CHECK(b.ram == 2);
  CHECK(b.leading_exponent() == Rat(3, 2));
  auto t = branch_type(b);
  CHECK(t.char_exponents == std::vector<long>{2, 3});
  CHECK(t.puiseux_pairs == std::vector<std::pair<long, long>>{{3, 2}});
}

TEST_CASE("factored smooth product") {
  auto r = puiseux_expand(parse_germ("y*(y-x^2)*(y+x^2)"));
  REQUIRE(r.branches.size() == 3);
  for (const auto& b : r.branches) CHECK(branch_type(b).smooth());
  // coincidences all 2
  for (size_t i = 0; i < 3; ++i)
    for (size_t j = i + 1; j < 3; ++j) CHECK(r.coincidence[i][j] == Rat(2));
}

TEST_CASE("paper remark germ with sqrt(-3)") {
  auto r = puiseux_expand(parse_germ("y*(y-x^2)*(2*y-(1+sqrt(-3))*x^2)"));
  REQUIRE(r.branches.size() == 3);
  std::vector<Scalar> leads;
  int zero_branches = 0;
  for (const auto& b : r.branches) {
    CHECK(branch_type(b).smooth());
    if (b.coeffs.empty())
      ++zero_branches;
    else
      leads.push_back(b.coeffs.begin()->second);
  }
  CHECK(zero_branches == 1);
  REQUIRE(leads.size() == 2);
  // leading coefficients 1 and (1+sqrt(-3))/2 in some order
  Scalar c = parse_scalar("(1+sqrt(-3))/2", true);
  bool saw1 = false, sawc = false;
  for (const auto& l : leads) {
    if (certify_sign(l - Scalar(1)) == Sign::Zero) saw1 = true;
    if (certify_sign(l - c) == Sign::Zero) sawc = true;
  }
  CHECK(saw1);
  CHECK(sawc);
}

TEST_CASE("equisingularity type with validation") {
  auto r = puiseux_expand(parse_germ("(y^2-x^5)*(y^2-4*x^5)"));
  auto e = equisingularity_type(r);
  REQUIRE(e.size() == 2);
  CHECK(e.branches[0].char_exponents == std::vector<long>{2, 5});
  CHECK(e.coinc[0][1] == Rat(5, 2));
}

TEST_CASE("ramified pullback of the cusp") {
  // y^2 - x^6 factors into two smooth branches with coincidence 3
  auto r = puiseux_expand(parse_germ("y^2-x^6"));
  REQUIRE(r.branches.size() == 2);
  CHECK(r.coincidence[0][1] == Rat(3));
}

TEST_CASE("standalone coincidence via conjugate sup") {
  // branches of y^2-x^3: x^(3/2) and its conjugate -x^(3/2): coincidence 3/2
  PuiseuxBranch b;
  b.ram = 2;
  b.coeffs[3] = Scalar(1);
  b.trunc_s = 9;
  PuiseuxBranch c = conjugate_branch(b, 1);
  CHECK(coincidence(b, c) == Rat(3, 2));
  // y = x^2 vs y = -x^2
  PuiseuxBranch p, q;
  p.ram = q.ram = 1;
  p.coeffs[2] = Scalar(1);
  q.coeffs[2] = Scalar(-1);
  p.trunc_s = q.trunc_s = 5;
  CHECK(coincidence(p, q) == Rat(2));
  // branch of y^2-x^5 vs branch of y^2-4x^5
  PuiseuxBranch u, v;
  u.ram = v.ram = 2;
  u.coeffs[5] = Scalar(1);
  v.coeffs[5] = Scalar(2);
  u.trunc_s = v.trunc_s = 12;
  CHECK(coincidence(u, v) == Rat(5, 2));
}

TEST_CASE("semigroup generators") {
  CHECK(semigroup_generators(branch_type_from_exponents({2, 3})) ==
        std::vector<long>{2, 3});
  CHECK(semigroup_generators(branch_type_from_exponents({4, 6, 7})) ==
        std::vector<long>{4, 6, 13});
  CHECK(semigroup_generators(branch_type_from_exponents({5, 11})) ==
        std::vector<long>{5, 11});
}

TEST_CASE("intersection multiplicity via Zariski/Merle") {
  auto cusp = branch_type_from_exponents({2, 3});
  CHECK(intersection_multiplicity(cusp, 1, Rat(1)) == 2);
  CHECK(intersection_multiplicity(cusp, 2, Rat(3, 2)) == 6);
  CHECK(intersection_multiplicity(cusp, 1, Rat(3, 2)) == 3);
}

TEST_CASE("intersection multiplicity agrees with the evaluation oracle") {
  // (gamma, delta)_0 = ord_t gamma(delta_param) for explicit pairs
  struct Pair {
    const char* f;
    std::vector<long> beta;
    PuiseuxBranch delta;
  };
  // gamma = cusp y^2-x^3, delta = y - x^2 (smooth, contact 3/2 region)
  auto g = parse_germ("y^2-x^3");
  PuiseuxBranch d;
  d.ram = 1;
  d.coeffs[2] = Scalar(1);
  d.trunc_s = 12;
  long ord = order_along_branch(g, d, 40);
  auto t = branch_type_from_exponents({2, 3});
  // contact of delta with the cusp: min(3/2, 2) = 3/2
  CHECK(ord == intersection_multiplicity(t, 1, Rat(3, 2)));

  // delta transversal smooth: y - x
  PuiseuxBranch dt;
  dt.ram = 1;
  dt.coeffs[1] = Scalar(1);
  dt.trunc_s = 12;
  CHECK(order_along_branch(g, dt, 40) == intersection_multiplicity(t, 1, Rat(1)));
}

TEST_CASE("expansion of tangent-cone-degenerate germ shears") {
  // x^2 - y^3: x = 0 is tangent; the engine shears and still resolves
  auto r = puiseux_expand(parse_germ("x^2-y^3"));
  REQUIRE(r.branches.size() >= 1);
  CHECK(r.shear != Rat(0));
  auto e = equisingularity_type(r);
  // equisingular to a (2,3) cusp
  bool found = false;
  for (auto& b : e.branches)
    if (b.char_exponents == std::vector<long>{2, 3}) found = true;
  CHECK(found);
}

TEST_CASE("non-reduced factor terminates with multiplicity") {
  auto r = puiseux_expand(parse_germ("(y-x^2)^2*(y+x)"));
  REQUIRE(r.branches.size() == 2);
  bool saw_double = false;
  for (const auto& b : r.branches)
    if (b.multiplicity == 2) saw_double = true;
  CHECK(saw_double);
}

TEST_CASE("x component is rejected") {
  CHECK_THROWS_AS(puiseux_expand(parse_germ("x*(y-x)")), scalar_error);
}
