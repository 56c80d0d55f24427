#include "doctest.h"
#include "polarcurve/ramify.hpp"
#include "polarcurve/adjoint.hpp"

using namespace polar;

namespace {

EquisType one_branch(std::vector<long> beta) {
  EquisType e;
  e.branches.push_back(branch_type_from_exponents(std::move(beta)));
  e.coinc.assign(1, std::vector<Rat>(1, Rat(0)));
  return e;
}

}  // namespace

TEST_CASE("ramified cusp, n=2: chain with two arrows at v=3") {
  auto rg = ramify_graph(one_branch({2, 3}), 2);
  // two smooth branches with coincidence 3
  REQUIRE(rg.equis.size() == 2);
  CHECK(rg.equis.branches[0].smooth());
  CHECK(rg.equis.coinc[0][1] == Rat(3));
  const DualGraph& g = rg.graph;
  REQUIRE(g.vertices.size() == 3);
  // chain v = 1, 2, 3; both arrows at v=3
  std::vector<Rat> vs;
  for (const auto& v : g.vertices) vs.push_back(v.contact);
  std::sort(vs.begin(), vs.end());
  CHECK(vs == std::vector<Rat>{Rat(1), Rat(2), Rat(3)});
  int top = -1;
  for (const auto& v : g.vertices)
    if (v.contact == Rat(3)) top = v.id;
  CHECK(g.vertices[top].arrows.size() == 2);
  CHECK(g.vertices[top].branching == 2);  // b = (b_E - 1) n_E = 2
  CHECK(g.dead_arcs.empty());
  // association: E1 (v=1) -> v=2 vertex; E3 (v=3/2) -> v=3 vertex
  DualGraph gc = build_dual_graph(one_branch({2, 3}));
  int e3 = -1;
  for (const auto& v : gc.vertices)
    if (v.contact == Rat(3, 2)) e3 = v.id;
  REQUIRE(rg.assoc[e3].size() == 1);
  CHECK(g.vertices[rg.assoc[e3][0]].contact == Rat(3));
}

TEST_CASE("ramified (4,6,7), n=4: fork into two vertices with two arrows each") {
  auto rg = ramify_graph(one_branch({4, 6, 7}), 4);
  REQUIRE(rg.equis.size() == 4);
  const DualGraph& g = rg.graph;
  // paper figure: chain v=1..6 then two v=7 vertices, two arrows each
  REQUIRE(g.vertices.size() == 8);
  int sevens = 0;
  for (const auto& v : g.vertices) {
    if (v.contact == Rat(7)) {
      ++sevens;
      CHECK(v.arrows.size() == 2);
      CHECK(v.branching == 2);
    }
  }
  CHECK(sevens == 2);
  int six = -1;
  for (const auto& v : g.vertices)
    if (v.contact == Rat(6)) six = v.id;
  REQUIRE(six >= 0);
  CHECK(g.vertices[six].children.size() == 2);
  // association: E5 (v=7/4) has two associated vertices, E3 (v=3/2) has one
  DualGraph gc = build_dual_graph(one_branch({4, 6, 7}));
  int e3 = -1, e5 = -1;
  for (const auto& v : gc.vertices) {
    if (v.contact == Rat(3, 2)) e3 = v.id;
    if (v.contact == Rat(7, 4)) e5 = v.id;
  }
  CHECK(rg.assoc[e3].size() == 1);
  CHECK(rg.assoc[e5].size() == 2);
}

TEST_CASE("identity ramification keeps the graph") {
  EquisType e;
  e.branches.assign(3, branch_type_from_exponents({1}));
  e.coinc.assign(3, std::vector<Rat>(3, Rat(2)));
  for (int i = 0; i < 3; ++i) e.coinc[i][i] = Rat(0);
  auto rg = ramify_graph(e, 1);
  CHECK(graphs_isomorphic(rg.graph, build_dual_graph(e)));
}

TEST_CASE("b_E transformation table") {
  // contact divisor: b unchanged; Puiseux in dead arc: (b-1)n; else (b-1)n+1
  // (y^2-x^5)(y^2-4x^5): bifurcation at v=5/2 in a dead arc, b=3, n=2
  EquisType e;
  e.branches.push_back(branch_type_from_exponents({2, 5}));
  e.branches.push_back(branch_type_from_exponents({2, 5}));
  e.coinc.assign(2, std::vector<Rat>(2, Rat(0)));
  e.coinc[0][1] = e.coinc[1][0] = Rat(5, 2);
  DualGraph gc = build_dual_graph(e);
  int bif = -1;
  for (const auto& v : gc.vertices)
    if (v.contact == Rat(5, 2)) bif = v.id;
  REQUIRE(gc.vertices[bif].branching == 3);
  auto rg = ramify_graph(e, 2);
  REQUIRE(rg.assoc[bif].size() == 1);  // n_ = 1
  const auto& vt = rg.graph.vertices[rg.assoc[bif][0]];
  CHECK(vt.branching == (3 - 1) * 2);  // dead-arc case
}

TEST_CASE("unramify inverts explicit ramification") {
  // v -+ u^3 = branches of the ramified cusp
  PuiseuxBranch b1, b2;
  b1.ram = 1;
  b1.coeffs[3] = Scalar(1);
  b2.ram = 1;
  b2.coeffs[3] = Scalar(-1);
  EquisType e = unramify_equising({b1, b2}, 2);
  REQUIRE(e.size() == 1);
  CHECK(e.branches[0].char_exponents == std::vector<long>{2, 3});

  // one smooth branch, n=1: unchanged
  PuiseuxBranch s;
  s.ram = 1;
  s.coeffs[1] = Scalar(2);
  s.trunc_s = 6;
  EquisType e2 = unramify_equising({s}, 1);
  CHECK(e2.branches[0].smooth());
}

TEST_CASE("unramify four branches of (y^2-x^5)(y^2-4x^5) under n=2") {
  // y = +-x^(5/2), +-2x^(5/2) -> v = +-u^5, +-2u^5
  std::vector<PuiseuxBranch> bs(4);
  std::vector<Scalar> lead{Scalar(1), Scalar(-1), Scalar(2), Scalar(-2)};
  for (int k = 0; k < 4; ++k) {
    bs[k].ram = 1;
    bs[k].coeffs[5] = lead[k];
  }
  EquisType e = unramify_equising(bs, 2);
  REQUIRE(e.size() == 2);
  CHECK(e.branches[0].char_exponents == std::vector<long>{2, 5});
  CHECK(e.branches[1].char_exponents == std::vector<long>{2, 5});
  CHECK(e.coinc[0][1] == Rat(5, 2));
}

TEST_CASE("ramify then build equals build of ramified series (cusp catalog)") {
  std::vector<std::vector<long>> types{{2, 3}, {2, 5}, {3, 4}, {2, 7}, {4, 6, 7}};
  for (auto& beta : types) {
    EquisType e = one_branch(beta);
    long n = beta[0];
    auto rg = ramify_graph(e, n);
    EquisType rt = ramified_equis(e, n);
    CHECK(graphs_isomorphic(rg.graph, build_dual_graph(rt)));
  }
}

TEST_CASE("strict and perfect adjoint checks on the ramified cusp") {
  // rho^-1(cusp) with n=2: two smooth branches, coincidence 3
  // rho^-1(generic polar): one smooth branch v = c u^4: coincidence 3 with both
  auto mk = [](bool adj, std::vector<long> beta) {
    return MarkedBranch{branch_type_from_exponents(std::move(beta)), adj};
  };
  {
    std::vector<MarkedBranch> br{mk(false, {1}), mk(false, {1}), mk(true, {1})};
    std::vector<std::vector<Rat>> c(3, std::vector<Rat>(3, Rat(0)));
    c[0][1] = c[1][0] = Rat(3);
    c[0][2] = c[2][0] = Rat(3);
    c[1][2] = c[2][1] = Rat(3);
    auto v = check_adjoint(br, c);
    CHECK(v.strict);
    CHECK(v.perfect);
  }
  {
    // transversal line instead: coincidence 2 with the two branches
    std::vector<MarkedBranch> br{mk(false, {1}), mk(false, {1}), mk(true, {1})};
    std::vector<std::vector<Rat>> c(3, std::vector<Rat>(3, Rat(0)));
    c[0][1] = c[1][0] = Rat(3);
    c[0][2] = c[2][0] = Rat(2);
    c[1][2] = c[2][1] = Rat(2);
    auto v = check_adjoint(br, c);
    CHECK(!v.strict);
  }
  {
    // Z = C fails (multiplicities equal, not m-1)
    std::vector<MarkedBranch> br{mk(false, {1}), mk(false, {1}), mk(true, {1}), mk(true, {1})};
    std::vector<std::vector<Rat>> c(4, std::vector<Rat>(4, Rat(3)));
    for (int i = 0; i < 4; ++i) c[i][i] = Rat(0);
    auto v = check_adjoint(br, c);
    CHECK(!v.strict);
  }
}

TEST_CASE("decompose_adjoint assigns polar branches to their divisors") {
  // C = three smooth branches pairwise contact 2; Z = two smooth branches
  // with coincidence 2 to everything
  std::vector<MarkedBranch> zc;
  for (int k = 0; k < 3; ++k) zc.push_back({branch_type_from_exponents({1}), false});
  for (int k = 0; k < 2; ++k) zc.push_back({branch_type_from_exponents({1}), true});
  std::vector<std::vector<Rat>> c(5, std::vector<Rat>(5, Rat(2)));
  for (int i = 0; i < 5; ++i) c[i][i] = Rat(0);
  EquisType ce;
  for (int k = 0; k < 3; ++k) ce.branches.push_back(branch_type_from_exponents({1}));
  ce.coinc.assign(3, std::vector<Rat>(3, Rat(2)));
  for (int i = 0; i < 3; ++i) ce.coinc[i][i] = Rat(0);
  DualGraph gc = build_dual_graph(ce);
  auto dec = decompose_adjoint(zc, c, gc);
  CHECK(dec.residual.empty());
  CHECK(dec.budget_ok);
  REQUIRE(dec.assignment.size() == 1);
  CHECK(gc.vertices[dec.assignment[0].first].contact == Rat(2));
  CHECK(dec.assignment[0].second.size() == 2);
}
