#include "doctest.h"
#include "polarcurve/cluster.hpp"
#include "polarcurve/dual_graph.hpp"

using namespace polar;

namespace {

EquisType one_branch(std::vector<long> beta) {
  EquisType e;
  e.branches.push_back(branch_type_from_exponents(std::move(beta)));
  e.coinc.assign(1, std::vector<Rat>(1, Rat(0)));
  return e;
}

EquisType smooth_branches(const std::vector<std::vector<long>>& coincs) {
  EquisType e;
  size_t n = coincs.size();
  for (size_t i = 0; i < n; ++i) e.branches.push_back(branch_type_from_exponents({1}));
  e.coinc.assign(n, std::vector<Rat>(n, Rat(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (i != j) e.coinc[i][j] = Rat(coincs[i][j]);
  return e;
}

}  // namespace

TEST_CASE("cusp cluster multiplicities 2,1,1") {
  auto nodes = infinitely_near_multiplicities(one_branch({2, 3}));
  std::vector<long> blown;
  for (const auto& nd : nodes)
    if (nd.blown) blown.push_back(nd.mult);
  CHECK(blown == std::vector<long>{2, 1, 1});
}

TEST_CASE("two smooth branches coincidence 3: m = 2,2,2") {
  auto e = smooth_branches({{0, 3}, {3, 0}});
  auto nodes = infinitely_near_multiplicities(e);
  // three shared blown points with m=2, then the separate final 1-points
  std::vector<long> blown;
  size_t leaves = 0;
  for (const auto& nd : nodes) {
    if (nd.blown)
      blown.push_back(nd.mult);
    else {
      CHECK(nd.mult == 1);
      ++leaves;
    }
  }
  CHECK(blown == std::vector<long>{2, 2, 2});
  CHECK(leaves == 2);
}

TEST_CASE("smooth branch: single point of multiplicity 1") {
  auto nodes = infinitely_near_multiplicities(one_branch({1}));
  for (const auto& nd : nodes) CHECK(nd.mult == 1);
}

TEST_CASE("cusp dual graph") {
  DualGraph g = build_dual_graph(one_branch({2, 3}));
  REQUIRE(g.vertices.size() == 3);
  // E1: v=1, E2: v=2 (terminal of the dead arc), E3: v=3/2 (bifurcation)
  CHECK(g.vertices[0].contact == Rat(1));
  CHECK(g.vertices[0].mult == 1);
  int e3 = -1, e2 = -1;
  for (const auto& v : g.vertices) {
    if (v.contact == Rat(3, 2)) e3 = v.id;
    if (v.contact == Rat(2)) e2 = v.id;
  }
  REQUIRE(e3 >= 0);
  REQUIRE(e2 >= 0);
  CHECK(g.vertices[e3].mult == 2);
  CHECK(g.vertices[e2].mult == 1);
  CHECK(g.vertices[e3].branching == 2);  // the dead-arc chain + arrow
  CHECK(g.vertices[e2].branching == 0);
  CHECK(g.vertices[e3].arrows.size() == 1);
  REQUIRE(g.dead_arcs.size() == 1);
  CHECK(g.dead_arcs[0].first == e3);
  CHECK(g.dead_arcs[0].second == e2);
  CHECK(g.vertices[e3].cls == DivisorClass::Puiseux);
  CHECK(g.vertices[e3].ram_jump == 2);
  // kind: m(E3) = 2 m(E2)
  CHECK(is_kind(g).kind);
}

TEST_CASE("three smooth branches pairwise contact 2") {
  auto e = smooth_branches({{0, 2, 2}, {2, 0, 2}, {2, 2, 0}});
  DualGraph g = build_dual_graph(e);
  REQUIRE(g.vertices.size() == 2);
  CHECK(g.vertices[0].contact == Rat(1));
  CHECK(g.vertices[0].branching == 1);
  CHECK(g.vertices[1].contact == Rat(2));
  CHECK(g.vertices[1].branching == 3);
  CHECK(g.vertices[1].arrows.size() == 3);
  CHECK(g.dead_arcs.empty());
  CHECK(is_kind(g).kind);
}

TEST_CASE("y^3 - x^5 is not kind") {
  DualGraph g = build_dual_graph(one_branch({3, 5}));
  auto w = is_kind(g);
  CHECK(!w.kind);
  CHECK(w.m_b == 3);
  CHECK(w.m_t == 1);
}

TEST_CASE("y^5 - x^11 graph and kind") {
  DualGraph g = build_dual_graph(one_branch({5, 11}));
  REQUIRE(g.vertices.size() == 7);
  std::vector<Rat> vs;
  for (const auto& v : g.vertices) vs.push_back(v.contact);
  std::sort(vs.begin(), vs.end());
  CHECK(vs == std::vector<Rat>{Rat(1), Rat(2), Rat(11, 5), Rat(9, 4), Rat(7, 3), Rat(5, 2),
                               Rat(3)});
  auto w = is_kind(g);
  CHECK(!w.kind);
  // the single bifurcation divisor has v = 11/5, m = 5
  int bif = -1;
  for (const auto& v : g.vertices)
    if (v.branching >= 2) {
      CHECK(bif == -1);
      bif = v.id;
    }
  REQUIRE(bif >= 0);
  CHECK(g.vertices[bif].contact == Rat(11, 5));
  CHECK(g.vertices[bif].mult == 5);
  CHECK(g.vertices[bif].ram_jump == 5);
  REQUIRE(g.dead_arcs.size() == 1);
  CHECK(g.dead_arcs[0].first == bif);
  CHECK(g.vertices[g.dead_arcs[0].second].contact == Rat(3));
}

TEST_CASE("branch (4,6,7): two-story graph") {
  DualGraph g = build_dual_graph(one_branch({4, 6, 7}));
  REQUIRE(g.vertices.size() == 5);
  // two Puiseux bifurcation divisors at v=3/2 and v=7/4, each with a dead arc
  int b1 = -1, b2 = -1;
  for (const auto& v : g.vertices) {
    if (v.contact == Rat(3, 2)) b1 = v.id;
    if (v.contact == Rat(7, 4)) b2 = v.id;
  }
  REQUIRE(b1 >= 0);
  REQUIRE(b2 >= 0);
  CHECK(g.vertices[b1].mult == 2);
  CHECK(g.vertices[b2].mult == 4);
  CHECK(g.vertices[b2].arrows.size() == 1);
  CHECK(g.dead_arcs.size() == 2);
  CHECK(is_kind(g).kind);  // n_E = 2 on both dead arcs
  // curvette values at the second bifurcation: {3/2}
  REQUIRE(g.vertices[b2].curvette_values.size() == 1);
  CHECK(g.vertices[b2].curvette_values[0] == Rat(3, 2));
  CHECK(g.vertices[b2].pair_depth == 1);
  CHECK(g.vertices[b2].base_mult == 2);
  CHECK(g.vertices[b2].ram_jump == 2);
}

TEST_CASE("chi graph of the cusp adds one arrow at the terminal") {
  DualGraph g = build_dual_graph(one_branch({2, 3}));
  DualGraph chi = chi_graph(g);
  int e2 = -1, e3 = -1;
  for (const auto& v : chi.vertices) {
    if (v.contact == Rat(2)) e2 = v.id;
    if (v.contact == Rat(3, 2)) e3 = v.id;
  }
  CHECK(chi.vertices[e2].arrows.size() == 1);   // terminal gains the polar arrow
  CHECK(chi.vertices[e3].arrows.size() == 1);   // b_E - 2 = 0 extra
  CHECK(chi.dead_arcs.empty());
}

TEST_CASE("chi graph of three smooth branches adds 2 arrows at the node") {
  auto e = smooth_branches({{0, 2, 2}, {2, 0, 2}, {2, 2, 0}});
  DualGraph chi = chi_graph(build_dual_graph(e));
  CHECK(chi.vertices[1].arrows.size() == 5);  // 3 curve + b_E-1 = 2 adjoint
}

TEST_CASE("adjoint branch types") {
  // cusp, divisor E3: case (ii) with b_E = 2: single smooth piece
  DualGraph g = build_dual_graph(one_branch({2, 3}));
  int e3 = -1;
  for (const auto& v : g.vertices)
    if (v.contact == Rat(3, 2)) e3 = v.id;
  auto pieces = adjoint_branch_types(g, e3);
  REQUIRE(pieces.size() == 1);
  CHECK(pieces[0].count == 1);
  CHECK(pieces[0].type.smooth());

  // three smooth branches, bifurcation at v=2: case (i), two smooth pieces
  auto e = smooth_branches({{0, 2, 2}, {2, 0, 2}, {2, 2, 0}});
  DualGraph g2 = build_dual_graph(e);
  auto p2 = adjoint_branch_types(g2, 1);
  REQUIRE(p2.size() == 1);
  CHECK(p2[0].count == 2);
  CHECK(p2[0].type.smooth());
}

TEST_CASE("(y^2-x^5)(y^2-4x^5): Puiseux divisor in dead arc") {
  EquisType e;
  e.branches.push_back(branch_type_from_exponents({2, 5}));
  e.branches.push_back(branch_type_from_exponents({2, 5}));
  e.coinc.assign(2, std::vector<Rat>(2, Rat(0)));
  e.coinc[0][1] = e.coinc[1][0] = Rat(5, 2);
  DualGraph g = build_dual_graph(e);
  auto w = is_kind(g);
  CHECK(w.kind);
  // bifurcation divisor at v=5/2 with b=3 (two arrows + dead arc), in dead arc
  int bif = -1;
  for (const auto& v : g.vertices)
    if (v.contact == Rat(5, 2)) bif = v.id;
  REQUIRE(bif >= 0);
  CHECK(g.vertices[bif].branching == 3);
  CHECK(g.on_dead_arc(bif));
  auto pieces = adjoint_branch_types(g, bif);
  // case (ii): one smooth zeta_0 plus b_E-2 = 1 branch of type (2,5)
  REQUIRE(pieces.size() == 2);
  CHECK(pieces[0].count == 1);
  CHECK(pieces[0].type.smooth());
  CHECK(pieces[1].count == 1);
  CHECK(pieces[1].type.char_exponents == std::vector<long>{2, 5});
  // chi adds 1 arrow at terminal + 1 at the bifurcation divisor
  DualGraph chi = chi_graph(g);
  CHECK(chi.vertices[bif].arrows.size() == 3);  // 2 curve arrows + 1 adjoint
}
