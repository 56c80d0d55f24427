#include "doctest.h"
#include "polarcurve/germ.hpp"
#include "polarcurve/poly.hpp"

using namespace polar;

TEST_CASE("newton polygon of binomial germs") {
  auto g = parse_germ("y^5 - x^11");
  auto np = newton_polygon(g);
  REQUIRE(np.vertices.size() == 2);
  CHECK(np.vertices[0] == LatticePoint{0, 5});
  CHECK(np.vertices[1] == LatticePoint{11, 0});
  REQUIRE(np.sides.size() == 1);
  CHECK(np.sides[0].incl == Rat(11, 5));
  CHECK(np.sides[0].line_k == Rat(11));

  auto c = parse_germ("y^2 - x^3");
  auto npc = newton_polygon(c);
  REQUIRE(npc.sides.size() == 1);
  CHECK(npc.sides[0].incl == Rat(3, 2));
}

TEST_CASE("collinear middle point is not a vertex") {
  auto g = parse_germ("y^4 - 5*x^5*y^2 + 4*x^10");
  auto np = newton_polygon(g);
  REQUIRE(np.vertices.size() == 2);
  CHECK(np.vertices[0] == LatticePoint{0, 4});
  CHECK(np.vertices[1] == LatticePoint{10, 0});
  REQUIRE(np.sides.size() == 1);
  CHECK(np.sides[0].incl == Rat(5, 2));
  CHECK(np.sides[0].line_k == Rat(10));
}

TEST_CASE("two-sided polygon") {
  // 11a(-x^10+y^2x^6)+5b(y^4-x^7y), a=b=1: hull (0,4),(7,1),(10,0)
  auto g = parse_germ("11*(0-x^10+y^2*x^6)+5*(y^4-x^7*y)");
  auto np = newton_polygon(g);
  REQUIRE(np.vertices.size() == 3);
  CHECK(np.vertices[0] == LatticePoint{0, 4});
  CHECK(np.vertices[1] == LatticePoint{7, 1});
  CHECK(np.vertices[2] == LatticePoint{10, 0});
  REQUIRE(np.sides.size() == 2);
  CHECK(np.sides[0].incl == Rat(7, 3));
  CHECK(np.sides[1].incl == Rat(3));
}

TEST_CASE("germ arithmetic and parsing") {
  auto f = parse_germ("y*(y-x^2)*(y+x^2)");
  CHECK(f.get(0, 3).is_exact_one());
  CHECK(certify_sign(f.get(4, 1) + Scalar(1)) == Sign::Zero);
  CHECK(f.order() == 3);
  auto fx = f.dx();
  CHECK(certify_sign(fx.get(3, 1) + Scalar(4)) == Sign::Zero);

  auto h = parse_germ("(1+sqrt(-3))/2 * x^2*y");
  CHECK(h.get(2, 1).is_exact());  // germs parse in tower mode by default
}

TEST_CASE("polynomial roots exact and certified") {
  // (T-1)(T-2)^2 = T^3 -5T^2 +8T -4
  Poly p({Scalar(-4), Scalar(8), Scalar(-5), Scalar(1)});
  auto roots = certified_roots(p);
  REQUIRE(roots.size() == 2);
  bool saw1 = false, saw2 = false;
  for (auto& r : roots) {
    if (r.multiplicity == 1) {
      saw1 = true;
      CHECK(certify_sign(r.value - Scalar(1)) == Sign::Zero);
    }
    if (r.multiplicity == 2) {
      saw2 = true;
      CHECK(certify_sign(r.value - Scalar(2)) == Sign::Zero);
    }
  }
  CHECK(saw1);
  CHECK(saw2);
}

TEST_CASE("quadratic roots through the tower") {
  // T^2 - 2T + 4: roots 1 +- sqrt(-3)
  Poly p({Scalar(4), Scalar(-2), Scalar(1)});
  auto roots = certified_roots(p);
  REQUIRE(roots.size() == 2);
  for (auto& r : roots) {
    CHECK(r.multiplicity == 1);
    CHECK(r.value.is_exact());
    Scalar chk = r.value * r.value - Scalar(2) * r.value + Scalar(4);
    CHECK(certify_sign(chk) == Sign::Zero);
  }
}

TEST_CASE("weierstrass roots of a quintic") {
  // T^5 - 1: five certified distinct enclosures
  Poly p({Scalar(-1), Scalar(), Scalar(), Scalar(), Scalar(), Scalar(1)});
  auto roots = certified_roots(p);
  REQUIRE(roots.size() == 5);
  for (auto& r : roots) {
    CHECK(r.multiplicity == 1);
    Scalar v = p.eval(r.value);
    CHECK(certify_sign(v) != Sign::NonZero);  // cannot exclude zero
  }
}

TEST_CASE("resultant and discriminant") {
  // disc(aT^2+bT+c) = b^2-4ac
  Poly p({Scalar(3), Scalar(-2), Scalar(5)});
  Scalar d = discriminant(p);
  CHECK(certify_sign(d - Scalar(4 - 60)) == Sign::Zero);
  // disc(3v^2-1) = 12
  Poly h({Scalar(-1), Scalar(0), Scalar(3)});
  CHECK(certify_sign(discriminant(h) - Scalar(12)) == Sign::Zero);
}
