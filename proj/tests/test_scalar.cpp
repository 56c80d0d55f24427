#include "doctest.h"
#include "polarcurve/scalar.hpp"

#include <random>

using namespace polar;

TEST_CASE("parse exact gaussian rationals") {
  CHECK(parse_scalar("1").is_exact());
  CHECK(parse_scalar("1").is_exact_one());
  Scalar mi = parse_scalar("-i");
  REQUIRE(mi.is_exact());
  CHECK(mi.exact().a.re == 0);
  CHECK(mi.exact().a.im == -1);
  Scalar q = parse_scalar("3/4 + 2*i/5");
  REQUIRE(q.is_exact());
  CHECK(q.exact().a.re == Rat(3, 4));
  CHECK(q.exact().a.im == Rat(2, 5));
  Scalar p = parse_scalar("(1-i)^3");
  REQUIRE(p.is_exact());
  CHECK(p.exact().a == GaussQ{Rat(-2), Rat(-2)});
}

TEST_CASE("parse sqrt yields certified enclosure by default") {
  Scalar s = parse_scalar("(1+sqrt(-3))/2");
  CHECK(!s.is_exact());
  // contains 0.5 + 0.866...i with tight radius
  Scalar t = escalate(s, 256);
  CHECK(certified_abs_below(t - t, -200));
  double re = t.approx_re(), im = t.approx_im();
  CHECK(re == doctest::Approx(0.5));
  CHECK(im == doctest::Approx(0.8660254037844386));
  // radius < 2^-60 after escalation
  Scalar diff = t - Scalar(Rat(1, 2));
  CHECK(certify_sign(diff) == Sign::NonZero);
}

TEST_CASE("tower mode keeps the golden constants exact") {
  Scalar c = parse_scalar("(1+sqrt(-3))/2", true);
  REQUIRE(c.is_exact());
  Scalar v = c * c - c + Scalar(1);
  CHECK(certify_sign(v) == Sign::Zero);  // c is a primitive 6th root of unity
}

TEST_CASE("certify_sign basics") {
  CHECK(certify_sign(Scalar()) == Sign::Zero);
  CHECK(certify_sign(Scalar(3)) == Sign::NonZero);
  Scalar s = parse_scalar("sqrt(2)");
  CHECK(certify_sign(s) == Sign::NonZero);
  // sqrt(2) - sqrt(2) in ball mode: symmetric interval around 0, undecided
  Scalar d = s - s;
  CHECK(certify_sign(d) == Sign::Undecided);
  // ...but the exact tower decides it
  Scalar e = parse_scalar("sqrt(2) - sqrt(2)", true);
  CHECK(certify_sign(e) == Sign::Zero);
}

TEST_CASE("escalate shrinks radius geometrically") {
  Scalar s = parse_scalar("sqrt(2)");
  Scalar hi = escalate(s, 256);
  // radius < 2^-250
  Ball b = hi.enclosure(256);
  mpfr_t r;
  mpfr_init2(r, 64);
  mpfr_set(r, b.rad, MPFR_RNDU);
  CHECK(mpfr_cmp_ui_2exp(r, 1, -250) < 0);
  mpfr_clear(r);
  // exact values unchanged
  Scalar q(Rat(3, 4));
  Scalar q2 = escalate(q, 1024);
  CHECK(q2.is_exact());
  CHECK(q2.exact().a.re == Rat(3, 4));
}

TEST_CASE("escalate requires lineage") {
  Ball raw;  // no lineage
  Scalar s(raw);
  CHECK_THROWS_AS(escalate(s, 512), scalar_error);
}

TEST_CASE("exactness closure under ring ops") {
  std::mt19937_64 rng(7);
  auto rnd = [&]() {
    return Scalar(Exact{GaussQ{Rat(static_cast<long>(rng() % 19) - 9,
                                   1 + static_cast<long>(rng() % 7)),
                               Rat(static_cast<long>(rng() % 19) - 9,
                                   1 + static_cast<long>(rng() % 7))}});
  };
  for (int k = 0; k < 200; ++k) {
    Scalar a = rnd(), b = rnd();
    CHECK((a + b).is_exact());
    CHECK((a - b).is_exact());
    CHECK((a * b).is_exact());
    if (!b.is_exact_zero()) CHECK((a / b).is_exact());
  }
}

TEST_CASE("containment: random expression trees vs higher precision") {
  std::mt19937_64 rng(12345);
  // build random expression trees of depth <= 8 over small exact leaves and
  // sqrt nodes; check the 128-bit enclosure contains the 512-bit evaluation
  std::function<Scalar(int)> build = [&](int depth) -> Scalar {
    if (depth == 0 || rng() % 4 == 0) {
      long n = static_cast<long>(rng() % 21) - 10;
      long d = 1 + static_cast<long>(rng() % 9);
      if (rng() % 3 == 0) return parse_scalar("sqrt(" + std::to_string(2 + rng() % 17) + ")");
      return Scalar(Rat(n, d));
    }
    Scalar a = build(depth - 1), b = build(depth - 1);
    switch (rng() % 4) {
      case 0: return a + b;
      case 1: return a - b;
      case 2: return a * b;
      default: {
        if (certify_sign(b) != Sign::NonZero) return a + b;
        return a / b;
      }
    }
  };
  int checked = 0;
  for (int k = 0; k < 400; ++k) {
    Scalar s;
    try {
      s = build(6);
    } catch (const scalar_error&) {
      continue;
    }
    Ball lo = s.enclosure(128);
    Ball hi = s.enclosure(512);
    // |center_lo - center_hi| <= rad_lo  (hi is essentially the truth)
    mpfr_t dr, di, dist;
    mpfr_init2(dr, 128);
    mpfr_init2(di, 128);
    mpfr_init2(dist, 64);
    mpfr_sub(dr, lo.re, hi.re, MPFR_RNDA);
    mpfr_sub(di, lo.im, hi.im, MPFR_RNDA);
    mpfr_hypot(dist, dr, di, MPFR_RNDU);
    CHECK(mpfr_cmp(dist, lo.rad) <= 0);
    mpfr_clear(dr);
    mpfr_clear(di);
    mpfr_clear(dist);
    ++checked;
  }
  CHECK(checked > 300);
}

TEST_CASE("roots of unity") {
  for (long q : {1L, 2L, 3L, 4L, 6L}) {
    Scalar z = root_of_unity(Rat(1, q));
    CHECK(z.is_exact());
    Scalar p = z.pow(q);
    CHECK(certify_sign(p - Scalar(1)) == Sign::Zero);
    if (q > 1) CHECK(certify_sign(z - Scalar(1)) == Sign::NonZero);
  }
  Scalar z5 = root_of_unity(Rat(1, 5));
  CHECK(!z5.is_exact());
  CHECK(certify_sign(z5.pow(5) - Scalar(1)) == Sign::Undecided);  // ball cannot prove 0
  CHECK(certify_sign(z5 - Scalar(1)) == Sign::NonZero);
}

TEST_CASE("scalar expression round trip") {
  for (const char* src : {"3/4", "-i", "(1+sqrt(-3))/2", "sqrt(2)*sqrt(3) - 1/7"}) {
    Scalar a = parse_scalar(src);
    Scalar b = parse_scalar(a.expression());
    Scalar d = a - b;
    CHECK(certify_sign(d) != Sign::NonZero);
  }
}
