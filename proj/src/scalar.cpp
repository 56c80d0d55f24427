#include "polarcurve/scalar.hpp"

#include <cctype>
#include <cmath>
#include <cstring>
#include <sstream>

namespace polar {

ScalarOptions& scalar_options() {
  static thread_local ScalarOptions opts;
  return opts;
}

// ---------------------------------------------------------------------------
// Ball primitives.  Radius is kept at 64 bits, always rounded up.
// ---------------------------------------------------------------------------

namespace {

constexpr mpfr_prec_t kRadPrec = 64;

// rad += (|re| + |im|) * 2^(2-prec)   -- covers correctly-rounded center ops
void add_center_slack(Ball& z) {
  mpfr_t t;
  mpfr_init2(t, kRadPrec);
  mpfr_abs(t, z.re, MPFR_RNDU);
  mpfr_t u;
  mpfr_init2(u, kRadPrec);
  mpfr_abs(u, z.im, MPFR_RNDU);
  mpfr_add(t, t, u, MPFR_RNDU);
  mpfr_mul_2si(t, t, 2 - static_cast<long>(z.prec), MPFR_RNDU);
  mpfr_add(z.rad, z.rad, t, MPFR_RNDU);
  mpfr_clear(t);
  mpfr_clear(u);
}

void abs_upper(mpfr_t out, const Ball& z) {
  mpfr_hypot(out, z.re, z.im, MPFR_RNDU);
  mpfr_add(out, out, z.rad, MPFR_RNDU);
}

void abs_lower(mpfr_t out, const Ball& z) {
  mpfr_hypot(out, z.re, z.im, MPFR_RNDD);
  mpfr_sub(out, out, z.rad, MPFR_RNDD);
}

}  // namespace

Ball::Ball() {
  prec = scalar_options().default_prec;
  mpfr_init2(re, prec);
  mpfr_init2(im, prec);
  mpfr_init2(rad, kRadPrec);
  mpfr_set_zero(re, 1);
  mpfr_set_zero(im, 1);
  mpfr_set_zero(rad, 1);
}

Ball::Ball(const Ball& o) {
  prec = o.prec;
  mpfr_init2(re, prec);
  mpfr_init2(im, prec);
  mpfr_init2(rad, kRadPrec);
  mpfr_set(re, o.re, MPFR_RNDN);
  mpfr_set(im, o.im, MPFR_RNDN);
  mpfr_set(rad, o.rad, MPFR_RNDU);
}

Ball::Ball(Ball&& o) noexcept {
  prec = o.prec;
  memcpy(&re, &o.re, sizeof(mpfr_t));
  memcpy(&im, &o.im, sizeof(mpfr_t));
  memcpy(&rad, &o.rad, sizeof(mpfr_t));
  mpfr_init2(o.re, 2);
  mpfr_init2(o.im, 2);
  mpfr_init2(o.rad, 2);
}

Ball& Ball::operator=(Ball o) {
  std::swap(prec, o.prec);
  mpfr_swap(re, o.re);
  mpfr_swap(im, o.im);
  mpfr_swap(rad, o.rad);
  return *this;
}

Ball::~Ball() {
  mpfr_clear(re);
  mpfr_clear(im);
  mpfr_clear(rad);
}

double Ball::approx_abs() const {
  double r = mpfr_get_d(re, MPFR_RNDN), i = mpfr_get_d(im, MPFR_RNDN);
  return std::hypot(r, i);
}

bool Ball::contains_zero() const {
  mpfr_t lo;
  mpfr_init2(lo, kRadPrec);
  abs_lower(lo, *this);
  bool z = mpfr_sgn(lo) <= 0;
  mpfr_clear(lo);
  return z;
}

std::string Ball::str() const {
  std::ostringstream os;
  os << "[" << mpfr_get_d(re, MPFR_RNDN);
  double i = mpfr_get_d(im, MPFR_RNDN);
  if (i >= 0)
    os << "+" << i << "i";
  else
    os << i << "i";
  os << " +/- " << mpfr_get_d(rad, MPFR_RNDU) << "]";
  return os.str();
}

namespace {

Ball ball_of_rat(const Rat& q, mpfr_prec_t prec) {
  Ball z;
  if (z.prec != prec) {
    mpfr_set_prec(z.re, prec);
    mpfr_set_prec(z.im, prec);
    z.prec = prec;
    mpfr_set_zero(z.im, 1);
    mpfr_set_zero(z.rad, 1);
  }
  mpfr_set_q(z.re, q.get_mpq_t(), MPFR_RNDN);
  mpfr_set_zero(z.im, 1);
  add_center_slack(z);
  return z;
}

Ball ball_add(const Ball& x, const Ball& y) {
  Ball z;
  mpfr_prec_t p = std::max(x.prec, y.prec);
  mpfr_set_prec(z.re, p);
  mpfr_set_prec(z.im, p);
  z.prec = p;
  mpfr_add(z.re, x.re, y.re, MPFR_RNDN);
  mpfr_add(z.im, x.im, y.im, MPFR_RNDN);
  mpfr_add(z.rad, x.rad, y.rad, MPFR_RNDU);
  add_center_slack(z);
  return z;
}

Ball ball_sub(const Ball& x, const Ball& y) {
  Ball z;
  mpfr_prec_t p = std::max(x.prec, y.prec);
  mpfr_set_prec(z.re, p);
  mpfr_set_prec(z.im, p);
  z.prec = p;
  mpfr_sub(z.re, x.re, y.re, MPFR_RNDN);
  mpfr_sub(z.im, x.im, y.im, MPFR_RNDN);
  mpfr_add(z.rad, x.rad, y.rad, MPFR_RNDU);
  add_center_slack(z);
  return z;
}

Ball ball_neg(const Ball& x) {
  Ball z(x);
  mpfr_neg(z.re, z.re, MPFR_RNDN);
  mpfr_neg(z.im, z.im, MPFR_RNDN);
  return z;
}

Ball ball_mul(const Ball& x, const Ball& y) {
  Ball z;
  mpfr_prec_t p = std::max(x.prec, y.prec);
  mpfr_set_prec(z.re, p);
  mpfr_set_prec(z.im, p);
  z.prec = p;
  // centers: one rounding each via fused ab+-cd
  mpfr_fmms(z.re, x.re, y.re, x.im, y.im, MPFR_RNDN);
  mpfr_fmma(z.im, x.re, y.im, x.im, y.re, MPFR_RNDN);
  // rad = |cx|*ry + |cy|*rx + rx*ry
  mpfr_t ax, ay, t;
  mpfr_init2(ax, kRadPrec);
  mpfr_init2(ay, kRadPrec);
  mpfr_init2(t, kRadPrec);
  mpfr_hypot(ax, x.re, x.im, MPFR_RNDU);
  mpfr_hypot(ay, y.re, y.im, MPFR_RNDU);
  mpfr_mul(t, ax, y.rad, MPFR_RNDU);
  mpfr_set(z.rad, t, MPFR_RNDU);
  mpfr_mul(t, ay, x.rad, MPFR_RNDU);
  mpfr_add(z.rad, z.rad, t, MPFR_RNDU);
  mpfr_mul(t, x.rad, y.rad, MPFR_RNDU);
  mpfr_add(z.rad, z.rad, t, MPFR_RNDU);
  mpfr_clear(ax);
  mpfr_clear(ay);
  mpfr_clear(t);
  add_center_slack(z);
  return z;
}

// 1/x; requires 0 outside x.
std::optional<Ball> ball_inv(const Ball& x) {
  mpfr_t lo;
  mpfr_init2(lo, kRadPrec);
  abs_lower(lo, x);
  if (mpfr_sgn(lo) <= 0) {
    mpfr_clear(lo);
    return std::nullopt;
  }
  Ball z;
  mpfr_set_prec(z.re, x.prec);
  mpfr_set_prec(z.im, x.prec);
  z.prec = x.prec;
  mpfr_t n;
  mpfr_init2(n, x.prec);
  mpfr_fmma(n, x.re, x.re, x.im, x.im, MPFR_RNDN);
  mpfr_div(z.re, x.re, n, MPFR_RNDN);
  mpfr_div(z.im, x.im, n, MPFR_RNDN);
  mpfr_neg(z.im, z.im, MPFR_RNDN);
  // |1/w - 1/c| <= r / (|c| * (|c|-r))
  mpfr_t ac, t;
  mpfr_init2(ac, kRadPrec);
  mpfr_init2(t, kRadPrec);
  mpfr_hypot(ac, x.re, x.im, MPFR_RNDD);
  mpfr_mul(t, ac, lo, MPFR_RNDD);
  mpfr_div(z.rad, x.rad, t, MPFR_RNDU);
  mpfr_clear(n);
  mpfr_clear(ac);
  mpfr_clear(t);
  mpfr_clear(lo);
  add_center_slack(z);
  return z;
}

// principal sqrt; requires the ball to avoid (-inf, 0].
std::optional<Ball> ball_sqrt(const Ball& x) {
  mpfr_t t, u;
  mpfr_init2(t, kRadPrec);
  mpfr_init2(u, kRadPrec);
  // safe iff re - r > 0  or  |im| - r > 0
  mpfr_sub(t, x.re, x.rad, MPFR_RNDD);
  bool right_half = mpfr_sgn(t) > 0;
  mpfr_abs(u, x.im, MPFR_RNDD);
  mpfr_sub(u, u, x.rad, MPFR_RNDD);
  bool off_axis = mpfr_sgn(u) > 0;
  if (!right_half && !off_axis) {
    mpfr_clear(t);
    mpfr_clear(u);
    return std::nullopt;
  }
  Ball z;
  mpfr_set_prec(z.re, x.prec);
  mpfr_set_prec(z.im, x.prec);
  z.prec = x.prec;
  mpfr_t m, v;
  mpfr_init2(m, x.prec);
  mpfr_init2(v, x.prec);
  mpfr_hypot(m, x.re, x.im, MPFR_RNDN);
  if (mpfr_sgn(x.re) >= 0) {
    mpfr_add(v, m, x.re, MPFR_RNDN);
    mpfr_div_2ui(v, v, 1, MPFR_RNDN);
    mpfr_sqrt(z.re, v, MPFR_RNDN);  // u = sqrt((m+re)/2)
    mpfr_div(z.im, x.im, z.re, MPFR_RNDN);
    mpfr_div_2ui(z.im, z.im, 1, MPFR_RNDN);
  } else {
    mpfr_sub(v, m, x.re, MPFR_RNDN);
    mpfr_div_2ui(v, v, 1, MPFR_RNDN);
    mpfr_sqrt(z.im, v, MPFR_RNDN);
    if (mpfr_sgn(x.im) < 0) mpfr_neg(z.im, z.im, MPFR_RNDN);
    mpfr_div(z.re, x.im, z.im, MPFR_RNDN);
    mpfr_div_2ui(z.re, z.re, 1, MPFR_RNDN);
  }
  // |sqrt(w)-sqrt(c)| <= r / sqrt(|c|-r)  (disk avoids the cut)
  mpfr_t lo;
  mpfr_init2(lo, kRadPrec);
  abs_lower(lo, x);
  if (mpfr_sgn(lo) <= 0) {
    mpfr_clear(t);
    mpfr_clear(u);
    mpfr_clear(m);
    mpfr_clear(v);
    mpfr_clear(lo);
    return std::nullopt;
  }
  mpfr_sqrt(lo, lo, MPFR_RNDD);
  mpfr_div(z.rad, x.rad, lo, MPFR_RNDU);
  mpfr_clear(t);
  mpfr_clear(u);
  mpfr_clear(m);
  mpfr_clear(v);
  mpfr_clear(lo);
  add_center_slack(z);
  add_center_slack(z);  // chained roundings in the center formulas
  return z;
}

Ball ball_sqrt_ui(unsigned long d, mpfr_prec_t prec) {
  Ball z;
  mpfr_set_prec(z.re, prec);
  mpfr_set_prec(z.im, prec);
  z.prec = prec;
  mpfr_sqrt_ui(z.re, d, MPFR_RNDN);
  mpfr_set_zero(z.im, 1);
  add_center_slack(z);
  return z;
}

// e^(2 pi i phase)
Ball ball_unity(const Rat& phase, mpfr_prec_t prec) {
  Ball z;
  mpfr_set_prec(z.re, prec);
  mpfr_set_prec(z.im, prec);
  z.prec = prec;
  mpfr_t pi, th;
  mpfr_init2(pi, prec + 16);
  mpfr_init2(th, prec + 16);
  mpfr_const_pi(pi, MPFR_RNDN);
  mpfr_set_q(th, phase.get_mpq_t(), MPFR_RNDN);
  mpfr_mul(th, th, pi, MPFR_RNDN);
  mpfr_mul_2ui(th, th, 1, MPFR_RNDN);
  mpfr_sin_cos(z.im, z.re, th, MPFR_RNDN);
  mpfr_set_ui_2exp(z.rad, 1, -static_cast<long>(prec) + 6, MPFR_RNDU);
  mpfr_clear(pi);
  mpfr_clear(th);
  return z;
}

}  // namespace

// ---------------------------------------------------------------------------
// Expression lineage.
// ---------------------------------------------------------------------------

struct Expr {
  enum Kind { Const, Add, Sub, Mul, Div, Neg, Sqrt, Pow, Unity, RootOf } kind;
  Exact cval;                    // Const
  ExprPtr a, b;                  // operands
  long k = 0;                    // Pow exponent / RootOf degree
  Rat phase;                     // Unity
  std::vector<ExprPtr> coeffs;   // RootOf: sum coeffs[j] T^j
  double snap_re = 0, snap_im = 0, snap_rad = 0;  // RootOf isolation snapshot
};

namespace {

ExprPtr expr_const(const Exact& e) {
  auto n = std::make_shared<Expr>();
  n->kind = Expr::Const;
  n->cval = e;
  return n;
}

ExprPtr expr_bin(Expr::Kind k, ExprPtr a, ExprPtr b) {
  auto n = std::make_shared<Expr>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

ExprPtr expr_of(const Scalar& s) {
  if (s.is_exact()) return expr_const(s.exact());
  if (s.lineage()) return s.lineage();
  return nullptr;
}

Ball eval_exact(const Exact& e, mpfr_prec_t prec) {
  Ball z = ball_of_rat(e.a.re, prec);
  {
    Ball bi = ball_of_rat(e.a.im, prec);
    mpfr_swap(bi.re, bi.im);  // times i
    z = ball_add(z, bi);
  }
  if (e.d != 1 && !e.b.is_zero()) {
    Ball sq = ball_sqrt_ui(static_cast<unsigned long>(e.d), prec);
    Ball br = ball_of_rat(e.b.re, prec);
    Ball bi = ball_of_rat(e.b.im, prec);
    mpfr_swap(bi.re, bi.im);
    z = ball_add(z, ball_mul(ball_add(br, bi), sq));
  }
  return z;
}

Ball eval_expr(const Expr& e, mpfr_prec_t prec);

// One Newton step z <- z - p(z)/p'(z) on doubles-seeded mpfr complex.
void rootof_newton(const Expr& e, mpfr_prec_t prec, Ball& z) {
  size_t n = e.coeffs.size();
  for (int iter = 0; iter < 64; ++iter) {
    // Horner for p and p' in ball arithmetic with zero-radius z-center copy
    Ball zc(z);
    mpfr_set_zero(zc.rad, 1);
    Ball p = eval_expr(*e.coeffs[n - 1], prec);
    Ball dp = ball_of_rat(Rat(0), prec);
    for (size_t j = n - 1; j-- > 0;) {
      dp = ball_add(ball_mul(dp, zc), p);
      p = ball_add(ball_mul(p, zc), eval_expr(*e.coeffs[j], prec));
    }
    auto inv = ball_inv(dp);
    if (!inv) break;
    Ball step = ball_mul(p, *inv);
    mpfr_sub(z.re, z.re, step.re, MPFR_RNDN);
    mpfr_sub(z.im, z.im, step.im, MPFR_RNDN);
    mpfr_t sa;
    mpfr_init2(sa, kRadPrec);
    mpfr_hypot(sa, step.re, step.im, MPFR_RNDU);
    bool done = mpfr_cmp_ui_2exp(sa, 1, -static_cast<long>(prec) + 8) < 0;
    mpfr_clear(sa);
    if (done) break;
  }
}

Ball eval_rootof(const Expr& e, mpfr_prec_t prec) {
  Ball z;
  mpfr_set_prec(z.re, prec);
  mpfr_set_prec(z.im, prec);
  z.prec = prec;
  mpfr_set_d(z.re, e.snap_re, MPFR_RNDN);
  mpfr_set_d(z.im, e.snap_im, MPFR_RNDN);
  mpfr_set_zero(z.rad, 1);
  rootof_newton(e, prec, z);
  // enclosure radius: deg * |p(z)/p'(z)| upper bound
  size_t n = e.coeffs.size();
  Ball zc(z);
  mpfr_set_zero(zc.rad, 1);
  Ball p = eval_expr(*e.coeffs[n - 1], prec);
  Ball dp = ball_of_rat(Rat(0), prec);
  for (size_t j = n - 1; j-- > 0;) {
    dp = ball_add(ball_mul(dp, zc), p);
    p = ball_add(ball_mul(p, zc), eval_expr(*e.coeffs[j], prec));
  }
  mpfr_t up, lo;
  mpfr_init2(up, kRadPrec);
  mpfr_init2(lo, kRadPrec);
  abs_upper(up, p);
  abs_lower(lo, dp);
  if (mpfr_sgn(lo) > 0) {
    mpfr_div(z.rad, up, lo, MPFR_RNDU);
    mpfr_mul_ui(z.rad, z.rad, static_cast<unsigned long>(n - 1), MPFR_RNDU);
  } else {
    mpfr_set_d(z.rad, e.snap_rad, MPFR_RNDU);
  }
  // never leave the original isolation disk
  mpfr_t cap;
  mpfr_init2(cap, kRadPrec);
  mpfr_set_d(cap, e.snap_rad, MPFR_RNDU);
  if (mpfr_sgn(cap) > 0 && mpfr_cmp(z.rad, cap) > 0) mpfr_set(z.rad, cap, MPFR_RNDU);
  mpfr_clear(up);
  mpfr_clear(lo);
  mpfr_clear(cap);
  return z;
}

Ball eval_expr(const Expr& e, mpfr_prec_t prec) {
  switch (e.kind) {
    case Expr::Const:
      return eval_exact(e.cval, prec);
    case Expr::Add:
      return ball_add(eval_expr(*e.a, prec), eval_expr(*e.b, prec));
    case Expr::Sub:
      return ball_sub(eval_expr(*e.a, prec), eval_expr(*e.b, prec));
    case Expr::Mul:
      return ball_mul(eval_expr(*e.a, prec), eval_expr(*e.b, prec));
    case Expr::Div: {
      auto inv = ball_inv(eval_expr(*e.b, prec));
      if (!inv) throw precision_error("division by ball containing zero");
      return ball_mul(eval_expr(*e.a, prec), *inv);
    }
    case Expr::Neg:
      return ball_neg(eval_expr(*e.a, prec));
    case Expr::Sqrt: {
      auto r = ball_sqrt(eval_expr(*e.a, prec));
      if (!r) throw precision_error("sqrt of ball touching branch cut");
      return *r;
    }
    case Expr::Pow: {
      Ball base = eval_expr(*e.a, prec);
      Ball acc = ball_of_rat(Rat(1), prec);
      long k = e.k;
      bool invert = k < 0;
      if (invert) k = -k;
      Ball sq = base;
      while (k > 0) {
        if (k & 1) acc = ball_mul(acc, sq);
        k >>= 1;
        if (k) sq = ball_mul(sq, sq);
      }
      if (invert) {
        auto inv = ball_inv(acc);
        if (!inv) throw precision_error("pow: inverse of zero-containing ball");
        return *inv;
      }
      return acc;
    }
    case Expr::Unity:
      return ball_unity(e.phase, prec);
    case Expr::RootOf:
      return eval_rootof(e, prec);
  }
  throw scalar_error("bad expr");
}

}  // namespace

Scalar make_ball_scalar(ExprPtr e, mpfr_prec_t prec) {
  Ball b = eval_expr(*e, prec);
  Scalar s(std::move(b), e);
  return s;
}

Scalar make_root_scalar(const std::vector<Scalar>& coeffs, double snap_re, double snap_im,
                        double snap_rad, mpfr_prec_t prec) {
  auto n = std::make_shared<Expr>();
  n->kind = Expr::RootOf;
  for (const auto& c : coeffs) {
    ExprPtr ce = expr_of(c);
    if (!ce) throw scalar_error("root-of coefficient has no lineage");
    n->coeffs.push_back(ce);
  }
  n->snap_re = snap_re;
  n->snap_im = snap_im;
  n->snap_rad = snap_rad;
  return make_ball_scalar(n, prec);
}

// ---------------------------------------------------------------------------
// Scalar arithmetic.
// ---------------------------------------------------------------------------

namespace {

// Exact binary op when representable, otherwise nullopt.
std::optional<Exact> exact_add(const Exact& x, const Exact& y, int sign) {
  GaussQ yb = (sign < 0) ? -y.b : y.b;
  GaussQ ya = (sign < 0) ? -y.a : y.a;
  if (x.is_gaussian() && y.is_gaussian()) {
    Exact r(x.a + ya);
    return r;
  }
  long d = x.is_gaussian() ? y.d : x.d;
  if (!x.is_gaussian() && !y.is_gaussian() && x.d != y.d) return std::nullopt;
  Exact r;
  r.d = d;
  r.a = x.a + ya;
  r.b = (x.is_gaussian() ? GaussQ{} : x.b) + (y.is_gaussian() ? GaussQ{} : yb);
  if (r.b.is_zero()) r.d = 1;
  return r;
}

std::optional<Exact> exact_mul(const Exact& x, const Exact& y) {
  if (x.is_gaussian() && y.is_gaussian()) return Exact(x.a * y.a);
  if (!x.is_gaussian() && !y.is_gaussian() && x.d != y.d) return std::nullopt;
  long d = x.is_gaussian() ? y.d : x.d;
  GaussQ xb = x.is_gaussian() ? GaussQ{} : x.b;
  GaussQ yb = y.is_gaussian() ? GaussQ{} : y.b;
  Exact r;
  r.d = d;
  r.a = x.a * y.a + xb * yb * GaussQ{Rat(d)};
  r.b = x.a * yb + xb * y.a;
  if (r.b.is_zero()) r.d = 1;
  return r;
}

std::optional<Exact> exact_inv(const Exact& x) {
  if (x.is_zero()) throw scalar_error("division by zero");
  if (x.is_gaussian()) return Exact(GaussQ{Rat(1)} / x.a);
  // 1/(a+b sqrt d) = (a - b sqrt d) / (a^2 - b^2 d)
  GaussQ n = x.a * x.a - x.b * x.b * GaussQ{Rat(x.d)};
  if (n.is_zero()) throw scalar_error("division by zero (tower norm)");
  Exact r;
  r.d = x.d;
  r.a = x.a / n;
  r.b = -(x.b / n);
  if (r.b.is_zero()) r.d = 1;
  return r;
}

Scalar fall_to_ball(Expr::Kind k, const Scalar& x, const Scalar& y) {
  ExprPtr ex = expr_of(x), ey = expr_of(y);
  mpfr_prec_t p = scalar_options().default_prec;
  if (!x.is_exact()) p = std::max(p, x.ball().prec);
  if (!y.is_exact()) p = std::max(p, y.ball().prec);
  if (ex && ey) return make_ball_scalar(expr_bin(k, ex, ey), p);
  throw scalar_error("operand without lineage");
}

}  // namespace

bool Scalar::is_exact_one() const {
  return is_exact() && exact().is_gaussian() && exact().a == GaussQ{Rat(1)};
}

Scalar Scalar::operator-() const {
  if (is_exact()) {
    Exact r = exact();
    r.a = -r.a;
    r.b = -r.b;
    return Scalar(std::move(r));
  }
  ExprPtr e = lineage();
  Ball b = ball_neg(ball());
  Scalar s(std::move(b), e ? expr_bin(Expr::Neg, e, nullptr) : nullptr);
  return s;
}

Scalar Scalar::operator+(const Scalar& o) const {
  if (is_exact() && o.is_exact()) {
    if (auto r = exact_add(exact(), o.exact(), +1)) return Scalar(std::move(*r));
  }
  if (is_exact_zero()) return o;
  if (o.is_exact_zero()) return *this;
  return fall_to_ball(Expr::Add, *this, o);
}

Scalar Scalar::operator-(const Scalar& o) const {
  if (is_exact() && o.is_exact()) {
    if (auto r = exact_add(exact(), o.exact(), -1)) return Scalar(std::move(*r));
  }
  if (o.is_exact_zero()) return *this;
  return fall_to_ball(Expr::Sub, *this, o);
}

Scalar Scalar::operator*(const Scalar& o) const {
  if (is_exact_zero() || o.is_exact_zero()) return Scalar();
  if (is_exact() && o.is_exact()) {
    if (auto r = exact_mul(exact(), o.exact())) return Scalar(std::move(*r));
  }
  return fall_to_ball(Expr::Mul, *this, o);
}

Scalar Scalar::operator/(const Scalar& o) const {
  if (o.is_exact()) {
    if (o.exact().is_zero()) throw scalar_error("division by zero");
    if (is_exact()) {
      auto oi = exact_inv(o.exact());
      if (oi) {
        if (auto r = exact_mul(exact(), *oi)) return Scalar(std::move(*r));
      }
    }
  }
  if (is_exact_zero()) {
    if (!o.is_exact() && o.ball().contains_zero())
      throw precision_error("0 / ball containing zero");
    return Scalar();
  }
  return fall_to_ball(Expr::Div, *this, o);
}

Scalar Scalar::pow(long k) const {
  if (k == 0) return Scalar(1);
  if (is_exact()) {
    bool invert = k < 0;
    long kk = invert ? -k : k;
    Exact acc(Rat(1));
    Exact sq = exact();
    while (kk > 0) {
      if (kk & 1) {
        auto r = exact_mul(acc, sq);
        acc = *r;  // same tower, cannot fail
      }
      kk >>= 1;
      if (kk) sq = *exact_mul(sq, sq);
    }
    if (invert) return Scalar(1) / Scalar(acc);
    return Scalar(acc);
  }
  ExprPtr e = lineage();
  if (!e) throw scalar_error("pow of ball without lineage");
  auto n = std::make_shared<Expr>();
  n->kind = Expr::Pow;
  n->a = e;
  n->k = k;
  return make_ball_scalar(n, ball().prec);
}

Scalar Scalar::conj_if_exact() const {
  if (!is_exact()) throw scalar_error("conj of inexact scalar");
  Exact r = exact();
  r.a = r.a.conj();
  r.b = r.b.conj();
  return Scalar(std::move(r));
}

Ball Scalar::enclosure(mpfr_prec_t prec) const {
  if (is_exact()) return eval_exact(exact(), prec);
  if (lineage()) return eval_expr(*lineage(), prec);
  return ball();
}

double Scalar::approx_re() const {
  Ball b = enclosure(64);
  return mpfr_get_d(b.re, MPFR_RNDN);
}

double Scalar::approx_im() const {
  Ball b = enclosure(64);
  return mpfr_get_d(b.im, MPFR_RNDN);
}

double Scalar::approx_abs() const {
  Ball b = enclosure(64);
  return b.approx_abs();
}

// ---------------------------------------------------------------------------
// Sign certification / escalation.
// ---------------------------------------------------------------------------

Sign certify_sign(const Scalar& x) {
  if (x.is_exact()) {
    if (x.exact().is_zero()) return Sign::Zero;
    // a + b sqrt(d) = 0 with (a,b) != (0,0) is impossible in Q(i,sqrt d)
    return Sign::NonZero;
  }
  if (!x.ball().contains_zero()) return Sign::NonZero;
  if (x.lineage()) {
    mpfr_prec_t p = x.ball().prec;
    const mpfr_prec_t cap = scalar_options().max_prec;
    while (p < cap) {
      p = std::min(cap, p * 2);
      try {
        Ball b = eval_expr(*x.lineage(), p);
        if (!b.contains_zero()) return Sign::NonZero;
      } catch (const precision_error&) {
        // sub-expression undecidable at this precision; keep doubling
      }
    }
  }
  return Sign::Undecided;
}

Sign sign_or_undecided(const Scalar& x) { return certify_sign(x); }

bool certified_nonzero(const Scalar& x) {
  Sign s = certify_sign(x);
  if (s == Sign::Undecided)
    throw precision_error("sign undecided at precision cap: " + x.str());
  return s == Sign::NonZero;
}

bool certified_equal(const Scalar& x, const Scalar& y) { return !certified_nonzero(x - y); }

Scalar escalate(const Scalar& x, mpfr_prec_t target_bits) {
  if (x.is_exact()) return x;
  if (!x.lineage()) throw scalar_error("escalate: value has no expression lineage");
  if (target_bits <= x.ball().prec) return x;
  Ball b = eval_expr(*x.lineage(), target_bits);
  // monotone: never grow the radius past the current enclosure
  if (mpfr_cmp(b.rad, x.ball().rad) > 0) mpfr_set(b.rad, x.ball().rad, MPFR_RNDU);
  return Scalar(std::move(b), x.lineage());
}

bool certified_abs_below(const Scalar& x, long e) {
  Ball b = x.enclosure(x.is_exact() ? scalar_options().default_prec : x.ball().prec);
  mpfr_t up;
  mpfr_init2(up, kRadPrec);
  abs_upper(up, b);
  bool ok = mpfr_cmp_ui_2exp(up, 1, e) < 0;
  mpfr_clear(up);
  return ok;
}

// ---------------------------------------------------------------------------
// Square roots / roots of unity.
// ---------------------------------------------------------------------------

namespace {

// r = s^2 * d with d squarefree, via bounded trial division; nullopt if the
// remaining cofactor cannot be certified squarefree.
std::optional<std::pair<Rat, long>> squarefree_split(const Rat& r) {
  if (r == 0) return std::make_pair(Rat(0), 1L);
  Int n = num(r) * den(r);  // sqrt(p/q) = sqrt(pq)/q
  Int s(1), d(1);
  Int m = abs(n);
  for (long p = 2; p * p <= 1000000L * 1000000L && m > 1; ++p) {
    if (p > 1000000L) break;
    if (m % p == 0) {
      int e = 0;
      while (m % p == 0) {
        m /= p;
        ++e;
      }
      for (int k = 0; k < e / 2; ++k) s *= p;
      if (e % 2) d *= p;
    }
  }
  if (m > 1) {
    if (mpz_perfect_square_p(m.get_mpz_t())) {
      Int rt;
      mpz_sqrt(rt.get_mpz_t(), m.get_mpz_t());
      s *= rt;
    } else if (m.fits_slong_p()) {
      d *= m;  // cofactor has no square factor below 10^6; if it is not
               // squarefree we only lose exactness, never soundness, since the
               // value s*sqrt(d) is still correct.
    } else {
      return std::nullopt;
    }
  }
  if (!d.fits_slong_p()) return std::nullopt;
  Rat sq(s, den(r));
  sq.canonicalize();
  return std::make_pair(sq, to_long(d));
}

std::optional<Rat> rational_sqrt(const Rat& r) {
  if (r < 0) return std::nullopt;
  Int ns, ds;
  if (!mpz_perfect_square_p(num(r).get_mpz_t())) return std::nullopt;
  if (!mpz_perfect_square_p(den(r).get_mpz_t())) return std::nullopt;
  mpz_sqrt(ns.get_mpz_t(), num(r).get_mpz_t());
  mpz_sqrt(ds.get_mpz_t(), den(r).get_mpz_t());
  return Rat(ns, ds);
}

// Exact sqrt of a Gaussian rational, staying in Q(i, sqrt d).
std::optional<Exact> exact_sqrt(const GaussQ& q) {
  if (q.is_zero()) return Exact(Rat(0));
  if (q.is_real()) {
    Rat r = q.re;
    bool neg = r < 0;
    auto sf = squarefree_split(neg ? Rat(-r) : r);
    if (!sf) return std::nullopt;
    auto [s, d] = *sf;
    Exact out;
    if (d == 1) {
      out.a = neg ? GaussQ{Rat(0), s} : GaussQ{s};
      return out;
    }
    out.d = d;
    out.b = neg ? GaussQ{Rat(0), s} : GaussQ{s};
    return out;
  }
  // (u+vi)^2 = re+im*i  needs norm a rational square
  auto n = rational_sqrt(q.norm());
  if (!n) return std::nullopt;
  auto u2 = (q.re + *n) / 2;
  auto u = rational_sqrt(u2);
  if (!u) return std::nullopt;
  if (*u == 0) return std::nullopt;
  Rat v = q.im / (2 * (*u));
  return Exact(GaussQ{*u, v});
}

// sqrt staying inside Q(i, sqrt d): solve (a + b sqrt d)^2 = A + B sqrt d
std::optional<Exact> exact_sqrt_tower(const Exact& e) {
  if (e.is_gaussian()) return exact_sqrt(e.a);
  const GaussQ& A = e.a;
  const GaussQ& B = e.b;
  GaussQ t = A * A - B * B * GaussQ{Rat(e.d)};
  auto st = exact_sqrt(t);
  if (!st || !st->is_gaussian()) return std::nullopt;
  for (int sign = 0; sign < 2; ++sign) {
    GaussQ s = sign ? -st->a : st->a;
    GaussQ u2 = (A + s) * GaussQ{Rat(1, 2)};
    auto u = exact_sqrt(u2);
    if (!u || !u->is_gaussian() || u->a.is_zero()) continue;
    GaussQ b = B / (u->a * GaussQ{Rat(2)});
    Exact r;
    r.d = e.d;
    r.a = u->a;
    r.b = b;
    GaussQ va = r.a * r.a + r.b * r.b * GaussQ{Rat(e.d)};
    GaussQ vb = r.a * r.b * GaussQ{Rat(2)};
    if (va == A && vb == B) return r;
  }
  return std::nullopt;
}

}  // namespace

Scalar scalar_sqrt(const Scalar& x, bool allow_tower) {
  if (x.is_exact() && allow_tower && !x.exact().is_gaussian()) {
    if (auto e = exact_sqrt_tower(x.exact())) return Scalar(std::move(*e));
  }
  if (x.is_exact() && x.exact().is_gaussian()) {
    if (allow_tower) {
      if (auto e = exact_sqrt(x.exact().a)) return Scalar(std::move(*e));
    } else if (x.exact().a.is_real() && x.exact().a.re >= 0) {
      if (auto r = rational_sqrt(x.exact().a.re)) return Scalar(*r);
    } else if (x.exact().a.is_real()) {
      if (auto r = rational_sqrt(-x.exact().a.re))
        return Scalar(Exact(GaussQ{Rat(0), *r}));
    }
    // negative real arguments sit on the branch cut: peel off the i factor
    // so the ball evaluation stays certifiable
    if (x.exact().a.is_real() && x.exact().a.re < 0)
      return Scalar::i() * scalar_sqrt(Scalar(-x.exact().a.re), allow_tower);
  }
  ExprPtr e = expr_of(x);
  if (!e) throw scalar_error("sqrt of value without lineage");
  auto n = expr_bin(Expr::Sqrt, e, nullptr);
  mpfr_prec_t p = x.is_exact() ? scalar_options().default_prec : x.ball().prec;
  // escalate past the branch cut obstruction where possible
  const mpfr_prec_t cap = scalar_options().max_prec;
  for (;;) {
    try {
      return make_ball_scalar(n, p);
    } catch (const precision_error&) {
      if (p >= cap) throw;
      p = std::min(cap, p * 2);
    }
  }
}

Scalar root_of_unity(const Rat& phase) {
  Rat ph = phase;
  ph.canonicalize();
  ph = ph - Rat(floor_int(ph));
  long q = den_l(ph);
  long p = num_l(ph);
  switch (q) {
    case 1:
      return Scalar(1);
    case 2:
      return Scalar(-1);
    case 4:
      return (p % 4 == 1) ? Scalar::i() : -Scalar::i();
    case 3:
    case 6: {
      // e(k/6) = cos + i sin with cos in {+-1/2}, sin = +-sqrt(3)/2
      long k6 = (q == 3) ? 2 * p : p;  // sixths
      k6 %= 6;
      Rat c, s2;  // cos, sin coefficient of sqrt(3)
      switch (k6) {
        case 1: c = Rat(1, 2); s2 = Rat(1, 2); break;
        case 2: c = Rat(-1, 2); s2 = Rat(1, 2); break;
        case 4: c = Rat(-1, 2); s2 = Rat(-1, 2); break;
        case 5: c = Rat(1, 2); s2 = Rat(-1, 2); break;
        default: throw scalar_error("bad sixth");
      }
      Exact e;
      e.d = 3;
      e.a = GaussQ{c};
      e.b = GaussQ{Rat(0), s2};
      return Scalar(std::move(e));
    }
    default: {
      auto n = std::make_shared<Expr>();
      n->kind = Expr::Unity;
      n->phase = ph;
      return make_ball_scalar(n, scalar_options().default_prec);
    }
  }
}

Scalar real_part(const Scalar& x) {
  if (x.is_exact()) {
    Exact r = x.exact();
    r.a.im = 0;
    r.b.im = 0;
    if (r.b.is_zero()) r.d = 1;
    return Scalar(std::move(r));
  }
  throw scalar_error("real_part of inexact scalar unsupported");
}

Scalar imag_part(const Scalar& x) {
  if (x.is_exact()) {
    Exact r = x.exact();
    r.a = GaussQ{r.a.im};
    r.b = GaussQ{r.b.im};
    if (r.b.is_zero()) r.d = 1;
    return Scalar(std::move(r));
  }
  throw scalar_error("imag_part of inexact scalar unsupported");
}

// ---------------------------------------------------------------------------
// Parsing / printing.
// ---------------------------------------------------------------------------

namespace {

struct Parser {
  const std::string& s;
  size_t pos = 0;
  bool tower;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  char peek() {
    skip();
    return pos < s.size() ? s[pos] : '\0';
  }

  Scalar expr() {
    Scalar v = term();
    for (;;) {
      if (eat('+'))
        v = v + term();
      else if (eat('-'))
        v = v - term();
      else
        return v;
    }
  }

  Scalar term() {
    Scalar v = factor();
    for (;;) {
      if (eat('*'))
        v = v * factor();
      else if (eat('/'))
        v = v / factor();
      else
        return v;
    }
  }

  Scalar factor() {
    Scalar v = base();
    if (eat('^')) {
      bool neg = eat('-');
      std::string digits;
      skip();
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
        digits += s[pos++];
      if (digits.empty()) throw scalar_error("expected integer exponent");
      long k = std::stol(digits);
      v = v.pow(neg ? -k : k);
    }
    return v;
  }

  Scalar base() {
    skip();
    if (eat('-')) return -factor();
    if (eat('(')) {
      Scalar v = expr();
      if (!eat(')')) throw scalar_error("expected ')'");
      return v;
    }
    if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      std::string digits;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos])))
        digits += s[pos++];
      return Scalar(parse_rat(digits));
    }
    if (s.compare(pos, 4, "sqrt") == 0) {
      pos += 4;
      if (!eat('(')) throw scalar_error("expected '(' after sqrt");
      Scalar arg = expr();
      if (!eat(')')) throw scalar_error("expected ')'");
      if (!arg.is_exact() || !arg.exact().is_gaussian() || !arg.exact().a.is_real())
        throw scalar_error("sqrt argument must be an exact rational");
      return scalar_sqrt(arg, tower);
    }
    if (pos < s.size() && s[pos] == 'i') {
      ++pos;
      return Scalar::i();
    }
    throw scalar_error("parse error at position " + std::to_string(pos) + " in '" + s + "'");
  }
};

std::string gauss_str(const GaussQ& g) {
  if (g.is_zero()) return "0";
  std::ostringstream os;
  bool wrote = false;
  if (g.re != 0) {
    os << to_string(g.re);
    wrote = true;
  }
  if (g.im != 0) {
    if (wrote && g.im > 0) os << "+";
    if (g.im == 1)
      os << "i";
    else if (g.im == -1)
      os << "-i";
    else
      os << to_string(g.im) << "*i";
  }
  return os.str();
}

std::string expr_str(const Expr& e);

std::string expr_operand(const ExprPtr& p) { return "(" + expr_str(*p) + ")"; }

std::string exact_expr(const Exact& e) {
  if (e.is_gaussian()) return "(" + gauss_str(e.a) + ")";
  std::ostringstream os;
  os << "((" << gauss_str(e.a) << ")+(" << gauss_str(e.b) << ")*sqrt(" << e.d << "))";
  return os.str();
}

std::string expr_str(const Expr& e) {
  switch (e.kind) {
    case Expr::Const:
      return exact_expr(e.cval);
    case Expr::Add:
      return expr_operand(e.a) + "+" + expr_operand(e.b);
    case Expr::Sub:
      return expr_operand(e.a) + "-" + expr_operand(e.b);
    case Expr::Mul:
      return expr_operand(e.a) + "*" + expr_operand(e.b);
    case Expr::Div:
      return expr_operand(e.a) + "/" + expr_operand(e.b);
    case Expr::Neg:
      return "-" + expr_operand(e.a);
    case Expr::Sqrt:
      return "sqrt" + expr_operand(e.a);
    case Expr::Pow:
      return expr_operand(e.a) + "^" + std::to_string(e.k);
    case Expr::Unity:
      return "unity(" + to_string(e.phase) + ")";
    case Expr::RootOf:
      return "rootof(...)";
  }
  return "?";
}

}  // namespace

Scalar parse_scalar(const std::string& text, bool allow_tower) {
  Parser p{text, 0, allow_tower};
  Scalar v = p.expr();
  p.skip();
  if (p.pos != text.size()) throw scalar_error("trailing input in scalar: " + text);
  return v;
}

std::string Scalar::str() const {
  if (is_exact()) {
    const Exact& e = exact();
    if (e.is_gaussian()) return gauss_str(e.a);
    return gauss_str(e.a) + " + (" + gauss_str(e.b) + ")*sqrt(" + std::to_string(e.d) + ")";
  }
  return ball().str();
}

std::string Scalar::expression() const {
  if (is_exact()) return exact_expr(exact());
  if (lineage()) return expr_str(*lineage());
  return ball().str();
}

}  // namespace polar
