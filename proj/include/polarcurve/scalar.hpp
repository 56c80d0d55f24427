#pragma once

#include <mpfr.h>

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "polarcurve/rational.hpp"

namespace polar {

struct scalar_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a discrete decision cannot be certified at the precision cap.
struct precision_error : scalar_error {
  using scalar_error::scalar_error;
};

struct ScalarOptions {
  mpfr_prec_t default_prec = 128;
  mpfr_prec_t max_prec = 2048;
};

ScalarOptions& scalar_options();  // thread-local

// Gaussian rational a + b*i.
struct GaussQ {
  Rat re, im;

  GaussQ() = default;
  GaussQ(Rat r, Rat i = Rat(0)) : re(std::move(r)), im(std::move(i)) {}

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  GaussQ operator-() const { return {-re, -im}; }
  GaussQ operator+(const GaussQ& o) const { return {re + o.re, im + o.im}; }
  GaussQ operator-(const GaussQ& o) const { return {re - o.re, im - o.im}; }
  GaussQ operator*(const GaussQ& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  GaussQ conj() const { return {re, -im}; }
  Rat norm() const { return re * re + im * im; }
  GaussQ operator/(const GaussQ& o) const {
    Rat n = o.norm();
    if (n == 0) throw scalar_error("division by zero");
    GaussQ t = *this * o.conj();
    return {t.re / n, t.im / n};
  }
  bool operator==(const GaussQ& o) const { return re == o.re && im == o.im; }
};

// Exact element of Q(i, sqrt(d)): a + b*sqrt(d), d > 1 squarefree.
// d == 1 encodes a plain Gaussian rational (b is zero).
struct Exact {
  GaussQ a, b;
  long d = 1;

  Exact() = default;
  Exact(GaussQ g) : a(std::move(g)) {}
  Exact(Rat r) : a(GaussQ(std::move(r))) {}

  bool is_zero() const { return a.is_zero() && (d == 1 || b.is_zero()); }
  bool is_gaussian() const { return d == 1 || b.is_zero(); }
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Complex ball: center at working precision, radius (upper bound), and the
// expression lineage it was evaluated from (when available).
class Ball {
 public:
  Ball();
  Ball(const Ball&);
  Ball(Ball&&) noexcept;
  Ball& operator=(Ball);
  ~Ball();

  mpfr_t re, im, rad;
  mpfr_prec_t prec = 128;

  double approx_abs() const;
  bool contains_zero() const;
  std::string str() const;
};

enum class Sign { Zero, NonZero, Undecided };

class Scalar {
 public:
  Scalar() : v_(Exact{}) {}
  Scalar(Exact e) : v_(std::move(e)) {}
  Scalar(Ball b, ExprPtr lin = nullptr) : v_(std::move(b)), lineage_(std::move(lin)) {}
  Scalar(long n) : v_(Exact{Rat(n)}) {}
  Scalar(const Rat& q) : v_(Exact{q}) {}

  static Scalar zero() { return Scalar(); }
  static Scalar one() { return Scalar(1); }
  static Scalar i() { return Scalar(Exact{GaussQ{Rat(0), Rat(1)}}); }

  bool is_exact() const { return std::holds_alternative<Exact>(v_); }
  const Exact& exact() const { return std::get<Exact>(v_); }
  const Ball& ball() const { return std::get<Ball>(v_); }
  ExprPtr lineage() const { return lineage_; }

  // Known-zero without certification work (exact zeros only).
  bool is_exact_zero() const { return is_exact() && exact().is_zero(); }
  bool is_exact_one() const;

  Scalar operator-() const;
  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator/(const Scalar& o) const;
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }
  Scalar& operator/=(const Scalar& o) { return *this = *this / o; }

  Scalar pow(long k) const;
  Scalar conj_if_exact() const;

  // Complex ball enclosure at the given precision.
  Ball enclosure(mpfr_prec_t prec) const;

  double approx_re() const;
  double approx_im() const;
  double approx_abs() const;

  std::string str() const;             // human-readable
  std::string expression() const;      // re-parsable expression string

 private:
  std::variant<Exact, Ball> v_;
  ExprPtr lineage_;
  friend Scalar make_ball_scalar(ExprPtr e, mpfr_prec_t prec);
};

// --- numfield operations ------------------------------------------------

// Arithmetic over ints, rationals, `i`, `sqrt(n)`, `+ - * / ^`, parentheses.
// With allow_tower, sqrt of a rational yields an exact Q(i,sqrt(d)) element
// when representable; otherwise (and by default) a certified ball enclosure.
Scalar parse_scalar(const std::string& text, bool allow_tower = false);

Sign certify_sign(const Scalar& x);

// True result: x == y certified; throws precision_error when undecidable.
bool certified_equal(const Scalar& x, const Scalar& y);
bool certified_nonzero(const Scalar& x);
// Nonzero check that reports false instead of throwing on "undecided".
Sign sign_or_undecided(const Scalar& x);

Scalar escalate(const Scalar& x, mpfr_prec_t target_bits);

// Square root.  Exact when representable in the tower (allow_tower), else a
// certified enclosure with lineage.
Scalar scalar_sqrt(const Scalar& x, bool allow_tower = true);

// Exact root of unity e^(2*pi*i*phase) for den(phase) in {1,2,3,4,6};
// otherwise a certified enclosure with lineage.
Scalar root_of_unity(const Rat& phase);

// Real part / imaginary part / modulus-squared as Scalars (exact stays exact).
Scalar real_part(const Scalar& x);
Scalar imag_part(const Scalar& x);

// Certified comparison of |x| against a power of two: |x| < 2^e ?
bool certified_abs_below(const Scalar& x, long e);

}  // namespace polar
