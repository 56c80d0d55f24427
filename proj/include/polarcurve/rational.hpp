#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace polar {

using Rat = mpq_class;
using Int = mpz_class;

inline Int num(const Rat& q) { return q.get_num(); }
inline Int den(const Rat& q) { return q.get_den(); }

inline long to_long(const Int& z) {
  if (!z.fits_slong_p()) throw std::overflow_error("integer too large: " + z.get_str());
  return z.get_si();
}

inline long num_l(const Rat& q) { return to_long(q.get_num()); }
inline long den_l(const Rat& q) { return to_long(q.get_den()); }

inline bool is_integer(const Rat& q) { return q.get_den() == 1; }

inline Int floor_int(const Rat& q) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline Int ceil_int(const Rat& q) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline Int lcm_int(const Int& a, const Int& b) {
  Int r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Int gcd_int(const Int& a, const Int& b) {
  Int r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

inline Rat rat(long n, long d = 1) { Rat q(n, d); q.canonicalize(); return q; }

// canonicalizing constructor; mpq_class(a, b) alone must not be used with
// arguments that can share a factor
template <typename A, typename B>
inline Rat rq(const A& n, const B& d) {
  Rat q(n, d);
  q.canonicalize();
  return q;
}

// "3/4" or "-7"
inline Rat parse_rat(const std::string& s) {
  Rat q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rat& q) { return q.get_str(); }

}  // namespace polar
