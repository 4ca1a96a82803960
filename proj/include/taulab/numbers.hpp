/// @file numbers.hpp
/// @brief Number-type aliases and small exact-arithmetic helpers.
///
/// Exact work uses GMP-backed integers/rationals; numeric work uses MPFR
/// floats whose decimal precision is set per run (default 50 digits).
#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <stdexcept>
#include <string>

namespace taulab {

using Int  = boost::multiprecision::mpz_int;
using Rat  = boost::multiprecision::mpq_rational;
using Real = boost::multiprecision::mpfr_float;

/// Set the working decimal precision for all subsequently created Reals.
inline void set_precision(unsigned digits10) { Real::default_precision(digits10); }
inline unsigned precision() { return Real::default_precision(); }

inline Real to_real(const Rat& q) { return Real(q); }
inline Real to_real(const Int& n) { return Real(n); }

inline Int factorial(long n) {
  if (n < 0) throw std::domain_error("factorial: negative argument");
  Int r = 1;
  for (long i = 2; i <= n; ++i) r *= i;
  return r;
}

inline Int binomial(long n, long k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  Int r = 1;
  for (long i = 1; i <= k; ++i) { r *= (n - k + i); r /= i; }
  return r;
}

inline Int int_pow(Int base, long e) {
  if (e < 0) throw std::domain_error("int_pow: negative exponent");
  Int r = 1;
  while (e > 0) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

/// base^e for integer e (negative allowed when base != 0).
inline Rat rat_pow(const Rat& base, long e) {
  if (e == 0) return Rat(1);
  if (base == 0) {
    if (e < 0) throw std::domain_error("rat_pow: zero base, negative exponent");
    return Rat(0);
  }
  bool neg = e < 0;
  unsigned long a = neg ? -(unsigned long)e : (unsigned long)e;
  Rat r = 1, b = base;
  while (a > 0) {
    if (a & 1) r *= b;
    b *= b;
    a >>= 1;
  }
  return neg ? Rat(1) / r : r;
}

/// x^n for integer n of either sign.
inline Real real_pow(const Real& x, long n) {
  if (n == 0) return Real(1);
  return boost::multiprecision::pow(x, static_cast<int>(n));
}

/// Parse "p", "p/q", or decimal-free integer strings into an exact rational.
inline Rat parse_rat(const std::string& s) {
  try {
    return Rat(s);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a rational: '" + s + "' (expected p or p/q)");
  }
}

inline std::string rat_str(const Rat& q) { return q.str(); }

}  // namespace taulab
