#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

#include "vndim/errors.hpp"

namespace vndim {

/// Exact rational scalar. Always reduced, denominator >= 1. Every measure,
/// trace and dimension in the library is one of these; floating point only
/// appears in rendering and in the Monte Carlo standard error.
class Rational {
 public:
  Rational() : v_(0) {}
  Rational(long n) : v_(n) {}  // NOLINT: implicit by design
  Rational(long n, long d);
  explicit Rational(const mpz_class& n) : v_(n) {}
  Rational(const mpz_class& n, const mpz_class& d);
  explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }

  // 2^e for e of either sign.
  static Rational pow2(long e);
  // Parses "p/q" or "p". Throws config_error on malformed input or q = 0.
  static Rational parse(const std::string& s);

  const mpz_class& num() const { return v_.get_num(); }
  const mpz_class& den() const { return v_.get_den(); }
  const mpq_class& raw() const { return v_; }

  bool is_zero() const { return sgn(v_) == 0; }
  int sign() const { return sgn(v_); }
  Rational abs() const { return Rational(mpq_class(::abs(v_))); }

  Rational operator-() const { return Rational(mpq_class(-v_)); }
  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  Rational pow(unsigned n) const;

  /// Text form "p/q", with "/q" omitted when q = 1.
  std::string str() const;
  double to_double() const { return v_.get_d(); }

 private:
  mpq_class v_;
};

/// Decimal rendering truncated toward zero, `digits` places after the point.
/// The result is an approximation; callers label it as such when emitting.
std::string to_decimal(const Rational& r, int digits);

/// Upper bound first_omitted / (1 - ratio) for a geometric tail
/// sum_{n>=0} first_omitted * ratio^n. Requires 0 <= ratio < 1 and
/// first_omitted >= 0; throws divergent_tail otherwise.
Rational geometric_tail(const Rational& first_omitted, const Rational& ratio);

/// coefficient * sum over `exponents` of 2^(-e), exact.
/// Exponents must be positive and strictly increasing.
Rational dyadic_series_partial(const std::vector<long>& exponents, const Rational& coefficient);

/// Two-sided rational enclosure; width() is the certified truncation error.
struct Interval {
  Rational lo;
  Rational hi;

  Interval() = default;
  explicit Interval(const Rational& point) : lo(point), hi(point) {}
  Interval(Rational l, Rational h);

  Rational width() const { return hi - lo; }
  bool contains(const Rational& r) const { return lo <= r && r <= hi; }
  bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }

  Interval operator+(const Interval& o) const { return {lo + o.lo, hi + o.hi}; }

  /// Text form "[p/q, r/s]".
  std::string str() const;
};

/// Enclosure of c - iv (used for mu(I) - Omega bounds).
Interval sub_from(const Rational& c, const Interval& iv);

}  // namespace vndim
