#include "vndim/rational.hpp"

#include <sstream>

namespace vndim {

Rational::Rational(long n, long d) : v_(n, d) {
  if (d == 0) throw config_error("rational with zero denominator");
  v_.canonicalize();
}

Rational::Rational(const mpz_class& n, const mpz_class& d) : v_(n, d) {
  if (sgn(d) == 0) throw config_error("rational with zero denominator");
  v_.canonicalize();
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw config_error("rational division by zero");
  v_ /= o.v_;
  return *this;
}

Rational Rational::pow2(long e) {
  mpz_class p = 1;
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(e < 0 ? -e : e));
  return e >= 0 ? Rational(p) : Rational(mpz_class(1), p);
}

Rational Rational::parse(const std::string& s) {
  if (s.empty()) throw config_error("empty rational literal");
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw config_error("malformed rational literal: " + s);
  if (sgn(q.get_den()) == 0) throw config_error("rational with zero denominator: " + s);
  q.canonicalize();
  return Rational(q);
}

Rational Rational::pow(unsigned n) const {
  Rational acc(1);
  Rational base = *this;
  while (n) {
    if (n & 1) acc *= base;
    base *= base;
    n >>= 1;
  }
  return acc;
}

std::string Rational::str() const {
  if (v_.get_den() == 1) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::string to_decimal(const Rational& r, int digits) {
  if (digits < 1) throw config_error("to_decimal needs digits >= 1");
  mpz_class n = r.num();
  const mpz_class& d = r.den();
  bool neg = sgn(n) < 0;
  if (neg) n = -n;
  mpz_class ip = n / d;
  mpz_class rem = n % d;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  mpz_class frac = rem * scale / d;  // truncation toward zero
  std::string fs = frac.get_str();
  if (static_cast<int>(fs.size()) < digits) fs.insert(0, digits - fs.size(), '0');
  std::ostringstream out;
  if (neg && (ip != 0 || frac != 0)) out << '-';
  out << ip.get_str() << '.' << fs;
  return out.str();
}

Rational geometric_tail(const Rational& first_omitted, const Rational& ratio) {
  if (ratio.sign() < 0 || ratio >= Rational(1))
    throw divergent_tail("geometric_tail needs ratio in [0,1), got " + ratio.str());
  if (first_omitted.sign() < 0)
    throw divergent_tail("geometric_tail needs a nonnegative leading term");
  return first_omitted / (Rational(1) - ratio);
}

Rational dyadic_series_partial(const std::vector<long>& exponents, const Rational& coefficient) {
  Rational sum(0);
  long prev = 0;
  for (long e : exponents) {
    if (e <= prev) throw config_error("dyadic exponents must be positive and strictly increasing");
    sum += Rational::pow2(-e);
    prev = e;
  }
  return coefficient * sum;
}

Interval::Interval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h)) {
  if (hi < lo) throw config_error("interval with hi < lo");
}

std::string Interval::str() const { return "[" + lo.str() + ", " + hi.str() + "]"; }

Interval sub_from(const Rational& c, const Interval& iv) { return {c - iv.hi, c - iv.lo}; }

}  // namespace vndim
