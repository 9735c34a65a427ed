#include "vndim/matrix.hpp"

#include <sstream>
#include <stdexcept>

namespace vndim {

RationalMatrix RationalMatrix::identity(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Rational(1);
  return m;
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
  return t;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& o) const {
  if (cols_ != o.rows_) throw std::logic_error("matrix product shape mismatch");
  RationalMatrix p(rows_, o.cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Rational& v = at(r, k);
      if (v.is_zero()) continue;
      for (std::size_t c = 0; c < o.cols_; ++c) p.at(r, c) += v * o.at(k, c);
    }
  return p;
}

RationalMatrix RationalMatrix::operator+(const RationalMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw std::logic_error("matrix sum shape mismatch");
  RationalMatrix s(rows_, cols_);
  for (std::size_t i = 0; i < e_.size(); ++i) s.e_[i] = e_[i] + o.e_[i];
  return s;
}

bool RationalMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = r + 1; c < cols_; ++c)
      if (at(r, c) != at(c, r)) return false;
  return true;
}

Rational RationalMatrix::trace() const {
  if (rows_ != cols_) throw std::logic_error("trace of non-square matrix");
  Rational t(0);
  for (std::size_t i = 0; i < rows_; ++i) t += at(i, i);
  return t;
}

std::string RationalMatrix::str() const {
  std::ostringstream out;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out << (c ? " " : "") << at(r, c).str();
    out << "\n";
  }
  return out.str();
}

std::size_t rank(const RationalMatrix& m) {
  const std::size_t nr = m.rows(), nc = m.cols();
  if (nr == 0 || nc == 0) return 0;

  // Clear denominators per row, then run Bareiss on integers.
  std::vector<std::vector<mpz_class>> a(nr, std::vector<mpz_class>(nc));
  for (std::size_t r = 0; r < nr; ++r) {
    mpz_class l = 1;
    for (std::size_t c = 0; c < nc; ++c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m.at(r, c).den().get_mpz_t());
    for (std::size_t c = 0; c < nc; ++c) a[r][c] = m.at(r, c).num() * (l / m.at(r, c).den());
  }

  mpz_class prev = 1;
  std::size_t rk = 0;
  for (std::size_t col = 0; col < nc && rk < nr; ++col) {
    std::size_t piv = rk;
    while (piv < nr && a[piv][col] == 0) ++piv;
    if (piv == nr) continue;
    if (piv != rk) std::swap(a[piv], a[rk]);
    for (std::size_t r = rk + 1; r < nr; ++r) {
      for (std::size_t c = col + 1; c < nc; ++c) {
        mpz_class t = a[rk][col] * a[r][c] - a[r][col] * a[rk][c];
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
        a[r][c] = t;
      }
      a[r][col] = 0;
    }
    prev = a[rk][col];
    ++rk;
  }
  return rk;
}

std::size_t kernel_dimension(const RationalMatrix& m) { return m.cols() - rank(m); }

RationalMatrix gram(const RationalMatrix& m) { return m.transpose() * m; }

Rational trace_power(const RationalMatrix& m, unsigned n) {
  if (m.rows() != m.cols()) throw std::logic_error("trace_power of non-square matrix");
  if (n == 0) return Rational(static_cast<long>(m.rows()));
  RationalMatrix p = m;
  for (unsigned i = 1; i < n; ++i) p = p * m;
  return p.trace();
}

}  // namespace vndim
