#pragma once

#include <cstddef>
#include <vector>

#include "vndim/rational.hpp"

namespace vndim {

/// Dense matrix over exact rationals. Diagrams at desk scale stay well under
/// a thousand vertices, so density beats sparse bookkeeping here.
class RationalMatrix {
 public:
  RationalMatrix() : rows_(0), cols_(0) {}
  RationalMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), e_(rows * cols) {}

  static RationalMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rational& at(std::size_t r, std::size_t c) { return e_[r * cols_ + c]; }
  const Rational& at(std::size_t r, std::size_t c) const { return e_[r * cols_ + c]; }

  RationalMatrix transpose() const;
  RationalMatrix operator*(const RationalMatrix& o) const;
  RationalMatrix operator+(const RationalMatrix& o) const;
  bool operator==(const RationalMatrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_; }

  bool is_symmetric() const;
  Rational trace() const;

  std::string str() const;  // debug grid of rationals

 private:
  std::size_t rows_, cols_;
  std::vector<Rational> e_;
};

/// Rank by fraction-free (Bareiss) elimination on the denominator-cleared
/// integer matrix. Exact; row scaling does not change the result.
std::size_t rank(const RationalMatrix& m);

/// cols - rank. For operator semantics of non-self-adjoint T callers may pass
/// gram(T) first; over the rationals ker M = ker M^t M, so the value agrees.
std::size_t kernel_dimension(const RationalMatrix& m);

/// transpose(M) * M. Symmetric positive semidefinite.
RationalMatrix gram(const RationalMatrix& m);

/// tr(M^n), exact. tr(M^0) = number of rows.
Rational trace_power(const RationalMatrix& m, unsigned n);

}  // namespace vndim
