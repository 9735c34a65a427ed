#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "helpers.hpp"
#include "vndim/matrix.hpp"

using namespace vndim;

namespace {

RationalMatrix path_adjacency(std::size_t n) {
  RationalMatrix m(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    m.at(i, i + 1) = Rational(1);
    m.at(i + 1, i) = Rational(1);
  }
  return m;
}

// Walk-enumeration oracle: weighted closed walks of length n, by recursion.
Rational closed_walks(const RationalMatrix& m, unsigned n) {
  const std::size_t sz = m.rows();
  Rational total(0);
  std::function<void(std::size_t, std::size_t, unsigned, Rational)> rec =
      [&](std::size_t start, std::size_t at, unsigned left, Rational weight) {
        if (left == 0) {
          if (at == start) total += weight;
          return;
        }
        for (std::size_t next = 0; next < sz; ++next) {
          if (!m.at(at, next).is_zero()) rec(start, next, left - 1, weight * m.at(at, next));
        }
      };
  for (std::size_t v = 0; v < sz; ++v) rec(v, v, n, Rational(1));
  return total;
}

}  // namespace

TEST_CASE("kernel dimension on paths") {
  CHECK(kernel_dimension(path_adjacency(2)) == 0);

  // P3: by hand, (1, 0, -1) spans the kernel.
  RationalMatrix p3 = path_adjacency(3);
  RationalMatrix v(3, 1);
  v.at(0, 0) = Rational(1);
  v.at(2, 0) = Rational(-1);
  RationalMatrix image = p3 * v;
  for (std::size_t r = 0; r < 3; ++r) CHECK(image.at(r, 0).is_zero());
  CHECK(kernel_dimension(p3) == 1);

  RationalMatrix zero1(1, 1);
  CHECK(kernel_dimension(zero1) == 1);

  // Paths: kernel dim 1 iff odd vertex count.
  for (std::size_t n = 1; n <= 12; ++n)
    CHECK(kernel_dimension(path_adjacency(n)) == (n % 2 == 1 ? 1 : 0));
}

TEST_CASE("rank + kernel = cols, invariant under row operations") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    std::uniform_int_distribution<std::size_t> dim(1, 6);
    RationalMatrix m = testing::random_matrix(rng, dim(rng), dim(rng));
    CHECK(rank(m) + kernel_dimension(m) == m.cols());

    // Permute two rows and scale one by a nonzero rational.
    RationalMatrix p = m;
    if (p.rows() >= 2) {
      for (std::size_t c = 0; c < p.cols(); ++c) std::swap(p.at(0, c), p.at(p.rows() - 1, c));
    }
    for (std::size_t c = 0; c < p.cols(); ++c) p.at(0, c) *= Rational(3, 7);
    CHECK(kernel_dimension(p) == kernel_dimension(m));
  }
}

TEST_CASE("gram") {
  RationalMatrix id = RationalMatrix::identity(4);
  CHECK(gram(id) == id);

  RationalMatrix zcol(3, 2);
  zcol.at(0, 0) = Rational(1);
  zcol.at(1, 0) = Rational(2);
  RationalMatrix g = gram(zcol);
  CHECK(g.at(1, 1).is_zero());
  CHECK(g.is_symmetric());

  std::mt19937_64 rng(29);
  for (int i = 0; i < 200; ++i) {
    std::uniform_int_distribution<std::size_t> dim(1, 5);
    RationalMatrix m = testing::random_matrix(rng, dim(rng), dim(rng));
    CHECK(kernel_dimension(gram(m)) == kernel_dimension(m));
    CHECK(gram(m).is_symmetric());
  }
}

TEST_CASE("trace powers") {
  RationalMatrix p3 = path_adjacency(3);
  CHECK(trace_power(p3, 0) == Rational(3));
  CHECK(trace_power(p3, 2) == Rational(4));

  std::mt19937_64 rng(31);
  for (int i = 0; i < 50; ++i) {
    std::uniform_int_distribution<std::size_t> dim(1, 4);
    std::uniform_int_distribution<unsigned> len(0, 4);
    RationalMatrix m = testing::random_matrix(rng, dim(rng), dim(rng), 2);
    while (m.rows() != m.cols()) m = testing::random_matrix(rng, dim(rng), dim(rng), 2);
    unsigned n = len(rng);
    CHECK(trace_power(m, n) == closed_walks(m, n));
  }
}

TEST_CASE("adjoint coherence at matrix level") {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 50; ++i) {
    RationalMatrix m = testing::random_matrix(rng, 4, 4);
    CHECK(gram(m) == m.transpose() * m);
    CHECK(m.transpose().transpose() == m);
  }
}
