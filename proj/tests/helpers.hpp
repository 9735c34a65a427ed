#pragma once

#include <random>
#include <vector>

#include "vndim/matrix.hpp"
#include "vndim/rational.hpp"
#include "vndim/space.hpp"

namespace vndim::testing {

inline Rational random_rational(std::mt19937_64& rng, long num_range = 999, long den_range = 999) {
  std::uniform_int_distribution<long> num(-num_range, num_range);
  std::uniform_int_distribution<long> den(1, den_range);
  return Rational(num(rng), den(rng));
}

inline RationalMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                    long range = 5) {
  RationalMatrix m(rows, cols);
  std::uniform_int_distribution<long> val(-range, range);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = Rational(val(rng));
  return m;
}

inline SpaceDescriptor binary_tape_space() {
  SpaceDescriptor sp;
  sp.tapes = {Alphabet{"tape", {"0", "1"}}};
  return sp;
}

inline Cylinder random_cylinder(std::mt19937_64& rng, const SpaceDescriptor& sp, int max_cells = 6,
                                Coord span = 8) {
  Cylinder c = Cylinder::whole_space(sp);
  std::uniform_int_distribution<int> ncells(0, max_cells);
  std::uniform_int_distribution<Coord> coord(-span, span);
  for (int t = 0; t < sp.tape_count(); ++t) {
    const int n = ncells(rng);
    std::uniform_int_distribution<int> sym(0, sp.tapes[t].size() - 1);
    for (int i = 0; i < n; ++i) c.cells[t][coord(rng)] = SymbolSet{1} << sym(rng);
  }
  for (int f = 0; f < sp.factor_count(); ++f) {
    std::uniform_int_distribution<int> v(-1, sp.factors[f].size() - 1);
    int pick = v(rng);
    if (pick >= 0) c.factor[f] = static_cast<std::uint8_t>(pick);
  }
  return c;
}

}  // namespace vndim::testing
