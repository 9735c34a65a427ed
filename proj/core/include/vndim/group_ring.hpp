#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "vndim/groupoid.hpp"
#include "vndim/rational.hpp"

namespace vndim {

/// Normal form of a group element of (sum of Z/2 lamps) x| shifts: the lamp
/// support written first, then the per-tape net shift. The shift relation is
/// t g_i t^-1 = g_{i-1}.
struct GroupWord {
  std::set<std::pair<int, std::int64_t>> lamps;  // (tape, index)
  std::vector<std::int64_t> shifts;              // per tape

  bool operator==(const GroupWord&) const = default;
  bool operator<(const GroupWord& o) const {
    if (lamps != o.lamps) return lamps < o.lamps;
    return shifts < o.shifts;
  }
};

/// Formal rational combination of group words; the convolution/trace oracle
/// for the groupoid side.
struct GroupRingExpr {
  int tapes = 1;
  std::map<GroupWord, Rational> coeffs;

  bool is_zero() const { return coeffs.empty(); }
};

GroupRingExpr gr_identity(int tapes = 1);
GroupRingExpr gr_shift(int tapes, int tape, std::int64_t k);
GroupRingExpr gr_lamp(int tapes, int tape, std::int64_t index);
/// (e + g_i)/2, the projection whose dual is a cylinder indicator.
GroupRingExpr gr_proj(int tapes, int tape, std::int64_t index);

GroupRingExpr gr_add(const GroupRingExpr& a, const GroupRingExpr& b);
GroupRingExpr gr_scale(const Rational& c, const GroupRingExpr& a);

/// Convolution in normal form using the semidirect relations.
GroupRingExpr formal_product(const GroupRingExpr& a, const GroupRingExpr& b);
GroupRingExpr formal_power(const GroupRingExpr& a, unsigned n);
/// Star: inverse words, conjugated (here: unchanged rational) coefficients.
GroupRingExpr formal_star(const GroupRingExpr& a);
/// Coefficient of the identity.
Rational formal_trace(const GroupRingExpr& e);

std::string gr_str(const GroupRingExpr& e);

/// The standard walk element (1/2)(t + t^-1 + t g + g t^-1) on one tape.
GroupRingExpr gr_lamplighter_walk();

/// Dual translation into the groupoid ring over binary tapes: projections
/// become cylinder indicators, lamps become 2*chi - 1, shifts become shift
/// edges, and products compose with edge-domain pullback. The space must
/// provide one binary tape per group tape. Throws unsupported_atom outside
/// the fragment.
OperatorExpression translate(const SpaceDescriptor& sp, const GroupRingExpr& e);

/// Binary-tape space matching an expression, for callers without one.
SpaceDescriptor translation_space(int tapes);

/// Reads the s-expression format: (shift k), (lamp i a), (proj i),
/// (scale p/q ...), (sum ...), (prod ...). Single-tape.
GroupRingExpr parse_group_ring(const std::string& text);

}  // namespace vndim
