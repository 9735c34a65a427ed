#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vndim/oracle.hpp"
#include "vndim/rational.hpp"

namespace vndim {

using Coord = std::int64_t;
/// Bitmask over alphabet symbol indices. A constrained cell carries the set
/// of symbols still possible there; a cell absent from the map is free.
/// Singleton masks are the ordinary cylinder case; coarser masks let the
/// explorers keep symbol classes (e.g. the beta-fixed symbols) unsplit.
using SymbolSet = std::uint32_t;

inline int popcount(SymbolSet s) { return __builtin_popcount(s); }

struct Alphabet {
  std::string name;
  std::vector<std::string> symbols;
  int size() const { return static_cast<int>(symbols.size()); }
  SymbolSet full_mask() const { return (SymbolSet{1} << symbols.size()) - 1; }
  int index_of(const std::string& symbol) const;
};

struct Factor {
  std::string name;
  std::vector<std::string> values;
  int size() const { return static_cast<int>(values.size()); }
  int index_of(const std::string& value) const;
};

/// The product space: a finite list of bi-infinite tapes with uniform
/// per-cell measure and a finite list of uniformly weighted finite factors.
struct SpaceDescriptor {
  std::vector<Alphabet> tapes;
  std::vector<Factor> factors;

  int tape_count() const { return static_cast<int>(tapes.size()); }
  int factor_count() const { return static_cast<int>(factors.size()); }
  void validate() const;  // alphabet sizes >= 2, sizes <= 16
};

/// Permutation of alphabet indices, perm[i] = image of symbol i.
using Perm = std::vector<std::uint8_t>;

Perm identity_perm(int n);
Perm inverse_perm(const Perm& p);
bool is_identity_perm(const Perm& p);
SymbolSet apply_perm(const Perm& p, SymbolSet mask);

// Generator actions. Every one of these is a measure-preserving bijection.
struct Shift {
  int tape;
  int step;  // +1 or -1
  bool operator==(const Shift&) const = default;
};
/// Alphabet permutation applied at the current head cell of one tape.
struct HeadPerm {
  int tape;
  Perm perm;
  bool operator==(const HeadPerm&) const = default;
};
/// Involutive alphabet permutation applied simultaneously at every tape cell
/// whose absolute coordinate belongs to Sigma.
struct OracleFlip {
  int tape;
  Perm perm;
  OraclePtr sigma;
  bool operator==(const OracleFlip& o) const {
    return tape == o.tape && perm == o.perm && sigma->name() == o.sigma->name();
  }
};
/// Transposition of two values of a finite factor; realizes "any map sending
/// sigma to tau" as a state relabel that is still a global bijection.
struct FactorMove {
  int factor;
  std::uint8_t from;
  std::uint8_t to;
  bool operator==(const FactorMove&) const = default;
};

using GeneratorAction = std::variant<Shift, HeadPerm, OracleFlip, FactorMove>;
using Word = std::vector<GeneratorAction>;

GeneratorAction inverse_action(const GeneratorAction& a);
Word inverse_word(const Word& w);
std::string action_str(const SpaceDescriptor& sp, const GeneratorAction& a);

/// Sorted flat map from coordinates to symbol sets. Configurations are
/// copied on every exploration step, so contiguous storage matters more
/// than cheap mid-range insertion here.
class CellMap {
 public:
  using value_type = std::pair<Coord, SymbolSet>;
  using const_iterator = std::vector<value_type>::const_iterator;
  using iterator = std::vector<value_type>::iterator;

  const_iterator begin() const { return v_.begin(); }
  const_iterator end() const { return v_.end(); }
  iterator begin() { return v_.begin(); }
  iterator end() { return v_.end(); }
  std::size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  const SymbolSet* find(Coord c) const;
  std::size_t count(Coord c) const { return find(c) ? 1 : 0; }
  SymbolSet at(Coord c) const;
  /// Inserts or overwrites.
  SymbolSet& operator[](Coord c);

  bool operator==(const CellMap& o) const = default;
  auto operator<=>(const CellMap& o) const = default;

 private:
  std::vector<value_type> v_;
};

/// Finitely many constrained cells per tape plus optionally fixed factors.
/// Constraint keys are absolute coordinates and never move; shifts move the
/// head of a configuration instead.
struct Cylinder {
  std::vector<CellMap> cells;
  std::vector<std::optional<std::uint8_t>> factor;

  static Cylinder whole_space(const SpaceDescriptor& sp);

  Rational measure(const SpaceDescriptor& sp) const;
  bool operator==(const Cylinder& o) const = default;
  bool operator<(const Cylinder& o) const;

  /// Two cylinders are disjoint iff they conflict on some cell or factor.
  bool disjoint_from(const Cylinder& o) const;
  std::optional<Cylinder> intersect(const Cylinder& o) const;
  /// True if every point of *this satisfies o's constraints.
  bool subset_of(const Cylinder& o) const;

  std::string str(const SpaceDescriptor& sp) const;
};

struct CellRef {
  int tape;
  Coord coord;
  auto operator<=>(const CellRef&) const = default;
};

/// Non-value outcome of symbolic application/classification: the listed
/// cells (or factors) must be refined before the operation is determined.
struct NeedsRefinement {
  std::vector<CellRef> cells;
  std::vector<int> factors;
};

/// Splits an unconstrained cell into one child per alphabet symbol.
/// Throws already_constrained if the cell is fixed.
std::vector<Cylinder> refine(const SpaceDescriptor& sp, const Cylinder& c, int tape, Coord coord);

/// Partition refinement: children are the nonempty intersections of the
/// current cell mask with the given parts. Parts must partition the mask.
std::vector<Cylinder> refine_cell_partition(const SpaceDescriptor& sp, const Cylinder& c, int tape,
                                            Coord coord, const std::vector<SymbolSet>& parts);

/// One child per factor value (used when building start sets).
std::vector<Cylinder> refine_factor(const SpaceDescriptor& sp, const Cylinder& c, int factor);

/// A cylinder together with head positions; the symbolic counterpart of a
/// point being acted on. The represented point set is the cylinder shifted
/// so that per-tape coordinate (head + j) is the point's coordinate j.
struct SymbolicConfig {
  Cylinder cyl;
  std::vector<Coord> heads;
  std::uint64_t step_count = 0;

  static SymbolicConfig start(const SpaceDescriptor& sp);

  bool same_point_set(const SymbolicConfig& o) const;
  /// Cylinder in point coordinates (cell keys translated by -head).
  Cylinder point_view() const;

  std::string str(const SpaceDescriptor& sp) const;
};

inline constexpr Coord kDefaultWindow = 400;

using ApplyResult = std::variant<SymbolicConfig, NeedsRefinement>;

namespace detail {
/// Mutating word application for hot paths. Returns the blocking refinement
/// if a flip hits a free cell; the configuration is then partially applied
/// and must be discarded. Callers use it only on words known determined.
std::optional<NeedsRefinement> apply_word_inplace(SymbolicConfig& cfg, const Word& w, Coord window);
/// True when every HeadPerm in the word happens before any shift of its
/// tape, so application on a classified block never needs refinement.
bool word_inplace_safe(const Word& w);
}  // namespace detail

/// Applies one action. Heads leaving [-window, window] raise window_exceeded.
/// A HeadPerm aimed at a free cell returns NeedsRefinement for that cell.
ApplyResult apply_action(const SpaceDescriptor& sp, const SymbolicConfig& cfg,
                         const GeneratorAction& a, Coord window = kDefaultWindow);

/// Sequential composition; aborts at the first NeedsRefinement and reports
/// the blocking cell.
ApplyResult apply_word(const SpaceDescriptor& sp, const SymbolicConfig& cfg, const Word& w,
                       Coord window = kDefaultWindow);

}  // namespace vndim
