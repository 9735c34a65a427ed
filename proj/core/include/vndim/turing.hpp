#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vndim/space.hpp"

namespace vndim {

enum class BlockClass : std::uint8_t { Initial, Accepting, Rejecting, Work };

std::string block_class_str(BlockClass c);

/// One program row: the group word applied to configurations matching the
/// block, the successor state, and the I/A/R/work designation. Accepting and
/// rejecting rules are fixed points (empty word, unchanged state).
struct BlockRule {
  std::string name;
  Word word;
  std::uint8_t next_state = 0;
  BlockClass cls = BlockClass::Work;
  bool inplace_safe = true;  // derived at add_rule time
};

/// Build-time row: per-tape symbol pattern (sets allowed) for one state.
struct BlockRow {
  std::vector<SymbolSet> pattern;
  std::uint8_t state = 0;
  std::uint16_t rule = 0;
};

/// Dynamical hardware plus software: the space, a partition of all
/// (head-symbol tuple, state) pairs into blocks, and a rule per block.
class TuringSystem {
 public:
  TuringSystem(SpaceDescriptor space, int state_factor);

  const SpaceDescriptor& space() const { return space_; }
  int state_factor() const { return state_factor_; }
  int state_count() const { return space_.factors[state_factor_].size(); }
  std::uint8_t state_index(const std::string& name) const;

  std::uint16_t add_rule(BlockRule rule);
  /// Registers a row; the pattern masks must not overlap previous rows.
  void add_row(const std::vector<SymbolSet>& pattern, std::uint8_t state, std::uint16_t rule);
  /// Fills every uncovered (tuple, state) pair with a shared identity/reject
  /// rule, one per state, named "<state>/else".
  void complete_with_reject();
  /// Checks the partition invariant and the A/R fixed-point invariant.
  void validate() const;

  const std::vector<BlockRule>& rules() const { return rules_; }
  const BlockRule& rule(std::uint16_t id) const { return rules_[id]; }
  const std::vector<BlockRow>& rows() const { return rows_; }

  std::size_t tuple_count() const { return tuple_count_; }
  std::size_t stride(int tape) const { return strides_[tape]; }
  std::uint16_t rule_at(std::uint8_t state, std::size_t tuple) const;
  std::size_t tuple_index(const std::vector<int>& symbols) const;
  std::vector<int> tuple_symbols(std::size_t tuple) const;

  /// Start configurations covering a block class (heads at 0), coarsened to
  /// per-state boxes where the class region is a full product box.
  std::vector<SymbolicConfig> class_region(BlockClass cls) const;
  Rational class_mass(BlockClass cls) const;

  /// Point-view cylinders (heads at 0) of all blocks with the given class.
  std::vector<Cylinder> class_cylinders(BlockClass cls) const;

 private:
  SpaceDescriptor space_;
  int state_factor_;
  std::size_t tuple_count_;
  std::vector<std::size_t> strides_;
  std::vector<BlockRule> rules_;
  std::vector<BlockRow> rows_;
  std::vector<std::int32_t> table_;  // (state, tuple) -> rule id, -1 unset
};

struct Classified {
  std::uint16_t rule;
};
using ClassifyResult = std::variant<Classified, NeedsRefinement>;

/// The unique block matching the configuration's head symbols and state, or
/// the cells/factor blocking classification.
ClassifyResult classify(const TuringSystem& sys, const SymbolicConfig& cfg);

struct Halted {
  BlockClass cls;
  std::uint16_t rule;
};
struct Moved {
  std::uint16_t rule;
  SymbolicConfig next;
};
struct Branched {
  std::vector<SymbolicConfig> children;
  // Per-child fraction of the parent's measure; the ratios sum to 1.
  std::vector<Rational> mass_ratios;
};
using StepOutcome = std::variant<Halted, Moved, Branched>;

/// One Turing step: halt on A/R blocks, otherwise apply the block word and
/// advance step_count. Branched children partition the configuration when
/// classification or the word needs refinement; classification is
/// re-attempted per child by the caller.
StepOutcome step(const TuringSystem& sys, const SymbolicConfig& cfg, Coord window = kDefaultWindow);

struct AcceptedChain {
  SymbolicConfig initial;
  std::vector<SymbolicConfig> chain;  // initial through final, step by step
  SymbolicConfig final;
};

struct ExplorationResult {
  std::vector<AcceptedChain> accepted;
  Rational accepted_mass;
  Rational rejected_mass;
  std::vector<SymbolicConfig> unresolved;
  Rational unresolved_mass;
  std::uint64_t depth = 0;
  Rational start_mass;
};

struct ExploreOptions {
  std::uint64_t depth = 200;
  Coord window = kDefaultWindow;
  Rational mass_floor = Rational(0);
  bool keep_chains = true;
  bool keep_unresolved = true;
};

/// Breadth-first symbolic execution from the given start set. The exact mass
/// ledger accepted + rejected + unresolved = measure(start) holds at every
/// depth. Configurations beyond the window or below the mass floor are
/// accounted as unresolved. Honors VNDIM_THREADS.
ExplorationResult explore(const TuringSystem& sys, const std::vector<SymbolicConfig>& start,
                          const ExploreOptions& opt);

ExplorationResult explore_initial(const TuringSystem& sys, const ExploreOptions& opt);

struct Verdict {
  bool pass = false;
  std::string detail;
};

/// Exact no-restart check: the image of every block under its word is
/// intersected with the initial region. Fails with a witness cylinder.
Verdict check_no_restart(const TuringSystem& sys);

/// Pairwise disjointness of the final cylinders of accepted chains; exact on
/// the enumerated finite set.
Verdict check_disjoint_chains(const ExplorationResult& result);

/// [accepted_mass, accepted_mass + unresolved_mass] from the initial region.
/// Requires check_no_restart to pass; throws restart_detected otherwise.
Interval omega1_bounds(const TuringSystem& sys, std::uint64_t depth,
                       Coord window = kDefaultWindow);

/// Unresolved mass when exploring from the whole space; trends to zero for
/// systems that stop on any configuration.
Rational stopping_mass(const TuringSystem& sys, std::uint64_t depth, Coord window = kDefaultWindow);

/// A parameterized family of expected fundamental cylinders, in point view
/// with heads at 0. member(k) is nullopt when k is excluded (k not in Sigma).
struct CylinderFamily {
  std::string name;
  std::function<std::optional<Cylinder>(long)> member;
};

/// Exact set equality between the accepted initial cylinders (explored deep
/// enough for k <= k_max) and the union of family members for k <= k_max.
Verdict validate_fundamental_set(const TuringSystem& sys, const std::vector<CylinderFamily>& expected,
                                 long k_max, Coord window = kDefaultWindow);

/// Steps a fully determined configuration to halt; nullopt if no halt within
/// max_steps or a branch is required.
std::optional<std::uint64_t> steps_to_halt(const TuringSystem& sys, const SymbolicConfig& cfg,
                                           std::uint64_t max_steps, Coord window = kDefaultWindow);

// Builtin systems.

/// Single 8-symbol tape (three-bit symbols) with one marked symbol scanning
/// for Sigma membership via the oracle flip; states Start, SearchFwd1,
/// SearchBack, SearchFwdEither plus four dummies.
TuringSystem build_system_x(const OraclePtr& oracle);
/// Three binary read-only tapes; tape 3 advances k cells per sweep, so runs
/// of k on tapes 1-2 pair with runs of k^2+2k on tape 3.
TuringSystem build_system_y();

CylinderFamily fundamental_family_x(const OraclePtr& oracle);
CylinderFamily fundamental_family_y();

/// Expected number of configurations in an accepted chain for parameter k.
std::uint64_t chain_length_x(long k);

}  // namespace vndim
