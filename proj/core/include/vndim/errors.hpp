#pragma once

#include <stdexcept>
#include <string>

namespace vndim {

// Error taxonomy shared across modules. Control-flow outcomes (NeedsRefinement,
// Branched, TooLarge) are value types, not exceptions; these are hard failures.

struct divergent_tail : std::domain_error {
  using std::domain_error::domain_error;
};

struct already_constrained : std::logic_error {
  using std::logic_error::logic_error;
};

struct window_exceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct restart_detected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct stabilizer_detected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct undecided_vertex : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct unsupported_atom : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct precondition_failed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct window_too_small : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vndim
