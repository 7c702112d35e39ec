#pragma once

#include <stdexcept>
#include <string>

namespace relsim {

/// Bad user-supplied value (parameter out of range, non-finite coordinate).
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Port-level composition failure: names, kinds or directions do not line up.
struct WiringError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A box emitted a message outside the light cone of an input it consumed.
struct CausalityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Messages arrived in an order the receiving box's protocol forbids.
struct ProtocolOrderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Work would exceed a configured size limit (poset too large, enumeration too wide).
struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Event loop failed to quiesce within the event budget.
struct RunawayError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// API misuse (measuring a consumed qubit, querying an unknown label).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace relsim
