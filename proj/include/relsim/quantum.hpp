#pragma once

#include <cstdint>
#include <vector>

#include "relsim/errors.hpp"
#include "relsim/random.hpp"

namespace relsim {

enum class Basis : std::uint8_t { Z, X };

/// A conjugate-coded qubit: a bit prepared in the Z or X basis.
/// Measuring in the preparation basis returns the bit deterministically;
/// measuring in the conjugate basis returns a fresh uniform bit. A state can
/// be measured at most once (the table stands in for no-cloning).
struct Bb84State {
  bool bit = false;
  Basis basis = Basis::Z;
  bool consumed = false;
};

/// Per-run table of prepared states. Wires carry opaque handles into this
/// table, so copying a message cannot duplicate a state.
class QuantumTable {
 public:
  std::uint32_t prepare(bool bit, Basis basis) {
    states_.push_back(Bb84State{bit, basis, false});
    return static_cast<std::uint32_t>(states_.size() - 1);
  }

  bool measure(std::uint32_t handle, Basis basis, RandomSource& rng) {
    Bb84State& st = at(handle);
    if (st.consumed) throw UsageError("qubit measured twice");
    st.consumed = true;
    if (st.basis == basis) return st.bit;
    return rng.bit();
  }

  const Bb84State& peek(std::uint32_t handle) const {
    return const_cast<QuantumTable*>(this)->at(handle);
  }

  std::size_t size() const { return states_.size(); }

 private:
  Bb84State& at(std::uint32_t handle) {
    if (handle >= states_.size()) throw UsageError("unknown qubit handle");
    return states_[handle];
  }

  std::vector<Bb84State> states_;
};

}  // namespace relsim
