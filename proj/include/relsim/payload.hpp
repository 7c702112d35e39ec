#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "relsim/errors.hpp"

namespace relsim {

/// Protocol control symbols carried on normal wires. `bot` doubles as the
/// abort marker: an aborting party emits it on its remaining output ports.
enum class Sym : std::uint8_t { bot, open_commit, recv };

/// A string of up to 32 bits, LSB = bit 0. Single bits are width-1 strings.
struct Bits {
  std::uint32_t v = 0;
  std::uint8_t n = 1;

  static Bits bit(bool b) { return Bits{b ? 1u : 0u, 1}; }
  bool as_bool() const { return (v & 1u) != 0; }

  friend bool operator==(const Bits&, const Bits&) = default;
};

inline std::uint32_t mask_of(std::uint8_t n) {
  return n >= 32 ? 0xffffffffu : ((1u << n) - 1u);
}

inline Bits xor_bits(const Bits& a, const Bits& b) {
  if (a.n != b.n) throw InputError("xor of bit strings with different widths");
  return Bits{(a.v ^ b.v) & mask_of(a.n), a.n};
}

/// One or two index sets, e.g. the (I0, I1) message of the subset protocols.
struct IndexSets {
  std::vector<std::vector<std::uint16_t>> sets;

  friend bool operator==(const IndexSets&, const IndexSets&) = default;
};

/// Opaque handles into the per-run qubit table; copying a message cannot
/// duplicate the underlying state.
struct Qubits {
  std::vector<std::uint32_t> handles;

  friend bool operator==(const Qubits&, const Qubits&) = default;
};

using Payload = std::variant<Bits, Sym, IndexSets, Qubits>;

inline bool is_bot(const Payload& p) {
  const Sym* s = std::get_if<Sym>(&p);
  return s != nullptr && *s == Sym::bot;
}

inline std::string to_string(const Payload& p) {
  struct Visitor {
    std::string operator()(const Bits& b) const {
      std::string s;
      for (int i = b.n - 1; i >= 0; --i) s += ((b.v >> i) & 1u) ? '1' : '0';
      return s;
    }
    std::string operator()(Sym s) const {
      switch (s) {
        case Sym::bot: return "bot";
        case Sym::open_commit: return "open";
        case Sym::recv: return "recv";
      }
      return "?";
    }
    std::string operator()(const IndexSets& is) const {
      std::string s = "I";
      for (const auto& set : is.sets) {
        s += "{";
        for (std::size_t i = 0; i < set.size(); ++i) {
          if (i != 0) s += ",";
          s += std::to_string(set[i]);
        }
        s += "}";
      }
      return s;
    }
    std::string operator()(const Qubits& q) const {
      return "q[" + std::to_string(q.handles.size()) + "]";
    }
  };
  return std::visit(Visitor{}, p);
}

}  // namespace relsim
