#pragma once

#include <cstdint>
#include <vector>

#include "relsim/boxes.hpp"
#include "relsim/engine.hpp"
#include "relsim/random.hpp"

namespace relsim {

inline Payload xor_or_bot(const Payload& a, const Payload& b) {
  if (is_bot(a) || is_bot(b)) return Sym::bot;
  return xor_bits(std::get<Bits>(a), std::get<Bits>(b));
}

/// How a receiver picks its index subsets in the cut-and-choose protocols.
/// The seeded policy matches the simulators draw-for-draw; the lexicographic
/// one is deterministic and keeps exact enumeration narrow when the choice
/// cannot reach an observable wire.
enum class SubsetPolicy { lexicographic, seeded };

inline std::uint64_t choose_u64(unsigned n, unsigned k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  std::uint64_t r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Lexicographic unranking of a k-combination out of `universe` (sorted).
inline std::vector<std::uint16_t> unrank_combination(const std::vector<std::uint16_t>& universe,
                                                     unsigned k, std::uint64_t rank) {
  std::vector<std::uint16_t> out;
  unsigned n = static_cast<unsigned>(universe.size());
  unsigned start = 0;
  for (unsigned picked = 0; picked < k; ++picked) {
    for (unsigned i = start; i < n; ++i) {
      const std::uint64_t block = choose_u64(n - i - 1, k - picked - 1);
      if (rank < block) {
        out.push_back(universe[i]);
        start = i + 1;
        break;
      }
      rank -= block;
    }
  }
  return out;
}

/// Uniform (or lexicographically-first) k-subset of `universe`.
inline std::vector<std::uint16_t> pick_subset(RandomSource& rng,
                                              const std::vector<std::uint16_t>& universe,
                                              unsigned k, SubsetPolicy policy) {
  if (k > universe.size()) throw InputError("subset larger than its universe");
  if (policy == SubsetPolicy::lexicographic) {
    return std::vector<std::uint16_t>(universe.begin(), universe.begin() + k);
  }
  const std::uint64_t total = choose_u64(static_cast<unsigned>(universe.size()), k);
  if (total > 0xffffffffull) throw SizeError("subset choice space too wide");
  const std::uint32_t rank = rng.uniform(static_cast<std::uint32_t>(total));
  return unrank_combination(universe, k, rank);
}

inline std::vector<std::uint16_t> difference(unsigned n, const std::vector<std::uint16_t>& taken) {
  std::vector<bool> used(n, false);
  for (auto i : taken) used[i] = true;
  std::vector<std::uint16_t> rest;
  for (std::uint16_t i = 0; i < n; ++i) {
    if (!used[i]) rest.push_back(i);
  }
  return rest;
}

inline bool subset_of(const std::vector<std::uint16_t>& sub,
                      const std::vector<std::uint16_t>& super_sorted) {
  for (auto v : sub) {
    if (!std::binary_search(super_sorted.begin(), super_sorted.end(), v)) return false;
  }
  return true;
}

inline bool disjoint(const std::vector<std::uint16_t>& a, const std::vector<std::uint16_t>& b) {
  for (auto v : a) {
    for (auto w : b) {
      if (v == w) return false;
    }
  }
  return true;
}

}  // namespace relsim
