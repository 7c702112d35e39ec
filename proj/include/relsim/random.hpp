#pragma once

#include <cstdint>
#include <vector>

#include "relsim/errors.hpp"
#include "relsim/rational.hpp"

namespace relsim {

/// Source of the randomness boxes consume. Implementations either sample
/// pseudo-randomly (Monte Carlo trials) or replay a decision tape (exact
/// enumeration of the probability tree).
class RandomSource {
 public:
  virtual ~RandomSource() = default;

  /// Uniform draw from {0, ..., n-1}.
  virtual std::uint32_t uniform(std::uint32_t n) = 0;

  /// Biased coin; p must lie in [0, 1].
  virtual bool bernoulli(const Rational& p) = 0;

  bool bit() { return uniform(2) == 1; }

  std::uint32_t bit_string(std::uint8_t n) {
    std::uint32_t v = 0;
    for (std::uint8_t i = 0; i < n; ++i) v |= (uniform(2) << i);
    return v;
  }
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Counter-based pseudo-random stream. Each box in a run gets its own stream
/// derived from (master seed, box id), so trials are reproducible and unaffected
/// by the relative order in which boxes draw.
class PrngSource final : public RandomSource {
 public:
  PrngSource(std::uint64_t master_seed, std::uint64_t stream_id) {
    state_ = master_seed * 0x9e3779b97f4a7c15ull + (stream_id + 1) * 0xd1b54a32d192ed03ull;
    (void)splitmix64(state_);  // decorrelate nearby seeds
  }

  std::uint32_t uniform(std::uint32_t n) override {
    if (n == 0) throw InputError("uniform(0)");
    if (n == 1) return 0;
    // rejection sampling keeps the draw exactly uniform
    const std::uint64_t span = 0xffffffffffffffffull - (0xffffffffffffffffull % n + 1) % n;
    std::uint64_t v;
    do {
      v = splitmix64(state_);
    } while (v > span && span != 0xffffffffffffffffull);
    return static_cast<std::uint32_t>(v % n);
  }

  bool bernoulli(const Rational& p) override {
    if (p < Rational(0) || p > Rational(1)) throw InputError("bernoulli weight outside [0,1]");
    if (p == Rational(0)) return false;
    if (p == Rational(1)) return true;
    const auto den = static_cast<std::uint64_t>(p.den());
    const auto num = static_cast<std::uint64_t>(p.num());
    if (den <= 0xffffffffull) {
      return uniform(static_cast<std::uint32_t>(den)) < num;
    }
    // very fine weights: fall back to a 53-bit dyadic comparison
    const double u = static_cast<double>(splitmix64(state_) >> 11) * 0x1.0p-53;
    return u < p.to_double();
  }

 private:
  std::uint64_t state_ = 0;
};

/// Replays (and extends) a tape of decisions for exhaustive enumeration.
/// A fresh branch is explored by bumping the last incrementable entry and
/// re-running the deterministic system from scratch.
class TapeSource final : public RandomSource {
 public:
  struct Entry {
    std::uint32_t value = 0;
    std::uint32_t cardinality = 0;
  };

  explicit TapeSource(std::vector<Entry>* tape) : tape_(tape) {}

  std::uint32_t uniform(std::uint32_t n) override {
    if (n == 0) throw InputError("uniform(0)");
    const std::uint32_t v = next(n);
    weight_ *= Rational(1, static_cast<Rational::Int>(n));
    return v;
  }

  bool bernoulli(const Rational& p) override {
    if (p < Rational(0) || p > Rational(1)) throw InputError("bernoulli weight outside [0,1]");
    if (p == Rational(0)) return false;
    if (p == Rational(1)) return true;
    const std::uint32_t v = next(2);
    weight_ *= (v == 1) ? p : Rational(1) - p;
    return v == 1;
  }

  /// Probability of the branch replayed so far.
  const Rational& weight() const { return weight_; }

  std::size_t cursor() const { return cursor_; }

 private:
  std::uint32_t next(std::uint32_t cardinality) {
    if (cursor_ < tape_->size()) {
      const Entry& e = (*tape_)[cursor_];
      if (e.cardinality != cardinality) {
        throw UsageError("enumeration replay diverged: draw cardinality changed");
      }
      ++cursor_;
      return e.value;
    }
    tape_->push_back(Entry{0, cardinality});
    ++cursor_;
    return 0;
  }

  std::vector<Entry>* tape_;
  std::size_t cursor_ = 0;
  Rational weight_ = Rational(1);
};

/// Advances the tape to the next unexplored branch (odometer order).
/// Returns false once the whole tree has been visited.
inline bool advance_tape(std::vector<TapeSource::Entry>& tape) {
  while (!tape.empty()) {
    if (tape.back().value + 1 < tape.back().cardinality) {
      ++tape.back().value;
      return true;
    }
    tape.pop_back();
  }
  return false;
}

}  // namespace relsim
