#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "relsim/errors.hpp"

namespace relsim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// A spatial position plus a timestamp, in abstract units (default c = 1).
struct SpacetimePoint {
  Vec3 x;
  double t = 0.0;

  friend bool operator==(const SpacetimePoint&, const SpacetimePoint&) = default;

  bool finite() const {
    return std::isfinite(x.x) && std::isfinite(x.y) && std::isfinite(x.z) && std::isfinite(t);
  }
};

/// True iff P is in the causal past of Q: ||x_Q - x_P|| <= c (t_Q - t_P).
/// The light-cone boundary counts as ordered, so every point precedes itself.
inline bool causal_precedes(const SpacetimePoint& p, const SpacetimePoint& q, double c = 1.0) {
  if (!(c > 0.0)) throw InputError("speed of light must be positive");
  if (!p.finite() || !q.finite()) throw InputError("non-finite spacetime coordinates");
  return distance(p.x, q.x) <= c * (q.t - p.t);
}

/// Standard boost along the first spatial axis with velocity v, |v| < c.
inline SpacetimePoint lorentz_boost(const SpacetimePoint& p, double v, double c = 1.0) {
  if (!(c > 0.0)) throw InputError("speed of light must be positive");
  if (!p.finite()) throw InputError("non-finite spacetime coordinates");
  if (!(std::fabs(v) < c)) throw InputError("boost velocity must satisfy |v| < c");
  const double beta = v / c;
  const double gamma = 1.0 / std::sqrt(1.0 - beta * beta);
  SpacetimePoint out = p;
  out.x.x = gamma * (p.x.x - v * p.t);
  out.t = gamma * (p.t - v * p.x.x / (c * c));
  return out;
}

/// A small partially ordered set of opaque labels. The order relation is
/// stored reflexively and transitively closed; antisymmetry is checked.
/// Sizes are capped at kMaxElements because cut enumeration is exponential.
class FinitePoset {
 public:
  static constexpr std::size_t kMaxElements = 12;

  FinitePoset(std::vector<std::string> elements,
              const std::vector<std::pair<std::string, std::string>>& leq_pairs)
      : labels_(std::move(elements)) {
    if (labels_.size() > kMaxElements) {
      throw SizeError("poset larger than " + std::to_string(kMaxElements) + " elements");
    }
    below_.assign(labels_.size(), 0);
    for (std::size_t i = 0; i < labels_.size(); ++i) below_[i] |= bit(i);  // reflexive
    for (const auto& [a, b] : leq_pairs) below_[index_of(b)] |= bit(index_of(a));
    // transitive closure
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < labels_.size(); ++i) {
        std::uint32_t acc = below_[i];
        for (std::size_t j = 0; j < labels_.size(); ++j) {
          if (below_[i] & bit(j)) acc |= below_[j];
        }
        if (acc != below_[i]) {
          below_[i] = acc;
          changed = true;
        }
      }
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      for (std::size_t j = i + 1; j < labels_.size(); ++j) {
        if ((below_[i] & bit(j)) && (below_[j] & bit(i))) {
          throw InputError("order relation is not antisymmetric: " + labels_[i] + " ~ " + labels_[j]);
        }
      }
    }
  }

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

  std::size_t index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) throw InputError("unknown poset element: " + label);
    return static_cast<std::size_t>(it - labels_.begin());
  }

  bool leq(std::size_t a, std::size_t b) const { return (below_[b] & bit(a)) != 0; }

  /// Bitmask of everything <= e, e included.
  std::uint32_t down_set(std::size_t e) const { return below_[e]; }

 private:
  static std::uint32_t bit(std::size_t i) { return 1u << i; }

  std::vector<std::string> labels_;
  std::vector<std::uint32_t> below_;  // below_[i] = mask of elements <= i
};

/// Cuts are downward-closed subsets; encoded as bitmasks over poset indices.
inline bool is_cut_mask(std::uint32_t mask, const FinitePoset& poset) {
  for (std::size_t e = 0; e < poset.size(); ++e) {
    if ((mask >> e) & 1u) {
      if ((poset.down_set(e) & ~mask) != 0) return false;
    }
  }
  return true;
}

inline bool is_cut(const std::vector<std::string>& subset, const FinitePoset& poset) {
  std::uint32_t mask = 0;
  for (const auto& label : subset) mask |= 1u << poset.index_of(label);
  return is_cut_mask(mask, poset);
}

/// Enumerates every cut of the poset, ascending as bitmasks.
inline std::vector<std::uint32_t> all_cuts(const FinitePoset& poset) {
  std::vector<std::uint32_t> cuts;
  const std::uint32_t limit = 1u << poset.size();
  for (std::uint32_t mask = 0; mask < limit; ++mask) {
    if (is_cut_mask(mask, poset)) cuts.push_back(mask);
  }
  return cuts;
}

struct CausalityFunctionReport {
  struct Violation {
    int axiom = 0;          // 1..4, or 0 for a structural defect (chi(C) not a cut)
    std::string detail;
  };
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks the four causality-function axioms on every cut of a small poset:
/// (1) union compatibility, (2) monotonicity, (3) strict shrinking on
/// non-empty cuts, (4) every element eventually escapes iterated application.
inline CausalityFunctionReport validate_causality_function(
    const std::function<std::uint32_t(std::uint32_t)>& chi, const FinitePoset& poset) {
  CausalityFunctionReport report;
  const auto cuts = all_cuts(poset);

  auto mask_str = [&](std::uint32_t mask) {
    std::string s = "{";
    bool first = true;
    for (std::size_t e = 0; e < poset.size(); ++e) {
      if ((mask >> e) & 1u) {
        if (!first) s += ",";
        s += poset.labels()[e];
        first = false;
      }
    }
    return s + "}";
  };

  for (std::uint32_t c : cuts) {
    if (!is_cut_mask(chi(c), poset)) {
      report.violations.push_back({0, "chi" + mask_str(c) + " = " + mask_str(chi(c)) + " is not a cut"});
    }
  }
  if (!report.ok()) return report;

  for (std::uint32_t c : cuts) {
    for (std::uint32_t d : cuts) {
      const std::uint32_t u = c | d;
      if (is_cut_mask(u, poset) && chi(u) != (chi(c) | chi(d))) {
        report.violations.push_back(
            {1, "chi(" + mask_str(c) + " u " + mask_str(d) + ") != chi union"});
      }
      if ((c & ~d) == 0 && (chi(c) & ~chi(d)) != 0) {
        report.violations.push_back(
            {2, "monotonicity fails: " + mask_str(c) + " subset of " + mask_str(d)});
      }
    }
  }
  for (std::uint32_t c : cuts) {
    if (c == 0) continue;
    const std::uint32_t image = chi(c);
    if (!((image & ~c) == 0 && image != c)) {
      report.violations.push_back({3, "chi" + mask_str(c) + " is not a strict subset"});
    }
  }
  for (std::uint32_t c : cuts) {
    std::uint32_t never_escaped = c;  // elements present in every iterate so far
    std::uint32_t cur = c;
    for (std::size_t n = 0; n <= poset.size() + 1 && never_escaped != 0; ++n) {
      cur = chi(cur);
      never_escaped &= cur;
    }
    if (never_escaped != 0) {
      report.violations.push_back(
          {4, "elements " + mask_str(never_escaped) + " never escape chi^n(" + mask_str(c) + ")"});
    }
  }
  return report;
}

}  // namespace relsim
