#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "relsim/engine.hpp"
#include "relsim/rational.hpp"

namespace relsim {

struct AdvantageReport {
  enum class Mode { exact, montecarlo };

  Mode mode = Mode::exact;
  double value = 0.0;
  Rational exact_value;      // meaningful when mode == exact
  double ci_low = 0.0;       // two-sided interval, Monte Carlo mode
  double ci_high = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

using SystemFactory = std::function<System()>;
using BoxFactory = std::function<std::unique_ptr<Box>()>;

/// Builds and runs one closed experiment with the provided randomness.
using ClosedRun = std::function<Transcript(RngProvider&)>;

inline ClosedRun make_closed_run(SystemFactory make_system, BoxFactory make_cover,
                                 RunOptions options = {}) {
  return [make_system = std::move(make_system), make_cover = std::move(make_cover),
          options](RngProvider& rng) {
    System sys = make_system();
    if (make_cover) sys.cover(make_cover());
    Runner runner(sys, rng, options);
    return runner.run();
  };
}

/// Exact distribution over the keys produced by a deterministic run function,
/// obtained by exhausting the probability tree of every random draw.
struct Distribution {
  std::map<std::string, Rational> mass;

  Rational total() const {
    Rational t(0);
    for (const auto& [k, m] : mass) t += m;
    return t;
  }
};

constexpr std::uint64_t kDefaultEnumerationLimit = 1ull << 24;

template <typename KeyFn>
Distribution enumerate_distribution(const ClosedRun& run, KeyFn key_of,
                                    std::uint64_t leaf_limit = kDefaultEnumerationLimit) {
  std::vector<TapeSource::Entry> tape;
  Distribution dist;
  std::uint64_t leaves = 0;
  while (true) {
    SharedTapeRng rng(&tape);
    Transcript tr = run(rng);
    if (++leaves > leaf_limit) {
      throw SizeError("enumeration exceeds " + std::to_string(leaf_limit) + " branches");
    }
    dist.mass[key_of(tr)] += rng.weight();
    if (!advance_tape(tape)) break;
  }
  return dist;
}

inline Distribution exact_observable_distribution(
    const ClosedRun& run, std::uint64_t leaf_limit = kDefaultEnumerationLimit) {
  return enumerate_distribution(run, [](const Transcript& tr) { return observable_key(tr); },
                                leaf_limit);
}

/// Exact probability that the covering distinguisher outputs 1.
inline Rational exact_verdict_probability(const ClosedRun& run,
                                          std::uint64_t leaf_limit = kDefaultEnumerationLimit) {
  Distribution d = enumerate_distribution(
      run, [](const Transcript& tr) { return std::to_string(verdict_of(tr)); }, leaf_limit);
  auto it = d.mass.find("1");
  return it == d.mass.end() ? Rational(0) : it->second;
}

inline Rational total_variation(const Distribution& a, const Distribution& b) {
  Rational acc(0);
  for (const auto& [k, m] : a.mass) {
    auto it = b.mass.find(k);
    const Rational other = it == b.mass.end() ? Rational(0) : it->second;
    acc += (m - other).abs();
  }
  for (const auto& [k, m] : b.mass) {
    if (a.mass.find(k) == a.mass.end()) acc += m;
  }
  return acc / Rational(2);
}

/// d^D(R,S) for a fixed distinguisher, by exact enumeration of both systems.
inline AdvantageReport exact_advantage(const ClosedRun& real_run, const ClosedRun& ideal_run,
                                       std::uint64_t leaf_limit = kDefaultEnumerationLimit) {
  const Rational pr = exact_verdict_probability(real_run, leaf_limit);
  const Rational ps = exact_verdict_probability(ideal_run, leaf_limit);
  AdvantageReport rep;
  rep.mode = AdvantageReport::Mode::exact;
  rep.exact_value = (pr - ps).abs();
  rep.value = rep.exact_value.to_double();
  rep.ci_low = rep.ci_high = rep.value;
  return rep;
}

struct McOptions {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double confidence = 0.99;
  bool wilson = false;  // Wilson score interval instead of Hoeffding
};

namespace detail {

inline std::uint64_t count_verdicts(const ClosedRun& run, std::uint64_t seed_base,
                                    std::uint64_t first, std::uint64_t count) {
  std::uint64_t ones = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    PerBoxPrng rng(seed_base + first + i);
    Transcript tr = run(rng);
    if (verdict_of(tr) == 1) ++ones;
  }
  return ones;
}

inline double hoeffding_radius(std::uint64_t n, double delta) {
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

inline std::pair<double, double> wilson_interval(std::uint64_t ones, std::uint64_t n, double z) {
  const double p = static_cast<double>(ones) / static_cast<double>(n);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / static_cast<double>(n);
  const double centre = (p + z2 / (2.0 * static_cast<double>(n))) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / static_cast<double>(n) + z2 / (4.0 * std::pow(static_cast<double>(n), 2))) /
      denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace detail

/// Empirical P[D = 1] over `trials` independent seeded runs.
inline double mc_verdict_probability(const ClosedRun& run, std::uint64_t trials,
                                     std::uint64_t seed, unsigned workers = 1) {
  if (trials == 0) throw InputError("zero trials");
  std::uint64_t ones = 0;
  if (workers <= 1) {
    ones = detail::count_verdicts(run, seed, 0, trials);
  } else {
    std::vector<std::uint64_t> partial(workers, 0);
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t first = w * chunk;
      const std::uint64_t count = first >= trials ? 0 : std::min(chunk, trials - first);
      pool.emplace_back([&, w, first, count] {
        partial[w] = detail::count_verdicts(run, seed, first, count);
      });
    }
    for (auto& t : pool) t.join();
    for (auto v : partial) ones += v;
  }
  return static_cast<double>(ones) / static_cast<double>(trials);
}

/// |p_R - p_S| with a two-sided confidence interval from independent
/// per-system Bernoulli estimates.
inline AdvantageReport estimate_advantage(const ClosedRun& real_run, const ClosedRun& ideal_run,
                                          const McOptions& opts = {}) {
  if (opts.trials < 100) throw InputError("Monte Carlo estimation needs at least 100 trials");
  const double pr = mc_verdict_probability(real_run, opts.trials, opts.seed, opts.workers);
  const double ps =
      mc_verdict_probability(ideal_run, opts.trials, opts.seed + 0x9e3779b9u, opts.workers);
  AdvantageReport rep;
  rep.mode = AdvantageReport::Mode::montecarlo;
  rep.trials = opts.trials;
  rep.seed = opts.seed;
  rep.value = std::fabs(pr - ps);
  const double delta_each = (1.0 - opts.confidence) / 2.0;
  if (opts.wilson) {
    const double z = 2.807;  // two-sided 99.5% per system
    auto [rl, rh] = detail::wilson_interval(
        static_cast<std::uint64_t>(std::llround(pr * static_cast<double>(opts.trials))),
        opts.trials, z);
    auto [sl, sh] = detail::wilson_interval(
        static_cast<std::uint64_t>(std::llround(ps * static_cast<double>(opts.trials))),
        opts.trials, z);
    rep.ci_low = std::max(0.0, std::max(rl - sh, sl - rh));
    rep.ci_high = std::min(1.0, std::max(rh - sl, sh - rl));
  } else {
    const double radius = detail::hoeffding_radius(opts.trials, delta_each) * 2.0;
    rep.ci_low = std::max(0.0, rep.value - radius);
    rep.ci_high = std::min(1.0, rep.value + radius);
  }
  rep.ci_low = std::min(rep.ci_low, rep.value);
  rep.ci_high = std::max(rep.ci_high, rep.value);
  return rep;
}

// ---------------------------------------------------------------------------
// Tail oracles and analytic envelopes
// ---------------------------------------------------------------------------

/// P[Binom(n, p) < k], exact.
inline Rational binomial_tail_lt(unsigned n, const Rational& p, unsigned k) {
  if (p < Rational(0) || p > Rational(1)) throw InputError("binomial parameter outside [0,1]");
  if (k > n + 1) throw InputError("binomial tail cutoff out of range");
  const Rational q = Rational(1) - p;
  Rational acc(0);
  for (unsigned j = 0; j < k && j <= n; ++j) {
    acc += Rational::binomial(n, j) * Rational::pow(p, j) * Rational::pow(q, n - j);
  }
  return acc;
}

/// P[Binom(n, p) >= k], exact.
inline Rational binomial_tail_ge(unsigned n, const Rational& p, unsigned k) {
  return Rational(1) - binomial_tail_lt(n, p, k);
}

enum class TailSide { upper, lower };

/// Multiplicative Chernoff envelope: e^{-d^2 mu / 3} above the mean,
/// e^{-d^2 mu / 2} below it.
inline double chernoff_upper(double mu, double delta, TailSide side) {
  if (!(mu > 0.0)) throw InputError("Chernoff bound needs mu > 0");
  if (delta < 0.0) throw InputError("Chernoff bound needs delta >= 0");
  const double divisor = side == TailSide::upper ? 3.0 : 2.0;
  return std::exp(-delta * delta * mu / divisor);
}

/// Tail envelope e^{-2 t^2 h} for h draws without replacement out of n
/// objects of which x are marked.
inline double hoeffding_hypergeometric(unsigned n, unsigned x, unsigned h, double t) {
  if (x > n || h > n) throw InputError("hypergeometric parameters out of range");
  if (!(t > 0.0) || !(t < static_cast<double>(x) / static_cast<double>(n))) {
    throw InputError("hypergeometric deviation must satisfy 0 < t < x/n");
  }
  return std::exp(-2.0 * t * t * static_cast<double>(h));
}

/// Exact hypergeometric pmf P[H = j] for h draws, x marked among n.
inline Rational hypergeometric_pmf(unsigned n, unsigned x, unsigned h, unsigned j) {
  if (x > n || h > n) throw InputError("hypergeometric parameters out of range");
  if (j > h || j > x || (h - j) > (n - x)) return Rational(0);
  return Rational::binomial(x, j) * Rational::binomial(n - x, h - j) / Rational::binomial(n, h);
}

/// P[H <= m], exact.
inline Rational hypergeometric_tail_le(unsigned n, unsigned x, unsigned h, unsigned m) {
  Rational acc(0);
  for (unsigned j = 0; j <= m && j <= h; ++j) acc += hypergeometric_pmf(n, x, h, j);
  return acc;
}

/// P[H >= m], exact.
inline Rational hypergeometric_tail_ge(unsigned n, unsigned x, unsigned h, unsigned m) {
  Rational acc(0);
  for (unsigned j = m; j <= h; ++j) acc += hypergeometric_pmf(n, x, h, j);
  return acc;
}

// ---------------------------------------------------------------------------
// Difference and separation lemmas on explicit joint tables
// ---------------------------------------------------------------------------

/// Joint distribution of three events, indexed by membership (x, y, z).
struct JointTable {
  Rational mass[2][2][2] = {};

  Rational total() const {
    Rational t(0);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) t += mass[a][b][c];
    return t;
  }

  bool valid() const {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c)
          if (mass[a][b][c] < Rational(0)) return false;
    return total() == Rational(1);
  }

  Rational p_x() const { return marginal(0); }
  Rational p_y() const { return marginal(1); }
  Rational p_z() const { return marginal(2); }

  Rational p(bool in_x, bool in_y, bool in_z) const {
    return mass[in_x ? 1 : 0][in_y ? 1 : 0][in_z ? 1 : 0];
  }

 private:
  Rational marginal(int which) const {
    Rational t(0);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          const int flags[3] = {a, b, c};
          if (flags[which] == 1) t += mass[a][b][c];
        }
    return t;
  }
};

enum class LemmaCheck { holds, violated, not_applicable };

/// If P[X and not Z] = P[Y and not Z], then |P[X] - P[Y]| <= P[Z].
inline LemmaCheck check_difference_lemma(const JointTable& table) {
  if (!table.valid()) throw InputError("joint table is not a distribution");
  const Rational x_not_z = table.p(true, false, false) + table.p(true, true, false);
  const Rational y_not_z = table.p(false, true, false) + table.p(true, true, false);
  if (x_not_z != y_not_z) return LemmaCheck::not_applicable;
  return (table.p_x() - table.p_y()).abs() <= table.p_z() ? LemmaCheck::holds
                                                          : LemmaCheck::violated;
}

/// If Z is contained in X and X, Y are disjoint, then
/// |P[Z|X] - P[Z|Y]| >= P[Z].
inline LemmaCheck check_separation_lemma(const JointTable& table) {
  if (!table.valid()) throw InputError("joint table is not a distribution");
  const Rational z_outside_x =
      table.p(false, false, true) + table.p(false, true, true);
  const Rational x_and_y = table.p(true, true, false) + table.p(true, true, true);
  if (!z_outside_x.is_zero() || !x_and_y.is_zero()) return LemmaCheck::not_applicable;
  const Rational px = table.p_x();
  const Rational py = table.p_y();
  const Rational pz = table.p_z();
  if (px.is_zero()) return pz.is_zero() ? LemmaCheck::holds : LemmaCheck::violated;
  const Rational z_given_x = (table.p(true, false, true) + table.p(true, true, true)) / px;
  const Rational z_given_y(0);  // Z sits inside X, which is disjoint from Y
  (void)py;
  return (z_given_x - z_given_y).abs() >= pz ? LemmaCheck::holds : LemmaCheck::violated;
}

}  // namespace relsim
