#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relsim/boxes.hpp"
#include "relsim/engine.hpp"
#include "relsim/stats.hpp"

namespace relsim {

/// A free input port of a case, its canonical injection point and the finite
/// value domain swept by the deterministic-distinguisher family.
struct SweepPort {
  std::string port;
  SpacetimePoint at;
  std::vector<Payload> values;
  bool optional = false;  // "send nothing" is part of the domain
};

struct NamedDistinguisher {
  std::string name;
  BoxFactory make;
};

/// One condition (honest / dishonest-Alice / dishonest-Bob) of a construction,
/// bundling the real and ideal systems plus everything needed to judge them.
struct ConstructionCase {
  std::string label;
  SystemFactory real;
  SystemFactory ideal;
  Rational claimed_epsilon{0};
  double claimed_envelope = 0.0;  // analytic envelope when the claim is not exact 0
  std::vector<SweepPort> sweep;   // empty: family sweep not enumerable for this case
  std::vector<NamedDistinguisher> reference;
  std::vector<std::pair<std::string, std::string>> order_clause;
  RunOptions run_options{};

  /// Canonical input assignment used for traces and the causality audit;
  /// defaults to the first value of every sweep domain.
  std::vector<InjectorBox::Shot> audit_shots;

  std::vector<InjectorBox::Shot> trace_shots() const {
    if (!audit_shots.empty()) return audit_shots;
    std::vector<InjectorBox::Shot> shots;
    for (const auto& sp : sweep) {
      if (!sp.values.empty()) shots.push_back({sp.port, sp.values.front(), sp.at});
    }
    return shots;
  }
};

inline BoxFactory injector_for(std::vector<InjectorBox::Shot> shots) {
  return [shots = std::move(shots)] { return std::make_unique<InjectorBox>("inject", shots); };
}

/// Exhausts the deterministic distinguisher family over the case's declared
/// input domains: for each assignment, the best output map achieves exactly
/// the total-variation distance between the two observable distributions.
/// Returns the maximum over assignments.
inline Rational family_sweep_advantage(const ConstructionCase& cs,
                                       std::uint64_t leaf_limit = kDefaultEnumerationLimit) {
  if (cs.sweep.empty()) throw SizeError("case " + cs.label + " has no enumerable input domain");
  Rational best(0);
  std::vector<std::size_t> choice(cs.sweep.size(), 0);
  auto domain_size = [&](std::size_t i) {
    return cs.sweep[i].values.size() + (cs.sweep[i].optional ? 1 : 0);
  };
  while (true) {
    std::vector<InjectorBox::Shot> shots;
    for (std::size_t i = 0; i < cs.sweep.size(); ++i) {
      if (choice[i] >= cs.sweep[i].values.size()) continue;  // the "absent" option
      shots.push_back(InjectorBox::Shot{cs.sweep[i].port, cs.sweep[i].values[choice[i]],
                                        cs.sweep[i].at});
    }
    auto inject = injector_for(shots);
    const Distribution real_dist = exact_observable_distribution(
        make_closed_run(cs.real, inject, cs.run_options), leaf_limit);
    const Distribution ideal_dist = exact_observable_distribution(
        make_closed_run(cs.ideal, inject, cs.run_options), leaf_limit);
    const Rational tv = total_variation(real_dist, ideal_dist);
    if (tv > best) best = tv;

    std::size_t i = 0;
    for (; i < choice.size(); ++i) {
      if (++choice[i] < domain_size(i)) break;
      choice[i] = 0;
    }
    if (i == choice.size()) break;
  }
  return best;
}

/// Advantage of one concrete distinguisher on the case.
inline AdvantageReport evaluate_case_exact(const ConstructionCase& cs, const BoxFactory& d,
                                           std::uint64_t leaf_limit = kDefaultEnumerationLimit) {
  return exact_advantage(make_closed_run(cs.real, d, cs.run_options),
                         make_closed_run(cs.ideal, d, cs.run_options), leaf_limit);
}

inline AdvantageReport evaluate_case_montecarlo(const ConstructionCase& cs, const BoxFactory& d,
                                                const McOptions& opts) {
  return estimate_advantage(make_closed_run(cs.real, d, cs.run_options),
                            make_closed_run(cs.ideal, d, cs.run_options), opts);
}

// ---------------------------------------------------------------------------
// Causality audit
// ---------------------------------------------------------------------------

struct AuditResult {
  struct Entry {
    std::string earlier;
    std::string later;
    bool pass = true;
    std::string detail;
  };
  std::vector<Entry> entries;

  bool all_pass() const {
    for (const auto& e : entries) {
      if (!e.pass) return false;
    }
    return true;
  }
};

/// Checks that every event on the `earlier` wire causally precedes every
/// event on the `later` wire, for each declared pair.
inline AuditResult audit_order(const Transcript& tr,
                               const std::vector<std::pair<std::string, std::string>>& pairs,
                               double c = 1.0) {
  AuditResult result;
  for (const auto& [earlier, later] : pairs) {
    AuditResult::Entry entry{earlier, later, true, ""};
    bool earlier_seen = false;
    bool later_seen = false;
    for (const auto& a : tr.events) {
      if (a.wire != earlier) continue;
      earlier_seen = true;
      for (const auto& b : tr.events) {
        if (b.wire != later) continue;
        later_seen = true;
        if (!causal_precedes(a.at, b.at, c)) {
          entry.pass = false;
          entry.detail = "event at t=" + detail::format_number(a.at.t) +
                         " does not precede event at t=" + detail::format_number(b.at.t);
        }
      }
    }
    if (entry.pass && (!earlier_seen || !later_seen)) entry.detail = "vacuous (wire silent)";
    result.entries.push_back(std::move(entry));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Scripted adaptive distinguishers
// ---------------------------------------------------------------------------

/// Distinguisher skeleton: covers declared ports, runs injection shots at
/// activation, gathers observations, and renders a verdict when its timer
/// fires. Subclasses (or lambda callbacks) implement the decision rule.
class ScriptedDistinguisher : public Box {
 public:
  using Verdict = std::function<bool(const std::map<std::string, Message>&)>;
  /// Optional reaction to a message: may emit follow-up inputs.
  using Reaction =
      std::function<void(BoxIo&, const std::string&, const Message&,
                         const std::map<std::string, Message>&)>;

  ScriptedDistinguisher(std::string name, double verdict_time)
      : Box(std::move(name)), verdict_time_(verdict_time) {
    p_verdict_ = add_out("verdict", Side::outer, bits_type(1));
  }

  ScriptedDistinguisher& observe(const std::string& exposed, PayloadType t) {
    add_in("obs." + exposed, Side::alice, t, exposed);
    return *this;
  }
  ScriptedDistinguisher& inject(const std::string& exposed, PayloadType t, Payload value,
                                SpacetimePoint at) {
    add_out("put." + exposed, Side::alice, t, exposed);
    shots_.push_back(InjectorBox::Shot{"put." + exposed, std::move(value), at});
    return *this;
  }
  /// Declares an input port the reaction callback can drive later.
  ScriptedDistinguisher& drive(const std::string& exposed, PayloadType t) {
    add_out("put." + exposed, Side::alice, t, exposed);
    return *this;
  }
  ScriptedDistinguisher& decide(Verdict v) {
    verdict_fn_ = std::move(v);
    return *this;
  }
  ScriptedDistinguisher& react(Reaction r) {
    reaction_ = std::move(r);
    return *this;
  }

  void activate(BoxIo& io) override {
    for (const auto& s : shots_) io.emit(s.port, s.payload, s.at);
    io.set_timer(verdict_time_);
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    const std::string& pname = ports()[port].name;
    const std::string exposed = pname.substr(4);  // strip "obs."
    seen_.emplace(exposed, msg);
    if (reaction_) reaction_(io, exposed, msg, seen_);
  }

  void on_timer(BoxIo& io, double t) override {
    if (decided_) return;
    decided_ = true;
    const bool bit = verdict_fn_ ? verdict_fn_(seen_) : false;
    io.emit(p_verdict_, Bits::bit(bit), SpacetimePoint{{0, 0, 0}, t});
  }

 private:
  double verdict_time_;
  int p_verdict_;
  std::vector<InjectorBox::Shot> shots_;
  std::map<std::string, Message> seen_;
  Verdict verdict_fn_;
  Reaction reaction_;
  bool decided_ = false;
};

}  // namespace relsim
