#pragma once

// Chosen-pair OT from 3k erasure transfers: Alice streams random bits through
// the erasure instances, Bob masks her inputs with xor-sums over a fully
// received index subset and a disjoint decoy subset.

#include <memory>
#include <optional>

#include "relsim/cases.hpp"
#include "relsim/primitives.hpp"
#include "relsim/protocols/common.hpp"
#include "relsim/stats.hpp"

namespace relsim {

struct SubsetOtSchedule {
  double feed = 1.0;    // random bits enter the erasure instances
  double deliver = 2.0; // erasure outputs reach Bob
  double sets = 3.0;    // (I0, I1) reaches Alice
  double masks = 4.0;   // t0, t1 reach Bob
  double out = 5.0;     // Bob's output
};

class SubsetOtAlice final : public Box {
 public:
  SubsetOtAlice(unsigned k, SubsetOtSchedule sched = {})
      : Box("pi4A"), k_(k), sched_(sched) {
    p_a0_ = add_in("a0", Side::outer, bits_type(1));
    p_a1_ = add_in("a1", Side::outer, bits_type(1));
    for (unsigned i = 0; i < 3 * k_; ++i) {
      feeds_.push_back(add_out("feed" + std::to_string(i), Side::alice, bits_type(1),
                               std::to_string(i) + ".x"));
    }
    p_sets_ = add_in("isets", Side::bob, sets_type());
    p_t0_ = add_out("t0", Side::bob, bits_type(1));
    p_t1_ = add_out("t1", Side::bob, bits_type(1));
  }

  void activate(BoxIo& io) override {
    bits_.resize(3 * k_);
    for (unsigned i = 0; i < 3 * k_; ++i) {
      bits_[i] = io.rng().bit();
      io.emit(feeds_[i], Bits::bit(bits_[i]), geom().at_alice(sched_.feed));
    }
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_a0_) a0_ = msg.payload;
    if (port == p_a1_) a1_ = msg.payload;
    if (port != p_sets_) return;
    const SpacetimePoint mask_at = geom().at_bob(sched_.masks);
    const IndexSets* sets = std::get_if<IndexSets>(&msg.payload);
    const bool shape_ok = sets != nullptr && sets->sets.size() == 2 &&
                          sets->sets[0].size() == k_ && sets->sets[1].size() == k_ &&
                          in_range(*sets) && disjoint(sets->sets[0], sets->sets[1]);
    if (!shape_ok || !a0_ || !a1_) {
      io.mark_abort();
      io.emit(p_t0_, Sym::bot, mask_at);
      io.emit(p_t1_, Sym::bot, mask_at);
      return;
    }
    io.emit(p_t0_, mask(*a0_, sets->sets[0]), mask_at);
    io.emit(p_t1_, mask(*a1_, sets->sets[1]), mask_at);
  }

 private:
  bool in_range(const IndexSets& sets) const {
    for (const auto& s : sets.sets) {
      for (auto i : s) {
        if (i >= 3 * k_) return false;
      }
    }
    return true;
  }

  Payload mask(const Payload& a, const std::vector<std::uint16_t>& idx) const {
    if (is_bot(a)) return Sym::bot;
    bool acc = std::get<Bits>(a).as_bool();
    for (auto i : idx) acc ^= bits_[i];
    return Bits::bit(acc);
  }

  unsigned k_;
  SubsetOtSchedule sched_;
  int p_a0_, p_a1_, p_sets_, p_t0_, p_t1_;
  std::vector<int> feeds_;
  std::vector<bool> bits_;
  std::optional<Payload> a0_, a1_;
};

class SubsetOtBob final : public Box {
 public:
  SubsetOtBob(unsigned k, SubsetPolicy policy, SubsetOtSchedule sched = {})
      : Box("pi4B"), k_(k), policy_(policy), sched_(sched) {
    p_b_ = add_in("b", Side::outer, bits_type(1));
    for (unsigned i = 0; i < 3 * k_; ++i) {
      gots_.push_back(
          add_in("got" + std::to_string(i), Side::bob, bits_type(1), std::to_string(i) + ".out"));
    }
    p_sets_ = add_out("isets", Side::alice, sets_type());
    p_t0_ = add_in("mask0", Side::alice, bits_type(1), "t0");
    p_t1_ = add_in("mask1", Side::alice, bits_type(1), "t1");
    p_out_ = add_out("out", Side::outer, bits_type(1));
    values_.resize(3 * k_);
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_b_) b_ = msg.payload;
    if (port == p_t0_) t0_ = msg.payload;
    if (port == p_t1_) t1_ = msg.payload;
    for (unsigned i = 0; i < gots_.size(); ++i) {
      if (static_cast<int>(gots_[i]) == port) {
        values_[i] = msg.payload;
        ++received_;
      }
    }
    step(io);
  }

 private:
  void step(BoxIo& io) {
    const SpacetimePoint out_at = geom().at_bob(sched_.out);
    if (!chosen_ && received_ == 3 * k_ && b_) {
      chosen_ = true;
      if (is_bot(*b_)) {
        abort_out(io);
        return;
      }
      std::vector<std::uint16_t> known;
      for (std::uint16_t i = 0; i < 3 * k_; ++i) {
        if (!is_bot(*values_[i])) known.push_back(i);
      }
      // too few arrivals: no fully received subset exists, stop before the
      // masks are requested
      if (known.size() < k_) {
        abort_out(io);
        return;
      }
      mine_ = pick_subset(io.rng(), known, k_, policy_);
      const auto rest = difference(3 * k_, mine_);
      decoy_ = pick_subset(io.rng(), rest, k_, policy_);
      IndexSets sets;
      const bool pick = std::get<Bits>(*b_).as_bool();
      sets.sets.resize(2);
      sets.sets[pick ? 1 : 0] = mine_;
      sets.sets[pick ? 0 : 1] = decoy_;
      io.emit(p_sets_, sets, geom().at_alice(sched_.sets));
    }
    if (chosen_ && !aborted_ && !done_ && t0_ && t1_ && b_ && !is_bot(*b_)) {
      done_ = true;
      const Payload& mine_mask = std::get<Bits>(*b_).as_bool() ? *t1_ : *t0_;
      if (is_bot(mine_mask)) {
        io.mark_abort();
        io.emit(p_out_, Sym::bot, out_at);
        return;
      }
      bool acc = std::get<Bits>(mine_mask).as_bool();
      for (auto i : mine_) acc ^= std::get<Bits>(*values_[i]).as_bool();
      io.emit(p_out_, Bits::bit(acc), out_at);
    }
  }

  void abort_out(BoxIo& io) {
    aborted_ = true;
    io.mark_abort();
    io.emit(p_out_, Sym::bot, geom().at_bob(sched_.out));
  }

  unsigned k_;
  SubsetPolicy policy_;
  SubsetOtSchedule sched_;
  int p_b_, p_sets_, p_t0_, p_t1_, p_out_;
  std::vector<int> gots_;
  std::vector<std::optional<Payload>> values_;
  unsigned received_ = 0;
  std::optional<Payload> b_, t0_, t1_;
  std::vector<std::uint16_t> mine_, decoy_;
  bool chosen_ = false, aborted_ = false, done_ = false;
};

/// Dishonest-Alice simulator: sees the raw bits, replays the erasure pattern
/// and Bob's subset choice, then unmasks the pair for the ideal resource.
class SubsetOtSimAlice final : public Box {
 public:
  SubsetOtSimAlice(unsigned k, SubsetPolicy policy, SubsetOtSchedule sched = {})
      : Box("sim4A"), k_(k), policy_(policy), sched_(sched) {
    for (unsigned i = 0; i < 3 * k_; ++i) {
      xs_.push_back(add_in(std::to_string(i) + ".x", Side::outer, bits_type(1)));
    }
    p_sets_ = add_out("isets", Side::outer, sets_type());
    p_t0_ = add_in("t0", Side::outer, bits_type(1));
    p_t1_ = add_in("t1", Side::outer, bits_type(1));
    p_f0_ = add_out("feed0", Side::alice, bits_type(1), "a0");
    p_f1_ = add_out("feed1", Side::alice, bits_type(1), "a1");
    values_.resize(3 * k_);
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_t0_) t0_ = msg.payload;
    if (port == p_t1_) t1_ = msg.payload;
    for (unsigned i = 0; i < xs_.size(); ++i) {
      if (static_cast<int>(xs_[i]) == port) {
        values_[i] = msg.payload;
        ++received_;
      }
    }
    step(io);
  }

 private:
  void step(BoxIo& io) {
    const SpacetimePoint feed_at = geom().at_bob(sched_.masks);
    if (!simulated_ && received_ == 3 * k_) {
      simulated_ = true;
      std::vector<std::uint16_t> known;
      for (std::uint16_t i = 0; i < 3 * k_; ++i) {
        if (!is_bot(*values_[i]) && io.rng().bernoulli(Rational(1, 2))) known.push_back(i);
      }
      if (known.size() < k_) {
        aborted_ = true;
        io.mark_abort();
        io.emit(p_f0_, Sym::bot, feed_at);
        io.emit(p_f1_, Sym::bot, feed_at);
        return;
      }
      sets_.resize(2);
      sets_[0] = pick_subset(io.rng(), known, k_, policy_);
      sets_[1] = pick_subset(io.rng(), difference(3 * k_, sets_[0]), k_, policy_);
      IndexSets sets;
      sets.sets = sets_;
      io.emit(p_sets_, sets, geom().at_alice(sched_.sets));
    }
    if (simulated_ && !aborted_ && !fed_ && t0_ && t1_) {
      fed_ = true;
      io.emit(p_f0_, unmask(*t0_, sets_[0]), feed_at);
      io.emit(p_f1_, unmask(*t1_, sets_[1]), feed_at);
    }
  }

  Payload unmask(const Payload& t, const std::vector<std::uint16_t>& idx) const {
    if (is_bot(t)) return Sym::bot;
    bool acc = std::get<Bits>(t).as_bool();
    for (auto i : idx) {
      if (is_bot(*values_[i])) return Sym::bot;
      acc ^= std::get<Bits>(*values_[i]).as_bool();
    }
    return Bits::bit(acc);
  }

  unsigned k_;
  SubsetPolicy policy_;
  SubsetOtSchedule sched_;
  std::vector<int> xs_;
  int p_sets_, p_t0_, p_t1_, p_f0_, p_f1_;
  std::vector<std::optional<Payload>> values_;
  std::vector<std::vector<std::uint16_t>> sets_;
  unsigned received_ = 0;
  std::optional<Payload> t0_, t1_;
  bool simulated_ = false, aborted_ = false, fed_ = false;
};

/// Dishonest-Bob simulator: fabricates the erasure pattern, then answers the
/// mask request by querying the ideal resource for the one subset Bob can
/// actually decode. Both subsets fully received is the simulation's blind
/// spot: it gives up and aborts.
class SubsetOtSimBob final : public Box {
 public:
  SubsetOtSimBob(unsigned k, SubsetOtSchedule sched = {}) : Box("sim4B"), k_(k), sched_(sched) {
    for (unsigned i = 0; i < 3 * k_; ++i) {
      outs_.push_back(add_out(std::to_string(i) + ".out", Side::outer, bits_type(1)));
    }
    p_sets_ = add_in("isets", Side::outer, sets_type());
    p_t0_ = add_out("t0", Side::outer, bits_type(1));
    p_t1_ = add_out("t1", Side::outer, bits_type(1));
    p_fwd_ = add_out("fwd_b", Side::bob, bits_type(1), "b");
    p_got_ = add_in("got", Side::bob, bits_type(1), "out");
  }

  void activate(BoxIo& io) override {
    values_.resize(3 * k_);
    for (unsigned i = 0; i < 3 * k_; ++i) {
      const bool delivered = io.rng().bernoulli(Rational(1, 2));
      if (delivered) {
        values_[i] = io.rng().bit();
        io.emit(outs_[i], Bits::bit(*values_[i]), geom().at_bob(sched_.deliver));
      } else {
        io.emit(outs_[i], Sym::bot, geom().at_bob(sched_.deliver));
      }
    }
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    const SpacetimePoint mask_at = geom().at_bob(sched_.masks);
    if (port == p_sets_) {
      const IndexSets* sets = std::get_if<IndexSets>(&msg.payload);
      const bool shape_ok = sets != nullptr && sets->sets.size() == 2 &&
                            sets->sets[0].size() == k_ && sets->sets[1].size() == k_ &&
                            in_range(*sets) && disjoint(sets->sets[0], sets->sets[1]);
      if (!shape_ok) {
        io.mark_abort();
        io.emit(p_t0_, Sym::bot, mask_at);
        io.emit(p_t1_, Sym::bot, mask_at);
        return;
      }
      const bool known0 = fully_known(sets->sets[0]);
      const bool known1 = fully_known(sets->sets[1]);
      if (known0 && known1) {
        io.mark_abort();
        io.emit(p_t0_, Sym::bot, mask_at);
        io.emit(p_t1_, Sym::bot, mask_at);
        return;
      }
      if (!known0 && !known1) {
        io.emit(p_t0_, Bits::bit(io.rng().bit()), mask_at);
        io.emit(p_t1_, Bits::bit(io.rng().bit()), mask_at);
        return;
      }
      choice_ = known1 ? 1 : 0;
      known_set_ = sets->sets[static_cast<std::size_t>(choice_)];
      io.emit(p_fwd_, Bits::bit(choice_ == 1), geom().at_alice(sched_.sets));
      return;
    }
    if (port == p_got_) {
      const SpacetimePoint at = geom().at_bob(sched_.masks);
      Payload mine;
      if (is_bot(msg.payload)) {
        mine = Sym::bot;
      } else {
        bool acc = std::get<Bits>(msg.payload).as_bool();
        for (auto i : known_set_) acc ^= *values_[i];
        mine = Bits::bit(acc);
      }
      const Payload decoy = Bits::bit(io.rng().bit());
      io.emit(choice_ == 1 ? p_t1_ : p_t0_, mine, at);
      io.emit(choice_ == 1 ? p_t0_ : p_t1_, decoy, at);
    }
  }

 private:
  bool in_range(const IndexSets& sets) const {
    for (const auto& s : sets.sets) {
      for (auto i : s) {
        if (i >= 3 * k_) return false;
      }
    }
    return true;
  }

  bool fully_known(const std::vector<std::uint16_t>& idx) const {
    for (auto i : idx) {
      if (!values_[i].has_value()) return false;
    }
    return true;
  }

  unsigned k_;
  SubsetOtSchedule sched_;
  std::vector<int> outs_;
  int p_sets_, p_t0_, p_t1_, p_fwd_, p_got_;
  std::vector<std::optional<bool>> values_;  // nullopt = erased
  int choice_ = 0;
  std::vector<std::uint16_t> known_set_;
};

inline System make_erasure_bank(unsigned count, double out_delay = 1.0) {
  std::vector<System> parts;
  for (unsigned i = 0; i < count; ++i) {
    parts.push_back(System::single(
        std::make_unique<ErasureTransferBox>("rabin" + std::to_string(i), Rational(1, 2), 1,
                                             out_delay)));
  }
  return System::parallel(std::move(parts));
}

inline std::vector<ConstructionCase> pi4_cases(unsigned k,
                                               SubsetPolicy policy = SubsetPolicy::seeded) {
  if (k < 1) throw InputError("subset construction needs k >= 1");
  const SubsetOtSchedule sched{};
  const std::vector<Payload> bits = {Bits::bit(false), Bits::bit(true)};

  ConstructionCase honest;
  honest.label = "pi4.honest";
  honest.real = [k, policy, sched] {
    System sys = make_erasure_bank(3 * k);
    sys.attach(std::make_unique<SubsetOtAlice>(k, sched), Side::alice);
    sys.attach(std::make_unique<SubsetOtBob>(k, policy, sched), Side::bob);
    sys.bind_free("isets", "isets");
    sys.bind_free("t0", "t0");
    sys.bind_free("t1", "t1");
    return sys;
  };
  honest.ideal = [sched] {
    return System::single(std::make_unique<SelectTransferBox>("ot", 1, sched.out));
  };
  honest.claimed_epsilon = binomial_tail_lt(3 * k, Rational(1, 2), k);
  honest.claimed_envelope =
      chernoff_upper(3.0 * k / 2.0, 1.0 / 3.0, TailSide::lower);
  honest.sweep = {SweepPort{"a0", geom().at_alice(0), bits},
                  SweepPort{"a1", geom().at_alice(0), bits},
                  SweepPort{"b", geom().at_bob(0), bits}};
  honest.order_clause = {{"pi4A.feed0", "pi4B.isets"}, {"inject.a0", "pi4B.isets"},
                         {"inject.b", "pi4B.isets"},   {"pi4B.isets", "pi4A.t0"},
                         {"pi4A.t0", "out"},           {"pi4A.t1", "out"}};

  ConstructionCase da;
  da.label = "pi4.dA";
  da.real = [k, policy, sched] {
    System sys = make_erasure_bank(3 * k);
    sys.attach(std::make_unique<SubsetOtBob>(k, policy, sched), Side::bob);
    return sys;
  };
  da.ideal = [k, policy, sched] {
    System sys = System::single(std::make_unique<SelectTransferBox>("ot", 1, 1.0));
    sys.attach(std::make_unique<SubsetOtSimAlice>(k, policy, sched), Side::alice);
    return sys;
  };
  if (k == 1) {
    da.sweep = {SweepPort{"0.x", geom().at_alice(sched.feed), bits},
                SweepPort{"1.x", geom().at_alice(sched.feed), bits},
                SweepPort{"2.x", geom().at_alice(sched.feed), bits},
                SweepPort{"t0", geom().at_bob(sched.masks), bits},
                SweepPort{"t1", geom().at_bob(sched.masks), bits},
                SweepPort{"b", geom().at_bob(0), bits}};
  }
  da.order_clause = {{"inject.0.x", "pi4B.isets"}, {"pi4B.isets", "out"}};

  ConstructionCase db;
  db.label = "pi4.dB";
  db.real = [k, sched] {
    System sys = make_erasure_bank(3 * k);
    sys.attach(std::make_unique<SubsetOtAlice>(k, sched), Side::alice);
    return sys;
  };
  db.ideal = [k, sched] {
    System sys = System::single(std::make_unique<SelectTransferBox>("ot", 1, 1.0));
    sys.attach(std::make_unique<SubsetOtSimBob>(k, sched), Side::bob);
    return sys;
  };
  db.claimed_epsilon = binomial_tail_ge(3 * k, Rational(1, 2), 2 * k);
  db.claimed_envelope =
      chernoff_upper(3.0 * k / 2.0, 1.0 / 3.0, TailSide::upper);
  if (k == 1) {
    std::vector<Payload> pairs;
    for (std::uint16_t i = 0; i < 3; ++i) {
      for (std::uint16_t j = 0; j < 3; ++j) {
        if (i == j) continue;
        IndexSets sets;
        sets.sets = {{i}, {j}};
        pairs.push_back(sets);
      }
    }
    db.sweep = {SweepPort{"a0", geom().at_alice(0), bits},
                SweepPort{"a1", geom().at_alice(0), bits},
                SweepPort{"isets", geom().at_alice(sched.sets), pairs}};
  }
  db.order_clause = {{"inject.a0", "pi4A.t0"}, {"inject.isets", "pi4A.t0"}};

  return {honest, da, db};
}

}  // namespace relsim
