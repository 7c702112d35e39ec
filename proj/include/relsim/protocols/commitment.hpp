#pragma once

// Bit commitment from k chosen-pair OTs: Alice commits by streaming k pairs
// whose xor is the committed bit; Bob silently learns one element of each
// pair. Opening reveals all pairs, which Bob cross-checks against what the
// transfers delivered.

#include <memory>
#include <optional>

#include "relsim/cases.hpp"
#include "relsim/primitives.hpp"
#include "relsim/protocols/common.hpp"
#include "relsim/stats.hpp"

namespace relsim {

struct CommitFromOtSchedule {
  double pairs = 1.0;    // pair bits enter the transfers
  double choices = 1.0;  // Bob's selector bits
  double deliver = 2.0;  // transfer outputs
  double recv = 3.0;     // Bob acknowledges the commitment
  double open = 4.0;     // canonical opening input
  double sbars = 5.0;    // revealed pairs reach Bob
  double reveal = 6.0;   // Bob's output
};

// Revealed pairs ride one wire as a 2k-wide string: bit 2i is pair i's slot
// 0, bit 2i+1 its slot 1.
inline std::uint8_t sbar_width(unsigned k) { return static_cast<std::uint8_t>(2 * k); }

class CommitFromOtAlice final : public Box {
 public:
  CommitFromOtAlice(unsigned k, CommitFromOtSchedule sched = {})
      : Box("pi6A"), k_(k), sched_(sched) {
    if (k_ < 1 || k_ > 16) throw InputError("pair count must lie in [1, 16]");
    p_x_ = add_in("x", Side::outer, bits_type(1));
    p_open_ = add_in("open", Side::outer, symbol_type());
    for (unsigned i = 0; i < k_; ++i) {
      feeds0_.push_back(add_out("feed" + std::to_string(i) + "a", Side::alice, bits_type(1),
                                std::to_string(i) + ".a0"));
      feeds1_.push_back(add_out("feed" + std::to_string(i) + "b", Side::alice, bits_type(1),
                                std::to_string(i) + ".a1"));
    }
    p_sbars_ = add_out("sbars", Side::bob, bits_type(sbar_width(k_)));
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_x_) {
      if (committed_) throw ProtocolOrderError("double commit on " + name());
      if (is_bot(msg.payload)) throw InputError("commit payload must be a bit");
      committed_ = true;
      const bool x = std::get<Bits>(msg.payload).as_bool();
      const SpacetimePoint at = geom().at_alice(sched_.pairs);
      pairs_ = 0;
      for (unsigned i = 0; i < k_; ++i) {
        const bool s0 = io.rng().bit();
        const bool s1 = s0 ^ x;
        if (s0) pairs_ |= 1u << (2 * i);
        if (s1) pairs_ |= 1u << (2 * i + 1);
        io.emit(feeds0_[i], Bits::bit(s0), at);
        io.emit(feeds1_[i], Bits::bit(s1), at);
      }
      return;
    }
    if (port == p_open_) {
      if (!committed_) throw ProtocolOrderError("open before commit on " + name());
      if (opened_) throw ProtocolOrderError("double open on " + name());
      opened_ = true;
      const SpacetimePoint at = geom().at_bob(sched_.sbars);
      if (is_bot(msg.payload)) {
        io.mark_abort();
        io.emit(p_sbars_, Sym::bot, at);
        return;
      }
      io.emit(p_sbars_, Bits{pairs_, sbar_width(k_)}, at);
    }
  }

 private:
  unsigned k_;
  CommitFromOtSchedule sched_;
  int p_x_, p_open_, p_sbars_;
  std::vector<int> feeds0_, feeds1_;
  std::uint32_t pairs_ = 0;
  bool committed_ = false, opened_ = false;
};

class CommitFromOtBob final : public Box {
 public:
  CommitFromOtBob(unsigned k, CommitFromOtSchedule sched = {})
      : Box("pi6B"), k_(k), sched_(sched) {
    if (k_ < 1 || k_ > 16) throw InputError("pair count must lie in [1, 16]");
    for (unsigned i = 0; i < k_; ++i) {
      choices_.push_back(add_out("choose" + std::to_string(i), Side::bob, bits_type(1),
                                 std::to_string(i) + ".b"));
      gots_.push_back(add_in("got" + std::to_string(i), Side::bob, bits_type(1),
                             std::to_string(i) + ".out"));
    }
    p_sbars_ = add_in("sbars_in", Side::alice, bits_type(sbar_width(k_)), "sbars");
    p_recv_ = add_out("recv", Side::outer, symbol_type());
    p_reveal_ = add_out("reveal", Side::outer, bits_type(1));
    received_.resize(k_);
  }

  void activate(BoxIo& io) override {
    selectors_.resize(k_);
    for (unsigned i = 0; i < k_; ++i) {
      selectors_[i] = io.rng().bit();
      io.emit(choices_[i], Bits::bit(selectors_[i]), geom().at_bob(sched_.choices));
    }
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    for (unsigned i = 0; i < gots_.size(); ++i) {
      if (static_cast<int>(gots_[i]) == port) {
        received_[i] = msg.payload;
        if (++arrived_ == k_) io.emit(p_recv_, Sym::recv, geom().at_bob(sched_.recv));
        return;
      }
    }
    if (port != p_sbars_ || revealed_) return;
    revealed_ = true;
    const SpacetimePoint at = geom().at_bob(sched_.reveal);
    if (is_bot(msg.payload)) {
      io.mark_abort();
      io.emit(p_reveal_, Sym::bot, at);
      return;
    }
    const std::uint32_t sbars = std::get<Bits>(msg.payload).v;
    std::optional<bool> value;
    bool ok = arrived_ == k_;
    for (unsigned i = 0; ok && i < k_; ++i) {
      const bool sb0 = ((sbars >> (2 * i)) & 1u) != 0;
      const bool sb1 = ((sbars >> (2 * i + 1)) & 1u) != 0;
      const Payload& got = *received_[i];
      if (is_bot(got) || std::get<Bits>(got).as_bool() != (selectors_[i] ? sb1 : sb0)) {
        ok = false;
        break;
      }
      const bool x = sb0 ^ sb1;
      if (value && *value != x) ok = false;
      value = x;
    }
    if (!ok) {
      io.mark_abort();
      io.emit(p_reveal_, Sym::bot, at);
      return;
    }
    io.emit(p_reveal_, Bits::bit(*value), at);
  }

 private:
  unsigned k_;
  CommitFromOtSchedule sched_;
  std::vector<int> choices_, gots_;
  int p_sbars_, p_recv_, p_reveal_;
  std::vector<bool> selectors_;
  std::vector<std::optional<Payload>> received_;
  unsigned arrived_ = 0;
  bool revealed_ = false;
};

/// Dishonest-Alice simulator: commits the xor of the first pair it sees, then
/// re-runs Bob's consistency test on the opened pairs, peeking at one slot
/// per pair.
class CommitFromOtSimAlice final : public Box {
 public:
  CommitFromOtSimAlice(unsigned k, CommitFromOtSchedule sched = {})
      : Box("sim6A"), k_(k), sched_(sched) {
    for (unsigned i = 0; i < k_; ++i) {
      slots0_.push_back(add_in(std::to_string(i) + ".a0", Side::outer, bits_type(1)));
      slots1_.push_back(add_in(std::to_string(i) + ".a1", Side::outer, bits_type(1)));
    }
    p_sbars_ = add_in("sbars", Side::outer, bits_type(sbar_width(k_)));
    p_commit_ = add_out("feed_commit", Side::alice, bits_type(1), "commit");
    p_open_ = add_out("feed_open", Side::alice, symbol_type(), "open");
    s0_.resize(k_);
    s1_.resize(k_);
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    for (unsigned i = 0; i < k_; ++i) {
      if (static_cast<int>(slots0_[i]) == port) {
        s0_[i] = msg.payload;
        ++arrived_;
      }
      if (static_cast<int>(slots1_[i]) == port) {
        s1_[i] = msg.payload;
        ++arrived_;
      }
    }
    if (arrived_ == 2 * k_ && !committed_) {
      committed_ = true;
      x_ = !is_bot(*s0_[0]) && !is_bot(*s1_[0]) &&
           (std::get<Bits>(*s0_[0]).as_bool() ^ std::get<Bits>(*s1_[0]).as_bool());
      io.emit(p_commit_, Bits::bit(x_), geom().at_alice(sched_.pairs + 1.0));
    }
    if (port != p_sbars_ || !committed_ || opened_) return;
    opened_ = true;
    const SpacetimePoint at = geom().at_bob(sched_.sbars);
    if (is_bot(msg.payload)) {
      io.emit(p_open_, Sym::bot, at);
      return;
    }
    const std::uint32_t sbars = std::get<Bits>(msg.payload).v;
    bool ok = true;
    for (unsigned i = 0; ok && i < k_; ++i) {
      const bool sb0 = ((sbars >> (2 * i)) & 1u) != 0;
      const bool sb1 = ((sbars >> (2 * i + 1)) & 1u) != 0;
      const bool probe = io.rng().bit();  // audit one slot per pair
      const Payload& held = probe ? *s1_[i] : *s0_[i];
      if (is_bot(held) || std::get<Bits>(held).as_bool() != (probe ? sb1 : sb0)) ok = false;
      if ((sb0 ^ sb1) != x_) ok = false;
    }
    io.emit(p_open_, ok ? Payload(Sym::open_commit) : Payload(Sym::bot), at);
  }

 private:
  unsigned k_;
  CommitFromOtSchedule sched_;
  std::vector<int> slots0_, slots1_;
  int p_sbars_, p_commit_, p_open_;
  std::vector<std::optional<Payload>> s0_, s1_;
  unsigned arrived_ = 0;
  bool committed_ = false, opened_ = false;
  bool x_ = false;
};

/// Dishonest-Bob simulator: hands out fresh uniform bits for the transfers,
/// then back-fills the unseen slots once the ideal commitment opens.
class CommitFromOtSimBob final : public Box {
 public:
  CommitFromOtSimBob(unsigned k, CommitFromOtSchedule sched = {})
      : Box("sim6B"), k_(k), sched_(sched) {
    for (unsigned i = 0; i < k_; ++i) {
      choices_.push_back(add_in(std::to_string(i) + ".b", Side::outer, bits_type(1)));
      outs_.push_back(add_out(std::to_string(i) + ".out", Side::outer, bits_type(1)));
    }
    p_recv_in_ = add_in("recv_in", Side::bob, symbol_type(), "recv");
    p_reveal_in_ = add_in("reveal_in", Side::bob, bits_type(1), "reveal");
    p_sbars_ = add_out("sbars", Side::outer, bits_type(sbar_width(k_)));
    selectors_.resize(k_);
    shown_.resize(k_);
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    for (unsigned i = 0; i < k_; ++i) {
      if (static_cast<int>(choices_[i]) == port) {
        selectors_[i] = msg.payload;
        ++nsel_;
      }
    }
    if (port == p_recv_in_) recv_seen_ = true;
    if (recv_seen_ && nsel_ == k_ && !dealt_) {
      dealt_ = true;
      for (unsigned i = 0; i < k_; ++i) {
        if (is_bot(*selectors_[i])) {
          io.emit(outs_[i], Sym::bot, geom().at_bob(sched_.deliver));
        } else {
          shown_[i] = io.rng().bit();
          io.emit(outs_[i], Bits::bit(shown_[i]), geom().at_bob(sched_.deliver));
        }
      }
    }
    if (port == p_reveal_in_ && !revealed_) {
      revealed_ = true;
      const SpacetimePoint at = geom().at_bob(sched_.sbars);
      if (is_bot(msg.payload)) {
        io.emit(p_sbars_, Sym::bot, at);
        return;
      }
      const bool x = std::get<Bits>(msg.payload).as_bool();
      std::uint32_t sbars = 0;
      for (unsigned i = 0; i < k_; ++i) {
        const bool sel = selectors_[i] && !is_bot(*selectors_[i]) &&
                         std::get<Bits>(*selectors_[i]).as_bool();
        const bool seen = shown_[i];
        const bool other = seen ^ x;
        const bool sb0 = sel ? other : seen;
        const bool sb1 = sel ? seen : other;
        if (sb0) sbars |= 1u << (2 * i);
        if (sb1) sbars |= 1u << (2 * i + 1);
      }
      io.emit(p_sbars_, Bits{sbars, sbar_width(k_)}, at);
    }
  }

 private:
  unsigned k_;
  CommitFromOtSchedule sched_;
  std::vector<int> choices_, outs_;
  int p_recv_in_, p_reveal_in_, p_sbars_;
  std::vector<std::optional<Payload>> selectors_;
  std::vector<bool> shown_;
  unsigned nsel_ = 0;
  bool recv_seen_ = false, dealt_ = false, revealed_ = false;
};

inline System make_transfer_bank(unsigned count, double out_delay = 1.0) {
  std::vector<System> parts;
  for (unsigned i = 0; i < count; ++i) {
    parts.push_back(
        System::single(std::make_unique<SelectTransferBox>("ot" + std::to_string(i), 1, out_delay)));
  }
  return System::parallel(std::move(parts));
}

inline std::vector<ConstructionCase> pi6_cases(unsigned k) {
  if (k < 1 || k > 16) throw InputError("pair count must lie in [1, 16]");
  const CommitFromOtSchedule sched{};
  const std::vector<Payload> bits = {Bits::bit(false), Bits::bit(true)};
  const std::vector<Payload> open_domain = {Sym::open_commit, Sym::bot};

  ConstructionCase honest;
  honest.label = "pi6.honest";
  honest.real = [k, sched] {
    System sys = make_transfer_bank(k);
    sys.attach(std::make_unique<CommitFromOtAlice>(k, sched), Side::alice);
    sys.attach(std::make_unique<CommitFromOtBob>(k, sched), Side::bob);
    sys.bind_free("sbars", "sbars");
    return sys;
  };
  honest.ideal = [sched] {
    return System::single(std::make_unique<CommitmentBox>(
        "bc", sched.recv - 0.0, sched.reveal - sched.open, Side::alice));
  };
  honest.sweep = {SweepPort{"x", geom().at_alice(0), bits},
                  SweepPort{"open", geom().at_alice(sched.open), open_domain, true}};
  honest.order_clause = {{"inject.x", "pi6A.feed0a"}, {"pi6A.feed0a", "recv"},
                         {"inject.open", "pi6A.sbars"}, {"pi6A.sbars", "reveal"}};

  ConstructionCase da;
  da.label = "pi6.dA";
  da.real = [k, sched] {
    System sys = make_transfer_bank(k);
    sys.attach(std::make_unique<CommitFromOtBob>(k, sched), Side::bob);
    return sys;
  };
  da.ideal = [k, sched] {
    System sys = System::single(std::make_unique<CommitmentBox>(
        "bc", sched.recv - (sched.pairs + 1.0), sched.reveal - sched.sbars, Side::alice));
    sys.attach(std::make_unique<CommitFromOtSimAlice>(k, sched), Side::alice);
    return sys;
  };
  da.claimed_epsilon = Rational::pow(Rational(1, 2), k);
  da.claimed_envelope = Rational::pow(Rational(1, 2), k).to_double();
  if (k <= 2) {
    std::vector<Payload> reveals;
    for (std::uint32_t v = 0; v < (1u << (2 * k)); ++v) reveals.push_back(Bits{v, sbar_width(k)});
    da.sweep = {};
    for (unsigned i = 0; i < k; ++i) {
      da.sweep.push_back(SweepPort{std::to_string(i) + ".a0", geom().at_alice(sched.pairs), bits});
      da.sweep.push_back(SweepPort{std::to_string(i) + ".a1", geom().at_alice(sched.pairs), bits});
    }
    da.sweep.push_back(SweepPort{"sbars", geom().at_bob(sched.sbars), reveals, true});
  }
  da.order_clause = {{"inject.0.a0", "recv"}, {"inject.sbars", "reveal"}};

  ConstructionCase db;
  db.label = "pi6.dB";
  db.real = [k, sched] {
    System sys = make_transfer_bank(k);
    sys.attach(std::make_unique<CommitFromOtAlice>(k, sched), Side::alice);
    return sys;
  };
  db.ideal = [k, sched] {
    System sys = System::single(std::make_unique<CommitmentBox>(
        "bc", sched.choices - 0.0, sched.sbars - sched.open, Side::alice));
    sys.attach(std::make_unique<CommitFromOtSimBob>(k, sched), Side::bob);
    return sys;
  };
  if (k <= 3) {
    db.sweep = {SweepPort{"x", geom().at_alice(0), bits},
                SweepPort{"open", geom().at_alice(sched.open), open_domain, true}};
    for (unsigned i = 0; i < k; ++i) {
      db.sweep.push_back(SweepPort{std::to_string(i) + ".b", geom().at_bob(sched.choices), bits});
    }
  }
  db.order_clause = {{"inject.x", "pi6A.sbars"}, {"inject.open", "pi6A.sbars"},
                     {"inject.0.b", "sbars"}};

  return {honest, da, db};
}

}  // namespace relsim
