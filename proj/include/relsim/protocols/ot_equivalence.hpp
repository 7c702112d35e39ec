#pragma once

// The three perfect equivalences between the oblivious-transfer flavours:
// chosen-pair OT from randomized OT (one-time pad), randomized OT from
// chosen-pair OT (random inputs), and erasure transfer from chosen-pair OT
// (random slot + revealed slot index).

#include <memory>
#include <optional>

#include "relsim/cases.hpp"
#include "relsim/primitives.hpp"
#include "relsim/protocols/common.hpp"

namespace relsim {

// ---------------------------------------------------------------------------
// pi1: randomized OT -> chosen-pair OT
// ---------------------------------------------------------------------------

/// Alice's padding converter: encrypts each input with the resource key of
/// the same slot and ships both ciphertexts.
class PadOtAlice final : public Box {
 public:
  PadOtAlice(std::uint8_t w, double cipher_time) : Box("pi1A"), cipher_time_(cipher_time) {
    p_a0_ = add_in("a0", Side::outer, bits_type(w));
    p_a1_ = add_in("a1", Side::outer, bits_type(w));
    p_s0_ = add_in("key0", Side::alice, bits_type(w), "s0");
    p_s1_ = add_in("key1", Side::alice, bits_type(w), "s1");
    p_c0_ = add_out("c0", Side::bob, bits_type(w));
    p_c1_ = add_out("c1", Side::bob, bits_type(w));
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_a0_) a0_ = msg.payload;
    if (port == p_a1_) a1_ = msg.payload;
    if (port == p_s0_) s0_ = msg.payload;
    if (port == p_s1_) s1_ = msg.payload;
    if (a0_ && a1_ && s0_ && s1_ && !sent_) {
      sent_ = true;
      io.emit(p_c0_, xor_or_bot(*a0_, *s0_), geom().at_bob(cipher_time_));
      io.emit(p_c1_, xor_or_bot(*a1_, *s1_), geom().at_bob(cipher_time_));
    }
  }

 private:
  double cipher_time_;
  int p_a0_, p_a1_, p_s0_, p_s1_, p_c0_, p_c1_;
  std::optional<Payload> a0_, a1_, s0_, s1_;
  bool sent_ = false;
};

/// Bob's decrypting converter: forwards the choice bit, keeps the one key the
/// resource hands out, and decrypts the matching ciphertext.
class PadOtBob final : public Box {
 public:
  PadOtBob(std::uint8_t w, double out_time) : Box("pi1B"), out_time_(out_time) {
    p_b_ = add_in("b", Side::outer, bits_type(1));
    p_fwd_ = add_out("fwd_b", Side::bob, bits_type(1), "b");
    p_key_ = add_in("key", Side::bob, bits_type(w), "s");
    p_c0_ = add_in("c0", Side::alice, bits_type(w), "c0");
    p_c1_ = add_in("c1", Side::alice, bits_type(w), "c1");
    p_out_ = add_out("out", Side::outer, bits_type(w));
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_b_) {
      b_ = msg.payload;
      io.emit(p_fwd_, msg.payload, msg.at);
    }
    if (port == p_key_) key_ = msg.payload;
    if (port == p_c0_) c0_ = msg.payload;
    if (port == p_c1_) c1_ = msg.payload;
    if (b_ && key_ && c0_ && c1_ && !done_) {
      done_ = true;
      const SpacetimePoint at = geom().at_bob(out_time_);
      if (is_bot(*b_)) {
        io.mark_abort();
        io.emit(p_out_, Sym::bot, at);
        return;
      }
      const Payload& c = std::get<Bits>(*b_).as_bool() ? *c1_ : *c0_;
      io.emit(p_out_, xor_or_bot(c, *key_), at);
    }
  }

 private:
  double out_time_;
  int p_b_, p_fwd_, p_key_, p_c0_, p_c1_, p_out_;
  std::optional<Payload> b_, key_, c0_, c1_;
  bool done_ = false;
};

/// Dishonest-Alice simulator: recovers the pair from keys and ciphertexts.
class PadOtSimAlice final : public Box {
 public:
  PadOtSimAlice(std::uint8_t w, double feed_time) : Box("sim1A"), feed_time_(feed_time) {
    p_s0_ = add_in("s0", Side::outer, bits_type(w));
    p_s1_ = add_in("s1", Side::outer, bits_type(w));
    p_c0_ = add_in("c0", Side::outer, bits_type(w));
    p_c1_ = add_in("c1", Side::outer, bits_type(w));
    p_a0_ = add_out("feed0", Side::alice, bits_type(w), "a0");
    p_a1_ = add_out("feed1", Side::alice, bits_type(w), "a1");
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_s0_) s0_ = msg.payload;
    if (port == p_s1_) s1_ = msg.payload;
    if (port == p_c0_) c0_ = msg.payload;
    if (port == p_c1_) c1_ = msg.payload;
    if (s0_ && s1_ && c0_ && c1_ && !sent_) {
      sent_ = true;
      io.emit(p_a0_, xor_or_bot(*s0_, *c0_), geom().at_bob(feed_time_));
      io.emit(p_a1_, xor_or_bot(*s1_, *c1_), geom().at_bob(feed_time_));
    }
  }

 private:
  double feed_time_;
  int p_s0_, p_s1_, p_c0_, p_c1_, p_a0_, p_a1_;
  std::optional<Payload> s0_, s1_, c0_, c1_;
  bool sent_ = false;
};

/// Dishonest-Bob simulator: queries the ideal resource with Bob's choice and
/// fabricates the key and both ciphertexts with the right joint distribution.
class PadOtSimBob final : public Box {
 public:
  PadOtSimBob(std::uint8_t w, double cipher_time) : Box("sim1B"), w_(w), cipher_time_(cipher_time) {
    p_b_ = add_in("b", Side::outer, bits_type(1));
    p_fwd_ = add_out("fwd_b", Side::bob, bits_type(1), "b");
    p_got_ = add_in("got", Side::bob, bits_type(w), "out");
    p_s_ = add_out("s", Side::outer, bits_type(w));
    p_c0_ = add_out("c0", Side::outer, bits_type(w));
    p_c1_ = add_out("c1", Side::outer, bits_type(w));
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_b_) {
      b_ = msg.payload;
      io.emit(p_fwd_, msg.payload, msg.at);
      return;
    }
    if (port != p_got_) return;
    const SpacetimePoint cipher_at = geom().at_bob(cipher_time_);
    const Bits key{io.rng().bit_string(w_), w_};
    io.emit(p_s_, is_bot(msg.payload) ? Payload(Sym::bot) : Payload(key), msg.at);
    if (is_bot(msg.payload) || !b_ || is_bot(*b_)) {
      io.emit(p_c0_, Bits{io.rng().bit_string(w_), w_}, cipher_at);
      io.emit(p_c1_, Bits{io.rng().bit_string(w_), w_}, cipher_at);
      return;
    }
    const bool pick = std::get<Bits>(*b_).as_bool();
    const Payload chosen_cipher = xor_or_bot(msg.payload, key);
    const Bits other{io.rng().bit_string(w_), w_};
    io.emit(pick ? p_c1_ : p_c0_, chosen_cipher, cipher_at);
    io.emit(pick ? p_c0_ : p_c1_, other, cipher_at);
  }

 private:
  std::uint8_t w_;
  double cipher_time_;
  int p_b_, p_fwd_, p_got_, p_s_, p_c0_, p_c1_;
  std::optional<Payload> b_;
};

/// The three experiment conditions for the pad construction.
inline std::vector<ConstructionCase> pi1_cases(std::uint8_t w = 1) {
  const double kCipherTime = 2.0;
  const double kOutTime = 3.0;
  std::vector<Payload> strings;
  for (std::uint32_t v = 0; v < (1u << w); ++v) strings.push_back(Bits{v, w});
  const std::vector<Payload> bits = {Bits::bit(false), Bits::bit(true)};

  ConstructionCase honest;
  honest.label = "pi1.honest";
  honest.real = [w, kCipherTime, kOutTime] {
    System sys = System::single(std::make_unique<RandomizedTransferBox>("rot", w, 0.0, 1.0));
    sys.attach(std::make_unique<PadOtAlice>(w, kCipherTime), Side::alice);
    sys.attach(std::make_unique<PadOtBob>(w, kOutTime), Side::bob);
    sys.bind_free("c0", "c0");
    sys.bind_free("c1", "c1");
    return sys;
  };
  honest.ideal = [w, kOutTime] {
    return System::single(std::make_unique<SelectTransferBox>("ot", w, kOutTime));
  };
  honest.sweep = {SweepPort{"a0", geom().at_alice(0), strings},
                  SweepPort{"a1", geom().at_alice(0), strings},
                  SweepPort{"b", geom().at_bob(0), bits}};
  honest.order_clause = {{"rot.s0", "pi1A.c0"},   {"rot.s1", "pi1A.c1"},
                         {"inject.a0", "pi1A.c0"}, {"inject.a1", "pi1A.c1"},
                         {"pi1A.c0", "out"},       {"pi1A.c1", "out"}};

  ConstructionCase da;
  da.label = "pi1.dA";
  da.real = [w, kOutTime] {
    SelectTransferBox::Names rot_names{"s0", "s1", "b", "s"};
    System sys =
        System::single(std::make_unique<SelectTransferBox>("rotA", w, 1.0, rot_names));
    sys.attach(std::make_unique<PadOtBob>(w, kOutTime), Side::bob);
    return sys;
  };
  da.ideal = [w, kCipherTime] {
    System sys = System::single(std::make_unique<SelectTransferBox>("ot", w, 1.0));
    sys.attach(std::make_unique<PadOtSimAlice>(w, kCipherTime), Side::alice);
    return sys;
  };
  da.sweep = {SweepPort{"s0", geom().at_alice(0), strings},
              SweepPort{"s1", geom().at_alice(0), strings},
              SweepPort{"c0", geom().at_bob(kCipherTime), strings},
              SweepPort{"c1", geom().at_bob(kCipherTime), strings},
              SweepPort{"b", geom().at_bob(0), bits}};
  da.order_clause = {{"inject.s0", "out"}, {"inject.c0", "out"}, {"inject.c1", "out"}};

  ConstructionCase db;
  db.label = "pi1.dB";
  db.real = [w, kCipherTime] {
    System sys = System::single(std::make_unique<RandomizedTransferBox>("rot", w, 0.0, 1.0));
    sys.attach(std::make_unique<PadOtAlice>(w, kCipherTime), Side::alice);
    return sys;
  };
  db.ideal = [w, kCipherTime] {
    System sys = System::single(std::make_unique<SelectTransferBox>("ot", w, 1.0));
    sys.attach(std::make_unique<PadOtSimBob>(w, kCipherTime), Side::bob);
    return sys;
  };
  db.sweep = {SweepPort{"a0", geom().at_alice(0), strings},
              SweepPort{"a1", geom().at_alice(0), strings},
              SweepPort{"b", geom().at_bob(0), bits}};
  db.order_clause = {{"inject.a0", "pi1A.c0"}, {"inject.b", "s"}};

  return {honest, da, db};
}

// ---------------------------------------------------------------------------
// pi2: chosen-pair OT -> randomized OT
// ---------------------------------------------------------------------------

/// Alice draws the pair herself, feeds it to the chosen-pair resource, and
/// reports it on her own interface.
class RandomPairAlice final : public Box {
 public:
  explicit RandomPairAlice(std::uint8_t w) : Box("pi2A"), w_(w) {
    p_s0_ = add_out("s0", Side::outer, bits_type(w));
    p_s1_ = add_out("s1", Side::outer, bits_type(w));
    p_f0_ = add_out("feed0", Side::alice, bits_type(w), "a0");
    p_f1_ = add_out("feed1", Side::alice, bits_type(w), "a1");
  }

  void activate(BoxIo& io) override {
    const Bits s0{io.rng().bit_string(w_), w_};
    const Bits s1{io.rng().bit_string(w_), w_};
    const SpacetimePoint at = geom().at_alice(0);
    io.emit(p_s0_, s0, at);
    io.emit(p_s1_, s1, at);
    io.emit(p_f0_, s0, at);
    io.emit(p_f1_, s1, at);
  }

  void on_message(BoxIo&, int, const Message&) override {}

 private:
  std::uint8_t w_;
  int p_s0_, p_s1_, p_f0_, p_f1_;
};

inline std::unique_ptr<Box> make_pi2_bob(std::uint8_t w) {
  std::vector<IdentityConverter::Lane> lanes = {
      {"b", "b", Dir::out, bits_type(1)},
      {"s", "out", Dir::in, bits_type(w)},
  };
  return std::make_unique<IdentityConverter>("pi2B", Side::bob, std::move(lanes));
}

inline std::vector<ConstructionCase> pi2_cases(std::uint8_t w = 1) {
  std::vector<Payload> strings;
  for (std::uint32_t v = 0; v < (1u << w); ++v) strings.push_back(Bits{v, w});
  const std::vector<Payload> bits = {Bits::bit(false), Bits::bit(true)};

  ConstructionCase honest;
  honest.label = "pi2.honest";
  honest.real = [w] {
    System sys = System::single(std::make_unique<SelectTransferBox>("ot", w, 1.0));
    sys.attach(std::make_unique<RandomPairAlice>(w), Side::alice);
    sys.attach(make_pi2_bob(w), Side::bob);
    return sys;
  };
  honest.ideal = [w] {
    return System::single(std::make_unique<RandomizedTransferBox>("rot", w, 0.0, 1.0));
  };
  honest.sweep = {SweepPort{"b", geom().at_bob(0), bits}};
  honest.order_clause = {{"inject.b", "s"}};

  ConstructionCase da;
  da.label = "pi2.dA";
  da.real = [w] {
    System sys = System::single(std::make_unique<SelectTransferBox>("ot", w, 1.0));
    sys.attach(make_pi2_bob(w), Side::bob);
    sys.rename_exposed("a0", "s0");
    sys.rename_exposed("a1", "s1");
    return sys;
  };
  da.ideal = [w] {
    SelectTransferBox::Names names{"s0", "s1", "b", "s"};
    return System::single(std::make_unique<SelectTransferBox>("rotA", w, 1.0, names));
  };
  da.sweep = {SweepPort{"s0", geom().at_alice(0), strings},
              SweepPort{"s1", geom().at_alice(0), strings},
              SweepPort{"b", geom().at_bob(0), bits}};
  da.order_clause = {{"inject.s0", "s"}, {"inject.b", "s"}};

  ConstructionCase db;
  db.label = "pi2.dB";
  db.real = [w] {
    System sys = System::single(std::make_unique<SelectTransferBox>("ot", w, 1.0));
    sys.attach(std::make_unique<RandomPairAlice>(w), Side::alice);
    sys.rename_exposed("out", "s");
    return sys;
  };
  db.ideal = [w] {
    return System::single(std::make_unique<RandomizedTransferBox>("rot", w, 0.0, 1.0));
  };
  db.sweep = {SweepPort{"b", geom().at_bob(0), bits}};
  db.order_clause = {{"inject.b", "s"}};

  return {honest, da, db};
}

// ---------------------------------------------------------------------------
// pi3: chosen-pair OT -> erasure transfer
// ---------------------------------------------------------------------------

/// Alice hides the payload in a random slot and reveals the slot index after
/// the transfer completes.
class ErasureFromOtAlice final : public Box {
 public:
  ErasureFromOtAlice(std::uint8_t w, double feed_time, double reveal_time)
      : Box("pi3A"), w_(w), feed_time_(feed_time), reveal_time_(reveal_time) {
    p_x_ = add_in("x", Side::outer, bits_type(w));
    p_a0_ = add_out("feed0", Side::alice, bits_type(w), "a0");
    p_a1_ = add_out("feed1", Side::alice, bits_type(w), "a1");
    p_slot_ = add_out("bstar", Side::bob, bits_type(1));
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port != p_x_ || sent_) return;
    sent_ = true;
    const SpacetimePoint feed_at = geom().at_alice(feed_time_);
    const SpacetimePoint slot_at = geom().at_bob(reveal_time_);
    if (is_bot(msg.payload)) {
      io.mark_abort();
      io.emit(p_a0_, Sym::bot, feed_at);
      io.emit(p_a1_, Sym::bot, feed_at);
      io.emit(p_slot_, Sym::bot, slot_at);
      return;
    }
    const bool slot = io.rng().bit();
    const Bits filler{io.rng().bit_string(w_), w_};
    io.emit(slot ? p_a1_ : p_a0_, msg.payload, feed_at);
    io.emit(slot ? p_a0_ : p_a1_, filler, feed_at);
    io.emit(p_slot_, Bits::bit(slot), slot_at);
  }

 private:
  std::uint8_t w_;
  double feed_time_, reveal_time_;
  int p_x_, p_a0_, p_a1_, p_slot_;
  bool sent_ = false;
};

/// Bob picks a random slot; the transfer succeeded iff the slots agree.
class ErasureFromOtBob final : public Box {
 public:
  ErasureFromOtBob(std::uint8_t w, double choice_time, double out_time)
      : Box("pi3B"), choice_time_(choice_time), out_time_(out_time) {
    p_fwd_ = add_out("fwd_b", Side::bob, bits_type(1), "b");
    p_got_ = add_in("got", Side::bob, bits_type(w), "out");
    p_slot_ = add_in("bstar", Side::alice, bits_type(1), "bstar");
    p_out_ = add_out("out", Side::outer, bits_type(w));
  }

  void activate(BoxIo& io) override {
    choice_ = io.rng().bit();
    io.emit(p_fwd_, Bits::bit(choice_), geom().at_bob(choice_time_));
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_got_) got_ = msg.payload;
    if (port == p_slot_) slot_ = msg.payload;
    if (got_ && slot_ && !done_) {
      done_ = true;
      const SpacetimePoint at = geom().at_bob(out_time_);
      if (is_bot(*got_) || is_bot(*slot_)) {
        io.mark_abort();
        io.emit(p_out_, Sym::bot, at);
        return;
      }
      const bool match = std::get<Bits>(*slot_).as_bool() == choice_;
      io.emit(p_out_, match ? *got_ : Payload(Sym::bot), at);
    }
  }

 private:
  double choice_time_, out_time_;
  int p_fwd_, p_got_, p_slot_, p_out_;
  bool choice_ = false;
  std::optional<Payload> got_, slot_;
  bool done_ = false;
};

/// Dishonest-Alice simulator: the revealed slot tells it which input mattered.
class ErasureFromOtSimAlice final : public Box {
 public:
  ErasureFromOtSimAlice(std::uint8_t w, double feed_time) : Box("sim3A"), feed_time_(feed_time) {
    p_a0_ = add_in("a0", Side::outer, bits_type(w));
    p_a1_ = add_in("a1", Side::outer, bits_type(w));
    p_slot_ = add_in("bstar", Side::outer, bits_type(1));
    p_x_ = add_out("feed", Side::alice, bits_type(w), "x");
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_a0_) a0_ = msg.payload;
    if (port == p_a1_) a1_ = msg.payload;
    if (port == p_slot_) slot_ = msg.payload;
    if (a0_ && a1_ && slot_ && !sent_) {
      sent_ = true;
      const SpacetimePoint at = geom().at_bob(feed_time_);
      if (is_bot(*slot_)) {
        io.emit(p_x_, Sym::bot, at);
        return;
      }
      io.emit(p_x_, std::get<Bits>(*slot_).as_bool() ? *a1_ : *a0_, at);
    }
  }

 private:
  double feed_time_;
  int p_a0_, p_a1_, p_slot_, p_x_;
  std::optional<Payload> a0_, a1_, slot_;
  bool sent_ = false;
};

/// Dishonest-Bob simulator: maps delivery/failure back onto slot agreement.
class ErasureFromOtSimBob final : public Box {
 public:
  ErasureFromOtSimBob(std::uint8_t w, double got_time, double slot_time)
      : Box("sim3B"), w_(w), got_time_(got_time), slot_time_(slot_time) {
    p_deliv_ = add_in("deliv", Side::bob, bits_type(w), "out");
    p_b_ = add_in("b", Side::outer, bits_type(1));
    p_got_ = add_out("got", Side::outer, bits_type(w), "got");
    p_slot_ = add_out("bstar", Side::outer, bits_type(1));
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_deliv_) deliv_ = msg.payload;
    if (port == p_b_) b_ = msg.payload;
    if (deliv_ && b_ && !done_) {
      done_ = true;
      const SpacetimePoint got_at = geom().at_bob(got_time_);
      const SpacetimePoint slot_at = geom().at_bob(slot_time_);
      if (is_bot(*b_)) {
        io.emit(p_got_, Sym::bot, got_at);
        io.emit(p_slot_, Bits::bit(io.rng().bit()), slot_at);
        return;
      }
      const bool b = std::get<Bits>(*b_).as_bool();
      if (is_bot(*deliv_)) {
        io.emit(p_got_, Bits{io.rng().bit_string(w_), w_}, got_at);
        io.emit(p_slot_, Bits::bit(!b), slot_at);
      } else {
        io.emit(p_got_, *deliv_, got_at);
        io.emit(p_slot_, Bits::bit(b), slot_at);
      }
    }
  }

 private:
  std::uint8_t w_;
  double got_time_, slot_time_;
  int p_deliv_, p_b_, p_got_, p_slot_;
  std::optional<Payload> deliv_, b_;
  bool done_ = false;
};

inline std::vector<ConstructionCase> pi3_cases(std::uint8_t w = 1) {
  const double kFeedTime = 1.0;
  const double kChoiceTime = 1.0;
  const double kSlotTime = 3.0;
  const double kOutTime = 4.0;
  std::vector<Payload> strings;
  for (std::uint32_t v = 0; v < (1u << w); ++v) strings.push_back(Bits{v, w});
  const std::vector<Payload> bits = {Bits::bit(false), Bits::bit(true)};

  ConstructionCase honest;
  honest.label = "pi3.honest";
  honest.real = [=] {
    System sys = System::single(std::make_unique<SelectTransferBox>("ot", w, 1.0));
    sys.attach(std::make_unique<ErasureFromOtAlice>(w, kFeedTime, kSlotTime), Side::alice);
    sys.attach(std::make_unique<ErasureFromOtBob>(w, kChoiceTime, kOutTime), Side::bob);
    sys.bind_free("bstar", "bstar");
    return sys;
  };
  honest.ideal = [=] {
    return System::single(
        std::make_unique<ErasureTransferBox>("rabin", Rational(1, 2), w, kOutTime));
  };
  honest.sweep = {SweepPort{"x", geom().at_alice(0), strings}};
  honest.order_clause = {{"inject.x", "pi3A.feed0"},
                         {"pi3A.feed0", "ot.out"},
                         {"ot.out", "pi3A.bstar"},
                         {"pi3A.bstar", "out"}};

  ConstructionCase da;
  da.label = "pi3.dA";
  da.real = [=] {
    System sys = System::single(std::make_unique<SelectTransferBox>("ot", w, 1.0));
    sys.attach(std::make_unique<ErasureFromOtBob>(w, kChoiceTime, kOutTime), Side::bob);
    return sys;
  };
  da.ideal = [=] {
    System sys = System::single(
        std::make_unique<ErasureTransferBox>("rabin", Rational(1, 2), w, kOutTime - kSlotTime));
    sys.attach(std::make_unique<ErasureFromOtSimAlice>(w, kSlotTime), Side::alice);
    return sys;
  };
  da.sweep = {SweepPort{"a0", geom().at_alice(kFeedTime), strings},
              SweepPort{"a1", geom().at_alice(kFeedTime), strings},
              SweepPort{"bstar", geom().at_bob(kSlotTime), bits}};
  da.order_clause = {{"inject.a0", "out"}, {"inject.bstar", "out"}};

  ConstructionCase db;
  db.label = "pi3.dB";
  db.real = [=] {
    System sys = System::single(std::make_unique<SelectTransferBox>("ot", w, 1.0));
    sys.attach(std::make_unique<ErasureFromOtAlice>(w, kFeedTime, kSlotTime), Side::alice);
    sys.rename_exposed("out", "got");
    return sys;
  };
  db.ideal = [=] {
    System sys = System::single(
        std::make_unique<ErasureTransferBox>("rabin", Rational(1, 2), w, 1.0));
    sys.attach(std::make_unique<ErasureFromOtSimBob>(w, 2.0, kSlotTime), Side::bob);
    return sys;
  };
  db.sweep = {SweepPort{"x", geom().at_alice(0), strings},
              SweepPort{"b", geom().at_bob(kChoiceTime), bits}};
  db.order_clause = {{"inject.x", "got"}, {"inject.b", "got"}, {"got", "bstar"}};

  return {honest, da, db};
}

}  // namespace relsim
