#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relsim/boxes.hpp"
#include "relsim/engine.hpp"
#include "relsim/rational.hpp"

namespace relsim {

/// The honest resource together with its per-party dishonest variants.
struct PrimitiveTriple {
  std::function<std::unique_ptr<Box>()> honest;
  std::function<std::unique_ptr<Box>()> dishonest_alice;
  std::function<std::unique_ptr<Box>()> dishonest_bob;
};

namespace detail {
inline bool side_ports_equal(const Box& a, const Box& b, Side side) {
  std::vector<PortSpec> pa, pb;
  for (const auto& p : a.ports()) {
    if (p.side == side) pa.push_back(p);
  }
  for (const auto& p : b.ports()) {
    if (p.side == side) pb.push_back(p);
  }
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (pa[i].name != pb[i].name || pa[i].dir != pb[i].dir ||
        pa[i].type.kind != pb[i].type.kind || pa[i].type.width != pb[i].type.width) {
      return false;
    }
  }
  return true;
}
}  // namespace detail

/// Triple invariant: Bob's interface is the same whether Alice is honest or
/// not, and vice versa.
inline void check_triple_signatures(const PrimitiveTriple& triple) {
  auto h = triple.honest();
  auto da = triple.dishonest_alice();
  auto db = triple.dishonest_bob();
  if (!detail::side_ports_equal(*h, *da, Side::bob)) {
    throw WiringError("dishonest-Alice variant changes Bob-side ports");
  }
  if (!detail::side_ports_equal(*h, *db, Side::alice)) {
    throw WiringError("dishonest-Bob variant changes Alice-side ports");
  }
}

/// 1-out-of-2 oblivious transfer: Alice inputs two s-bit strings, Bob inputs
/// a choice bit and receives the chosen string once all inputs are present.
/// Also reused (with renamed ports) as the chosen-string variant of the
/// randomized OT under dishonest Alice.
class SelectTransferBox final : public Box {
 public:
  struct Names {
    std::string in0 = "a0";
    std::string in1 = "a1";
    std::string choice = "b";
    std::string out = "out";
  };

  SelectTransferBox(std::string box_name, std::uint8_t width, double out_delay = 1.0,
                    Names names = {})
      : Box(std::move(box_name)), width_(width), out_delay_(out_delay) {
    p_in0_ = add_in(names.in0, Side::alice, bits_type(width));
    p_in1_ = add_in(names.in1, Side::alice, bits_type(width));
    p_choice_ = add_in(names.choice, Side::bob, bits_type(1));
    p_out_ = add_out(names.out, Side::bob, bits_type(width));
    add_rule({names.in0, names.in1, names.choice}, names.out);
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_in0_) store(slot0_, msg);
    if (port == p_in1_) store(slot1_, msg);
    if (port == p_choice_) store(choice_, msg);
    if (slot0_ && slot1_ && choice_) {
      const double t = std::max({slot0_->at.t, slot1_->at.t, choice_->at.t});
      const SpacetimePoint out_at = geom().at_bob(t + out_delay_);
      if (is_bot(slot0_->payload) || is_bot(slot1_->payload) || is_bot(choice_->payload)) {
        io.mark_abort();
        io.emit(p_out_, Sym::bot, out_at);
        return;
      }
      const bool pick = std::get<Bits>(choice_->payload).as_bool();
      io.emit(p_out_, pick ? std::get<Bits>(slot1_->payload) : std::get<Bits>(slot0_->payload),
              out_at);
    }
  }

 private:
  void store(std::optional<Message>& slot, const Message& msg) {
    if (slot) throw ProtocolOrderError("duplicate input on " + name());
    slot = msg;
  }

  std::uint8_t width_;
  double out_delay_;
  int p_in0_, p_in1_, p_choice_, p_out_;
  std::optional<Message> slot0_, slot1_, choice_;
};

/// Randomized OT, honest form: the box itself draws (s0, s1), hands them to
/// Alice at activation, and releases s_b to Bob once the choice bit arrives.
class RandomizedTransferBox final : public Box {
 public:
  RandomizedTransferBox(std::string box_name, std::uint8_t width, double emit_time = 0.0,
                        double out_delay = 1.0)
      : Box(std::move(box_name)), width_(width), emit_time_(emit_time), out_delay_(out_delay) {
    p_s0_ = add_out("s0", Side::alice, bits_type(width));
    p_s1_ = add_out("s1", Side::alice, bits_type(width));
    p_choice_ = add_in("b", Side::bob, bits_type(1));
    p_out_ = add_out("out", Side::bob, bits_type(width));
    add_rule({"b"}, "out");
  }

  void activate(BoxIo& io) override {
    s0_ = Bits{io.rng().bit_string(width_), width_};
    s1_ = Bits{io.rng().bit_string(width_), width_};
    io.emit(p_s0_, s0_, geom().at_alice(emit_time_));
    io.emit(p_s1_, s1_, geom().at_alice(emit_time_));
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port != p_choice_) return;
    if (got_choice_) throw ProtocolOrderError("duplicate choice bit on " + name());
    got_choice_ = true;
    const SpacetimePoint out_at = geom().at_bob(msg.at.t + out_delay_);
    if (is_bot(msg.payload)) {
      io.mark_abort();
      io.emit(p_out_, Sym::bot, out_at);
      return;
    }
    io.emit(p_out_, std::get<Bits>(msg.payload).as_bool() ? s1_ : s0_, out_at);
  }

 private:
  std::uint8_t width_;
  double emit_time_;
  double out_delay_;
  int p_s0_, p_s1_, p_choice_, p_out_;
  Bits s0_, s1_;
  bool got_choice_ = false;
};

/// Probabilistic transfer: delivers Alice's message with probability p and
/// the failure symbol otherwise. Alice gets no feedback either way.
class ErasureTransferBox final : public Box {
 public:
  ErasureTransferBox(std::string box_name, Rational p, std::uint8_t width, double out_delay = 1.0)
      : Box(std::move(box_name)), p_(std::move(p)), width_(width), out_delay_(out_delay) {
    if (p_ < Rational(0) || p_ > Rational(1)) {
      throw InputError("delivery probability outside [0,1]");
    }
    p_x_ = add_in("x", Side::alice, bits_type(width));
    p_out_ = add_out("out", Side::bob, bits_type(width));
    add_rule({"x"}, "out");
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port != p_x_) return;
    if (got_x_) throw ProtocolOrderError("duplicate input on " + name());
    got_x_ = true;
    const SpacetimePoint out_at = geom().at_bob(msg.at.t + out_delay_);
    if (is_bot(msg.payload)) {
      io.mark_abort();
      io.emit(p_out_, Sym::bot, out_at);
      return;
    }
    io.emit(p_out_, io.rng().bernoulli(p_) ? msg.payload : Payload(Sym::bot), out_at);
  }

 private:
  Rational p_;
  std::uint8_t width_;
  double out_delay_;
  int p_x_, p_out_;
  bool got_x_ = false;
};

/// Bit commitment: commit hides the bit until the opening message arrives;
/// Alice may never open, or abort the opening outright with the bot symbol.
class CommitmentBox final : public Box {
 public:
  CommitmentBox(std::string box_name, double recv_delay = 1.0, double reveal_delay = 1.0,
                Side committer = Side::alice)
      : Box(std::move(box_name)), recv_delay_(recv_delay), reveal_delay_(reveal_delay),
        committer_(committer) {
    const Side receiver = committer == Side::alice ? Side::bob : Side::alice;
    p_commit_ = add_in("commit", committer, bits_type(1));
    p_open_ = add_in("open", committer, symbol_type());
    p_recv_ = add_out("recv", receiver, symbol_type());
    p_reveal_ = add_out("reveal", receiver, bits_type(1));
    add_rule({"commit"}, "recv");
    add_rule({"commit", "open"}, "reveal");
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_commit_) {
      if (committed_) throw ProtocolOrderError("double commit on " + name());
      if (is_bot(msg.payload)) throw InputError("commit payload must be a bit");
      committed_ = msg;
      io.emit(p_recv_, Sym::recv, receiver_point(msg.at.t + recv_delay_));
      return;
    }
    if (port == p_open_) {
      if (!committed_) throw ProtocolOrderError("open before commit on " + name());
      if (!causal_precedes(committed_->at, msg.at)) {
        throw ProtocolOrderError("opening point not in the causal future of the commit on " +
                                 name());
      }
      if (opened_) throw ProtocolOrderError("double open on " + name());
      opened_ = true;
      const SpacetimePoint out_at = receiver_point(msg.at.t + reveal_delay_);
      if (is_bot(msg.payload)) {
        io.mark_abort();
        io.emit(p_reveal_, Sym::bot, out_at);
      } else {
        io.emit(p_reveal_, committed_->payload, out_at);
      }
    }
  }

 private:
  SpacetimePoint receiver_point(double t) const {
    return committer_ == Side::alice ? geom().at_bob(t) : geom().at_alice(t);
  }

  double recv_delay_;
  double reveal_delay_;
  Side committer_;
  int p_commit_, p_open_, p_recv_, p_reveal_;
  std::optional<Message> committed_;
  bool opened_ = false;
};

/// Two-party computation of a boolean function: waits for both inputs and
/// hands f(x, y) to each side.
class JointFunctionBox final : public Box {
 public:
  using Fn = std::function<std::uint32_t(std::uint32_t, std::uint32_t)>;

  JointFunctionBox(std::string box_name, Fn f, std::uint8_t m, std::uint8_t n, std::uint8_t r,
                   double alice_delay = 1.0, double bob_delay = 1.0)
      : Box(std::move(box_name)), f_(std::move(f)), r_(r), alice_delay_(alice_delay),
        bob_delay_(bob_delay) {
    p_x_ = add_in("x", Side::alice, bits_type(m));
    p_y_ = add_in("y", Side::bob, bits_type(n));
    p_fa_ = add_out("fa", Side::alice, bits_type(r));
    p_fb_ = add_out("fb", Side::bob, bits_type(r));
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_x_) store(x_, msg);
    if (port == p_y_) store(y_, msg);
    if (x_ && y_) {
      const double t = std::max(x_->at.t, y_->at.t);
      if (is_bot(x_->payload) || is_bot(y_->payload)) {
        io.mark_abort();
        io.emit(p_fa_, Sym::bot, geom().at_alice(t + alice_delay_));
        io.emit(p_fb_, Sym::bot, geom().at_bob(t + bob_delay_));
        return;
      }
      const Bits out{f_(std::get<Bits>(x_->payload).v, std::get<Bits>(y_->payload).v) & mask_of(r_),
                     r_};
      io.emit(p_fa_, out, geom().at_alice(t + alice_delay_));
      io.emit(p_fb_, out, geom().at_bob(t + bob_delay_));
    }
  }

 private:
  void store(std::optional<Message>& slot, const Message& msg) {
    if (slot) throw ProtocolOrderError("duplicate input on " + name());
    slot = msg;
  }

  Fn f_;
  std::uint8_t r_;
  double alice_delay_, bob_delay_;
  int p_x_, p_y_, p_fa_, p_fb_;
  std::optional<Message> x_, y_;
};

inline PrimitiveTriple make_ot(std::uint8_t s = 1, double out_delay = 1.0) {
  if (s < 1) throw InputError("string width must be at least 1");
  auto factory = [s, out_delay] { return std::make_unique<SelectTransferBox>("ot", s, out_delay); };
  return PrimitiveTriple{factory, factory, factory};
}

inline PrimitiveTriple make_rot(std::uint8_t s = 1, double emit_time = 0.0,
                                double out_delay = 1.0) {
  if (s < 1) throw InputError("string width must be at least 1");
  auto honest = [s, emit_time, out_delay] {
    return std::make_unique<RandomizedTransferBox>("rot", s, emit_time, out_delay);
  };
  auto chosen = [s, out_delay] {
    SelectTransferBox::Names names{"s0", "s1", "b", "out"};
    return std::make_unique<SelectTransferBox>("rotA", s, out_delay, names);
  };
  return PrimitiveTriple{honest, chosen, honest};
}

inline PrimitiveTriple make_rabin(Rational p = Rational(1, 2), std::uint8_t s = 1,
                                  double out_delay = 1.0) {
  if (s < 1) throw InputError("string width must be at least 1");
  auto factory = [p, s, out_delay] {
    return std::make_unique<ErasureTransferBox>("rabin", p, s, out_delay);
  };
  return PrimitiveTriple{factory, factory, factory};
}

inline PrimitiveTriple make_bc(double recv_delay = 1.0, double reveal_delay = 1.0) {
  auto factory = [recv_delay, reveal_delay] {
    return std::make_unique<CommitmentBox>("bc", recv_delay, reveal_delay);
  };
  return PrimitiveTriple{factory, factory, factory};
}

inline PrimitiveTriple make_mpc(JointFunctionBox::Fn f, std::uint8_t m = 1, std::uint8_t n = 1,
                                std::uint8_t r = 1, double alice_delay = 1.0,
                                double bob_delay = 1.0) {
  if (!f) throw InputError("two-party function must be total");
  auto factory = [=] {
    return std::make_unique<JointFunctionBox>("mpc", f, m, n, r, alice_delay, bob_delay);
  };
  return PrimitiveTriple{factory, factory, factory};
}

}  // namespace relsim
