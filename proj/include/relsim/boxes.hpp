#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "relsim/engine.hpp"

namespace relsim {

/// Canonical embedding used by every registered experiment: Alice's apparatus
/// sits at the spatial origin, Bob's one length unit away, c = 1. Messages
/// between the two take one time unit; the order relation is all that matters.
struct Geometry {
  Vec3 alice{0.0, 0.0, 0.0};
  Vec3 bob{1.0, 0.0, 0.0};

  SpacetimePoint at_alice(double t) const { return SpacetimePoint{alice, t}; }
  SpacetimePoint at_bob(double t) const { return SpacetimePoint{bob, t}; }
};

inline const Geometry& geom() {
  static const Geometry g{};
  return g;
}

inline PayloadType bits_type(std::uint8_t width) {
  return PayloadType{width == 1 ? Kind::bit : Kind::bits, width};
}
inline PayloadType symbol_type() { return PayloadType{Kind::symbol, 1}; }
inline PayloadType sets_type() { return PayloadType{Kind::index_sets, 1}; }
inline PayloadType qubits_type() { return PayloadType{Kind::qubits, 1}; }

/// Emits a scripted set of messages at activation. Used to drive free input
/// ports with a fixed assignment (the non-adaptive distinguisher family).
class InjectorBox final : public Box {
 public:
  struct Shot {
    std::string port;
    Payload payload;
    SpacetimePoint at;
  };

  InjectorBox(std::string name, std::vector<Shot> shots) : Box(std::move(name)), shots_(std::move(shots)) {
    for (const auto& s : shots_) {
      if (port_index(s.port) >= 0) continue;
      PayloadType t;
      if (std::holds_alternative<Bits>(s.payload)) {
        t = bits_type(std::get<Bits>(s.payload).n);
      } else if (std::holds_alternative<Sym>(s.payload)) {
        t = symbol_type();
      } else if (std::holds_alternative<IndexSets>(s.payload)) {
        t = sets_type();
      } else {
        t = qubits_type();
      }
      add_out(s.port, Side::alice, t);
    }
  }

  void activate(BoxIo& io) override {
    for (const auto& s : shots_) io.emit(s.port, s.payload, s.at);
  }

  void on_message(BoxIo&, int, const Message&) override {}

 private:
  std::vector<Shot> shots_;
};

/// General-purpose box assembled from lambdas; handy for strategies,
/// distinguishers and test doubles.
class LambdaBox final : public Box {
 public:
  using MessageFn = std::function<void(LambdaBox&, BoxIo&, const std::string&, const Message&)>;
  using ActivateFn = std::function<void(LambdaBox&, BoxIo&)>;
  using TimerFn = std::function<void(LambdaBox&, BoxIo&, double)>;

  explicit LambdaBox(std::string name) : Box(std::move(name)) {}

  LambdaBox& with_in(std::string port_name, Side side, PayloadType t, std::string peer = {}) {
    add_in(std::move(port_name), side, t, std::move(peer));
    return *this;
  }
  LambdaBox& with_out(std::string port_name, Side side, PayloadType t, std::string peer = {}) {
    add_out(std::move(port_name), side, t, std::move(peer));
    return *this;
  }
  LambdaBox& on_activate(ActivateFn fn) {
    activate_ = std::move(fn);
    return *this;
  }
  LambdaBox& on_msg(MessageFn fn) {
    message_ = std::move(fn);
    return *this;
  }
  LambdaBox& on_tick(TimerFn fn) {
    timer_ = std::move(fn);
    return *this;
  }

  /// Scratch storage for handler state.
  std::map<std::string, Payload> memo;

  void activate(BoxIo& io) override {
    if (activate_) activate_(*this, io);
  }
  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (message_) message_(*this, io, ports()[port].name, msg);
  }
  void on_timer(BoxIo& io, double t) override {
    if (timer_) timer_(*this, io, t);
  }

 private:
  ActivateFn activate_;
  MessageFn message_;
  TimerFn timer_;
};

/// Zero-delay forwarder: re-emits everything it receives on the paired output
/// port at the same spacetime point. Attaching it to any resource leaves the
/// observable behaviour unchanged.
class IdentityConverter final : public Box {
 public:
  /// `mapping`: (outer port name, inner peer name, dir of the *inner* port, type)
  struct Lane {
    std::string outer;
    std::string inner_peer;
    Dir inner_dir = Dir::out;
    PayloadType type;
  };

  IdentityConverter(std::string name, Side side, std::vector<Lane> lanes) : Box(std::move(name)) {
    for (auto& lane : lanes) {
      if (lane.inner_dir == Dir::out) {
        // outer in -> inner out
        const int in = add_in(lane.outer, Side::outer, lane.type);
        const int out = add_out("fwd." + lane.outer, side, lane.type, lane.inner_peer);
        routes_.emplace_back(in, out);
      } else {
        const int in = add_in("fwd." + lane.outer, side, lane.type, lane.inner_peer);
        const int out = add_out(lane.outer, Side::outer, lane.type);
        routes_.emplace_back(in, out);
      }
    }
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    for (const auto& [in, out] : routes_) {
      if (in == port) {
        io.emit(out, msg.payload, msg.at);
        return;
      }
    }
  }

 private:
  std::vector<std::pair<int, int>> routes_;
};

}  // namespace relsim
