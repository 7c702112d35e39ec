#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "relsim/errors.hpp"
#include "relsim/payload.hpp"
#include "relsim/quantum.hpp"
#include "relsim/random.hpp"
#include "relsim/spacetime.hpp"

namespace relsim {

enum class Side : std::uint8_t { alice, bob, outer };
enum class Dir : std::uint8_t { in, out };
enum class Kind : std::uint8_t { bit, bits, symbol, index_sets, qubits };

struct PayloadType {
  Kind kind = Kind::bit;
  std::uint8_t width = 1;  // bit-string width; 1 for plain bits
};

inline bool payload_matches(const Payload& p, const PayloadType& t) {
  switch (t.kind) {
    case Kind::bit:
    case Kind::bits: {
      if (std::holds_alternative<Sym>(p)) return true;  // bot on a value wire = abort
      const Bits* b = std::get_if<Bits>(&p);
      return b != nullptr && b->n == t.width;
    }
    case Kind::symbol:
      return std::holds_alternative<Sym>(p);
    case Kind::index_sets:
      return std::holds_alternative<IndexSets>(p) || std::holds_alternative<Sym>(p);
    case Kind::qubits:
      return std::holds_alternative<Qubits>(p) || std::holds_alternative<Sym>(p);
  }
  return false;
}

struct PortSpec {
  std::string name;
  /// Name of the free port this one binds to when the box is attached;
  /// defaults to `name`. Lets a converter expose an outer port and feed an
  /// inner port with the same public name.
  std::string peer;
  Side side = Side::outer;
  Dir dir = Dir::in;
  PayloadType type;
};

/// Declared dependency: emissions on `output` may only be caused by inputs
/// consumed on `inputs`. Boxes that declare no rule for an output are held to
/// the conservative default: all consumed inputs must causally precede it.
struct CausalityRule {
  std::vector<std::string> inputs;
  std::string output;
};

struct Message {
  Payload payload;
  SpacetimePoint at;
};

class BoxIo;

/// A stateful, seeded-random event handler with named ports. Resources,
/// protocol converters, simulators and distinguishers are all boxes.
/// Boxes are single-run objects: build a fresh system for every trial.
class Box {
 public:
  explicit Box(std::string name) : name_(std::move(name)) {}
  virtual ~Box() = default;

  const std::string& name() const { return name_; }
  const std::vector<PortSpec>& ports() const { return ports_; }
  const std::vector<CausalityRule>& rules() const { return rules_; }

  int port_index(std::string_view port_name) const {
    for (std::size_t i = 0; i < ports_.size(); ++i) {
      if (ports_[i].name == port_name) return static_cast<int>(i);
    }
    return -1;
  }

  virtual void activate(BoxIo&) {}
  virtual void on_message(BoxIo& io, int port, const Message& msg) = 0;
  virtual void on_timer(BoxIo&, double) {}

 protected:
  int add_port(std::string port_name, Side side, Dir dir, PayloadType type,
               std::string peer = {}) {
    if (port_index(port_name) >= 0) {
      throw WiringError("duplicate port name '" + port_name + "' in box " + name_);
    }
    ports_.push_back(PortSpec{port_name, peer.empty() ? port_name : std::move(peer), side, dir, type});
    return static_cast<int>(ports_.size() - 1);
  }

  int add_in(std::string port_name, Side side, PayloadType type, std::string peer = {}) {
    return add_port(std::move(port_name), side, Dir::in, type, std::move(peer));
  }
  int add_out(std::string port_name, Side side, PayloadType type, std::string peer = {}) {
    return add_port(std::move(port_name), side, Dir::out, type, std::move(peer));
  }

  void add_rule(std::vector<std::string> inputs, std::string output) {
    rules_.push_back(CausalityRule{std::move(inputs), std::move(output)});
  }

 private:
  std::string name_;
  std::vector<PortSpec> ports_;
  std::vector<CausalityRule> rules_;
};

struct PortRef {
  std::uint32_t box = 0;
  int port = -1;

  friend bool operator<(const PortRef& a, const PortRef& b) {
    return a.box != b.box ? a.box < b.box : a.port < b.port;
  }
  friend bool operator==(const PortRef&, const PortRef&) = default;
};

struct TranscriptEvent {
  std::string wire;   // exposed name for free ports, "box.port" for bound wires
  Payload payload;
  SpacetimePoint at;
  std::uint32_t seq = 0;
  bool observable = false;  // true for events on free ports
};

struct Transcript {
  std::vector<TranscriptEvent> events;
  std::set<std::string> aborted_boxes;
  std::uint64_t processed = 0;
};

namespace detail {
inline std::string format_number(double v) {
  if (v == static_cast<double>(static_cast<long long>(v)) && std::fabs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}
}  // namespace detail

/// One line per event: {"trial":N,"wire":...,"payload":...,"x":[..],"t":..,"seq":..}
inline std::string transcript_to_jsonl(const Transcript& tr, std::uint64_t trial,
                                       bool observable_only = false) {
  std::string out;
  for (const auto& ev : tr.events) {
    if (observable_only && !ev.observable) continue;
    out += "{\"trial\":" + std::to_string(trial) + ",\"wire\":\"" + ev.wire + "\",\"payload\":\"" +
           to_string(ev.payload) + "\",\"x\":[" + detail::format_number(ev.at.x.x) + "," +
           detail::format_number(ev.at.x.y) + "," + detail::format_number(ev.at.x.z) + "],\"t\":" +
           detail::format_number(ev.at.t) + ",\"seq\":" + std::to_string(ev.seq) + "}\n";
  }
  return out;
}

/// Canonical observable projection used to compare run distributions.
inline std::string observable_key(const Transcript& tr) {
  std::string key;
  for (const auto& ev : tr.events) {
    if (!ev.observable) continue;
    key += ev.wire + "=" + to_string(ev.payload) + "@" + detail::format_number(ev.at.t) + ";";
  }
  return key;
}

class System;

/// Provides each box of a run with its randomness stream.
class RngProvider {
 public:
  virtual ~RngProvider() = default;
  virtual RandomSource& stream_for(std::uint32_t box_id) = 0;
};

/// Independent counter-based stream per (seed, box).
class PerBoxPrng final : public RngProvider {
 public:
  explicit PerBoxPrng(std::uint64_t seed) : seed_(seed) {}
  RandomSource& stream_for(std::uint32_t box_id) override {
    while (streams_.size() <= box_id) {
      streams_.push_back(std::make_unique<PrngSource>(seed_, streams_.size()));
    }
    return *streams_[box_id];
  }

 private:
  std::uint64_t seed_;
  std::vector<std::unique_ptr<PrngSource>> streams_;
};

/// Single shared tape for exhaustive enumeration.
class SharedTapeRng final : public RngProvider {
 public:
  explicit SharedTapeRng(std::vector<TapeSource::Entry>* tape) : source_(tape) {}
  RandomSource& stream_for(std::uint32_t) override { return source_; }
  const Rational& weight() const { return source_.weight(); }

 private:
  TapeSource source_;
};

struct RunOptions {
  std::uint64_t event_budget = 1'000'000;
  double speed_of_light = 1.0;
};

/// A composite of boxes and internal wire bindings. Unbound ports are the
/// composite's free ports, addressed by exposed name (rename to taste).
class System {
 public:
  System() = default;
  System(System&&) = default;
  System& operator=(System&&) = default;

  std::uint32_t add_box(std::unique_ptr<Box> box) {
    boxes_.push_back(std::move(box));
    return static_cast<std::uint32_t>(boxes_.size() - 1);
  }

  static System single(std::unique_ptr<Box> box) {
    System s;
    s.add_box(std::move(box));
    return s;
  }

  Box& box(std::uint32_t id) { return *boxes_[id]; }
  const Box& box(std::uint32_t id) const { return *boxes_[id]; }
  std::size_t box_count() const { return boxes_.size(); }

  void bind(PortRef out, PortRef in) {
    const PortSpec& ospec = spec(out);
    const PortSpec& ispec = spec(in);
    if (ospec.dir != Dir::out || ispec.dir != Dir::in) {
      throw WiringError("binding must connect an out port to an in port");
    }
    if (ospec.type.kind != ispec.type.kind || ospec.type.width != ispec.type.width) {
      throw WiringError("payload kind mismatch on wire " + boxes_[out.box]->name() + "." +
                        ospec.name + " -> " + boxes_[in.box]->name() + "." + ispec.name);
    }
    if (bound_out_.count(out) != 0 || bound_in_.count(in) != 0) {
      throw WiringError("port bound twice: " + boxes_[out.box]->name() + "." + ospec.name);
    }
    bound_out_[out] = in;
    bound_in_[in] = out;
  }

  struct FreePort {
    std::string exposed;
    PortRef ref;
    PortSpec spec;
  };

  std::vector<FreePort> free_ports() const {
    std::vector<FreePort> out;
    for (std::uint32_t b = 0; b < boxes_.size(); ++b) {
      const auto& ports = boxes_[b]->ports();
      for (int p = 0; p < static_cast<int>(ports.size()); ++p) {
        PortRef ref{b, p};
        if (ports[p].dir == Dir::out && bound_out_.count(ref)) continue;
        if (ports[p].dir == Dir::in && bound_in_.count(ref)) continue;
        FreePort fp{exposed_name(ref), ref, ports[p]};
        out.push_back(std::move(fp));
      }
    }
    return out;
  }

  std::optional<FreePort> find_free(std::string_view exposed) const {
    for (auto& fp : free_ports()) {
      if (fp.exposed == exposed) return fp;
    }
    return std::nullopt;
  }

  void rename_exposed(const std::string& from, const std::string& to) {
    auto fp = find_free(from);
    if (!fp) throw WiringError("no free port named '" + from + "' to rename");
    exposed_[fp->ref] = to;
  }

  /// Connects two dangling ports by exposed name (out side first).
  void bind_free(const std::string& out_exposed, const std::string& in_exposed) {
    std::optional<FreePort> out, in;
    for (auto& fp : free_ports()) {
      if (fp.exposed == out_exposed && fp.spec.dir == Dir::out && !out) out = fp;
      if (fp.exposed == in_exposed && fp.spec.dir == Dir::in && !in) in = fp;
    }
    if (!out || !in) {
      throw WiringError("bind_free: no dangling pair " + out_exposed + " -> " + in_exposed);
    }
    bind(out->ref, in->ref);
  }

  /// Attaches a converter to this composite's `side`: every non-outer
  /// converter port binds to the free port whose exposed name equals the
  /// port's peer name. The converter's outer ports become new free ports.
  void attach(std::unique_ptr<Box> converter, Side side) {
    const std::uint32_t cid = add_box(std::move(converter));
    const auto& ports = boxes_[cid]->ports();
    for (int p = 0; p < static_cast<int>(ports.size()); ++p) {
      const PortSpec& ps = ports[p];
      if (ps.side != side) continue;
      std::optional<FreePort> match;
      for (auto& fp : free_ports()) {
        if (fp.ref.box == cid) continue;
        if (fp.exposed == ps.peer && fp.spec.dir != ps.dir) {
          match = fp;
          break;
        }
      }
      if (!match) {
        throw WiringError("converter " + boxes_[cid]->name() + " port '" + ps.name +
                          "' (peer '" + ps.peer + "') has no matching free port");
      }
      if (ps.dir == Dir::out) {
        bind(PortRef{cid, p}, match->ref);
      } else {
        bind(match->ref, PortRef{cid, p});
      }
    }
  }

  /// Disjoint union; exposed names are prefixed "0.", "1.", ... per member.
  static System parallel(std::vector<System> parts) {
    if (parts.empty()) throw InputError("parallel() of zero boxes");
    if (parts.size() == 1) return std::move(parts[0]);
    System merged;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      System& part = parts[i];
      const std::uint32_t base = static_cast<std::uint32_t>(merged.boxes_.size());
      const std::string prefix = std::to_string(i) + ".";
      for (auto& fp : part.free_ports()) {
        merged.exposed_[PortRef{fp.ref.box + base, fp.ref.port}] = prefix + fp.exposed;
      }
      for (auto& [out, in] : part.bound_out_) {
        merged.bound_out_[PortRef{out.box + base, out.port}] = PortRef{in.box + base, in.port};
        merged.bound_in_[PortRef{in.box + base, in.port}] = PortRef{out.box + base, out.port};
      }
      for (auto& box : part.boxes_) merged.boxes_.push_back(std::move(box));
    }
    return merged;
  }

  /// Merges `other` into this system without renaming. Returns the box-id offset.
  std::uint32_t absorb(System other) {
    const std::uint32_t base = static_cast<std::uint32_t>(boxes_.size());
    for (auto& [ref, name] : other.exposed_) {
      exposed_[PortRef{ref.box + base, ref.port}] = name;
    }
    for (auto& [out, in] : other.bound_out_) {
      bound_out_[PortRef{out.box + base, out.port}] = PortRef{in.box + base, in.port};
      bound_in_[PortRef{in.box + base, in.port}] = PortRef{out.box + base, out.port};
    }
    for (auto& box : other.boxes_) boxes_.push_back(std::move(box));
    return base;
  }

  /// Binds a distinguisher (or injector) over the free ports: each non-outer
  /// distinguisher port is matched by peer name against the free ports.
  void cover(std::unique_ptr<Box> distinguisher) {
    const std::uint32_t did = add_box(std::move(distinguisher));
    const auto& ports = boxes_[did]->ports();
    for (int p = 0; p < static_cast<int>(ports.size()); ++p) {
      const PortSpec& ps = ports[p];
      if (ps.side == Side::outer) continue;
      std::optional<FreePort> match;
      for (auto& fp : free_ports()) {
        if (fp.ref.box == did) continue;
        if (fp.exposed == ps.peer && fp.spec.dir != ps.dir) {
          match = fp;
          break;
        }
      }
      if (!match) {
        throw WiringError("distinguisher port '" + ps.name + "' (peer '" + ps.peer +
                          "') has no matching free port");
      }
      if (ps.dir == Dir::out) {
        bind(PortRef{did, p}, match->ref);
      } else {
        bind(match->ref, PortRef{did, p});
      }
    }
  }

  const std::map<PortRef, PortRef>& bindings() const { return bound_out_; }

  /// Free ports are addressed by their peer name (the canonical wire name),
  /// unless renamed or prefixed by parallel composition.
  std::string exposed_name(PortRef ref) const {
    auto it = exposed_.find(ref);
    if (it != exposed_.end()) return it->second;
    return boxes_[ref.box]->ports()[ref.port].peer;
  }

 private:
  const PortSpec& spec(PortRef ref) const {
    if (ref.box >= boxes_.size() || ref.port < 0 ||
        ref.port >= static_cast<int>(boxes_[ref.box]->ports().size())) {
      throw WiringError("port reference out of range");
    }
    return boxes_[ref.box]->ports()[ref.port];
  }

  std::vector<std::unique_ptr<Box>> boxes_;
  std::map<PortRef, PortRef> bound_out_;  // out -> in
  std::map<PortRef, PortRef> bound_in_;   // in -> out
  std::map<PortRef, std::string> exposed_;
};

class Runner;

/// Handed to a box while its handler runs.
class BoxIo {
 public:
  RandomSource& rng();
  QuantumTable& qubits();
  void emit(int port, Payload payload, SpacetimePoint at);
  void emit(std::string_view port_name, Payload payload, SpacetimePoint at);
  void set_timer(double t);
  void mark_abort();
  double now() const { return now_; }

 private:
  friend class Runner;
  BoxIo(Runner& runner, std::uint32_t box_id, double now)
      : runner_(runner), box_id_(box_id), now_(now) {}
  Runner& runner_;
  std::uint32_t box_id_;
  double now_;
};

/// Deterministic event loop: messages are processed in (t, wire, seq) order,
/// every emission is validated against the light cone of the emitter's
/// consumed inputs, and the run ends at quiescence or the event budget.
class Runner {
 public:
  Runner(System& system, RngProvider& rng, RunOptions options = {})
      : system_(system), rng_(rng), options_(options) {
    // wire ids: bindings first (stable map order), then free ports
    for (const auto& [out, in] : system_.bindings()) {
      wire_of_out_[out] = static_cast<std::uint32_t>(wires_.size());
      wires_.push_back(WireInfo{out, in, false,
                                system_.box(out.box).name() + "." +
                                    system_.box(out.box).ports()[out.port].name});
    }
    for (const auto& fp : system_.free_ports()) {
      if (fp.spec.dir == Dir::out) {
        wire_of_out_[fp.ref] = static_cast<std::uint32_t>(wires_.size());
        wires_.push_back(WireInfo{fp.ref, PortRef{0, -1}, true, fp.exposed});
      }
    }
    consumed_.resize(system_.box_count());
  }

  Transcript run() {
    for (std::uint32_t b = 0; b < system_.box_count(); ++b) {
      BoxIo io(*this, b, 0.0);
      system_.box(b).activate(io);
    }
    while (!queue_.empty()) {
      if (++transcript_.processed > options_.event_budget) {
        throw RunawayError("event budget exceeded (" + std::to_string(options_.event_budget) + ")");
      }
      Pending ev = pop_min();
      if (ev.is_timer) {
        BoxIo io(*this, ev.dest.box, ev.at.t);
        system_.box(ev.dest.box).on_timer(io, ev.at.t);
        continue;
      }
      const WireInfo& wire = wires_[ev.wire];
      transcript_.events.push_back(
          TranscriptEvent{wire.label, ev.payload, ev.at, ev.seq, wire.free});
      if (!wire.free) {
        consumed_[wire.to.box].push_back(Consumed{wire.to.port, ev.at});
        BoxIo io(*this, wire.to.box, ev.at.t);
        system_.box(wire.to.box).on_message(io, wire.to.port, Message{ev.payload, ev.at});
      }
    }
    return std::move(transcript_);
  }

 private:
  friend class BoxIo;

  struct WireInfo {
    PortRef from;
    PortRef to;
    bool free = false;
    std::string label;
  };

  struct Consumed {
    int port;
    SpacetimePoint at;
  };

  struct Pending {
    SpacetimePoint at;
    std::uint32_t wire = 0;
    std::uint32_t seq = 0;
    Payload payload;
    PortRef dest;
    bool is_timer = false;

    // min-heap key: (t, wire, seq)
    friend bool operator>(const Pending& a, const Pending& b) {
      if (a.at.t != b.at.t) return a.at.t > b.at.t;
      if (a.wire != b.wire) return a.wire > b.wire;
      return a.seq > b.seq;
    }
  };

  Pending pop_min() {
    std::pop_heap(queue_.begin(), queue_.end(), std::greater<>());
    Pending ev = std::move(queue_.back());
    queue_.pop_back();
    return ev;
  }

  void push(Pending ev) {
    queue_.push_back(std::move(ev));
    std::push_heap(queue_.begin(), queue_.end(), std::greater<>());
  }

  void emit_from(std::uint32_t box_id, int port, Payload payload, SpacetimePoint at, double now) {
    Box& box = system_.box(box_id);
    if (port < 0 || port >= static_cast<int>(box.ports().size())) {
      throw WiringError("emit on unknown port index in box " + box.name());
    }
    const PortSpec& ps = box.ports()[port];
    if (ps.dir != Dir::out) {
      throw WiringError("emit on input port " + box.name() + "." + ps.name);
    }
    if (!payload_matches(payload, ps.type)) {
      throw WiringError("payload does not match kind of port " + box.name() + "." + ps.name);
    }
    if (!at.finite()) throw InputError("emission at non-finite point");
    if (at.t < now) {
      throw CausalityViolation("box " + box.name() + " emitted into the past on port " + ps.name);
    }
    check_light_cone(box_id, port, at);
    auto wit = wire_of_out_.find(PortRef{box_id, port});
    if (wit == wire_of_out_.end()) {
      throw WiringError("emit on port with no wire: " + box.name() + "." + ps.name);
    }
    const std::uint32_t wire = wit->second;
    if (seq_counters_.size() <= wire) seq_counters_.resize(wire + 1, 0);
    Pending ev;
    ev.at = at;
    ev.wire = wire;
    ev.seq = seq_counters_[wire]++;
    ev.payload = std::move(payload);
    ev.dest = wires_[wire].to;
    push(std::move(ev));
  }

  void check_light_cone(std::uint32_t box_id, int port, const SpacetimePoint& at) {
    Box& box = system_.box(box_id);
    const std::string& out_name = box.ports()[port].name;
    // Declared rules for this output restrict which inputs constrain it;
    // without a declaration every consumed input does.
    std::vector<int> restricted;
    bool has_rule = false;
    for (const auto& rule : box.rules()) {
      if (rule.output != out_name) continue;
      has_rule = true;
      for (const auto& in_name : rule.inputs) {
        const int idx = box.port_index(in_name);
        if (idx < 0) throw WiringError("causality rule names unknown port " + in_name);
        restricted.push_back(idx);
      }
    }
    for (const Consumed& c : consumed_[box_id]) {
      if (has_rule && std::find(restricted.begin(), restricted.end(), c.port) == restricted.end()) {
        continue;
      }
      if (!causal_precedes(c.at, at, options_.speed_of_light)) {
        throw CausalityViolation(
            "box " + box.name() + " emitted on '" + out_name + "' at t=" +
            detail::format_number(at.t) + " outside the light cone of its input on '" +
            box.ports()[c.port].name + "' at t=" + detail::format_number(c.at.t));
      }
    }
  }

  System& system_;
  RngProvider& rng_;
  RunOptions options_;
  std::vector<WireInfo> wires_;
  std::map<PortRef, std::uint32_t> wire_of_out_;
  std::vector<std::uint32_t> seq_counters_;
  std::uint32_t timer_seq_ = 0;
  std::vector<std::vector<Consumed>> consumed_;
  std::vector<Pending> queue_;
  QuantumTable qubits_;
  Transcript transcript_;
};

inline RandomSource& BoxIo::rng() { return runner_.rng_.stream_for(box_id_); }
inline QuantumTable& BoxIo::qubits() { return runner_.qubits_; }
inline void BoxIo::emit(int port, Payload payload, SpacetimePoint at) {
  runner_.emit_from(box_id_, port, std::move(payload), at, now_);
}
inline void BoxIo::emit(std::string_view port_name, Payload payload, SpacetimePoint at) {
  const int idx = runner_.system_.box(box_id_).port_index(port_name);
  if (idx < 0) {
    throw WiringError("emit on unknown port '" + std::string(port_name) + "' in box " +
                      runner_.system_.box(box_id_).name());
  }
  emit(idx, std::move(payload), at);
}
inline void BoxIo::set_timer(double t) {
  if (t < now_) throw CausalityViolation("timer set in the past");
  Runner::Pending ev;
  ev.at = SpacetimePoint{{0, 0, 0}, t};
  ev.wire = 0x80000000u | box_id_;
  ev.seq = runner_.timer_seq_++;
  ev.dest = PortRef{box_id_, -1};
  ev.is_timer = true;
  runner_.push(std::move(ev));
}
inline void BoxIo::mark_abort() {
  runner_.transcript_.aborted_boxes.insert(runner_.system_.box(box_id_).name());
}

/// Runs a fully closed system once with per-box seeded randomness.
inline Transcript run_system(System& system, std::uint64_t seed, RunOptions options = {}) {
  PerBoxPrng rng(seed);
  Runner runner(system, rng, options);
  return runner.run();
}

/// Extracts a distinguisher verdict from the `verdict` free wire (-1 if absent).
inline int verdict_of(const Transcript& tr) {
  for (const auto& ev : tr.events) {
    if (ev.wire == "verdict") {
      const Bits* b = std::get_if<Bits>(&ev.payload);
      if (b != nullptr) return b->as_bool() ? 1 : 0;
    }
  }
  return -1;
}

}  // namespace relsim
