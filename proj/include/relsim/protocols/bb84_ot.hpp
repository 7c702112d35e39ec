#pragma once

// Chosen-pair OT from 2n commitments and conjugate-coded qubits: Alice sends
// BB84 states, Bob measures and commits to bases and outcomes, a random test
// subset is opened to prove he measured, and the surviving positions feed the
// same masking trick as the erasure-based construction.

#include <memory>
#include <optional>
#include <set>

#include "relsim/cases.hpp"
#include "relsim/primitives.hpp"
#include "relsim/protocols/common.hpp"
#include "relsim/quantum.hpp"
#include "relsim/stats.hpp"

namespace relsim {

struct Bb84OtOptions {
  unsigned n = 12;  // number of states; k = h = n/2, subsets of size k/3
  SubsetPolicy policy = SubsetPolicy::seeded;
  // Test pins: fix the sender's coin flips to keep exact enumeration narrow.
  std::optional<std::vector<bool>> pin_bits;
  std::optional<std::vector<bool>> pin_bases;  // true = diagonal basis
  std::optional<std::vector<std::uint16_t>> pin_test;

  unsigned k() const { return n / 2; }
  unsigned h() const { return n / 2; }
  unsigned m() const { return n / 6; }

  void validate() const {
    if (n == 0 || n % 2 != 0 || (n / 2) % 3 != 0) {
      throw InputError("state count must be even with n/2 divisible by 3");
    }
  }
};

struct Bb84OtSchedule {
  double psi = 1.0;
  double commits = 2.0;
  double recvs = 3.0;
  double test = 4.0;
  double opens = 5.0;
  double reveals = 6.0;  // also the sender's test deadline
  double bases = 7.0;
  double sets = 8.0;
  double masks = 9.0;
  double out = 10.0;
};

namespace bb84_detail {
inline bool valid_test_set(const Payload& p, unsigned n, std::vector<std::uint16_t>* out) {
  const IndexSets* sets = std::get_if<IndexSets>(&p);
  if (sets == nullptr || sets->sets.size() != 1) return false;
  std::vector<bool> seen(n, false);
  for (auto i : sets->sets[0]) {
    if (i >= n || seen[i]) return false;
    seen[i] = true;
  }
  *out = sets->sets[0];
  return true;
}

inline bool valid_mask_sets(const Payload& p, unsigned n, unsigned m,
                            const std::vector<std::uint16_t>& rest_sorted,
                            std::vector<std::vector<std::uint16_t>>* out) {
  const IndexSets* sets = std::get_if<IndexSets>(&p);
  if (sets == nullptr || sets->sets.size() != 2) return false;
  for (const auto& s : sets->sets) {
    if (s.size() != m) return false;
    for (auto i : s) {
      if (i >= n) return false;
    }
    if (!subset_of(s, rest_sorted)) return false;
  }
  if (!disjoint(sets->sets[0], sets->sets[1])) return false;
  *out = sets->sets;
  return true;
}
}  // namespace bb84_detail

class Bb84OtAlice final : public Box {
 public:
  Bb84OtAlice(Bb84OtOptions opts, Bb84OtSchedule sched = {})
      : Box("pi5A"), opts_(opts), sched_(sched) {
    opts_.validate();
    p_a0_ = add_in("a0", Side::outer, bits_type(1));
    p_a1_ = add_in("a1", Side::outer, bits_type(1));
    p_psi_ = add_out("psi", Side::bob, qubits_type());
    for (unsigned j = 0; j < 2 * opts_.n; ++j) {
      recvs_.push_back(add_in("r" + std::to_string(j), Side::alice, symbol_type(),
                              std::to_string(j) + ".recv"));
      reveals_.push_back(add_in("v" + std::to_string(j), Side::alice, bits_type(1),
                                std::to_string(j) + ".reveal"));
    }
    p_test_ = add_out("test", Side::bob, sets_type());
    p_bases_ = add_out("bases", Side::bob, bits_type(static_cast<std::uint8_t>(opts_.n)));
    p_sets_ = add_in("isets", Side::bob, sets_type());
    p_t0_ = add_out("t0", Side::bob, bits_type(1));
    p_t1_ = add_out("t1", Side::bob, bits_type(1));
  }

  void activate(BoxIo& io) override {
    const unsigned n = opts_.n;
    bits_.resize(n);
    diag_.resize(n);
    Qubits handles;
    for (unsigned i = 0; i < n; ++i) {
      bits_[i] = opts_.pin_bits ? (*opts_.pin_bits)[i] : io.rng().bit();
      diag_[i] = opts_.pin_bases ? (*opts_.pin_bases)[i] : io.rng().bit();
      handles.handles.push_back(io.qubits().prepare(bits_[i], diag_[i] ? Basis::X : Basis::Z));
    }
    io.emit(p_psi_, handles, geom().at_bob(sched_.psi));
    if (opts_.pin_test) {
      test_set_ = *opts_.pin_test;
    } else {
      std::vector<std::uint16_t> all(n);
      for (std::uint16_t i = 0; i < n; ++i) all[i] = i;
      test_set_ = pick_subset(io.rng(), all, opts_.h(), SubsetPolicy::seeded);
    }
    IndexSets t;
    t.sets = {test_set_};
    io.emit(p_test_, t, geom().at_bob(sched_.test));
    io.set_timer(sched_.reveals);
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_a0_) a0_ = msg.payload;
    if (port == p_a1_) a1_ = msg.payload;
    for (unsigned j = 0; j < reveals_.size(); ++j) {
      if (static_cast<int>(reveals_[j]) == port && !is_bot(msg.payload)) {
        opened_[j] = std::get<Bits>(msg.payload).as_bool();
      }
    }
    if (port == p_sets_ && !aborted_ && !masked_) {
      masked_ = true;
      const SpacetimePoint at = geom().at_bob(sched_.masks);
      std::vector<std::vector<std::uint16_t>> sets;
      if (!bb84_detail::valid_mask_sets(msg.payload, opts_.n, opts_.m(), rest_sorted_, &sets) ||
          !a0_ || !a1_) {
        io.mark_abort();
        io.emit(p_t0_, Sym::bot, at);
        io.emit(p_t1_, Sym::bot, at);
        return;
      }
      io.emit(p_t0_, mask(*a0_, sets[0]), at);
      io.emit(p_t1_, mask(*a1_, sets[1]), at);
    }
  }

  void on_timer(BoxIo& io, double) override {
    if (tested_) return;
    tested_ = true;
    bool ok = true;
    for (auto i : test_set_) {
      auto xbar = opened_.find(2 * i);
      auto tbar = opened_.find(2 * i + 1);
      if (xbar == opened_.end() || tbar == opened_.end()) {
        ok = false;
        break;
      }
      if (tbar->second == diag_[i] && xbar->second != bits_[i]) {
        ok = false;
        break;
      }
    }
    rest_sorted_ = difference_sorted();
    if (!ok) {
      aborted_ = true;
      io.mark_abort();
      io.emit(p_bases_, Sym::bot, geom().at_bob(sched_.bases));
      io.emit(p_t0_, Sym::bot, geom().at_bob(sched_.masks));
      io.emit(p_t1_, Sym::bot, geom().at_bob(sched_.masks));
      return;
    }
    std::uint32_t packed = 0;
    for (auto i : rest_sorted_) {
      if (diag_[i]) packed |= 1u << i;
    }
    io.emit(p_bases_, Bits{packed, static_cast<std::uint8_t>(opts_.n)},
            geom().at_bob(sched_.bases));
  }

 private:
  std::vector<std::uint16_t> difference_sorted() const {
    auto rest = difference(opts_.n, test_set_);
    return rest;
  }

  Payload mask(const Payload& a, const std::vector<std::uint16_t>& idx) const {
    if (is_bot(a)) return Sym::bot;
    bool acc = std::get<Bits>(a).as_bool();
    for (auto i : idx) acc ^= bits_[i];
    return Bits::bit(acc);
  }

  Bb84OtOptions opts_;
  Bb84OtSchedule sched_;
  int p_a0_, p_a1_, p_psi_, p_test_, p_bases_, p_sets_, p_t0_, p_t1_;
  std::vector<int> recvs_, reveals_;
  std::vector<bool> bits_, diag_;
  std::vector<std::uint16_t> test_set_, rest_sorted_;
  std::map<unsigned, bool> opened_;
  std::optional<Payload> a0_, a1_;
  bool tested_ = false, aborted_ = false, masked_ = false;
};

class Bb84OtBob final : public Box {
 public:
  Bb84OtBob(Bb84OtOptions opts, Bb84OtSchedule sched = {})
      : Box("pi5B"), opts_(opts), sched_(sched) {
    opts_.validate();
    p_b_ = add_in("b", Side::outer, bits_type(1));
    p_psi_ = add_in("psi_in", Side::alice, qubits_type(), "psi");
    for (unsigned j = 0; j < 2 * opts_.n; ++j) {
      commits_.push_back(add_out("c" + std::to_string(j), Side::bob, bits_type(1),
                                 std::to_string(j) + ".commit"));
      opens_.push_back(add_out("o" + std::to_string(j), Side::bob, symbol_type(),
                               std::to_string(j) + ".open"));
    }
    p_test_ = add_in("test_in", Side::alice, sets_type(), "test");
    p_bases_ = add_in("bases_in", Side::alice, bits_type(static_cast<std::uint8_t>(opts_.n)),
                      "bases");
    p_sets_ = add_out("isets", Side::alice, sets_type());
    p_t0_ = add_in("mask0", Side::alice, bits_type(1), "t0");
    p_t1_ = add_in("mask1", Side::alice, bits_type(1), "t1");
    p_out_ = add_out("out", Side::outer, bits_type(1));
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_b_) b_ = msg.payload;
    if (port == p_psi_) on_states(io, msg);
    if (port == p_test_) on_test(io, msg);
    if (port == p_bases_) on_bases(io, msg);
    if (port == p_t0_) t0_ = msg.payload;
    if (port == p_t1_) t1_ = msg.payload;
    maybe_output(io);
  }

 private:
  void on_states(BoxIo& io, const Message& msg) {
    const Qubits* q = std::get_if<Qubits>(&msg.payload);
    if (q == nullptr || q->handles.size() != opts_.n) {
      abort_now(io);
      return;
    }
    const unsigned n = opts_.n;
    meas_.resize(n);
    diag_.resize(n);
    for (unsigned i = 0; i < n; ++i) {
      diag_[i] = io.rng().bit();
      meas_[i] = io.qubits().measure(q->handles[i], diag_[i] ? Basis::X : Basis::Z, io.rng());
    }
    for (unsigned i = 0; i < n; ++i) {
      io.emit(commits_[2 * i], Bits::bit(meas_[i]), geom().at_bob(sched_.commits));
      io.emit(commits_[2 * i + 1], Bits::bit(diag_[i]), geom().at_bob(sched_.commits));
    }
  }

  void on_test(BoxIo& io, const Message& msg) {
    if (!bb84_detail::valid_test_set(msg.payload, opts_.n, &test_set_)) {
      abort_now(io);
      return;
    }
    for (auto i : test_set_) {
      io.emit(opens_[2 * i], Sym::open_commit, geom().at_bob(sched_.opens));
      io.emit(opens_[2 * i + 1], Sym::open_commit, geom().at_bob(sched_.opens));
    }
    rest_sorted_ = difference(opts_.n, test_set_);
  }

  void on_bases(BoxIo& io, const Message& msg) {
    if (done_ || aborted_) return;
    if (is_bot(msg.payload) || meas_.size() != opts_.n) {
      abort_now(io);
      return;
    }
    const std::uint32_t packed = std::get<Bits>(msg.payload).v;
    std::vector<std::uint16_t> known;
    for (auto i : rest_sorted_) {
      const bool sender_diag = ((packed >> i) & 1u) != 0;
      if (sender_diag == diag_[i]) known.push_back(i);
    }
    if (known.size() < opts_.m() || !b_ || is_bot(*b_)) {
      abort_now(io);
      return;
    }
    mine_ = pick_subset(io.rng(), known, opts_.m(), opts_.policy);
    std::vector<std::uint16_t> rest_minus;
    for (auto i : rest_sorted_) {
      if (!std::binary_search(mine_.begin(), mine_.end(), i)) rest_minus.push_back(i);
    }
    decoy_ = pick_subset(io.rng(), rest_minus, opts_.m(), opts_.policy);
    IndexSets sets;
    sets.sets.resize(2);
    const bool pick = std::get<Bits>(*b_).as_bool();
    sets.sets[pick ? 1 : 0] = mine_;
    sets.sets[pick ? 0 : 1] = decoy_;
    sent_sets_ = true;
    io.emit(p_sets_, sets, geom().at_alice(sched_.sets));
  }

  void maybe_output(BoxIo& io) {
    if (done_ || aborted_ || !sent_sets_ || !t0_ || !t1_) return;
    done_ = true;
    const SpacetimePoint at = geom().at_bob(sched_.out);
    const Payload& mine_mask = std::get<Bits>(*b_).as_bool() ? *t1_ : *t0_;
    if (is_bot(mine_mask)) {
      io.mark_abort();
      io.emit(p_out_, Sym::bot, at);
      return;
    }
    bool acc = std::get<Bits>(mine_mask).as_bool();
    for (auto i : mine_) acc ^= meas_[i];
    io.emit(p_out_, Bits::bit(acc), at);
  }

  void abort_now(BoxIo& io) {
    if (aborted_ || done_) return;
    aborted_ = true;
    io.mark_abort();
    io.emit(p_out_, Sym::bot, geom().at_bob(sched_.out));
  }

  Bb84OtOptions opts_;
  Bb84OtSchedule sched_;
  int p_b_, p_psi_, p_test_, p_bases_, p_sets_, p_t0_, p_t1_, p_out_;
  std::vector<int> commits_, opens_;
  std::vector<bool> meas_, diag_;
  std::vector<std::uint16_t> test_set_, rest_sorted_, mine_, decoy_;
  std::optional<Payload> b_, t0_, t1_;
  bool aborted_ = false, done_ = false, sent_sets_ = false;
};

/// Dishonest-Alice simulator: acknowledges commitments without measuring,
/// measures only the audited test positions (in fresh random bases), then
/// uses the announced bases to read every remaining state exactly and learn
/// both masked inputs.
class Bb84OtSimAlice final : public Box {
 public:
  Bb84OtSimAlice(Bb84OtOptions opts, Bb84OtSchedule sched = {})
      : Box("sim5A"), opts_(opts), sched_(sched) {
    opts_.validate();
    p_psi_ = add_in("psi", Side::outer, qubits_type());
    for (unsigned j = 0; j < 2 * opts_.n; ++j) {
      recvs_.push_back(add_out(std::to_string(j) + ".recv", Side::outer, symbol_type()));
      reveals_.push_back(add_out(std::to_string(j) + ".reveal", Side::outer, bits_type(1)));
    }
    p_test_ = add_in("test", Side::outer, sets_type());
    p_bases_ = add_in("bases", Side::outer, bits_type(static_cast<std::uint8_t>(opts_.n)));
    p_sets_ = add_out("isets", Side::outer, sets_type());
    p_t0_ = add_in("t0", Side::outer, bits_type(1));
    p_t1_ = add_in("t1", Side::outer, bits_type(1));
    p_f0_ = add_out("feed0", Side::alice, bits_type(1), "a0");
    p_f1_ = add_out("feed1", Side::alice, bits_type(1), "a1");
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    if (port == p_psi_) {
      const Qubits* q = std::get_if<Qubits>(&msg.payload);
      if (q == nullptr || q->handles.size() != opts_.n) {
        give_up(io);
        return;
      }
      handles_ = q->handles;
      for (unsigned j = 0; j < 2 * opts_.n; ++j) {
        io.emit(recvs_[j], Sym::recv, geom().at_alice(sched_.recvs));
      }
      return;
    }
    if (port == p_test_) {
      if (gave_up_) return;
      if (!bb84_detail::valid_test_set(msg.payload, opts_.n, &test_set_)) {
        give_up(io);
        return;
      }
      for (auto i : test_set_) {
        const bool basis = io.rng().bit();
        const bool v = io.qubits().measure(handles_[i], basis ? Basis::X : Basis::Z, io.rng());
        io.emit(reveals_[2 * i], Bits::bit(v), geom().at_alice(sched_.reveals));
        io.emit(reveals_[2 * i + 1], Bits::bit(basis), geom().at_alice(sched_.reveals));
      }
      rest_sorted_ = difference(opts_.n, test_set_);
      return;
    }
    if (port == p_bases_) {
      if (gave_up_) return;
      if (is_bot(msg.payload) || handles_.size() != opts_.n) {
        give_up(io);
        return;
      }
      const std::uint32_t packed = std::get<Bits>(msg.payload).v;
      values_.assign(opts_.n, false);
      std::vector<std::uint16_t> sim_known;
      for (auto i : rest_sorted_) {
        const bool sender_diag = ((packed >> i) & 1u) != 0;
        values_[i] = io.qubits().measure(handles_[i], sender_diag ? Basis::X : Basis::Z, io.rng());
        if (io.rng().bit()) sim_known.push_back(i);  // simulated basis agreement
      }
      if (sim_known.size() < opts_.m()) {
        give_up(io);
        return;
      }
      sets_.resize(2);
      sets_[0] = pick_subset(io.rng(), sim_known, opts_.m(), opts_.policy);
      std::vector<std::uint16_t> rest_minus;
      for (auto i : rest_sorted_) {
        if (!std::binary_search(sets_[0].begin(), sets_[0].end(), i)) rest_minus.push_back(i);
      }
      sets_[1] = pick_subset(io.rng(), rest_minus, opts_.m(), opts_.policy);
      IndexSets sets;
      sets.sets = sets_;
      ready_ = true;
      io.emit(p_sets_, sets, geom().at_alice(sched_.sets));
      return;
    }
    if (port == p_t0_) t0_ = msg.payload;
    if (port == p_t1_) t1_ = msg.payload;
    if (ready_ && !fed_ && t0_ && t1_) {
      fed_ = true;
      io.emit(p_f0_, unmask(*t0_, sets_[0]), geom().at_bob(sched_.masks));
      io.emit(p_f1_, unmask(*t1_, sets_[1]), geom().at_bob(sched_.masks));
    }
  }

 private:
  void give_up(BoxIo& io) {
    if (gave_up_) return;
    gave_up_ = true;
    io.mark_abort();
    io.emit(p_f0_, Sym::bot, geom().at_bob(sched_.masks));
    io.emit(p_f1_, Sym::bot, geom().at_bob(sched_.masks));
  }

  Payload unmask(const Payload& t, const std::vector<std::uint16_t>& idx) const {
    if (is_bot(t)) return Sym::bot;
    bool acc = std::get<Bits>(t).as_bool();
    for (auto i : idx) acc ^= values_[i];
    return Bits::bit(acc);
  }

  Bb84OtOptions opts_;
  Bb84OtSchedule sched_;
  int p_psi_, p_test_, p_bases_, p_sets_, p_t0_, p_t1_, p_f0_, p_f1_;
  std::vector<int> recvs_, reveals_;
  std::vector<std::uint32_t> handles_;
  std::vector<std::uint16_t> test_set_, rest_sorted_;
  std::vector<bool> values_;
  std::vector<std::vector<std::uint16_t>> sets_;
  std::optional<Payload> t0_, t1_;
  bool gave_up_ = false, ready_ = false, fed_ = false;
};

/// Dishonest-Bob simulator: plays the sender but reads the committed values
/// the moment they arrive. The masks come from the ideal resource for the one
/// subset Bob can decode; if both subsets turn out fully decodable it aborts.
class Bb84OtSimBob final : public Box {
 public:
  Bb84OtSimBob(Bb84OtOptions opts, Bb84OtSchedule sched = {})
      : Box("sim5B"), opts_(opts), sched_(sched) {
    opts_.validate();
    p_psi_ = add_out("psi", Side::outer, qubits_type());
    for (unsigned j = 0; j < 2 * opts_.n; ++j) {
      commits_.push_back(add_in(std::to_string(j) + ".commit", Side::outer, bits_type(1)));
      opens_.push_back(add_in(std::to_string(j) + ".open", Side::outer, symbol_type()));
    }
    p_test_ = add_out("test", Side::outer, sets_type());
    p_bases_ = add_out("bases", Side::outer, bits_type(static_cast<std::uint8_t>(opts_.n)));
    p_sets_ = add_in("isets", Side::outer, sets_type());
    p_t0_ = add_out("t0", Side::outer, bits_type(1));
    p_t1_ = add_out("t1", Side::outer, bits_type(1));
    p_fwd_ = add_out("fwd_b", Side::bob, bits_type(1), "b");
    p_got_ = add_in("got", Side::bob, bits_type(1), "out");
  }

  void activate(BoxIo& io) override {
    const unsigned n = opts_.n;
    bits_.resize(n);
    diag_.resize(n);
    Qubits handles;
    for (unsigned i = 0; i < n; ++i) {
      bits_[i] = opts_.pin_bits ? (*opts_.pin_bits)[i] : io.rng().bit();
      diag_[i] = opts_.pin_bases ? (*opts_.pin_bases)[i] : io.rng().bit();
      handles.handles.push_back(io.qubits().prepare(bits_[i], diag_[i] ? Basis::X : Basis::Z));
    }
    io.emit(p_psi_, handles, geom().at_bob(sched_.psi));
    if (opts_.pin_test) {
      test_set_ = *opts_.pin_test;
    } else {
      std::vector<std::uint16_t> all(n);
      for (std::uint16_t i = 0; i < n; ++i) all[i] = i;
      test_set_ = pick_subset(io.rng(), all, opts_.h(), SubsetPolicy::seeded);
    }
    IndexSets t;
    t.sets = {test_set_};
    io.emit(p_test_, t, geom().at_bob(sched_.test));
    rest_sorted_ = difference(opts_.n, test_set_);
    io.set_timer(sched_.reveals);
  }

  void on_message(BoxIo& io, int port, const Message& msg) override {
    for (unsigned j = 0; j < commits_.size(); ++j) {
      if (static_cast<int>(commits_[j]) == port && !is_bot(msg.payload)) {
        committed_[j] = std::get<Bits>(msg.payload).as_bool();
        return;
      }
    }
    for (unsigned j = 0; j < opens_.size(); ++j) {
      if (static_cast<int>(opens_[j]) == port) {
        if (committed_.find(j) == committed_.end()) {
          throw ProtocolOrderError("open before commit on simulated commitment");
        }
        opened_.insert(j);
        return;
      }
    }
    if (port == p_sets_) on_sets(io, msg);
    if (port == p_got_ && waiting_got_) {
      waiting_got_ = false;
      const SpacetimePoint at = geom().at_bob(sched_.masks);
      Payload mine;
      if (is_bot(msg.payload)) {
        mine = Sym::bot;
      } else {
        bool acc = std::get<Bits>(msg.payload).as_bool();
        for (auto i : known_set_) acc ^= bits_[i];
        mine = Bits::bit(acc);
      }
      io.emit(choice_ == 1 ? p_t1_ : p_t0_, mine, at);
      io.emit(choice_ == 1 ? p_t0_ : p_t1_, Bits::bit(io.rng().bit()), at);
    }
  }

  void on_timer(BoxIo& io, double) override {
    if (tested_) return;
    tested_ = true;
    bool ok = true;
    for (auto i : test_set_) {
      auto xbar = committed_.find(2 * i);
      auto tbar = committed_.find(2 * i + 1);
      if (xbar == committed_.end() || tbar == committed_.end() ||
          opened_.find(2 * i) == opened_.end() || opened_.find(2 * i + 1) == opened_.end()) {
        ok = false;
        break;
      }
      if (tbar->second == diag_[i] && xbar->second != bits_[i]) {
        ok = false;
        break;
      }
    }
    if (!ok) {
      aborted_ = true;
      io.mark_abort();
      io.emit(p_bases_, Sym::bot, geom().at_bob(sched_.bases));
      io.emit(p_t0_, Sym::bot, geom().at_bob(sched_.masks));
      io.emit(p_t1_, Sym::bot, geom().at_bob(sched_.masks));
      return;
    }
    std::uint32_t packed = 0;
    for (auto i : rest_sorted_) {
      if (diag_[i]) packed |= 1u << i;
    }
    io.emit(p_bases_, Bits{packed, static_cast<std::uint8_t>(opts_.n)},
            geom().at_bob(sched_.bases));
  }

 private:
  void on_sets(BoxIo& io, const Message& msg) {
    if (aborted_ || sets_seen_) return;
    sets_seen_ = true;
    const SpacetimePoint at = geom().at_bob(sched_.masks);
    std::vector<std::vector<std::uint16_t>> sets;
    if (!bb84_detail::valid_mask_sets(msg.payload, opts_.n, opts_.m(), rest_sorted_, &sets)) {
      io.mark_abort();
      io.emit(p_t0_, Sym::bot, at);
      io.emit(p_t1_, Sym::bot, at);
      return;
    }
    auto fully_known = [&](const std::vector<std::uint16_t>& idx) {
      for (auto i : idx) {
        auto it = committed_.find(2 * i + 1);
        if (it == committed_.end() || it->second != diag_[i]) return false;
      }
      return true;
    };
    const bool known0 = fully_known(sets[0]);
    const bool known1 = fully_known(sets[1]);
    if (known0 && known1) {
      io.mark_abort();
      io.emit(p_t0_, Sym::bot, at);
      io.emit(p_t1_, Sym::bot, at);
      return;
    }
    if (!known0 && !known1) {
      io.emit(p_t0_, Bits::bit(io.rng().bit()), at);
      io.emit(p_t1_, Bits::bit(io.rng().bit()), at);
      return;
    }
    choice_ = known1 ? 1 : 0;
    known_set_ = sets[static_cast<std::size_t>(choice_)];
    waiting_got_ = true;
    io.emit(p_fwd_, Bits::bit(choice_ == 1), geom().at_alice(sched_.sets));
  }

  Bb84OtOptions opts_;
  Bb84OtSchedule sched_;
  int p_psi_, p_test_, p_bases_, p_sets_, p_t0_, p_t1_, p_fwd_, p_got_;
  std::vector<int> commits_, opens_;
  std::vector<bool> bits_, diag_;
  std::vector<std::uint16_t> test_set_, rest_sorted_, known_set_;
  std::map<unsigned, bool> committed_;
  std::set<unsigned> opened_;
  bool tested_ = false, aborted_ = false, sets_seen_ = false, waiting_got_ = false;
  int choice_ = 0;
};

inline System make_commitment_bank(unsigned count, double recv_delay, double reveal_delay) {
  std::vector<System> parts;
  for (unsigned j = 0; j < count; ++j) {
    parts.push_back(System::single(std::make_unique<CommitmentBox>(
        "bc" + std::to_string(j), recv_delay, reveal_delay, Side::bob)));
  }
  return System::parallel(std::move(parts));
}

inline std::vector<ConstructionCase> pi5_cases(Bb84OtOptions opts = {}) {
  opts.validate();
  const Bb84OtSchedule sched{};
  const std::vector<Payload> bits = {Bits::bit(false), Bits::bit(true)};
  const double recv_delay = sched.recvs - sched.commits;
  const double reveal_delay = sched.reveals - sched.opens;

  ConstructionCase honest;
  honest.label = "pi5.honest";
  honest.real = [opts, sched, recv_delay, reveal_delay] {
    System sys = make_commitment_bank(2 * opts.n, recv_delay, reveal_delay);
    sys.attach(std::make_unique<Bb84OtAlice>(opts, sched), Side::alice);
    sys.attach(std::make_unique<Bb84OtBob>(opts, sched), Side::bob);
    sys.bind_free("psi", "psi");
    sys.bind_free("test", "test");
    sys.bind_free("bases", "bases");
    sys.bind_free("isets", "isets");
    sys.bind_free("t0", "t0");
    sys.bind_free("t1", "t1");
    return sys;
  };
  honest.ideal = [sched] {
    return System::single(std::make_unique<SelectTransferBox>("ot", 1, sched.out));
  };
  honest.claimed_epsilon = binomial_tail_lt(opts.k(), Rational(1, 2), opts.m());
  honest.claimed_envelope = chernoff_upper(opts.k() / 2.0, 1.0 / 3.0, TailSide::lower);
  honest.sweep = {};  // the quantum draws are far beyond exact enumeration
  honest.audit_shots = {{"a0", Bits::bit(true), geom().at_alice(0)},
                        {"a1", Bits::bit(false), geom().at_alice(0)},
                        {"b", Bits::bit(false), geom().at_bob(0)}};
  honest.order_clause = {{"pi5A.psi", "pi5B.c0"},     {"pi5B.c0", "bc0.recv"},
                         {"bc0.recv", "pi5A.test"},   {"pi5A.test", "pi5B.o0"},
                         {"pi5B.o0", "bc0.reveal"},   {"bc0.reveal", "pi5A.bases"},
                         {"pi5A.bases", "pi5B.isets"}, {"pi5B.isets", "pi5A.t0"},
                         {"pi5A.t0", "out"},          {"inject.b", "pi5B.isets"}};

  ConstructionCase da;
  da.label = "pi5.dA";
  da.real = [opts, sched, recv_delay, reveal_delay] {
    System sys = make_commitment_bank(2 * opts.n, recv_delay, reveal_delay);
    sys.attach(std::make_unique<Bb84OtBob>(opts, sched), Side::bob);
    return sys;
  };
  da.ideal = [opts, sched] {
    System sys = System::single(std::make_unique<SelectTransferBox>("ot", 1, 1.0));
    sys.attach(std::make_unique<Bb84OtSimAlice>(opts, sched), Side::alice);
    return sys;
  };
  da.order_clause = {{"inject.psi", "pi5B.isets"}, {"pi5B.isets", "out"}};

  ConstructionCase db;
  db.label = "pi5.dB";
  db.real = [opts, sched, recv_delay, reveal_delay] {
    System sys = make_commitment_bank(2 * opts.n, recv_delay, reveal_delay);
    sys.attach(std::make_unique<Bb84OtAlice>(opts, sched), Side::alice);
    return sys;
  };
  db.ideal = [opts, sched] {
    System sys = System::single(std::make_unique<SelectTransferBox>("ot", 1, 1.0));
    sys.attach(std::make_unique<Bb84OtSimBob>(opts, sched), Side::bob);
    return sys;
  };
  db.claimed_epsilon = binomial_tail_ge(opts.k(), Rational(1, 2), 2 * opts.k() / 3);
  db.claimed_envelope = chernoff_upper(opts.k() / 2.0, 1.0 / 3.0, TailSide::upper);
  db.order_clause = {{"pi5A.psi", "pi5A.test"}, {"pi5A.test", "pi5A.bases"},
                     {"inject.isets", "pi5A.t0"}};

  return {honest, da, db};
}

}  // namespace relsim
