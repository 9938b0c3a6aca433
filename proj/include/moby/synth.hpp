#pragma once

// Explicit safety-game solving for the prefix-judged objective
//   initially -> (preset && G(assumptions -> guarantees)).
//
// Bodies are judged positionally, oldest position first. A position is
// adjudicated once every body has had a chance to read it, which takes d
// rounds for lookahead depth d; until then the game state carries two bits
// per pending position (assumption violated, guarantee violated). At
// adjudication an assumption violation wins for the system before a
// guarantee violation loses, so an assumption failure excuses its own
// position and everything after it.
//
// The arena therefore is: a packed window of the stored atoms (those some
// body reads at a non-final offset, kept for as many rounds as the deepest
// such read), plus the pending verdict bits. Per-window truth sets over all
// 2^|atoms| current letters are built as bitsets, the winning region is the
// greatest fixpoint of "every env choice leaves some surviving letter", and
// extraction picks the lexicographically smallest winning output letter
// (declaration order, earlier atoms most significant, absent before present).

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "moby/mealy.hpp"
#include "moby/spec.hpp"

namespace moby {

struct ArenaTooLarge : std::runtime_error {
  explicit ArenaTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct TimedOut : std::runtime_error {
  explicit TimedOut(const std::string& what) : std::runtime_error(what) {}
};

// Budget exponent for the arena guard: a spec is rejected when atom count
// times lookahead depth exceeds it. MOBY_ARENA_BUDGET overrides the default.
inline int arena_budget_exponent() {
  if (const char* s = std::getenv("MOBY_ARENA_BUDGET")) {
    int v = std::atoi(s);
    if (v >= 4 && v <= 40) return v;
  }
  return 24;
}

struct SynthStats {
  size_t arena_states = 0;  // window states times pending-verdict variants
  size_t letters = 0;       // full letter valuations considered per round
  int iterations = 0;       // fixpoint sweeps until stable
  double seconds = 0.0;
};

struct SynthOptions {
  int budget_exponent = arena_budget_exponent();
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct SynthResult {
  bool realizable = false;
  std::optional<MealyMachine> machine;  // present iff realizable
  SynthStats stats;
};

namespace detail {

// Fixed-size bitset indexed by current-letter value.
class Bits {
 public:
  Bits() = default;
  Bits(size_t bits, bool ones) { assign(bits, ones); }

  void assign(size_t bits, bool ones) {
    nbits_ = bits;
    w_.assign((bits + 63) / 64, ones ? ~uint64_t{0} : uint64_t{0});
    trim();
  }
  void fill(bool ones) {
    for (auto& x : w_) x = ones ? ~uint64_t{0} : uint64_t{0};
    trim();
  }
  void copy_from(const Bits& o) {
    nbits_ = o.nbits_;
    w_.assign(o.w_.begin(), o.w_.end());
  }

  bool empty() const { return w_.empty(); }
  size_t bit_count() const { return nbits_; }

  void set(size_t i) { w_[i >> 6] |= uint64_t{1} << (i & 63); }
  bool get(size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }

  Bits& operator&=(const Bits& o) {
    for (size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
    return *this;
  }
  Bits& operator|=(const Bits& o) {
    for (size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
    return *this;
  }
  void flip() {
    for (auto& x : w_) x = ~x;
    trim();
  }

  // Smallest set index in [lo, hi), or -1. hi <= bit_count().
  ptrdiff_t first_in(size_t lo, size_t hi) const {
    if (lo >= hi) return -1;
    size_t wl = lo >> 6, wh = (hi - 1) >> 6;
    for (size_t k = wl; k <= wh; ++k) {
      uint64_t x = w_[k];
      if (k == wl) x &= ~uint64_t{0} << (lo & 63);
      if (k == wh && (hi & 63) != 0) x &= (uint64_t{1} << (hi & 63)) - 1;
      if (x) return static_cast<ptrdiff_t>((k << 6) | std::countr_zero(x));
    }
    return -1;
  }
  bool any_in(size_t lo, size_t hi) const { return first_in(lo, hi) >= 0; }

  std::vector<uint64_t>& words() { return w_; }
  void trim() {
    if ((nbits_ & 63) != 0 && !w_.empty())
      w_.back() &= (uint64_t{1} << (nbits_ & 63)) - 1;
  }

 private:
  size_t nbits_ = 0;
  std::vector<uint64_t> w_;
};

class GameSolver {
 public:
  GameSolver(const ReactiveSpec& spec, const SynthOptions& opt)
      : spec_(spec), opt_(opt) {}

  SynthResult run() {
    auto t0 = std::chrono::steady_clock::now();
    prepare();
    SynthResult res;
    res.stats.letters = nletters_;
    if (d_ <= 1)
      solve_shallow(res);
    else
      solve_deep(res);
    res.stats.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (res.machine) res.machine->validate();
    return res;
  }

 private:
  // One G-item body with its aged reads. prev_vars lists the (atom, age >= 1)
  // pairs the body reads from the window; rows caches, per assignment to
  // those, the set of current letters on which the body holds.
  struct Body {
    Formula f;
    bool assumption = false;
    int depth = 0;
    std::vector<std::pair<std::string, int>> prev_vars;
    std::vector<int> win_bits;  // window bit position per prev var
    std::vector<Bits> rows;
  };

  void deadline_check() {
    if (opt_.deadline && std::chrono::steady_clock::now() > *opt_.deadline)
      throw TimedOut("synthesis deadline exceeded");
  }

  static bool trivial(const std::optional<Formula>& f) {
    return !f.has_value() || f->is_true();
  }

  void prepare() {
    I_ = static_cast<int>(spec_.inputs.size());
    O_ = static_cast<int>(spec_.outputs.size());
    A_ = I_ + O_;
    for (int i = 0; i < I_; ++i) bit_of_[spec_.inputs[i]] = O_ + (I_ - 1 - i);
    for (int j = 0; j < O_; ++j) bit_of_[spec_.outputs[j]] = O_ - 1 - j;

    if (spec_.initially && spec_.initially->x_depth() > 0)
      throw std::runtime_error("INITIALLY constraint must be X-free");
    if (spec_.preset && spec_.preset->x_depth() > 0)
      throw std::runtime_error("PRESET constraint must be X-free");

    int d_true = 0;
    auto add_body = [&](const Formula& f, bool assumption) {
      Body b;
      b.f = f;
      b.assumption = assumption;
      b.depth = f.x_depth();
      d_true = std::max(d_true, b.depth);
      collect_reads(f, b.depth, b.prev_vars);
      bodies_.push_back(std::move(b));
    };
    for (const auto& f : spec_.assumptions) add_body(f, true);
    for (const auto& f : spec_.guarantees) add_body(f, false);
    d_true_ = d_true;

    if (static_cast<long>(A_) * d_true_ > opt_.budget_exponent)
      throw ArenaTooLarge("arena needs about 2^" + std::to_string(A_ * d_true_) +
                          " window states (" + std::to_string(A_) + " atoms, lookahead " +
                          std::to_string(d_true_) + "); budget is 2^" +
                          std::to_string(opt_.budget_exponent));
    if (A_ > 26)
      throw ArenaTooLarge("letter sets over " + std::to_string(A_) +
                          " atoms exceed the in-memory bitset bound (26)");
    d_ = std::max(d_true_, 1);

    nletters_ = size_t{1} << A_;
    atom_masks_.resize(A_);
    for (int p = 0; p < A_; ++p) atom_masks_[p] = make_atom_mask(p);

    // Stored atoms, deepest reads first so that the atoms needed at age >= j
    // always form a prefix. Ties broken by letter bit for determinism.
    std::map<std::string, int> max_age;
    for (const auto& b : bodies_)
      for (const auto& [a, age] : b.prev_vars) {
        auto it = max_age.find(a);
        if (it == max_age.end() || it->second < age) max_age[a] = age;
      }
    std::vector<std::pair<int, int>> order;  // (-age, letter bit)
    for (const auto& [a, age] : max_age) order.emplace_back(-age, bit_of_.at(a));
    std::sort(order.begin(), order.end());
    for (const auto& [nage, bit] : order) {
      stored_bits_.push_back(bit);
      stored_ages_.push_back(-nage);
    }
    w_.assign(d_ + 1, 0);
    for (int age : stored_ages_)
      for (int j = 1; j <= age; ++j) ++w_[j];
    off_.assign(d_ + 1, 0);
    for (int j = 2; j <= d_; ++j) off_[j] = off_[j - 1] + w_[j - 1];
    S_ = off_[d_] + w_[d_];

    int state_exp = S_ + (d_true_ >= 2 ? 2 * d_ : 0);
    if (state_exp > 25)
      throw ArenaTooLarge("window arena needs 2^" + std::to_string(state_exp) +
                          " states; the in-memory bound is 2^25");

    for (auto& b : bodies_) {
      if (b.prev_vars.size() > 16)
        throw ArenaTooLarge("a body reads " + std::to_string(b.prev_vars.size()) +
                            " stored atoms; the per-body cache bound is 16");
      for (const auto& [a, age] : b.prev_vars) {
        size_t idx = 0;
        while (stored_bits_[idx] != bit_of_.at(a) || stored_ages_[idx] < age) ++idx;
        b.win_bits.push_back(off_[age] + static_cast<int>(idx));
      }
    }

    if (A_ <= 22) {
      gather_table_.resize(nletters_);
      for (size_t cur = 0; cur < nletters_; ++cur)
        gather_table_[cur] = gather_slow(cur);
    }

    a0ok_ = level_fresh(0, true);
    g0ok_ = level_fresh(0, false);
    is_ok_ = spec_.preset ? eval_letters(*spec_.preset, 0, nullptr) : Bits(nletters_, true);
    ie_ok_.assign(size_t{1} << I_, 1);
    if (spec_.initially && !spec_.initially->is_true())
      for (size_t X = 0; X < ie_ok_.size(); ++X)
        ie_ok_[X] = eval_on_inputs(*spec_.initially, static_cast<uint32_t>(X)) ? 1 : 0;
  }

  void collect_reads(const Formula& f, int age,
                     std::vector<std::pair<std::string, int>>& out) {
    switch (f.kind()) {
      case Kind::Atom:
        if (age >= 1) {
          std::pair<std::string, int> v{f.name(), age};
          for (const auto& p : out)
            if (p == v) return;
          out.push_back(v);
        }
        return;
      case Kind::Next:
        collect_reads(f.child(0), age - 1, out);
        return;
      default:
        for (size_t i = 0; i < f.arity(); ++i) collect_reads(f.child(i), age, out);
    }
  }

  Bits make_atom_mask(int p) const {
    Bits m(nletters_, false);
    auto& w = m.words();
    if (p < 6) {
      static constexpr uint64_t pats[6] = {
          0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
          0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
      for (auto& x : w) x = pats[p];
    } else {
      size_t run = size_t{1} << (p - 6);
      for (size_t base = run; base < w.size(); base += 2 * run)
        for (size_t i = 0; i < run && base + i < w.size(); ++i)
          w[base + i] = ~uint64_t{0};
    }
    m.trim();
    return m;
  }

  // Truth set of f over current letters; aged atom reads resolve through
  // older (nullptr asserts the formula has none).
  Bits eval_letters(const Formula& f, int age,
                    const std::function<bool(const std::string&, int)>& older) const {
    switch (f.kind()) {
      case Kind::True:
        return Bits(nletters_, true);
      case Kind::False:
        return Bits(nletters_, false);
      case Kind::Atom: {
        if (age == 0) return atom_masks_[bit_of_.at(f.name())];
        return Bits(nletters_, older(f.name(), age));
      }
      case Kind::Not: {
        Bits b = eval_letters(f.child(0), age, older);
        b.flip();
        return b;
      }
      case Kind::Next:
        return eval_letters(f.child(0), age - 1, older);
      case Kind::And: {
        Bits a = eval_letters(f.child(0), age, older);
        a &= eval_letters(f.child(1), age, older);
        return a;
      }
      case Kind::Or: {
        Bits a = eval_letters(f.child(0), age, older);
        a |= eval_letters(f.child(1), age, older);
        return a;
      }
      case Kind::Implies: {
        Bits a = eval_letters(f.child(0), age, older);
        a.flip();
        a |= eval_letters(f.child(1), age, older);
        return a;
      }
    }
    return Bits(nletters_, false);
  }

  bool eval_on_inputs(const Formula& f, uint32_t X) const {
    switch (f.kind()) {
      case Kind::True:
        return true;
      case Kind::False:
        return false;
      case Kind::Atom: {
        auto it = bit_of_.find(f.name());
        if (it == bit_of_.end() || it->second < O_) return false;
        return (X >> (it->second - O_)) & 1;
      }
      case Kind::Not:
        return !eval_on_inputs(f.child(0), X);
      case Kind::And:
        return eval_on_inputs(f.child(0), X) && eval_on_inputs(f.child(1), X);
      case Kind::Or:
        return eval_on_inputs(f.child(0), X) || eval_on_inputs(f.child(1), X);
      case Kind::Implies:
        return !eval_on_inputs(f.child(0), X) || eval_on_inputs(f.child(1), X);
      case Kind::Next:
        break;
    }
    return false;
  }

  uint32_t gather_slow(size_t cur) const {
    uint32_t v = 0;
    for (size_t m = 0; m < stored_bits_.size(); ++m)
      v |= static_cast<uint32_t>((cur >> stored_bits_[m]) & 1) << m;
    return v;
  }
  uint32_t gather(size_t cur) const {
    return gather_table_.empty() ? gather_slow(cur) : gather_table_[cur];
  }

  // Window fields older than the incoming letter, shifted one age deeper.
  uint32_t conveyor_pbits(uint32_t P) const {
    uint32_t r = 0;
    for (int j = 2; j <= d_; ++j)
      r |= ((P >> off_[j - 1]) & ((uint32_t{1} << w_[j]) - 1)) << off_[j];
    return r;
  }

  uint32_t class_of(const Body& b, uint32_t P) const {
    uint32_t c = 0;
    for (size_t v = 0; v < b.win_bits.size(); ++v)
      c |= static_cast<uint32_t>((P >> b.win_bits[v]) & 1) << v;
    return c;
  }

  const Bits& cached_row(Body& b, uint32_t cls) {
    if (b.rows.empty()) b.rows.resize(size_t{1} << b.prev_vars.size());
    Bits& r = b.rows[cls];
    if (r.empty())
      r = eval_letters(b.f, b.depth, [&](const std::string& a, int age) {
        for (size_t v = 0; v < b.prev_vars.size(); ++v)
          if (b.prev_vars[v].second == age && b.prev_vars[v].first == a)
            return ((cls >> v) & 1) != 0;
        return false;
      });
    return r;
  }

  Bits level_fresh(int level, bool assumption) {
    Bits acc(nletters_, true);
    for (auto& b : bodies_)
      if (b.depth == level && b.assumption == assumption)
        acc &= cached_row(b, class_of(b, 0));
    return acc;
  }
  void level_into(Bits& acc, int level, bool assumption, uint32_t P) {
    acc.assign(nletters_, true);
    for (auto& b : bodies_)
      if (b.depth == level && b.assumption == assumption)
        acc &= cached_row(b, class_of(b, P));
  }

  uint64_t nat_input(uint32_t Xa) const {
    uint64_t r = 0;
    for (int i = 0; i < I_; ++i)
      if ((Xa >> (I_ - 1 - i)) & 1) r |= uint64_t{1} << i;
    return r;
  }
  uint64_t nat_output(size_t cur) const {
    uint64_t r = 0;
    for (int j = 0; j < O_; ++j)
      if ((cur >> (O_ - 1 - j)) & 1) r |= uint64_t{1} << j;
    return r;
  }

  // ---- lookahead depth <= 1 -------------------------------------------
  //
  // Core states are windows with clear pending bits; a pending guarantee bit
  // makes the state winning iff an assumption violation can be forced on
  // every env choice (excusable), and a pending assumption bit always wins.

  bool have_level(int level, bool assumption) const {
    for (const auto& b : bodies_)
      if (b.depth == level && b.assumption == assumption) return true;
    return false;
  }

  void a1fail_into(Bits& acc, uint32_t P) {
    level_into(acc, 1, true, P);
    acc.flip();
  }

  void solve_shallow(SynthResult& res) {
    size_t nP = size_t{1} << S_;
    bool have_a1 = have_level(1, true);
    bool have_g1 = have_level(1, false);
    bool merged = d_true_ == 0 && trivial(spec_.initially) && trivial(spec_.preset);
    res.stats.arena_states = nP * 4 + (merged ? 0 : 1);

    // Per-window guarantee rows, materialized when they fit in 256 MB.
    std::vector<Bits> g1rows;
    bool mat = have_g1 && nP * (nletters_ / 8 + 8) <= (size_t{256} << 20);
    if (mat) {
      g1rows.resize(nP);
      for (size_t P = 0; P < nP; ++P) {
        if ((P & 1023) == 0) deadline_check();
        level_into(g1rows[P], 1, false, static_cast<uint32_t>(P));
      }
    }

    std::vector<char> excusable(nP, 0);
    Bits excexp(nletters_, false);
    if (have_a1) {
      Bits af;
      for (size_t P = 0; P < nP; ++P) {
        if ((P & 255) == 0) deadline_check();
        a1fail_into(af, static_cast<uint32_t>(P));
        bool all = true;
        for (uint32_t X = 0; X < (uint32_t{1} << I_) && all; ++X)
          all = af.any_in(size_t{X} << O_, size_t{X + 1} << O_);
        excusable[P] = all ? 1 : 0;
      }
      for (size_t cur = 0; cur < nletters_; ++cur)
        if (excusable[gather(cur)]) excexp.set(cur);
    }

    // Moves whose successor wins regardless of the fixpoint: a pending
    // assumption bit, or a pending guarantee bit on an excusable window.
    Bits twin_static = a0ok_;
    twin_static.flip();
    if (have_a1) {
      Bits e;
      e.copy_from(excexp);
      e &= a0ok_;
      Bits g;
      g.copy_from(g0ok_);
      g.flip();
      e &= g;
      twin_static |= e;
    }

    W_.assign(nP, 1);
    Bits wexp(nletters_, false), twin, good, af;
    auto rebuild_twin = [&]() {
      wexp.fill(false);
      for (size_t cur = 0; cur < nletters_; ++cur)
        if (W_[gather(cur)]) wexp.set(cur);
      twin.copy_from(a0ok_);
      twin &= g0ok_;
      twin &= wexp;
      twin |= twin_static;
    };
    auto good_into = [&](uint32_t P) {
      if (have_g1) {
        if (mat)
          good.copy_from(g1rows[P]);
        else
          level_into(good, 1, false, P);
        good &= twin;
      } else {
        good.copy_from(twin);
      }
      if (have_a1) {
        a1fail_into(af, P);
        good |= af;
      }
    };

    int iters = 0;
    for (;;) {
      ++iters;
      deadline_check();
      rebuild_twin();
      bool changed = false;
      for (size_t P = 0; P < nP; ++P) {
        if (!W_[P]) continue;
        if ((P & 255) == 0) deadline_check();
        good_into(static_cast<uint32_t>(P));
        for (uint32_t X = 0; X < (uint32_t{1} << I_); ++X)
          if (!good.any_in(size_t{X} << O_, size_t{X + 1} << O_)) {
            W_[P] = 0;
            changed = true;
            break;
          }
      }
      if (!changed) break;
    }
    res.stats.iterations = iters;
    rebuild_twin();

    Bits good_init;
    good_init.copy_from(is_ok_);
    good_init &= twin;
    if (merged) {
      res.realizable = W_[0] != 0;
    } else {
      res.realizable = true;
      for (uint32_t X = 0; X < (uint32_t{1} << I_) && res.realizable; ++X)
        if (ie_ok_[X] && !good_init.any_in(size_t{X} << O_, size_t{X + 1} << O_))
          res.realizable = false;
    }
    if (!res.realizable) return;

    // Machine extraction over reachable winning states.
    enum { kCore = 0, kExc = 1, kSink = 2, kInit = 3 };
    MealyMachine m;
    m.inputs = spec_.inputs;
    m.outputs = spec_.outputs;
    std::map<std::pair<int, uint32_t>, int> index;
    std::vector<std::pair<int, uint32_t>> states;
    size_t width = size_t{1} << I_;
    auto intern = [&](int cls, uint32_t P) {
      auto [it, fresh] = index.try_emplace({cls, P}, static_cast<int>(states.size()));
      if (fresh) {
        states.emplace_back(cls, P);
        m.delta.emplace_back(width, -1);
        m.out.emplace_back(width, 0);
      }
      return it->second;
    };
    auto target_of = [&](size_t cur) -> std::pair<int, uint32_t> {
      if (!a0ok_.get(cur)) return {kSink, 0};
      uint32_t P = gather(cur);
      if (!g0ok_.get(cur)) return {kExc, P};
      return {kCore, P};
    };
    int start = merged ? intern(kCore, 0) : intern(kInit, 0);
    m.initial = start;
    for (size_t q = 0; q < states.size(); ++q) {
      auto [cls, P] = states[q];
      if (cls == kCore) good_into(P);
      if (cls == kCore || cls == kExc) a1fail_into(af, P);
      for (uint32_t X = 0; X < width; ++X) {
        size_t lo = size_t{X} << O_, hi = size_t{X + 1} << O_;
        size_t cur;
        std::pair<int, uint32_t> to;
        switch (cls) {
          case kSink:
            cur = lo;
            to = {kSink, 0};
            break;
          case kInit:
            if (!ie_ok_[X]) {
              cur = lo;
              to = {kSink, 0};
            } else {
              cur = static_cast<size_t>(good_init.first_in(lo, hi));
              to = target_of(cur);
            }
            break;
          case kExc:
            cur = static_cast<size_t>(af.first_in(lo, hi));
            to = {kSink, 0};
            break;
          default: {  // kCore
            cur = static_cast<size_t>(good.first_in(lo, hi));
            if (have_a1 && af.get(cur))
              to = {kSink, 0};
            else
              to = target_of(cur);
          }
        }
        uint64_t nx = nat_input(X);
        m.delta[q][nx] = intern(to.first, to.second);
        m.out[q][nx] = nat_output(cur);
      }
    }
    res.machine = std::move(m);
  }

  // ---- lookahead depth >= 2 -------------------------------------------
  //
  // Full ring of pending verdict bits, two per position still inside the
  // window; plain fixpoint over (window, ring). Adjudication reads the
  // oldest slot together with the depth-d body verdicts.

  struct RingEval {
    // per-level ok rows for a fixed window, indices 1..d
    std::vector<Bits> aok, gok;
  };

  void ring_rows(RingEval& re, uint32_t P) {
    if (re.aok.empty()) {
      re.aok.resize(d_ + 1);
      re.gok.resize(d_ + 1);
    }
    for (int k = 1; k <= d_; ++k) {
      level_into(re.aok[k], k, true, P);
      level_into(re.gok[k], k, false, P);
    }
  }

  // New pending ring after reading cur: slot 0 latches the depth-0 verdicts,
  // older slots shift and absorb the matching level verdicts.
  uint32_t ring_step(uint32_t ring, const RingEval& re, size_t cur, int upto) const {
    uint32_t r2 = 0;
    if (!a0ok_.get(cur)) r2 |= 1;
    if (!g0ok_.get(cur)) r2 |= 2;
    for (int i = 1; i <= upto; ++i) {
      uint32_t a = (ring >> (2 * (i - 1))) & 1, g = (ring >> (2 * (i - 1) + 1)) & 1;
      if (!re.aok[i].get(cur)) a = 1;
      if (!re.gok[i].get(cur)) g = 1;
      r2 |= (a | (g << 1)) << (2 * i);
    }
    return r2;
  }

  bool phase_win(int t, uint32_t P, uint32_t ring) {
    auto key = std::make_tuple(t, P, ring);
    auto it = phase_memo_.find(key);
    if (it != phase_memo_.end()) return it->second != 0;
    RingEval re;
    ring_rows(re, P);
    uint32_t pshift = conveyor_pbits(P);
    bool win = true;
    for (uint32_t X = 0; X < (uint32_t{1} << I_) && win; ++X) {
      if (t == 0 && !ie_ok_[X]) continue;
      bool found = false;
      for (size_t cur = size_t{X} << O_; cur < (size_t{X + 1} << O_) && !found; ++cur) {
        if (t == 0 && !is_ok_.get(cur)) continue;
        uint32_t r2 = ring_step(ring, re, cur, std::min(t, d_ - 1));
        uint32_t P2 = gather(cur) | pshift;
        if (t + 1 == d_)
          found = W_[P2 | (size_t{r2} << S_)] != 0;
        else
          found = phase_win(t + 1, P2, r2);
      }
      win = found;
    }
    phase_memo_[key] = win ? 1 : 0;
    return win;
  }

  void solve_deep(SynthResult& res) {
    size_t nP = size_t{1} << S_;
    size_t nstates = nP << (2 * d_);
    res.stats.arena_states = nstates;
    W_.assign(nstates, 1);
    RingEval re;
    int iters = 0;
    for (;;) {
      ++iters;
      bool changed = false;
      for (size_t P = 0; P < nP; ++P) {
        deadline_check();
        ring_rows(re, static_cast<uint32_t>(P));
        uint32_t pshift = conveyor_pbits(static_cast<uint32_t>(P));
        for (uint32_t ring = 0; ring < (uint32_t{1} << (2 * d_)); ++ring) {
          size_t idx = P | (size_t{ring} << S_);
          if (!W_[idx]) continue;
          bool a_top = (ring >> (2 * (d_ - 1))) & 1;
          bool g_top = (ring >> (2 * (d_ - 1) + 1)) & 1;
          bool stays = true;
          for (uint32_t X = 0; X < (uint32_t{1} << I_) && stays; ++X) {
            bool found = false;
            for (size_t cur = size_t{X} << O_; cur < (size_t{X + 1} << O_) && !found;
                 ++cur) {
              if (a_top || !re.aok[d_].get(cur)) {
                found = true;  // adjudicated assumption violation: system wins
                break;
              }
              if (g_top || !re.gok[d_].get(cur)) continue;  // adjudicated loss
              uint32_t r2 = ring_step(ring, re, cur, d_ - 1);
              if (W_[(gather(cur) | pshift) | (size_t{r2} << S_)]) found = true;
            }
            stays = found;
          }
          if (!stays) {
            W_[idx] = 0;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    res.stats.iterations = iters;

    phase_memo_.clear();
    res.realizable = phase_win(0, 0, 0);
    if (!res.realizable) return;

    enum { kPhase = 0, kCore = 1, kSink = 2 };
    MealyMachine m;
    m.inputs = spec_.inputs;
    m.outputs = spec_.outputs;
    std::map<std::tuple<int, int, uint32_t, uint32_t>, int> index;
    std::vector<std::tuple<int, int, uint32_t, uint32_t>> states;
    size_t width = size_t{1} << I_;
    auto intern = [&](int cls, int t, uint32_t P, uint32_t ring) {
      auto [it, fresh] =
          index.try_emplace({cls, t, P, ring}, static_cast<int>(states.size()));
      if (fresh) {
        states.emplace_back(cls, t, P, ring);
        m.delta.emplace_back(width, -1);
        m.out.emplace_back(width, 0);
      }
      return it->second;
    };
    m.initial = intern(kPhase, 0, 0, 0);
    for (size_t q = 0; q < states.size(); ++q) {
      auto [cls, t, P, ring] = states[q];
      RingEval rq;
      if (cls != kSink) {
        ring_rows(rq, P);
      }
      uint32_t pshift = cls == kSink ? 0 : conveyor_pbits(P);
      for (uint32_t X = 0; X < width; ++X) {
        size_t lo = size_t{X} << O_, hi = size_t{X + 1} << O_;
        size_t chosen = lo;
        int to = -1;
        if (cls == kSink || (cls == kPhase && t == 0 && !ie_ok_[X])) {
          to = intern(kSink, 0, 0, 0);
        } else if (cls == kPhase) {
          for (size_t cur = lo; cur < hi; ++cur) {
            if (t == 0 && !is_ok_.get(cur)) continue;
            uint32_t r2 = ring_step(ring, rq, cur, std::min(t, d_ - 1));
            uint32_t P2 = gather(cur) | pshift;
            bool ok = t + 1 == d_ ? W_[P2 | (size_t{r2} << S_)] != 0
                                  : phase_win(t + 1, P2, r2);
            if (ok) {
              chosen = cur;
              to = t + 1 == d_ ? intern(kCore, 0, P2, r2) : intern(kPhase, t + 1, P2, r2);
              break;
            }
          }
        } else {  // kCore
          bool a_top = (ring >> (2 * (d_ - 1))) & 1;
          bool g_top = (ring >> (2 * (d_ - 1) + 1)) & 1;
          for (size_t cur = lo; cur < hi; ++cur) {
            if (a_top || !rq.aok[d_].get(cur)) {
              chosen = cur;
              to = intern(kSink, 0, 0, 0);
              break;
            }
            if (g_top || !rq.gok[d_].get(cur)) continue;
            uint32_t r2 = ring_step(ring, rq, cur, d_ - 1);
            uint32_t P2 = gather(cur) | pshift;
            if (W_[P2 | (size_t{r2} << S_)]) {
              chosen = cur;
              to = intern(kCore, 0, P2, r2);
              break;
            }
          }
        }
        uint64_t nx = nat_input(X);
        m.delta[q][nx] = to;
        m.out[q][nx] = nat_output(chosen);
      }
    }
    res.machine = std::move(m);
  }

  const ReactiveSpec& spec_;
  SynthOptions opt_;

  int I_ = 0, O_ = 0, A_ = 0;
  int d_true_ = 0, d_ = 1;
  size_t nletters_ = 1;
  std::map<std::string, int> bit_of_;
  std::vector<Bits> atom_masks_;
  std::vector<Body> bodies_;

  std::vector<int> stored_bits_;  // letter bit per stored atom, deepest first
  std::vector<int> stored_ages_;  // longest age each stored atom is read at
  std::vector<int> w_, off_;      // field widths and offsets per age
  int S_ = 0;
  std::vector<uint32_t> gather_table_;

  Bits a0ok_, g0ok_, is_ok_;
  std::vector<char> ie_ok_;
  std::vector<char> W_;
  std::map<std::tuple<int, uint32_t, uint32_t>, char> phase_memo_;
};

}  // namespace detail

inline SynthResult synthesize(const ReactiveSpec& spec, const SynthOptions& opts = {}) {
  detail::GameSolver solver(spec, opts);
  return solver.run();
}

}  // namespace moby
