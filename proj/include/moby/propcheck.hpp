#pragma once

// Decision procedure for Next-only LTL over finite windows. A formula of
// X-depth d is satisfiable iff it holds at position 0 of some trace of length
// d+1, so satisfiability reduces to SAT over timed atoms "name@k". The SAT
// core is Tseitin encoding plus a small DPLL with unit propagation; instances
// here are tiny (mode predicates, guard checks, randomized test formulas).

#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "moby/formula.hpp"
#include "moby/rewrite.hpp"
#include "moby/trace.hpp"

namespace moby {

// f with every atom a under i nested X replaced by atom "a@i"; the result is
// purely propositional. Constants stay put (they are time-invariant).
inline Formula timed_expansion(const Formula& f) {
  struct Impl {
    static Formula walk(const Formula& f, int depth) {
      switch (f.kind()) {
        case Kind::True:
        case Kind::False:
          return f;
        case Kind::Atom:
          return Formula::atom(f.name() + "@" + std::to_string(depth));
        case Kind::Not:
          return Formula::neg(walk(f.child(0), depth));
        case Kind::Next:
          return walk(f.child(0), depth + 1);
        case Kind::And:
          return Formula::conj(walk(f.child(0), depth), walk(f.child(1), depth));
        case Kind::Or:
          return Formula::disj(walk(f.child(0), depth), walk(f.child(1), depth));
        case Kind::Implies:
          return Formula::implies(walk(f.child(0), depth),
                                  walk(f.child(1), depth));
      }
      return f;  // unreachable
    }
  };
  return Impl::walk(f, 0);
}

namespace detail {

// Literals encode var v as v+1 (positive) or -(v+1) (negative).
class SatSolver {
 public:
  int fresh_var() { return num_vars_++; }

  void add_clause(std::vector<int> lits) { clauses_.push_back(std::move(lits)); }

  // Tseitin: returns the literal equisatisfiably representing f. Shared
  // subtrees get one variable (lookup is structural).
  int encode(const Formula& f) {
    auto it = cache_.find(f);
    if (it != cache_.end()) return it->second;
    int lit;
    switch (f.kind()) {
      case Kind::Atom:
        lit = fresh_var() + 1;
        break;
      case Kind::Not:
        lit = -encode(f.child(0));
        break;
      case Kind::And: {
        int a = encode(f.child(0)), b = encode(f.child(1));
        int v = fresh_var() + 1;
        add_clause({-v, a});
        add_clause({-v, b});
        add_clause({v, -a, -b});
        lit = v;
        break;
      }
      case Kind::Or: {
        int a = encode(f.child(0)), b = encode(f.child(1));
        int v = fresh_var() + 1;
        add_clause({-v, a, b});
        add_clause({v, -a});
        add_clause({v, -b});
        lit = v;
        break;
      }
      case Kind::Implies: {
        int a = encode(f.child(0)), b = encode(f.child(1));
        int v = fresh_var() + 1;
        add_clause({-v, -a, b});
        add_clause({v, a});
        add_clause({v, -b});
        lit = v;
        break;
      }
      default:
        // Constants are simplified away before encoding; Next never reaches
        // the SAT layer (timed_expansion removed it).
        throw UnsupportedShape("sat encode: unexpected node " + f.str());
    }
    cache_.emplace(f, lit);
    return lit;
  }

  // Assignment per var: 0 unset, 1 true, -1 false.
  std::optional<std::vector<int8_t>> solve() {
    std::vector<int8_t> assign(num_vars_, 0);
    if (dpll(assign)) return assign;
    return std::nullopt;
  }

 private:
  bool dpll(std::vector<int8_t>& assign) {
    // Unit propagation to fixpoint.
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& clause : clauses_) {
        int unassigned = 0, unit = 0;
        bool satisfied = false;
        for (int lit : clause) {
          int8_t v = assign[std::abs(lit) - 1];
          if (v == 0) {
            ++unassigned;
            unit = lit;
          } else if ((v > 0) == (lit > 0)) {
            satisfied = true;
            break;
          }
        }
        if (satisfied) continue;
        if (unassigned == 0) return false;
        if (unassigned == 1) {
          assign[std::abs(unit) - 1] = unit > 0 ? 1 : -1;
          changed = true;
        }
      }
    }
    int branch = -1;
    for (int v = 0; v < num_vars_; ++v)
      if (assign[v] == 0) {
        branch = v;
        break;
      }
    if (branch < 0) return true;  // every clause satisfied above
    for (int8_t value : {int8_t{1}, int8_t{-1}}) {
      std::vector<int8_t> saved = assign;
      assign[branch] = value;
      if (dpll(assign)) return true;
      assign = saved;
    }
    return false;
  }

  int num_vars_ = 0;
  std::vector<std::vector<int>> clauses_;
  std::map<Formula, int> cache_;
};

}  // namespace detail

// Satisfying trace of length x_depth(f)+1, or nullopt. Atoms the solver left
// unconstrained come out false.
inline std::optional<Trace> find_model(const Formula& f) {
  Formula prop = simpl(timed_expansion(f));
  int depth = f.x_depth();
  if (prop.is_true()) return Trace(depth + 1);
  if (prop.is_false()) return std::nullopt;

  detail::SatSolver s;
  int root = s.encode(prop);
  s.add_clause({root});
  auto assign = s.solve();
  if (!assign) return std::nullopt;

  Trace trace(depth + 1);
  for (const auto& name : prop.atoms()) {
    // Re-encoding an atom is a cache hit and returns its existing variable.
    int lit = s.encode(Formula::atom(name));
    if ((*assign)[std::abs(lit) - 1] <= 0) continue;
    auto at = name.rfind('@');
    std::string base = name.substr(0, at);
    size_t k = std::stoul(name.substr(at + 1));
    if (k < trace.size()) trace[k].insert(base);
  }
  return trace;
}

inline bool is_sat(const Formula& f) { return find_model(f).has_value(); }

inline bool is_valid(const Formula& f) { return !is_sat(Formula::neg(f)); }

// Equivalence over all traces, the workhorse for legality and guard checks.
inline bool equivalent(const Formula& a, const Formula& b) {
  return is_valid(Formula::conj(Formula::implies(a, b), Formula::implies(b, a)));
}

}  // namespace moby
