#pragma once

// Mode legality checking, mode-directed formula specialization, and the
// per-mode projection construction.
//
// A projection for mode i is a self-contained reactive spec over a reduced
// output alphabet plus fresh bookkeeping atoms:
//   done           latched once the sub-system has handed control away
//   s_X..._a       obligation atoms standing for pending X-chains
//   jump_<j>       raised on the step where control transfers to mode j
// Guarantee layout, in emission order: mode anchor, specialized originals
// (obligations substituted), obligation dynamics, jump guards, plumbing.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "moby/formula.hpp"
#include "moby/propcheck.hpp"
#include "moby/rewrite.hpp"
#include "moby/spec.hpp"
#include "moby/trace.hpp"

namespace moby {

struct InconsistentMode : std::runtime_error {
  int item_index;
  InconsistentMode(const std::string& mode, int item)
      : std::runtime_error("guarantee item " + std::to_string(item) +
                           " reduces to False under mode " + mode),
        item_index(item) {}
};

struct FreshAtomCollision : std::runtime_error {
  explicit FreshAtomCollision(const std::string& name)
      : std::runtime_error("fresh atom '" + name +
                           "' collides with a declared atom") {}
};

// ---- legality ---------------------------------------------------------------

struct LegalityReport {
  bool ok = true;
  // Mode index pairs with a common satisfying valuation.
  std::vector<std::pair<int, int>> overlapping;
  // An output valuation allowed by the spec's stateless guarantees but
  // covered by no mode.
  std::optional<Letter> completeness_witness;
  // Modes whose initial condition does not imply their predicate.
  std::vector<int> init_violations;
  // Self-related modes (relation must be irreflexive).
  std::vector<int> self_related;

  std::string describe(const ModeDecomposition& dec) const {
    if (ok) return "ok";
    std::ostringstream os;
    for (auto [i, j] : overlapping)
      os << "modes " << dec.modes[i].name << " and " << dec.modes[j].name
         << " overlap\n";
    if (completeness_witness) {
      os << "no mode covers the valuation {";
      bool first = true;
      for (const auto& a : *completeness_witness) {
        if (!first) os << ", ";
        os << a;
        first = false;
      }
      os << "}\n";
    }
    for (int i : init_violations)
      os << "initial condition of " << dec.modes[i].name
         << " does not imply its predicate\n";
    for (int i : self_related)
      os << "mode " << dec.modes[i].name << " is related to itself\n";
    return os.str();
  }
};

// The predicates must cover every output valuation the guarantees allow at a
// single instant, and no two may overlap. Coverage is checked relative to the
// stateless (X-free) guarantee bodies: valuations those exclude can never
// occur in any play, so modes need not account for them.
inline LegalityReport check_legality(const ReactiveSpec& spec,
                                     const ModeDecomposition& dec) {
  LegalityReport report;
  int n = static_cast<int>(dec.modes.size());

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (is_sat(Formula::conj(dec.modes[i].pred, dec.modes[j].pred))) {
        report.overlapping.emplace_back(i, j);
        report.ok = false;
      }

  std::vector<Formula> invariant_parts;
  for (const auto& g : spec.guarantees)
    if (g.x_depth() == 0) invariant_parts.push_back(g);
  Formula invariant = Formula::conj_all(invariant_parts);
  std::vector<Formula> preds;
  for (const auto& m : dec.modes) preds.push_back(m.pred);
  Formula covered = Formula::implies(invariant, Formula::disj_all(preds));
  if (auto model = find_model(Formula::neg(covered))) {
    report.completeness_witness = (*model)[0];
    report.ok = false;
  }

  for (int i = 0; i < n; ++i)
    if (!is_valid(Formula::implies(dec.modes[i].init, dec.modes[i].pred))) {
      report.init_violations.push_back(i);
      report.ok = false;
    }

  for (auto [a, b] : dec.relation)
    if (a == b) {
      report.self_related.push_back(a);
      report.ok = false;
    }

  return report;
}

// ---- mode-directed specialization -------------------------------------------

namespace detail {

// Replaces subformulas the mode decides by constants. Tries the whole node
// first (an implication can be vacuous even though its parts are open), then
// descends through boolean structure. Never looks below X: those positions
// are not constrained by the current letter.
inline Formula rm_modes_walk(const Formula& f, const Formula& m) {
  if (f.is_const()) return f;
  if (is_valid(Formula::implies(m, f))) return Formula::tt();
  if (is_valid(Formula::implies(m, Formula::neg(f)))) return Formula::ff();
  switch (f.kind()) {
    case Kind::Not:
      return Formula::neg(rm_modes_walk(f.child(0), m));
    case Kind::And:
      return Formula::conj(rm_modes_walk(f.child(0), m),
                           rm_modes_walk(f.child(1), m));
    case Kind::Or:
      return Formula::disj(rm_modes_walk(f.child(0), m),
                           rm_modes_walk(f.child(1), m));
    case Kind::Implies:
      return Formula::implies(rm_modes_walk(f.child(0), m),
                              rm_modes_walk(f.child(1), m));
    default:
      return f;  // atom or Next chain
  }
}

}  // namespace detail

inline Formula rm_modes(const Formula& f, const Formula& m) {
  return simpl(detail::rm_modes_walk(f, m));
}

// Specializes every guarantee for the mode, dropping items the mode settles.
// An item that becomes False means the mode contradicts the guarantees.
inline std::vector<Formula> reduce(const std::vector<Formula>& guarantees,
                                   const Formula& m) {
  std::vector<Formula> out;
  for (size_t i = 0; i < guarantees.size(); ++i) {
    Formula r = rm_modes(guarantees[i], m);
    if (r.is_true()) continue;
    if (r.is_false())
      throw InconsistentMode(m.str(), static_cast<int>(i));
    out.push_back(r);
  }
  return out;
}

// ---- projection construction -------------------------------------------------

struct Projection {
  int mode_index = 0;  // position in the decomposition
  std::string mode_name;
  ReactiveSpec spec;
  // Pending-X obligations, in emission order; obligation_var names each.
  std::vector<Formula> obligations;
  // jump output atom -> target mode index.
  std::map<std::string, int> jump_targets;
  std::string done_atom = "done";
};

namespace detail {

inline Formula restrict_outputs(const Formula& f, const std::set<std::string>& keep,
                                const ReactiveSpec& spec) {
  std::map<Formula, Formula> to_false;
  for (const auto& a : f.atoms())
    if (spec.is_output(a) && !keep.count(a))
      to_false.emplace(Formula::atom(a), Formula::ff());
  return simpl(substitute(f, to_false));
}

inline void positive_atoms(const Formula& f, std::set<std::string>& out) {
  switch (f.kind()) {
    case Kind::Atom:
      out.insert(f.name());
      break;
    case Kind::Not:
      break;  // NNF: negation only wraps atoms
    default:
      for (size_t i = 0; i < f.arity(); ++i) positive_atoms(f.child(i), out);
  }
}

}  // namespace detail

inline std::vector<Projection> compute_projections(const ReactiveSpec& spec,
                                                   const ModeDecomposition& dec) {
  const Formula not_done = Formula::neg(Formula::atom("done"));
  const Formula done = Formula::atom("done");
  std::vector<Projection> result;

  for (int i = 0; i < static_cast<int>(dec.modes.size()); ++i) {
    const Mode& mode = dec.modes[i];
    std::vector<Formula> reduced = reduce(spec.guarantees, mode.pred);

    // Obligations: every maximal X-chain of the NNF'd survivors, closed
    // under peeling so chain dynamics can reference the next link.
    std::vector<Formula> bodies;
    std::set<Formula> oblig;
    for (const auto& g : reduced) {
      Formula n = nnf(g);
      bodies.push_back(n);
      for (const auto& f : nsf(n)) {
        Formula cur = f;
        while (cur.x_depth() >= 1) {
          oblig.insert(cur);
          if (cur.x_depth() == 1) break;
          cur = rm_next(cur);
        }
      }
    }

    std::map<Formula, Formula> to_var;
    for (const auto& f : oblig) to_var.emplace(f, obligation_var(f));

    std::vector<Formula> items;

    // Specialized originals, each live only while the mode runs.
    for (const auto& b : bodies)
      items.push_back(Formula::implies(not_done, substitute(b, to_var)));

    // Obligation dynamics: a raised obligation discharges one step later,
    // either into the next link of its chain or into the base literal.
    for (const auto& f : oblig)
      items.push_back(Formula::implies(
          Formula::conj(not_done, to_var.at(f)),
          Formula::next(obligation_var(rm_next(f)))));

    // Jump guards: an obligation may cross a jump only if the target mode's
    // initial condition discharges it on arrival.
    std::set<int> related = dec.successors_of(i);
    auto jump_atom = [](int j) {
      return Formula::atom("jump_" + std::to_string(j + 1));
    };
    std::map<std::string, int> jump_targets;
    for (int j : related) jump_targets[jump_atom(j).name()] = j;
    for (int j : related)
      for (const auto& f : oblig)
        if (!is_valid(Formula::implies(dec.modes[j].init, rm_next(f))))
          items.push_back(
              Formula::implies(jump_atom(j), Formula::neg(to_var.at(f))));

    // Plumbing: done latches; a jump sets it; otherwise it stays down; at
    // most one jump atom may fire per step.
    items.push_back(Formula::implies(done, Formula::next(done)));
    std::vector<Formula> jumps;
    for (int j : related) jumps.push_back(jump_atom(j));
    Formula any_jump = Formula::disj_all(jumps);
    if (!jumps.empty())
      items.push_back(Formula::implies(any_jump, Formula::next(done)));
    items.push_back(simpl(Formula::implies(
        Formula::neg(any_jump),
        Formula::implies(not_done, Formula::next(not_done)))));
    if (jumps.size() >= 2) {
      std::vector<Formula> mutex;
      for (size_t a = 0; a < jumps.size(); ++a)
        for (size_t b = a + 1; b < jumps.size(); ++b)
          mutex.push_back(Formula::implies(jumps[a], Formula::neg(jumps[b])));
      items.push_back(Formula::conj_all(mutex));
    }

    // Output alphabet: originals the items still mention, plus the mode's
    // own positive vocabulary; everything else is identically false here.
    std::set<std::string> keep;
    for (const auto& it : items)
      for (const auto& a : it.atoms())
        if (spec.is_output(a)) keep.insert(a);
    detail::positive_atoms(nnf(mode.pred), keep);
    detail::positive_atoms(nnf(mode.init), keep);

    Formula anchor_body = detail::restrict_outputs(mode.pred, keep, spec);
    Formula anchor = simpl(Formula::implies(not_done, anchor_body));
    if (!anchor.is_true()) items.insert(items.begin(), anchor);

    Projection proj;
    proj.mode_index = i;
    proj.mode_name = mode.name;
    proj.jump_targets = jump_targets;
    proj.obligations.assign(oblig.begin(), oblig.end());

    ReactiveSpec& ps = proj.spec;
    ps.inputs = spec.inputs;
    for (const auto& o : spec.outputs)
      if (keep.count(o)) ps.outputs.push_back(o);
    std::vector<std::string> fresh;
    for (const auto& f : oblig) fresh.push_back(obligation_var(f).name());
    for (int j : related) fresh.push_back(jump_atom(j).name());
    fresh.push_back("done");
    for (const auto& name : fresh) {
      if (spec.declares(name)) throw FreshAtomCollision(name);
      ps.outputs.push_back(name);
    }

    if (!mode.arrival.is_true()) ps.initially = mode.arrival;
    ps.preset = simpl(Formula::conj(
        detail::restrict_outputs(mode.init, keep, spec), not_done));
    ps.assumptions = spec.assumptions;
    ps.guarantees = std::move(items);

    result.push_back(std::move(proj));
  }
  return result;
}

}  // namespace moby
