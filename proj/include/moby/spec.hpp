#pragma once

// Reactive specification and mode-decomposition data models. A specification
// denotes the safety objective
//
//   initially -> (preset && G(assumptions -> guarantees))
//
// judged prefix-wise: the system owes its constraints only on prefixes where
// the environment side has held so far.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "moby/formula.hpp"

namespace moby {

enum class AtomKind { Input, Output, Fresh };

struct ReactiveSpec {
  std::vector<std::string> inputs;   // declaration order matters downstream
  std::vector<std::string> outputs;  // (output order fixes strategy tie-breaks)
  std::optional<Formula> initially;  // constraint on the first input letter
  std::optional<Formula> preset;     // constraint on the first output letter
  std::vector<Formula> assumptions;  // bodies of G items, environment side
  std::vector<Formula> guarantees;   // bodies of G items, system side
  std::map<std::string, int> params; // numeric parameters seen while parsing

  bool is_input(const std::string& a) const {
    for (const auto& x : inputs)
      if (x == a) return true;
    return false;
  }
  bool is_output(const std::string& a) const {
    for (const auto& x : outputs)
      if (x == a) return true;
    return false;
  }
  bool declares(const std::string& a) const { return is_input(a) || is_output(a); }

  friend bool operator==(const ReactiveSpec& a, const ReactiveSpec& b) {
    return a.inputs == b.inputs && a.outputs == b.outputs &&
           a.initially == b.initially && a.preset == b.preset &&
           a.assumptions == b.assumptions && a.guarantees == b.guarantees;
  }
};

struct Mode {
  std::string name;
  Formula pred;     // over outputs, X-free: which valuations belong here
  Formula init;     // over outputs, X-free: the letter a jump lands on
  Formula arrival;  // over inputs, X-free: what the env may do on arrival
};

struct ModeDecomposition {
  std::vector<Mode> modes;
  std::set<std::pair<int, int>> relation;  // 0-based (from, to) jump edges

  std::set<int> successors_of(int i) const {
    std::set<int> out;
    for (auto [a, b] : relation)
      if (a == i) out.insert(b);
    return out;
  }
};

// The judged form of a specification. depth is the longest lookahead any
// body needs; it bounds the window a game state or verifier must remember.
struct Objective {
  Formula env_initial;
  Formula sys_initial;
  std::vector<Formula> assumptions;
  std::vector<Formula> guarantees;
  int depth = 0;
};

inline Objective meaning(const ReactiveSpec& spec) {
  Objective obj;
  obj.env_initial = spec.initially.value_or(Formula::tt());
  obj.sys_initial = spec.preset.value_or(Formula::tt());
  obj.assumptions = spec.assumptions;
  obj.guarantees = spec.guarantees;
  obj.depth = std::max(obj.env_initial.x_depth(), obj.sys_initial.x_depth());
  for (const auto& f : spec.assumptions) obj.depth = std::max(obj.depth, f.x_depth());
  for (const auto& f : spec.guarantees) obj.depth = std::max(obj.depth, f.x_depth());
  return obj;
}

}  // namespace moby
