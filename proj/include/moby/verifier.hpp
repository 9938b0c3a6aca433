#pragma once

// Exhaustive product exploration of a Mealy machine against an objective.
// Positions are judged exactly as in the game: a position where some
// assumption body fails excuses itself and every later position, so such
// branches are pruned; a guarantee body failing at a position whose
// assumptions all held is a violation. The PRESET constraint is checked on
// the first letter unconditionally, INITIALLY prunes environment choices.
//
// Search is breadth-first over (machine state, window of recent letters)
// configurations, so a reported counterexample has minimal length.

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "moby/mealy.hpp"
#include "moby/spec.hpp"
#include "moby/trace.hpp"

namespace moby {

struct Counterexample {
  Trace trace;         // combined letters up to the round exposing the violation
  size_t position = 0; // judged position that failed
  std::string item;    // printed body of the failed guarantee, or "PRESET"
};

struct VerifyReport {
  bool ok = true;
  std::optional<Counterexample> counterexample;
  size_t configurations = 0;  // distinct product configurations reached
};

// Machine response to an input sequence as combined input/output letters.
inline Trace simulate(const MealyMachine& m, const std::vector<Letter>& inputs) {
  Trace t;
  int q = m.initial;
  for (const auto& x : inputs) {
    uint64_t k = m.input_mask(x);
    Letter l = x;
    Letter y = m.output_letter(q, k);
    l.insert(y.begin(), y.end());
    t.push_back(std::move(l));
    q = m.delta[q][k];
  }
  return t;
}

inline VerifyReport product_check(const ReactiveSpec& spec, const MealyMachine& m) {
  {
    std::set<std::string> mi(m.inputs.begin(), m.inputs.end());
    std::set<std::string> si(spec.inputs.begin(), spec.inputs.end());
    if (mi != si)
      throw AlphabetMismatch("machine inputs do not match the objective's inputs");
    std::set<std::string> mo(m.outputs.begin(), m.outputs.end());
    for (const auto& o : spec.outputs)
      if (!mo.count(o))
        throw AlphabetMismatch("machine lacks output atom '" + o + "'");
  }
  m.validate();

  size_t d = 0;
  for (const auto& f : spec.assumptions) d = std::max(d, size_t(f.x_depth()));
  for (const auto& f : spec.guarantees) d = std::max(d, size_t(f.x_depth()));

  struct Node {
    int q;          // machine state after the prefix
    Trace window;   // last min(len, d) letters of the prefix
    size_t parent;  // node whose prefix this extends
    Letter letter;  // letter appended by this node
    size_t len;     // prefix length
  };
  constexpr size_t npos = static_cast<size_t>(-1);

  VerifyReport rep;
  std::vector<Node> nodes;
  std::map<std::pair<int, Trace>, char> seen;
  std::deque<size_t> queue;
  nodes.push_back(Node{m.initial, {}, npos, {}, 0});
  seen[{m.initial, {}}] = 1;
  queue.push_back(0);
  rep.configurations = 1;

  auto prefix_of = [&](size_t id) {
    Trace t;
    for (size_t n = id; n != 0; n = nodes[n].parent) t.push_back(nodes[n].letter);
    std::reverse(t.begin(), t.end());
    return t;
  };

  while (!queue.empty()) {
    size_t id = queue.front();
    queue.pop_front();
    Node cur = nodes[id];  // by value: nodes grows below
    for (uint64_t k = 0; k < m.env_letters(); ++k) {
      Letter x = m.input_letter(k);
      Letter l = x;
      Letter y = m.output_letter(cur.q, k);
      l.insert(y.begin(), y.end());
      if (cur.len == 0) {
        if (spec.initially && !eval_at(*spec.initially, Trace{x}, 0)) continue;
        if (spec.preset && !eval_at(*spec.preset, Trace{l}, 0)) {
          rep.ok = false;
          rep.counterexample = Counterexample{Trace{l}, 0, "PRESET"};
          return rep;
        }
      }
      Trace full = cur.window;
      full.push_back(l);
      bool excused = false;
      if (full.size() == d + 1) {
        for (const auto& a : spec.assumptions)
          if (!eval_at(a, full, 0)) {
            excused = true;
            break;
          }
        if (!excused)
          for (const auto& g : spec.guarantees)
            if (!eval_at(g, full, 0)) {
              rep.ok = false;
              Trace t = prefix_of(id);
              t.push_back(l);
              rep.counterexample = Counterexample{std::move(t), cur.len - d, g.str()};
              return rep;
            }
      }
      if (excused) continue;
      Trace win2 = std::move(full);
      if (win2.size() == d + 1) win2.erase(win2.begin());
      int q2 = m.delta[cur.q][k];
      auto inserted = seen.try_emplace({q2, win2}, 1);
      if (inserted.second) {
        nodes.push_back(Node{q2, std::move(win2), id, std::move(l), cur.len + 1});
        ++rep.configurations;
        queue.push_back(nodes.size() - 1);
      }
    }
  }
  return rep;
}

}  // namespace moby
