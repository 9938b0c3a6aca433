#pragma once

// Composition of per-mode strategies into one controller. The composed
// machine runs the current mode's machine; when that machine raises exactly
// one of its jump outputs, control transfers to the target mode's machine,
// restarted at its initial state, from the next round on. Jump atoms and the
// other fresh bookkeeping outputs are erased from the composed alphabet, so
// the result speaks the original objective's language.

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "moby/mealy.hpp"
#include "moby/propcheck.hpp"
#include "moby/spec.hpp"

namespace moby {

struct MultipleJumps : std::runtime_error {
  explicit MultipleJumps(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownTargetMode : std::runtime_error {
  explicit UnknownTargetMode(const std::string& what) : std::runtime_error(what) {}
};

struct CompositionInput {
  MealyMachine machine;
  // jump output atom -> index of the mode the jump hands over to
  std::map<std::string, int> jump_targets;
};

// Restriction of a machine to the given output atoms (missing ones read as
// permanently absent). Inputs and transition structure are unchanged.
inline MealyMachine erase_fresh(const MealyMachine& m,
                                const std::vector<std::string>& keep) {
  MealyMachine r;
  r.inputs = m.inputs;
  r.outputs = keep;
  r.initial = m.initial;
  r.delta = m.delta;
  std::map<std::string, size_t> pos;
  for (size_t j = 0; j < keep.size(); ++j) pos[keep[j]] = j;
  r.out.assign(m.out.size(), {});
  for (size_t q = 0; q < m.out.size(); ++q) {
    r.out[q].assign(m.out[q].size(), 0);
    for (size_t k = 0; k < m.out[q].size(); ++k)
      for (size_t j = 0; j < m.outputs.size(); ++j)
        if ((m.out[q][k] >> j) & 1) {
          auto it = pos.find(m.outputs[j]);
          if (it != pos.end()) r.out[q][k] |= uint64_t{1} << it->second;
        }
  }
  return r;
}

inline MealyMachine compose(const ReactiveSpec& spec,
                            const std::vector<CompositionInput>& parts,
                            int start_mode) {
  if (parts.empty()) throw std::invalid_argument("composition needs at least one part");
  if (start_mode < 0 || start_mode >= static_cast<int>(parts.size()))
    throw std::invalid_argument("start mode index out of range");

  std::set<std::string> want(spec.inputs.begin(), spec.inputs.end());
  for (const auto& p : parts) {
    std::set<std::string> have(p.machine.inputs.begin(), p.machine.inputs.end());
    if (have != want)
      throw AlphabetMismatch("part machine inputs do not match the objective's inputs");
    for (const auto& [atom, target] : p.jump_targets) {
      if (target < 0 || target >= static_cast<int>(parts.size()))
        throw UnknownTargetMode("jump atom '" + atom + "' targets mode index " +
                                std::to_string(target) + " of " +
                                std::to_string(parts.size()));
      bool declared = false;
      for (const auto& o : p.machine.outputs) declared |= o == atom;
      if (!declared)
        throw AlphabetMismatch("jump atom '" + atom +
                               "' is not an output of its part machine");
    }
  }

  // Per part: jump output bit -> target, and original-output bit remap.
  struct PartInfo {
    std::vector<std::pair<size_t, int>> jumps;  // (output bit, target mode)
    std::vector<std::pair<size_t, size_t>> remap;  // part bit -> composed bit
  };
  std::map<std::string, size_t> out_pos;
  for (size_t j = 0; j < spec.outputs.size(); ++j) out_pos[spec.outputs[j]] = j;
  std::vector<PartInfo> info(parts.size());
  for (size_t i = 0; i < parts.size(); ++i) {
    for (size_t j = 0; j < parts[i].machine.outputs.size(); ++j) {
      const std::string& atom = parts[i].machine.outputs[j];
      auto jt = parts[i].jump_targets.find(atom);
      if (jt != parts[i].jump_targets.end()) info[i].jumps.emplace_back(j, jt->second);
      auto op = out_pos.find(atom);
      if (op != out_pos.end()) info[i].remap.emplace_back(j, op->second);
    }
  }

  MealyMachine c;
  c.inputs = spec.inputs;
  c.outputs = spec.outputs;
  size_t width = size_t{1} << c.inputs.size();

  std::map<std::pair<int, int>, int> index;  // (mode, part state) -> composed state
  std::vector<std::pair<int, int>> states;
  auto intern = [&](int mode, int q) {
    auto [it, fresh] = index.try_emplace({mode, q}, static_cast<int>(states.size()));
    if (fresh) {
      states.emplace_back(mode, q);
      c.delta.emplace_back(width, -1);
      c.out.emplace_back(width, 0);
    }
    return it->second;
  };
  c.initial = intern(start_mode, parts[start_mode].machine.initial);

  for (size_t s = 0; s < states.size(); ++s) {
    auto [mode, q] = states[s];
    const MealyMachine& part = parts[mode].machine;
    for (uint64_t k = 0; k < width; ++k) {
      uint64_t pk = part.input_mask(c.input_letter(k));
      uint64_t y = part.out[q][pk];

      int jump_to = -1;
      for (const auto& [bit, target] : info[mode].jumps)
        if ((y >> bit) & 1) {
          if (jump_to >= 0)
            throw MultipleJumps("mode " + std::to_string(mode) + " state " +
                                std::to_string(q) + " raises more than one jump");
          jump_to = target;
        }

      uint64_t cy = 0;
      for (const auto& [from, to] : info[mode].remap)
        if ((y >> from) & 1) cy |= uint64_t{1} << to;

      int next = jump_to >= 0 ? intern(jump_to, parts[jump_to].machine.initial)
                              : intern(mode, part.delta[q][pk]);
      c.delta[s][k] = next;
      c.out[s][k] = cy;
    }
  }
  c.validate();
  return c;
}

struct StartChoice {
  int index = 0;
  // False when no mode provably covers the initial system constraint; the
  // first mode then stands in.
  bool confident = true;
};

inline StartChoice pick_start_mode(const ReactiveSpec& spec,
                                   const ModeDecomposition& dec) {
  Formula is = spec.preset.value_or(Formula::tt());
  for (int i = 0; i < static_cast<int>(dec.modes.size()); ++i) {
    Formula inside = Formula::conj(dec.modes[i].init, dec.modes[i].pred);
    if (is_valid(Formula::implies(is, inside))) return {i, true};
  }
  return {0, false};
}

}  // namespace moby
