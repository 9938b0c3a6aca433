#pragma once

// Deterministic Mealy machines over atom alphabets. Transition and output
// tables are dense: state x input-valuation, where input valuation k sets
// input atom i iff bit i of k is set. Every machine in this project is total
// by construction; from_json re-validates because files can be hand-edited.

#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "moby/trace.hpp"

namespace moby {

struct AlphabetMismatch : std::runtime_error {
  explicit AlphabetMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct MalformedMachine : std::runtime_error {
  explicit MalformedMachine(const std::string& what) : std::runtime_error(what) {}
};

struct MealyMachine {
  std::vector<std::string> inputs;   // declaration order fixes bit i of the index
  std::vector<std::string> outputs;  // declaration order fixes bit j of out masks
  int initial = 0;
  std::vector<std::vector<int>> delta;       // delta[q][k] = successor state
  std::vector<std::vector<uint64_t>> out;    // out[q][k] = output atom mask

  size_t state_count() const { return delta.size(); }
  size_t env_letters() const { return size_t{1} << inputs.size(); }

  uint64_t input_mask(const Letter& letter) const {
    uint64_t k = 0;
    for (const auto& a : letter) {
      size_t i = 0;
      while (i < inputs.size() && inputs[i] != a) ++i;
      if (i == inputs.size())
        throw AlphabetMismatch("input letter mentions undeclared atom '" + a + "'");
      k |= uint64_t{1} << i;
    }
    return k;
  }

  Letter input_letter(uint64_t k) const {
    Letter l;
    for (size_t i = 0; i < inputs.size(); ++i)
      if (k >> i & 1) l.insert(inputs[i]);
    return l;
  }

  Letter output_letter(int q, uint64_t k) const {
    Letter l;
    uint64_t y = out[q][k];
    for (size_t j = 0; j < outputs.size(); ++j)
      if (y >> j & 1) l.insert(outputs[j]);
    return l;
  }

  // Totality, range and reachability checks; throws MalformedMachine.
  void validate() const {
    size_t n = delta.size();
    if (n == 0 || out.size() != n) throw MalformedMachine("empty or ragged tables");
    if (initial < 0 || static_cast<size_t>(initial) >= n)
      throw MalformedMachine("initial state out of range");
    if (inputs.size() > 20) throw MalformedMachine("too many inputs for dense tables");
    size_t width = env_letters();
    for (size_t q = 0; q < n; ++q) {
      if (delta[q].size() != width || out[q].size() != width)
        throw MalformedMachine("state " + std::to_string(q) + " is not total");
      for (size_t k = 0; k < width; ++k)
        if (delta[q][k] < 0 || static_cast<size_t>(delta[q][k]) >= n)
          throw MalformedMachine("transition target out of range");
    }
    std::vector<char> seen(n, 0);
    std::vector<int> stack{initial};
    seen[initial] = 1;
    while (!stack.empty()) {
      int q = stack.back();
      stack.pop_back();
      for (size_t k = 0; k < width; ++k)
        if (!seen[delta[q][k]]) {
          seen[delta[q][k]] = 1;
          stack.push_back(delta[q][k]);
        }
    }
    for (size_t q = 0; q < n; ++q)
      if (!seen[q]) throw MalformedMachine("state " + std::to_string(q) + " unreachable");
  }
};

inline constexpr int kMachineFormatVersion = 1;

inline nlohmann::json to_json(const MealyMachine& m) {
  nlohmann::json j;
  j["format"] = "moby-machine";
  j["version"] = kMachineFormatVersion;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["initial"] = m.initial;
  auto names_of = [](const std::vector<std::string>& atoms, uint64_t mask) {
    std::vector<std::string> names;
    for (size_t i = 0; i < atoms.size(); ++i)
      if (mask >> i & 1) names.push_back(atoms[i]);
    return names;
  };
  nlohmann::json states = nlohmann::json::array();
  for (size_t q = 0; q < m.state_count(); ++q) {
    nlohmann::json trans = nlohmann::json::array();
    for (uint64_t k = 0; k < m.env_letters(); ++k) {
      trans.push_back({{"input", names_of(m.inputs, k)},
                       {"to", m.delta[q][k]},
                       {"output", names_of(m.outputs, m.out[q][k])}});
    }
    states.push_back({{"id", q}, {"transitions", std::move(trans)}});
  }
  j["states"] = std::move(states);
  return j;
}

inline MealyMachine machine_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != "moby-machine")
    throw MalformedMachine("not a moby-machine document");
  if (j.value("version", 0) != kMachineFormatVersion)
    throw MalformedMachine("unsupported machine format version");
  MealyMachine m;
  m.inputs = j.at("inputs").get<std::vector<std::string>>();
  m.outputs = j.at("outputs").get<std::vector<std::string>>();
  m.initial = j.at("initial").get<int>();
  size_t n = j.at("states").size();
  size_t width = size_t{1} << m.inputs.size();
  m.delta.assign(n, std::vector<int>(width, -1));
  m.out.assign(n, std::vector<uint64_t>(width, 0));
  auto mask_of = [](const std::vector<std::string>& atoms,
                    const std::vector<std::string>& names, const char* side) {
    uint64_t mask = 0;
    for (const auto& a : names) {
      size_t i = 0;
      while (i < atoms.size() && atoms[i] != a) ++i;
      if (i == atoms.size())
        throw MalformedMachine(std::string(side) + " letter mentions undeclared atom '" + a + "'");
      mask |= uint64_t{1} << i;
    }
    return mask;
  };
  for (const auto& st : j.at("states")) {
    size_t q = st.at("id").get<size_t>();
    if (q >= n) throw MalformedMachine("state id out of range");
    for (const auto& tr : st.at("transitions")) {
      uint64_t k = mask_of(m.inputs, tr.at("input").get<std::vector<std::string>>(), "input");
      m.delta[q][k] = tr.at("to").get<int>();
      m.out[q][k] = mask_of(m.outputs, tr.at("output").get<std::vector<std::string>>(), "output");
    }
  }
  for (size_t q = 0; q < n; ++q)
    for (size_t k = 0; k < width; ++k)
      if (m.delta[q][k] < 0)
        throw MalformedMachine("state " + std::to_string(q) + " missing a transition");
  m.validate();
  return m;
}

// Graphviz rendering; transitions with equal (target, output) from one state
// are folded into a single edge listing their input letters.
inline std::string to_dot(const MealyMachine& m, const std::string& name = "mealy") {
  auto letter_text = [](const std::vector<std::string>& atoms, uint64_t mask) {
    std::string s;
    for (size_t i = 0; i < atoms.size(); ++i)
      if (mask >> i & 1) s += (s.empty() ? "" : ",") + atoms[i];
    return s.empty() ? std::string("-") : s;
  };
  std::ostringstream os;
  os << "digraph " << name << " {\n  rankdir=LR;\n  node [shape=circle];\n";
  os << "  __init [shape=point];\n  __init -> q" << m.initial << ";\n";
  for (size_t q = 0; q < m.state_count(); ++q) {
    // (target, output mask) -> joined input letters
    std::vector<std::tuple<int, uint64_t, std::string>> edges;
    for (uint64_t k = 0; k < m.env_letters(); ++k) {
      int to = m.delta[q][k];
      uint64_t y = m.out[q][k];
      bool merged = false;
      for (auto& [eto, ey, elabel] : edges)
        if (eto == to && ey == y) {
          elabel += " | " + letter_text(m.inputs, k);
          merged = true;
          break;
        }
      if (!merged) edges.emplace_back(to, y, letter_text(m.inputs, k));
    }
    for (const auto& [to, y, label] : edges)
      os << "  q" << q << " -> q" << to << " [label=\"" << label << " / "
         << letter_text(m.outputs, y) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace moby
