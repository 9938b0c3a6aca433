#pragma once

// Renders a ReactiveSpec back to concrete TLSF-subset syntax. Buses, indexed
// operators, parameters and macros were expanded at parse time, so the output
// is fully scalar; parse_spec(emit_tlsf(s)) == s up to that expansion.

#include <sstream>
#include <string>

#include "moby/formula.hpp"
#include "moby/spec.hpp"

namespace moby {

inline std::string emit_tlsf(const ReactiveSpec& spec) {
  std::ostringstream os;

  auto atom_section = [&](const char* name, const std::vector<std::string>& atoms) {
    if (atoms.empty()) return;
    os << name << " {\n";
    for (const auto& a : atoms) os << "  " << a << ";\n";
    os << "}\n\n";
  };
  atom_section("INPUTS", spec.inputs);
  atom_section("OUTPUTS", spec.outputs);

  auto state_section = [&](const char* name, const std::optional<Formula>& f) {
    if (!f) return;
    os << name << " {\n  " << f->str() << ";\n}\n\n";
  };
  state_section("INITIALLY", spec.initially);
  state_section("PRESET", spec.preset);

  auto invariant_section = [&](const char* name, const std::vector<Formula>& items) {
    if (items.empty()) return;
    os << name << " {\n";
    for (const auto& f : items) os << "  G (" << f.str() << ");\n";
    os << "}\n\n";
  };
  invariant_section("ASSUMPTIONS", spec.assumptions);
  invariant_section("GUARANTEES", spec.guarantees);

  return os.str();
}

inline std::string emit_modes(const ModeDecomposition& dec) {
  std::ostringstream os;
  for (const auto& m : dec.modes) {
    os << "MODE " << m.name << " {\n";
    os << "  pred = " << m.pred.str() << ";\n";
    os << "  init = " << m.init.str() << ";\n";
    if (!m.arrival.is_true()) os << "  arrival = " << m.arrival.str() << ";\n";
    os << "}\n\n";
  }
  if (!dec.relation.empty()) {
    os << "RELATION {\n";
    for (const auto& [from, to] : dec.relation)
      os << "  " << dec.modes[from].name << " -> " << dec.modes[to].name << ";\n";
    os << "}\n";
  }
  return os.str();
}

}  // namespace moby
