#pragma once

// Parametric benchmark generators, specification-size metrics, and the
// monolithic-versus-decomposed comparison runner. Generators emit the same
// text formats the frontend parses, deterministically: identical parameters
// give byte-identical output.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "moby/composer.hpp"
#include "moby/parse.hpp"
#include "moby/projector.hpp"
#include "moby/spec.hpp"
#include "moby/synth.hpp"
#include "moby/verifier.hpp"

namespace moby {

struct InvalidGroupCount : std::runtime_error {
  explicit InvalidGroupCount(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownFamily : std::runtime_error {
  explicit UnknownFamily(const std::string& what) : std::runtime_error(what) {}
};

struct SizeMetrics {
  size_t clause_count = 0;  // assumption and guarantee items after expansion
  size_t length = 0;        // AST nodes across initially/preset/assumptions/guarantees
};

inline SizeMetrics measure(const ReactiveSpec& s) {
  SizeMetrics m;
  m.clause_count = s.assumptions.size() + s.guarantees.size();
  if (s.initially) m.length += s.initially->size();
  if (s.preset) m.length += s.preset->size();
  for (const auto& f : s.assumptions) m.length += f.size();
  for (const auto& f : s.guarantees) m.length += f.size();
  return m;
}

namespace detail {

// Consecutive counter values 0..total-1 split into k near-equal groups,
// earlier groups taking the remainder.
inline std::vector<std::pair<int, int>> value_groups(int total, int k) {
  std::vector<std::pair<int, int>> groups;  // [first, last] inclusive
  int base = total / k, rem = total % k, next = 0;
  for (int g = 0; g < k; ++g) {
    int size = base + (g < rem ? 1 : 0);
    groups.emplace_back(next, next + size - 1);
    next += size;
  }
  return groups;
}

}  // namespace detail

// Counter over values 0..N that advances on start pulses, returns to zero on
// reset, and pulses trigger at the top; modes group consecutive values.
inline std::pair<std::string, std::string> gen_counter_machine(int n, int k) {
  if (n < 1) throw InvalidGroupCount("counter machine needs N >= 1");
  if (k < 1 || k > n + 1)
    throw InvalidGroupCount("group count " + std::to_string(k) +
                            " outside 1.." + std::to_string(n + 1));

  std::string s;
  s += "PARAMETERS { N = " + std::to_string(n) + "; }\n";
  s += "INPUTS { reset; start; }\n";
  s += "OUTPUTS { counter[N+1]; trigger; }\n";
  s += "INITIALLY { !reset && !start; }\n";
  s += "PRESET { counter[0] && (&&[1 <= i <= N] !counter[i]); }\n";
  s += "DEFINITIONS {\n";
  s += "  mutual(b) = G ||[0 <= i <= N] (b[i] && (&&[0 <= j <= N \\ {i}] !b[j]));\n";
  s += "}\n";
  s += "ASSUMPTIONS { G !(reset && start); }\n";
  s += "GUARANTEES {\n";
  s += "  mutual(counter);\n";
  s += "  G (reset -> X counter[0]);\n";
  s += "  G ((counter[0] && start) -> X (counter[1] || reset));\n";
  for (int i = 1; i < n; ++i)
    s += "  G ((counter[" + std::to_string(i) + "] && !reset) -> X (counter[" +
         std::to_string(i + 1) + "] || reset));\n";
  s += "  G (counter[N] -> X counter[0]);\n";
  s += "  G (counter[N] -> trigger);\n";
  s += "  G (!counter[N] -> !trigger);\n";
  s += "}\n";

  auto atom = [](int i) { return "counter_" + std::to_string(i); };
  auto groups = detail::value_groups(n + 1, k);
  std::string m;
  for (int g = 0; g < k; ++g) {
    auto [lo, hi] = groups[g];
    std::string members;
    for (int i = lo; i <= hi; ++i) members += (i > lo ? " || " : "") + atom(i);
    if (hi > lo) members = "(" + members + ")";
    std::string pred = members, init = atom(lo);
    for (int i = 0; i <= n; ++i) {
      if (i < lo || i > hi) pred += " && !" + atom(i);
      if (i != lo) init += " && !" + atom(i);
    }
    m += "MODE m" + std::to_string(g + 1) + " { pred = " + pred +
         "; init = " + init + "; }\n";
  }
  m += "RELATION {";
  for (int g = 1; g <= k; ++g) {
    if (g < k) m += " m" + std::to_string(g) + " -> m" + std::to_string(g + 1) + ";";
    if (g > 1) m += " m" + std::to_string(g) + " -> m1;";
  }
  m += " }\n";
  return {s, m};
}

namespace detail {

// Exactly-one disjunction over the given output atoms, each disjunct listing
// the positive atom first and the negated rest in declaration order.
inline std::string exactly_one(const std::vector<std::string>& atoms) {
  std::string r;
  for (size_t i = 0; i < atoms.size(); ++i) {
    std::string d = atoms[i];
    for (size_t j = 0; j < atoms.size(); ++j)
      if (j != i) d += " && !" + atoms[j];
    r += (i ? " || " : "") + ("(" + d + ")");
  }
  return r;
}

inline std::string all_but(const std::string& keep, const std::vector<std::string>& atoms) {
  std::string r = keep;
  for (const auto& a : atoms)
    if (a != keep) r += " && !" + a;
  return r;
}

inline std::pair<std::string, std::string> gen_toy_thermostat(int n) {
  std::vector<std::string> states{"idle"};
  for (int i = 0; i < n; ++i) states.push_back("heat_" + std::to_string(i));
  states.push_back("cool");
  auto heat = [](int i) { return "heat_" + std::to_string(i); };

  std::string s;
  s += "INPUTS { too_hot; too_cold; }\n";
  s += "OUTPUTS { idle; heat[" + std::to_string(n) + "]; cool; }\n";
  s += "INITIALLY { !too_hot && !too_cold; }\n";
  s += "PRESET { " + all_but("idle", states) + "; }\n";
  s += "ASSUMPTIONS { G !(too_hot && too_cold); }\n";
  s += "GUARANTEES {\n";
  s += "  G (" + exactly_one(states) + ");\n";
  s += "  G ((idle && too_cold) -> X heat_0);\n";
  s += "  G ((idle && too_hot) -> X cool);\n";
  for (int i = 0; i < n; ++i) {
    s += "  G ((" + heat(i) + " && too_cold) -> X " + heat(std::min(i + 1, n - 1)) +
         ");\n";
    s += "  G ((" + heat(i) + " && !too_cold) -> X idle);\n";
  }
  s += "  G ((cool && too_hot) -> X cool);\n";
  s += "  G ((cool && !too_hot) -> X idle);\n";
  s += "}\n";

  std::string heat_region;
  for (int i = 0; i < n; ++i) heat_region += (i ? " || " : "") + heat(i);
  if (n > 1) heat_region = "(" + heat_region + ")";
  heat_region += " && !idle && !cool";

  std::string m;
  m += "MODE standby { pred = " + all_but("idle", states) +
       "; init = " + all_but("idle", states) + "; }\n";
  m += "MODE heating { pred = " + heat_region + "; init = " + all_but(heat(0), states) +
       "; }\n";
  m += "MODE cooling { pred = " + all_but("cool", states) +
       "; init = " + all_but("cool", states) + "; }\n";
  return {s, m};
}

inline std::pair<std::string, std::string> gen_toy_lift(int n) {
  int floors = n + 2;
  std::vector<std::string> ats;
  for (int i = 0; i < floors; ++i) ats.push_back("at_" + std::to_string(i));
  const std::string top = ats.back();

  std::string s;
  s += "INPUTS { up; down; }\n";
  s += "OUTPUTS { at[" + std::to_string(floors) + "]; ding; }\n";
  s += "INITIALLY { !up && !down; }\n";
  s += "PRESET { " + all_but(ats[0], ats) + "; }\n";
  s += "ASSUMPTIONS { G !(up && down); }\n";
  s += "GUARANTEES {\n";
  s += "  G (" + exactly_one(ats) + ");\n";
  for (int i = 0; i < floors; ++i) {
    // The cab climbs floor by floor; from the top, down is an express drop
    // back to the ground station, so every mode is entered at its own
    // initial floor.
    int down_to = i == floors - 1 ? 0 : std::max(i - 1, 0);
    s += "  G ((" + ats[i] + " && up) -> X " + ats[std::min(i + 1, floors - 1)] + ");\n";
    s += "  G ((" + ats[i] + " && down) -> X " + ats[down_to] + ");\n";
    s += "  G ((" + ats[i] + " && !up && !down) -> X " + ats[i] + ");\n";
  }
  s += "  G (" + top + " -> ding);\n";
  s += "  G (!" + top + " -> !ding);\n";
  s += "}\n";

  std::string shaft;
  for (int i = 1; i <= n; ++i) shaft += (i > 1 ? " || " : "") + ats[i];
  if (n > 1) shaft = "(" + shaft + ")";
  shaft += " && !" + ats[0] + " && !" + top;

  std::string m;
  m += "MODE ground { pred = " + all_but(ats[0], ats) + "; init = " +
       all_but(ats[0], ats) + "; }\n";
  m += "MODE shaft { pred = " + shaft + "; init = " + all_but(ats[1], ats) + "; }\n";
  m += "MODE top { pred = " + all_but(top, ats) + "; init = " + all_but(top, ats) +
       "; }\n";
  m += "RELATION { ground -> shaft; shaft -> ground; shaft -> top; top -> ground; }\n";
  return {s, m};
}

}  // namespace detail

// Small three-mode families for pipeline exercises; not tied to any external
// case study.
inline std::pair<std::string, std::string> gen_toy_families(const std::string& name,
                                                            int n) {
  if (n < 1) throw UnknownFamily("family parameter must be >= 1");
  if (name == "toy_thermostat") return detail::gen_toy_thermostat(n);
  if (name == "toy_lift") return detail::gen_toy_lift(n);
  throw UnknownFamily("unknown benchmark family '" + name + "'");
}

struct BenchCase {
  std::string name;
  std::string spec_text;
  std::string modes_text;
};

struct ProjectionRow {
  std::string mode;
  std::string verdict;  // realizable | unrealizable | timeout | budget | error
  double seconds = 0.0;
  SizeMetrics size;
};

struct BenchRow {
  std::string name;
  int modes = 0;
  std::string monolithic_verdict;
  double monolithic_seconds = 0.0;
  SizeMetrics monolithic_size;
  std::vector<ProjectionRow> projections;
  // Aggregate decomposed time under both readings: max of the projection
  // times (parallel workers) and their sum (sequential).
  double decomposed_parallel = 0.0;
  double decomposed_sequential = 0.0;
  SizeMetrics max_projection_size;
  std::string verification;  // pass | fail | skipped | error
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

struct BenchOptions {
  double timeout_seconds = 60.0;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int budget_exponent = arena_budget_exponent();
};

namespace detail {

struct TaskOutcome {
  std::string verdict;
  double seconds = 0.0;
  std::optional<MealyMachine> machine;
};

inline TaskOutcome timed_synthesis(const ReactiveSpec& spec, const BenchOptions& opt) {
  TaskOutcome out;
  SynthOptions sopt;
  sopt.budget_exponent = opt.budget_exponent;
  sopt.deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(opt.timeout_seconds));
  auto t0 = std::chrono::steady_clock::now();
  try {
    SynthResult r = synthesize(spec, sopt);
    out.verdict = r.realizable ? "realizable" : "unrealizable";
    out.machine = std::move(r.machine);
  } catch (const TimedOut&) {
    out.verdict = "timeout";
  } catch (const ArenaTooLarge&) {
    out.verdict = "budget";
  } catch (const std::exception&) {
    out.verdict = "error";
  }
  out.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace detail

inline BenchReport run_bench(const std::vector<BenchCase>& cases,
                             const BenchOptions& opt = {}) {
  BenchReport report;
  for (const auto& c : cases) {
    BenchRow row;
    row.name = c.name;
    ReactiveSpec spec = parse_spec(c.spec_text);
    ModeDecomposition dec = parse_modes(c.modes_text, spec);
    row.modes = static_cast<int>(dec.modes.size());
    row.monolithic_size = measure(spec);

    detail::TaskOutcome mono = detail::timed_synthesis(spec, opt);
    row.monolithic_verdict = mono.verdict;
    row.monolithic_seconds = mono.seconds;

    auto projections = compute_projections(spec, dec);
    std::vector<detail::TaskOutcome> outcomes(projections.size());
    int jobs = std::max(1, opt.jobs);
    for (size_t base = 0; base < projections.size(); base += jobs) {
      std::vector<std::thread> batch;
      size_t hi = std::min(projections.size(), base + jobs);
      for (size_t i = base; i < hi; ++i)
        batch.emplace_back([&, i] {
          outcomes[i] = detail::timed_synthesis(projections[i].spec, opt);
        });
      for (auto& t : batch) t.join();
    }

    bool all_realizable = !projections.empty();
    for (size_t i = 0; i < projections.size(); ++i) {
      ProjectionRow pr;
      pr.mode = projections[i].mode_name;
      pr.verdict = outcomes[i].verdict;
      pr.seconds = outcomes[i].seconds;
      pr.size = measure(projections[i].spec);
      row.decomposed_parallel = std::max(row.decomposed_parallel, pr.seconds);
      row.decomposed_sequential += pr.seconds;
      row.max_projection_size.clause_count =
          std::max(row.max_projection_size.clause_count, pr.size.clause_count);
      row.max_projection_size.length =
          std::max(row.max_projection_size.length, pr.size.length);
      all_realizable &= pr.verdict == "realizable";
      row.projections.push_back(std::move(pr));
    }

    if (!all_realizable) {
      row.verification = "skipped";
    } else {
      try {
        std::vector<CompositionInput> parts;
        for (size_t i = 0; i < projections.size(); ++i)
          parts.push_back({*outcomes[i].machine, projections[i].jump_targets});
        MealyMachine composed = compose(spec, parts, pick_start_mode(spec, dec).index);
        row.verification = product_check(spec, composed).ok ? "pass" : "fail";
      } catch (const std::exception&) {
        row.verification = "error";
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

namespace detail {

inline std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", s);
  return buf;
}

inline std::string joined_verdicts(const BenchRow& row) {
  std::string r;
  for (size_t i = 0; i < row.projections.size(); ++i)
    r += (i ? "|" : "") + row.projections[i].verdict;
  return r;
}

}  // namespace detail

inline std::string to_csv(const BenchReport& report) {
  std::string out =
      "case,modes,monolithic_verdict,monolithic_seconds,monolithic_clauses,"
      "monolithic_length,decomposed_parallel_seconds,decomposed_sequential_seconds,"
      "max_projection_clauses,max_projection_length,projection_verdicts,verification\n";
  for (const auto& r : report.rows) {
    out += r.name + "," + std::to_string(r.modes) + "," + r.monolithic_verdict + "," +
           detail::fmt_seconds(r.monolithic_seconds) + "," +
           std::to_string(r.monolithic_size.clause_count) + "," +
           std::to_string(r.monolithic_size.length) + "," +
           detail::fmt_seconds(r.decomposed_parallel) + "," +
           detail::fmt_seconds(r.decomposed_sequential) + "," +
           std::to_string(r.max_projection_size.clause_count) + "," +
           std::to_string(r.max_projection_size.length) + "," +
           detail::joined_verdicts(r) + "," + r.verification + "\n";
  }
  return out;
}

inline std::string to_markdown(const BenchReport& report) {
  std::string out =
      "| Case | Modes | Monolithic | Mono s | Mono #cl | Mono len "
      "| Dec max s | Dec sum s | Proj #cl | Proj len | Projections | Verified |\n"
      "|---|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : report.rows) {
    out += "| " + r.name + " | " + std::to_string(r.modes) + " | " +
           r.monolithic_verdict + " | " + detail::fmt_seconds(r.monolithic_seconds) +
           " | " + std::to_string(r.monolithic_size.clause_count) + " | " +
           std::to_string(r.monolithic_size.length) + " | " +
           detail::fmt_seconds(r.decomposed_parallel) + " | " +
           detail::fmt_seconds(r.decomposed_sequential) + " | " +
           std::to_string(r.max_projection_size.clause_count) + " | " +
           std::to_string(r.max_projection_size.length) + " | " +
           detail::joined_verdicts(r) + " | " + r.verification + " |\n";
  }
  return out;
}

}  // namespace moby
