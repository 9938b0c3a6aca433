// Command-line front door for the decomposition pipeline. Subcommands mirror
// the pipeline stages: gen, check, project, synth, compose, verify, plus the
// bench harness and a DOT exporter. Exit codes: 0 for success (legal modes,
// realizable, verification pass), 1 for a negative verdict (overlap report,
// unrealizable, verification fail), 2 for usage or input errors.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "moby/bench.hpp"
#include "moby/composer.hpp"
#include "moby/mealy.hpp"
#include "moby/parse.hpp"
#include "moby/print_tlsf.hpp"
#include "moby/projector.hpp"
#include "moby/synth.hpp"
#include "moby/verifier.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kManifestFormatVersion = 1;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const fs::path& path, const json& doc) {
  write_file(path, doc.dump(2) + "\n");
}

moby::MealyMachine load_machine(const fs::path& path) {
  return moby::machine_from_json(json::parse(read_file(path)));
}

int run_check(const std::string& spec_path, const std::string& modes_path) {
  moby::ReactiveSpec spec = moby::parse_spec(read_file(spec_path));
  moby::ModeDecomposition dec = moby::parse_modes(read_file(modes_path), spec);
  moby::LegalityReport report = moby::check_legality(spec, dec);
  if (!report.ok) {
    std::cerr << report.describe(dec);
    return 1;
  }
  std::cout << "ok: " << dec.modes.size() << " modes, " << dec.relation.size()
            << " jump edges\n";
  return 0;
}

// Writes one projection TLSF per mode plus manifest.json; with --synth also
// solves every projection (worker pool of --jobs threads) and drops the
// machine files next to them. Results are index-addressed, so the artifacts
// are identical for any job count.
int run_project(const std::string& spec_path, const std::string& modes_path,
                const std::string& dir, bool do_synth, int jobs) {
  std::string spec_text = read_file(spec_path);
  std::string modes_text = read_file(modes_path);
  moby::ReactiveSpec spec = moby::parse_spec(spec_text);
  moby::ModeDecomposition dec = moby::parse_modes(modes_text, spec);
  moby::LegalityReport report = moby::check_legality(spec, dec);
  if (!report.ok) {
    std::cerr << report.describe(dec);
    return 1;
  }
  std::vector<moby::Projection> projections = moby::compute_projections(spec, dec);

  fs::create_directories(dir);
  write_file(fs::path(dir) / "original.tlsf", spec_text);
  write_file(fs::path(dir) / "modes.txt", modes_text);

  moby::StartChoice start = moby::pick_start_mode(spec, dec);
  if (!start.confident)
    std::cerr << "warning: PRESET does not land in any mode's init; starting in '"
              << dec.modes[start.index].name << "'\n";

  json manifest;
  manifest["format"] = "moby-manifest";
  manifest["version"] = kManifestFormatVersion;
  manifest["original"] = "original.tlsf";
  manifest["modes_source"] = "modes.txt";
  manifest["start_mode"] = dec.modes[start.index].name;
  manifest["start_confident"] = start.confident;
  json mode_entries = json::array();
  for (const moby::Projection& proj : projections) {
    write_file(fs::path(dir) / (proj.mode_name + ".tlsf"), moby::emit_tlsf(proj.spec));
    json entry;
    entry["name"] = proj.mode_name;
    entry["tlsf"] = proj.mode_name + ".tlsf";
    entry["machine"] = proj.mode_name + ".machine.json";
    json jumps = json::object();
    for (const auto& [atom, target] : proj.jump_targets)
      jumps[atom] = dec.modes[target].name;
    entry["jumps"] = jumps;
    json fresh = json::array();
    for (const std::string& o : proj.spec.outputs)
      if (!spec.is_output(o)) fresh.push_back(o);
    entry["fresh"] = fresh;
    mode_entries.push_back(std::move(entry));
  }
  manifest["modes"] = std::move(mode_entries);
  json relation = json::array();
  for (auto [a, b] : dec.relation)
    relation.push_back({dec.modes[a].name, dec.modes[b].name});
  manifest["relation"] = std::move(relation);
  write_json(fs::path(dir) / "manifest.json", manifest);
  std::cout << projections.size() << " projections -> " << dir << "\n";
  if (!do_synth) return 0;

  struct Slot {
    std::string verdict = "error";
    std::optional<moby::MealyMachine> machine;
  };
  std::vector<Slot> slots(projections.size());
  size_t width = static_cast<size_t>(std::max(jobs, 1));
  for (size_t base = 0; base < slots.size(); base += width) {
    std::vector<std::thread> pool;
    for (size_t i = base; i < std::min(base + width, slots.size()); ++i) {
      pool.emplace_back([&projections, &slots, i] {
        try {
          moby::SynthResult r = moby::synthesize(projections[i].spec);
          slots[i].verdict = r.realizable ? "realizable" : "unrealizable";
          slots[i].machine = std::move(r.machine);
        } catch (const moby::ArenaTooLarge&) {
          slots[i].verdict = "budget";
        } catch (const std::exception& e) {
          slots[i].verdict = std::string("error: ") + e.what();
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  bool all_realizable = true;
  for (size_t i = 0; i < slots.size(); ++i) {
    std::cout << projections[i].mode_name << ": " << slots[i].verdict;
    if (slots[i].machine) {
      write_json(fs::path(dir) / (projections[i].mode_name + ".machine.json"),
                 moby::to_json(*slots[i].machine));
      std::cout << " (" << slots[i].machine->state_count() << " states)";
    } else {
      all_realizable = false;
    }
    std::cout << "\n";
  }
  return all_realizable ? 0 : 1;
}

int run_synth(const std::string& spec_path, const std::string& out_path) {
  moby::ReactiveSpec spec = moby::parse_spec(read_file(spec_path));
  moby::SynthResult r = moby::synthesize(spec);
  std::cerr << "arena: " << r.stats.arena_states << " states, " << r.stats.letters
            << " letters, " << r.stats.iterations << " iterations\n";
  if (!r.realizable) {
    std::cout << "unrealizable\n";
    return 1;
  }
  std::cout << "realizable: " << r.machine->state_count() << " states\n";
  if (!out_path.empty()) write_json(out_path, moby::to_json(*r.machine));
  return 0;
}

int run_compose(const std::string& dir, const std::string& out_path) {
  json manifest = json::parse(read_file(fs::path(dir) / "manifest.json"));
  if (!manifest.is_object() || manifest.value("format", "") != "moby-manifest")
    throw std::runtime_error("'" + dir + "/manifest.json' is not a moby-manifest");
  if (manifest.value("version", 0) != kManifestFormatVersion)
    throw std::runtime_error("unsupported manifest version");

  moby::ReactiveSpec spec = moby::parse_spec(
      read_file(fs::path(dir) / manifest.at("original").get<std::string>()));

  std::map<std::string, int> index_of;
  for (const json& entry : manifest.at("modes"))
    index_of.emplace(entry.at("name").get<std::string>(),
                     static_cast<int>(index_of.size()));

  std::vector<moby::CompositionInput> parts;
  for (const json& entry : manifest.at("modes")) {
    std::string name = entry.at("name").get<std::string>();
    fs::path machine_path = fs::path(dir) / entry.at("machine").get<std::string>();
    if (!fs::exists(machine_path))
      throw std::runtime_error("no machine for mode '" + name + "'; run `moby synth " +
                               (fs::path(dir) / entry.at("tlsf").get<std::string>()).string() +
                               " -o " + machine_path.string() + "` first");
    moby::CompositionInput part;
    part.machine = load_machine(machine_path);
    for (const auto& [atom, target] : entry.at("jumps").items()) {
      auto it = index_of.find(target.get<std::string>());
      if (it == index_of.end())
        throw moby::UnknownTargetMode("jump target '" + target.get<std::string>() +
                                      "' is not a manifest mode");
      part.jump_targets[atom] = it->second;
    }
    parts.push_back(std::move(part));
  }

  auto start = index_of.find(manifest.at("start_mode").get<std::string>());
  if (start == index_of.end())
    throw std::runtime_error("start mode is not a manifest mode");
  moby::MealyMachine composed = moby::compose(spec, parts, start->second);
  write_json(out_path, moby::to_json(composed));
  std::cout << "composed: " << composed.state_count() << " states -> " << out_path
            << "\n";
  return 0;
}

int run_verify(const std::string& machine_path, const std::string& spec_path,
               const std::string& cex_path) {
  moby::MealyMachine machine = load_machine(machine_path);
  moby::ReactiveSpec spec = moby::parse_spec(read_file(spec_path));
  moby::VerifyReport report = moby::product_check(spec, machine);
  if (report.ok) {
    std::cout << "pass: " << report.configurations << " configurations\n";
    return 0;
  }
  json cex;
  cex["verdict"] = "fail";
  cex["item"] = report.counterexample->item;
  cex["position"] = report.counterexample->position;
  cex["trace"] = report.counterexample->trace;
  std::cout << cex.dump(2) << "\n";
  if (!cex_path.empty()) write_json(cex_path, cex);
  return 1;
}

int run_bench(const std::string& family, const std::vector<int>& params,
              double timeout, int jobs, bool csv) {
  std::vector<moby::BenchCase> cases;
  if (family == "cm") {
    if (params.empty() || params.size() > 2)
      throw std::runtime_error("usage: moby bench cm <N> [k]");
    int n = params[0];
    int k_lo = params.size() == 2 ? params[1] : 2;
    int k_hi = params.size() == 2 ? params[1] : n + 1;
    for (int k = k_lo; k <= k_hi; ++k) {
      auto [spec_text, modes_text] = moby::gen_counter_machine(n, k);
      cases.push_back({"cm" + std::to_string(n) + "_k" + std::to_string(k),
                       std::move(spec_text), std::move(modes_text)});
    }
  } else {
    if (params.size() != 1)
      throw std::runtime_error("usage: moby bench " + family + " <n>");
    auto [spec_text, modes_text] = moby::gen_toy_families(family, params[0]);
    cases.push_back({family + "_" + std::to_string(params[0]), std::move(spec_text),
                     std::move(modes_text)});
  }
  moby::BenchOptions opt;
  opt.timeout_seconds = timeout;
  opt.jobs = jobs;
  moby::BenchReport report = moby::run_bench(cases, opt);
  std::cout << (csv ? moby::to_csv(report) : moby::to_markdown(report));
  return 0;
}

int run_gen(const std::string& family, const std::vector<int>& params,
            std::string stem) {
  std::pair<std::string, std::string> text;
  if (family == "cm") {
    if (params.size() != 2) throw std::runtime_error("usage: moby gen cm <N> <k>");
    text = moby::gen_counter_machine(params[0], params[1]);
    if (stem.empty())
      stem = "cm" + std::to_string(params[0]) + "_k" + std::to_string(params[1]);
  } else {
    if (params.size() != 1)
      throw std::runtime_error("usage: moby gen " + family + " <n>");
    text = moby::gen_toy_families(family, params[0]);
    if (stem.empty()) stem = family + "_" + std::to_string(params[0]);
  }
  write_file(stem + ".tlsf", text.first);
  write_file(stem + ".modes", text.second);
  std::cout << stem << ".tlsf\n" << stem << ".modes\n";
  return 0;
}

int run_export_dot(const std::string& machine_path) {
  std::cout << moby::to_dot(load_machine(machine_path));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mode decomposition toolchain for safety specifications"};
  app.require_subcommand(1);
  int rc = 0;

  std::string spec_path, modes_path, machine_path, dir, out_path, cex_path;
  std::string family, stem;
  std::vector<int> params;
  bool do_synth = false, csv = false;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  double timeout = 60.0;

  CLI::App* check = app.add_subcommand("check", "parse a spec + modes file and report legality");
  check->add_option("spec", spec_path, "TLSF specification")->required();
  check->add_option("modes", modes_path, "mode description file")->required();
  check->callback([&] { rc = run_check(spec_path, modes_path); });

  CLI::App* project = app.add_subcommand("project", "write per-mode projections and a manifest");
  project->add_option("spec", spec_path, "TLSF specification")->required();
  project->add_option("modes", modes_path, "mode description file")->required();
  project->add_option("-o,--output", dir, "output directory")->required();
  project->add_flag("--synth", do_synth, "also synthesize every projection");
  project->add_option("--jobs", jobs, "parallel synthesis workers");
  project->callback([&] { rc = run_project(spec_path, modes_path, dir, do_synth, jobs); });

  CLI::App* synth = app.add_subcommand("synth", "decide realizability, extract a machine");
  synth->add_option("spec", spec_path, "TLSF specification or projection")->required();
  synth->add_option("-o,--output", out_path, "machine JSON path");
  synth->callback([&] { rc = run_synth(spec_path, out_path); });

  CLI::App* compose = app.add_subcommand("compose", "stitch per-mode machines into one");
  compose->add_option("dir", dir, "projection directory with manifest.json")->required();
  compose->add_option("-o,--output", out_path, "composed machine JSON path")->required();
  compose->callback([&] { rc = run_compose(dir, out_path); });

  CLI::App* verify = app.add_subcommand("verify", "model-check a machine against a spec");
  verify->add_option("machine", machine_path, "machine JSON")->required();
  verify->add_option("spec", spec_path, "TLSF specification")->required();
  verify->add_option("-o,--output", cex_path, "counterexample JSON path");
  verify->callback([&] { rc = run_verify(machine_path, spec_path, cex_path); });

  CLI::App* bench = app.add_subcommand("bench", "run a generated family end to end");
  bench->add_option("family", family, "cm | toy_thermostat | toy_lift")->required();
  bench->add_option("params", params, "family parameters (cm: N [k]; toys: n)");
  bench->add_option("--timeout", timeout, "per-synthesis timeout in seconds");
  bench->add_option("--jobs", jobs, "parallel projection workers");
  bench->add_flag("--csv", csv, "emit CSV instead of a markdown table");
  bench->callback([&] { rc = run_bench(family, params, timeout, jobs, csv); });

  CLI::App* gen = app.add_subcommand("gen", "write a generated spec + modes file pair");
  gen->add_option("family", family, "cm | toy_thermostat | toy_lift")->required();
  gen->add_option("params", params, "family parameters (cm: N k; toys: n)");
  gen->add_option("-o,--output", stem, "output basename");
  gen->callback([&] { rc = run_gen(family, params, stem); });

  CLI::App* export_dot = app.add_subcommand("export-dot", "print a machine as Graphviz DOT");
  export_dot->add_option("machine", machine_path, "machine JSON")->required();
  export_dot->callback([&] { rc = run_export_dot(machine_path); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
