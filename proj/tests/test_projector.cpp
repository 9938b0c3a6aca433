#include <string>
#include <vector>

#include "doctest.h"
#include "moby/parse.hpp"
#include "moby/projector.hpp"
#include "test_helpers.hpp"

using namespace moby;

namespace {

Formula out_formula(const std::string& text) {
  ReactiveSpec s =
      parse_spec("INPUTS { reset; start; } OUTPUTS { counter[3]; trigger; } "
                 "GUARANTEES { G (" + text + "); }");
  return s.guarantees[0];
}

std::vector<std::string> strs(const std::vector<Formula>& fs) {
  std::vector<std::string> out;
  for (const auto& f : fs) out.push_back(f.str());
  return out;
}

struct Cm2 {
  ReactiveSpec spec;
  ModeDecomposition modes;
  Cm2()
      : spec(parse_spec(testutil::cm_spec_text(2))),
        modes(parse_modes(testutil::cm2_modes_text(), spec)) {}
};

}  // namespace

TEST_CASE("legality: counter machine modes partition the invariant space") {
  Cm2 cm;
  LegalityReport r = check_legality(cm.spec, cm.modes);
  CHECK(r.ok);
  CHECK(r.describe(cm.modes) == "ok");

  // Without the mutual-exclusion invariant the disjunction of predicates is
  // not valid on its own (the all-false valuation escapes it).
  std::vector<Formula> preds;
  for (const auto& m : cm.modes.modes) preds.push_back(m.pred);
  CHECK(!is_valid(Formula::disj_all(preds)));
}

TEST_CASE("legality: overlap, incompleteness, bad init are reported") {
  ReactiveSpec s = parse_spec("OUTPUTS { p; q; } GUARANTEES { G (p || q); }");

  SUBCASE("overlapping predicates") {
    ModeDecomposition d =
        parse_modes("MODE a { pred = p; init = p; } "
                    "MODE b { pred = p && q; init = p && q; }", s);
    LegalityReport r = check_legality(s, d);
    CHECK(!r.ok);
    REQUIRE(r.overlapping.size() == 1);
    CHECK(r.overlapping[0] == std::pair<int, int>{0, 1});
  }

  SUBCASE("incomplete cover yields a concrete witness") {
    // p, !p&&q leave !p&&!q uncovered, and G(p||q) does not exclude it when
    // the spec drops that guarantee.
    ReactiveSpec loose = parse_spec("OUTPUTS { p; q; }");
    ModeDecomposition d =
        parse_modes("MODE a { pred = p; init = p; } "
                    "MODE b { pred = !p && q; init = !p && q; }", loose);
    LegalityReport r = check_legality(loose, d);
    CHECK(!r.ok);
    REQUIRE(r.completeness_witness.has_value());
    const Letter& w = *r.completeness_witness;
    CHECK(w.count("p") == 0);
    CHECK(w.count("q") == 0);
  }

  SUBCASE("stateless guarantees narrow the completeness obligation") {
    // Same modes are complete relative to G(p || q).
    ModeDecomposition d =
        parse_modes("MODE a { pred = p; init = p; } "
                    "MODE b { pred = !p && q; init = !p && q; }", s);
    LegalityReport r = check_legality(s, d);
    CHECK(!r.completeness_witness.has_value());
  }

  SUBCASE("init must imply the predicate") {
    ModeDecomposition d =
        parse_modes("MODE a { pred = p; init = q; } "
                    "MODE b { pred = !p; init = !p; }", s);
    LegalityReport r = check_legality(s, d);
    CHECK(!r.ok);
    CHECK(r.init_violations == std::vector<int>{0});
    CHECK(r.describe(d).find("initial condition of a") != std::string::npos);
  }
}

TEST_CASE("rm_modes specializes formulas for a mode") {
  Formula m = out_formula("counter_1 && !counter_2");

  // A stateless item decided by the mode collapses to its open part.
  CHECK(rm_modes(out_formula("!counter_2 -> !trigger"), m) ==
        out_formula("!trigger"));

  // The mode settles the antecedent's counter conjunct but not the input.
  CHECK(rm_modes(out_formula("(counter_1 && !reset) -> X (counter_2 || reset)"), m) ==
        out_formula("!reset -> X (counter_2 || reset)"));

  // A mode-false antecedent drops the whole item.
  CHECK(rm_modes(out_formula("(counter_2 && start) -> trigger"), m).is_true());

  // Undecidable parts survive untouched; decided antecedents vanish.
  Formula m3 = out_formula("counter_2 && !counter_0 && !counter_1");
  CHECK(rm_modes(out_formula("counter_2 -> X counter_0"), m3) ==
        out_formula("X counter_0"));
  CHECK(rm_modes(out_formula("counter_2 -> trigger"), m3) ==
        out_formula("trigger"));
}

TEST_CASE("rm_modes restricted equivalence, exhaustively over small shapes") {
  // All 16 Boolean functions over {p,q} as mode candidates, every satisfiable
  // one against sampled formulas, every 2-letter trace whose first letter
  // satisfies the mode.
  std::vector<std::string> atoms{"p", "q"};
  std::vector<Letter> letters{{}, {"p"}, {"q"}, {"p", "q"}};
  std::vector<Formula> minterms;
  for (const auto& l : letters) {
    Formula t = Formula::tt();
    for (const auto& a : atoms) {
      Formula lit = l.count(a) ? Formula::atom(a)
                               : Formula::neg(Formula::atom(a));
      t = Formula::conj(t, lit);
    }
    minterms.push_back(simpl(t));
  }

  std::mt19937 rng(99);
  for (int fi = 0; fi < 120; ++fi) {
    Formula phi = testutil::random_formula(rng, atoms, 7, 1);
    for (unsigned mask = 1; mask < 16; ++mask) {
      std::vector<Formula> parts;
      for (int b = 0; b < 4; ++b)
        if (mask & (1u << b)) parts.push_back(minterms[b]);
      Formula m = Formula::disj_all(parts);
      Formula reduced = rm_modes(phi, m);
      for (const auto& l0 : letters) {
        if (!eval_at(m, {l0}, 0)) continue;
        for (const auto& l1 : letters) {
          Trace t{l0, l1};
          CHECK(eval_at(phi, t, 0) == eval_at(reduced, t, 0));
        }
      }
    }
  }
}

TEST_CASE("reduce drops settled items and flags contradictions") {
  Cm2 cm;
  Formula m1 = cm.modes.modes[0].pred;

  std::vector<Formula> g1 = reduce(cm.spec.guarantees, m1);
  CHECK(strs(g1) == std::vector<std::string>{
                        "reset -> X counter_0",
                        "start -> X (counter_1 || reset)",
                        "!trigger",
                    });

  std::vector<Formula> g3 = reduce(cm.spec.guarantees, cm.modes.modes[2].pred);
  CHECK(strs(g3) == std::vector<std::string>{
                        "reset -> X counter_0",
                        "X counter_0",
                        "trigger",
                    });

  CHECK(reduce({out_formula("counter_0 || !counter_0")}, m1).empty());

  std::vector<Formula> bad{out_formula("trigger"),
                           out_formula("counter_0 -> counter_1")};
  try {
    reduce(bad, m1);
    FAIL("expected InconsistentMode");
  } catch (const InconsistentMode& e) {
    CHECK(e.item_index == 1);
  }
}

TEST_CASE("counter machine projections match the hand-derived golden") {
  Cm2 cm;
  REQUIRE(check_legality(cm.spec, cm.modes).ok);
  std::vector<Projection> ps = compute_projections(cm.spec, cm.modes);
  REQUIRE(ps.size() == 3);

  const Projection& p1 = ps[0];
  CHECK(p1.mode_name == "m1");
  CHECK(strs(p1.spec.guarantees) == std::vector<std::string>{
      "!done -> counter_0 && !counter_1",
      "!done -> !reset || s_X_counter_0",
      "!done -> !start || (s_X_counter_1 || s_X_reset)",
      "!done -> !trigger",
      "!done && s_X_counter_0 -> X counter_0",
      "!done && s_X_counter_1 -> X counter_1",
      "!done && s_X_reset -> X reset",
      "jump_2 -> !s_X_counter_0",
      "jump_2 -> !s_X_reset",
      "done -> X done",
      "jump_2 -> X done",
      "!jump_2 -> !done -> X !done",
  });
  CHECK(p1.spec.outputs == std::vector<std::string>{
      "counter_0", "counter_1", "trigger", "s_X_counter_0", "s_X_counter_1",
      "s_X_reset", "jump_2", "done"});
  CHECK(p1.spec.inputs == cm.spec.inputs);
  REQUIRE(p1.spec.preset.has_value());
  CHECK(p1.spec.preset->str() == "counter_0 && !counter_1 && !done");
  CHECK(!p1.spec.initially.has_value());
  REQUIRE(p1.spec.assumptions.size() == 1);
  CHECK(p1.spec.assumptions[0] == cm.spec.assumptions[0]);
  CHECK(p1.jump_targets == std::map<std::string, int>{{"jump_2", 1}});
  CHECK(strs(p1.obligations) == std::vector<std::string>{
      "X counter_0", "X counter_1", "X reset"});

  const Projection& p2 = ps[1];
  CHECK(strs(p2.spec.guarantees) == std::vector<std::string>{
      "!done -> counter_1 && !counter_0 && !counter_2",
      "!done -> !reset || s_X_counter_0",
      "!done -> reset || (s_X_counter_2 || s_X_reset)",
      "!done -> !trigger",
      "!done && s_X_counter_0 -> X counter_0",
      "!done && s_X_counter_2 -> X counter_2",
      "!done && s_X_reset -> X reset",
      "jump_1 -> !s_X_counter_2",
      "jump_1 -> !s_X_reset",
      "jump_3 -> !s_X_counter_0",
      "jump_3 -> !s_X_reset",
      "done -> X done",
      "jump_1 || jump_3 -> X done",
      "!(jump_1 || jump_3) -> !done -> X !done",
      "jump_1 -> !jump_3",
  });
  CHECK(p2.spec.outputs == std::vector<std::string>{
      "counter_0", "counter_1", "counter_2", "trigger", "s_X_counter_0",
      "s_X_counter_2", "s_X_reset", "jump_1", "jump_3", "done"});
  CHECK(p2.spec.preset->str() ==
        "counter_1 && !counter_0 && !counter_2 && !done");
  CHECK(p2.jump_targets ==
        std::map<std::string, int>{{"jump_1", 0}, {"jump_3", 2}});

  const Projection& p3 = ps[2];
  CHECK(strs(p3.spec.guarantees) == std::vector<std::string>{
      "!done -> counter_2 && !counter_0",
      "!done -> !reset || s_X_counter_0",
      "!done -> s_X_counter_0",
      "!done -> trigger",
      "!done && s_X_counter_0 -> X counter_0",
      "done -> X done",
      "jump_1 -> X done",
      "!jump_1 -> !done -> X !done",
  });
  CHECK(p3.spec.outputs == std::vector<std::string>{
      "counter_0", "counter_2", "trigger", "s_X_counter_0", "jump_1", "done"});
  CHECK(p3.spec.preset->str() == "counter_2 && !counter_0 && !done");
  CHECK(p3.jump_targets == std::map<std::string, int>{{"jump_1", 0}});
}

TEST_CASE("projection structural invariants hold on the counter machine") {
  Cm2 cm;
  std::vector<Projection> ps = compute_projections(cm.spec, cm.modes);
  size_t original = cm.spec.guarantees.size();

  for (const auto& p : ps) {
    std::set<std::string> alphabet(p.spec.inputs.begin(), p.spec.inputs.end());
    alphabet.insert(p.spec.outputs.begin(), p.spec.outputs.end());
    for (const auto& g : p.spec.guarantees)
      for (const auto& a : g.atoms()) CHECK(alphabet.count(a) == 1);

    // done present; jump_j present exactly for related modes.
    CHECK(std::count(p.spec.outputs.begin(), p.spec.outputs.end(), "done") == 1);
    std::set<int> related = cm.modes.successors_of(p.mode_index);
    CHECK(p.jump_targets.size() == related.size());
    for (const auto& [atom, target] : p.jump_targets) {
      CHECK(related.count(target) == 1);
      CHECK(std::count(p.spec.outputs.begin(), p.spec.outputs.end(), atom) == 1);
    }

    // Exactly one mode anchor.
    Formula not_done = Formula::neg(Formula::atom("done"));
    int anchors = 0;
    for (const auto& g : p.spec.guarantees)
      if (g.kind() == Kind::Implies && g.child(0) == not_done &&
          g.child(1).x_depth() == 0 && g.child(1).atoms().count("done") == 0 &&
          [&] {
            for (const auto& a : g.child(1).atoms())
              if (a.rfind("s_", 0) == 0 || a.rfind("jump_", 0) == 0) return false;
            return true;
          }())
        ++anchors;
    CHECK(anchors >= 1);  // anchor plus possibly !trigger-style residues

    // Additive size bound.
    CHECK(p.spec.guarantees.size() <=
          original + p.obligations.size() + related.size() + 4);
  }
}

TEST_CASE("degenerate single-mode projection is the original plus plumbing") {
  ReactiveSpec s = parse_spec(
      "INPUTS { r; } OUTPUTS { g; } PRESET { g; } GUARANTEES { G (r -> X g); }");
  ModeDecomposition d = parse_modes("MODE all { pred = TRUE; init = g; }", s);
  std::vector<Projection> ps = compute_projections(s, d);
  REQUIRE(ps.size() == 1);
  const Projection& p = ps[0];
  CHECK(strs(p.spec.guarantees) == std::vector<std::string>{
      "!done -> !r || s_X_g",
      "!done && s_X_g -> X g",
      "done -> X done",
      "!done -> X !done",
  });
  CHECK(p.jump_targets.empty());
  CHECK(p.spec.preset->str() == "g && !done");
}

TEST_CASE("deep obligations get full dynamics chains") {
  ReactiveSpec s = parse_spec(
      "INPUTS { r; } OUTPUTS { a; } GUARANTEES { G (r -> X X a); }");
  ModeDecomposition d = parse_modes("MODE all { pred = TRUE; init = TRUE; }", s);
  std::vector<Projection> ps = compute_projections(s, d);
  const auto items = strs(ps[0].spec.guarantees);
  CHECK(std::count(items.begin(), items.end(),
                   "!done && s_XX_a -> X s_X_a") == 1);
  CHECK(std::count(items.begin(), items.end(),
                   "!done && s_X_a -> X a") == 1);
  CHECK(strs(ps[0].obligations) ==
        std::vector<std::string>{"X a", "X X a"});
}

TEST_CASE("fresh bookkeeping atoms must not collide with declared ones") {
  ReactiveSpec s = parse_spec("OUTPUTS { done; a; } GUARANTEES { G (a); }");
  ModeDecomposition d = parse_modes("MODE all { pred = TRUE; init = TRUE; }", s);
  CHECK_THROWS_AS(compute_projections(s, d), FreshAtomCollision);
}
