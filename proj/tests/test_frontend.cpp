#include <string>

#include "doctest.h"
#include "moby/parse.hpp"
#include "moby/print_tlsf.hpp"
#include "moby/spec.hpp"

using namespace moby;

namespace {

// Counter machine spec text, parameterized over the bound N. Mirrors the
// shape emitted by `moby gen counter`.
std::string counter_machine_text(int n) {
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
  return s;
}

// Parse a single formula by wrapping it in a minimal spec. `decls` declares
// outputs, e.g. "c[4]; t;".
Formula parse_wrapped(const std::string& decls, const std::string& formula) {
  ReactiveSpec s = parse_spec("OUTPUTS { " + decls + " } GUARANTEES { G (" +
                              formula + "); }");
  REQUIRE(s.guarantees.size() == 1);
  return s.guarantees[0];
}

const std::string modes3 =
    "MODE m1 { pred = counter_0 && !counter_1 && !counter_2; "
    "init = counter_0 && !counter_1 && !counter_2; }\n"
    "MODE m2 { pred = counter_1 && !counter_0 && !counter_2; "
    "init = counter_1 && !counter_0 && !counter_2; }\n"
    "MODE m3 { pred = counter_2 && !counter_0 && !counter_1; "
    "init = counter_2 && !counter_0 && !counter_1; }\n";

}  // namespace

TEST_CASE("counter machine at N=2 parses to the expected structure") {
  ReactiveSpec s = parse_spec(counter_machine_text(2));

  CHECK(s.inputs == std::vector<std::string>{"reset", "start"});
  CHECK(s.outputs == std::vector<std::string>{"counter_0", "counter_1",
                                              "counter_2", "trigger"});
  CHECK(s.params.at("N") == 2);

  REQUIRE(s.initially.has_value());
  CHECK(*s.initially == Formula::conj(Formula::neg(Formula::atom("reset")),
                                      Formula::neg(Formula::atom("start"))));

  // counter_0 && (!counter_1 && !counter_2), from the indexed conjunction.
  REQUIRE(s.preset.has_value());
  CHECK(*s.preset ==
        Formula::conj(Formula::atom("counter_0"),
                      Formula::conj(Formula::neg(Formula::atom("counter_1")),
                                    Formula::neg(Formula::atom("counter_2")))));

  REQUIRE(s.assumptions.size() == 1);
  CHECK(s.assumptions[0] ==
        Formula::neg(Formula::conj(Formula::atom("reset"),
                                   Formula::atom("start"))));

  // mutual, reset rule, two step rules, wrap, two trigger rules.
  REQUIRE(s.guarantees.size() == 7);

  // The mutual-exclusion macro expands over all three counter atoms.
  Formula expected_mutual = parse_wrapped(
      "counter[3];",
      "(counter[0] && (!counter[1] && !counter[2]))"
      " || (counter[1] && (!counter[0] && !counter[2]))"
      " || (counter[2] && (!counter[0] && !counter[1]))");
  CHECK(s.guarantees[0] == expected_mutual);

  CHECK(s.guarantees[1].str() == "reset -> X counter_0");
  CHECK(s.guarantees[2].str() ==
        "counter_0 && start -> X (counter_1 || reset)");
  CHECK(s.guarantees[3].str() ==
        "counter_1 && !reset -> X (counter_2 || reset)");
  CHECK(s.guarantees[4].str() == "counter_2 -> X counter_0");
  CHECK(s.guarantees[5].str() == "counter_2 -> trigger");
  CHECK(s.guarantees[6].str() == "!counter_2 -> !trigger");

  // No temporal operators survive parsing.
  for (const auto& g : s.guarantees) CHECK(g.x_depth() <= 1);
}

TEST_CASE("counter machine scales with N") {
  for (int n : {1, 4, 10}) {
    ReactiveSpec s = parse_spec(counter_machine_text(n));
    CHECK(static_cast<int>(s.outputs.size()) == n + 2);  // counters + trigger
    // mutual + reset + n step rules + wrap + 2 trigger rules
    CHECK(static_cast<int>(s.guarantees.size()) == n + 5);
  }
}

TEST_CASE("indexed conjunction expands over its range") {
  Formula got = parse_wrapped("c[4]; t;", "&&[1 <= i <= 3] !c[i]");
  Formula expected = parse_wrapped("c[4]; t;", "!c[1] && !c[2] && !c[3]");
  CHECK(got == expected);
}

TEST_CASE("indexed operators: strict bounds, exclusion sets, empty ranges") {
  CHECK(parse_wrapped("c[4];", "||[0 <= i < 3 \\ {1}] c[i]") ==
        parse_wrapped("c[4];", "c[0] || c[2]"));
  CHECK(parse_wrapped("c[4];", "||[0 < i <= 3] c[i]") ==
        parse_wrapped("c[4];", "c[1] || c[2] || c[3]"));
  // Empty ranges collapse to the operator's unit.
  CHECK(parse_wrapped("c[4];", "&&[1 <= i <= 0] !c[i]").is_true());
  CHECK(parse_wrapped("c[4];", "||[2 <= i < 2] c[i]").is_false());
  // Index arithmetic inside the body.
  CHECK(parse_wrapped("c[4];", "&&[0 <= i < 2] (c[i] -> c[i+1])") ==
        parse_wrapped("c[4];", "(c[0] -> c[1]) && (c[1] -> c[2])"));
}

TEST_CASE("G wraps a whole item; un-G'd items become initial constraints") {
  ReactiveSpec s = parse_spec(
      "INPUTS { r; }\n"
      "OUTPUTS { a; b; }\n"
      "GUARANTEES {\n"
      "  G a -> X b;\n"   // body is the full implication
      "  !b;\n"           // no G: conjoined onto the preset
      "  a || b;\n"
      "}\n"
      "ASSUMPTIONS { !r; G r -> r; }\n");
  REQUIRE(s.guarantees.size() == 1);
  CHECK(s.guarantees[0].str() == "a -> X b");
  REQUIRE(s.preset.has_value());
  CHECK(s.preset->str() == "!b && (a || b)");
  REQUIRE(s.assumptions.size() == 1);
  REQUIRE(s.initially.has_value());
  CHECK(s.initially->str() == "!r");
}

TEST_CASE("equivalence desugars to implications both ways") {
  Formula f = parse_wrapped("a; b;", "a <-> b");
  Formula a = Formula::atom("a"), b = Formula::atom("b");
  CHECK(f == Formula::conj(Formula::implies(a, b), Formula::implies(b, a)));
}

TEST_CASE("parse errors carry positions and precise categories") {
  CHECK_THROWS_AS(parse_spec("OUTPUTS { a; } GUARANTEES { G (zzz); }"),
                  UndeclaredAtom);
  CHECK_THROWS_AS(parse_spec("OUTPUTS { c[2]; } GUARANTEES { G (c[7]); }"),
                  ArityError);
  CHECK_THROWS_AS(parse_spec("OUTPUTS { c[2]; } GUARANTEES { G (c); }"),
                  ArityError);
  CHECK_THROWS_AS(parse_spec("OUTPUTS { a; } GUARANTEES { G (a[0]); }"),
                  ArityError);
  CHECK_THROWS_AS(parse_spec("OUTPUTS { c[M]; }"), UnboundParameter);
  CHECK_THROWS_AS(parse_spec("OUTPUTS { a; } GUARANTEES { G (F a); }"),
                  NonSafetyOperator);
  CHECK_THROWS_AS(parse_spec("OUTPUTS { a; b; } GUARANTEES { G (a U b); }"),
                  NonSafetyOperator);
  CHECK_THROWS_AS(parse_spec("OUTPUTS { a; } GUARANTEES { G (a && G a); }"),
                  NonSafetyOperator);
  CHECK_THROWS_AS(parse_spec("OUTPUTS { a; } OUTPUTS { b; }"), SyntaxError);
  CHECK_THROWS_AS(parse_spec("OUTPUTS { a }"), SyntaxError);
  CHECK_THROWS_AS(parse_spec("INPUTS { a; a; }"), SyntaxError);

  // INITIALLY is input-only and X-free; PRESET is output-only.
  CHECK_THROWS_AS(parse_spec("INPUTS { r; } OUTPUTS { a; } INITIALLY { a; }"),
                  SyntaxError);
  CHECK_THROWS_AS(parse_spec("INPUTS { r; } INITIALLY { X r; }"), SyntaxError);
  CHECK_THROWS_AS(parse_spec("INPUTS { r; } OUTPUTS { a; } PRESET { r; }"),
                  SyntaxError);

  try {
    parse_spec("OUTPUTS {\n  a;\n  zz;\n}\nGUARANTEES { G (missing); }");
    FAIL("expected UndeclaredAtom");
  } catch (const UndeclaredAtom& e) {
    CHECK(e.line == 5);
    CHECK(std::string(e.what()).find("missing") != std::string::npos);
  }
}

TEST_CASE("macros expand non-recursively with bus aliasing") {
  ReactiveSpec s = parse_spec(
      "OUTPUTS { lamp[3]; led[3]; }\n"
      "DEFINITIONS { one_on(b) = G ||[0 <= i < 3] b[i]; }\n"
      "GUARANTEES { one_on(lamp); one_on(led); }\n");
  REQUIRE(s.guarantees.size() == 2);
  CHECK(s.guarantees[0] == parse_wrapped("lamp[3];", "lamp[0] || lamp[1] || lamp[2]"));
  CHECK(s.guarantees[1] == parse_wrapped("led[3];", "led[0] || led[1] || led[2]"));

  // A macro whose body carries G is an item, not a sub-formula.
  CHECK_THROWS_AS(
      parse_spec("OUTPUTS { lamp[2]; a; }\n"
                 "DEFINITIONS { all(b) = G (b[0] && b[1]); }\n"
                 "GUARANTEES { G (a && all(lamp)); }\n"),
      NonSafetyOperator);
}

TEST_CASE("meaning builds the shared game objective") {
  ReactiveSpec s = parse_spec(counter_machine_text(2));
  Objective obj = meaning(s);
  CHECK(obj.env_initial == *s.initially);
  CHECK(obj.sys_initial == *s.preset);
  REQUIRE(obj.assumptions.size() == 1);
  CHECK(obj.assumptions[0].str() == "!(reset && start)");
  CHECK(obj.guarantees.size() == 7);
  CHECK(obj.depth == 1);

  // Defaults: missing sections become True / empty lists, depth 0.
  ReactiveSpec tiny = parse_spec("OUTPUTS { a; } GUARANTEES { G (a); }");
  Objective tobj = meaning(tiny);
  CHECK(tobj.env_initial.is_true());
  CHECK(tobj.sys_initial.is_true());
  CHECK(tobj.assumptions.empty());
  CHECK(tobj.depth == 0);
}

TEST_CASE("modes file: explicit fields, defaults, relation") {
  ReactiveSpec s = parse_spec(counter_machine_text(2));

  SUBCASE("omitted relation defaults to all ordered pairs") {
    ModeDecomposition d = parse_modes(modes3, s);
    REQUIRE(d.modes.size() == 3);
    CHECK(d.modes[0].name == "m1");
    CHECK(d.modes[1].pred.str() == "counter_1 && !counter_0 && !counter_2");
    CHECK(d.modes[2].init == d.modes[2].pred);
    for (const auto& m : d.modes) CHECK(m.arrival.is_true());
    CHECK(d.relation.size() == 6);
    CHECK(d.relation.count({0, 1}) == 1);
    CHECK(d.relation.count({2, 1}) == 1);
    CHECK(d.relation.count({1, 1}) == 0);
  }

  SUBCASE("explicit relation is taken verbatim") {
    ModeDecomposition d = parse_modes(
        modes3 + "RELATION { m1 -> m2; m2 -> m3; m3 -> m1; }", s);
    std::set<std::pair<int, int>> expected{{0, 1}, {1, 2}, {2, 0}};
    CHECK(d.relation == expected);
    CHECK(d.successors_of(1) == std::set<int>{2});
  }

  SUBCASE("arrival conditions parse over inputs") {
    ModeDecomposition d = parse_modes(
        "MODE only { pred = counter_0; init = counter_0; arrival = !reset; }", s);
    CHECK(d.modes[0].arrival.str() == "!reset");
    CHECK(d.relation.empty());
  }
}

TEST_CASE("modes file error cases") {
  ReactiveSpec s = parse_spec(counter_machine_text(2));
  CHECK_THROWS_AS(parse_modes("", s), EmptyModeList);
  CHECK_THROWS_AS(parse_modes("RELATION { }", s), EmptyModeList);
  CHECK_THROWS_AS(
      parse_modes(modes3 + "MODE m1 { pred = counter_0; init = counter_0; }", s),
      SyntaxError);
  CHECK_THROWS_AS(parse_modes("MODE m { pred = counter_9; init = counter_0; }", s),
                  UnknownAtom);
  // pred/init range over outputs, arrival over inputs.
  CHECK_THROWS_AS(parse_modes("MODE m { pred = reset; init = counter_0; }", s),
                  UnknownAtom);
  CHECK_THROWS_AS(
      parse_modes(
          "MODE m { pred = counter_0; init = counter_0; arrival = trigger; }", s),
      UnknownAtom);
  CHECK_THROWS_AS(
      parse_modes("MODE m { pred = X counter_0; init = counter_0; }", s),
      SyntaxError);
  CHECK_THROWS_AS(parse_modes("MODE m { pred = counter_0; }", s), SyntaxError);
  CHECK_THROWS_AS(
      parse_modes(modes3 + "RELATION { m1 -> m1; }", s), SyntaxError);
  CHECK_THROWS_AS(
      parse_modes(modes3 + "RELATION { m1 -> ghost; }", s), SyntaxError);
}

TEST_CASE("emit_tlsf round-trips structurally") {
  for (int n : {1, 2, 5}) {
    ReactiveSpec s = parse_spec(counter_machine_text(n));
    ReactiveSpec again = parse_spec(emit_tlsf(s));
    CHECK(again == s);
    // And emission is stable from the second generation on.
    CHECK(emit_tlsf(again) == emit_tlsf(s));
  }

  ReactiveSpec no_guarantees = parse_spec("INPUTS { r; } ASSUMPTIONS { G (r); }");
  std::string text = emit_tlsf(no_guarantees);
  CHECK(text.find("GUARANTEES") == std::string::npos);
  CHECK(parse_spec(text) == no_guarantees);
}

TEST_CASE("emit_modes round-trips through parse_modes") {
  ReactiveSpec s = parse_spec(counter_machine_text(2));
  ModeDecomposition d =
      parse_modes(modes3 + "RELATION { m1 -> m2; m2 -> m3; m3 -> m1; }", s);
  ModeDecomposition again = parse_modes(emit_modes(d), s);
  REQUIRE(again.modes.size() == d.modes.size());
  for (size_t i = 0; i < d.modes.size(); ++i) {
    CHECK(again.modes[i].name == d.modes[i].name);
    CHECK(again.modes[i].pred == d.modes[i].pred);
    CHECK(again.modes[i].init == d.modes[i].init);
    CHECK(again.modes[i].arrival == d.modes[i].arrival);
  }
  CHECK(again.relation == d.relation);
}
