#include "doctest.h"
#include "moby/parse.hpp"
#include "moby/synth.hpp"
#include "moby/verifier.hpp"
#include "test_helpers.hpp"

#include <random>

using namespace moby;

namespace {

Formula at(const std::string& n) { return Formula::atom(n); }

ReactiveSpec mini(std::vector<std::string> ins, std::vector<std::string> outs) {
  ReactiveSpec s;
  s.inputs = std::move(ins);
  s.outputs = std::move(outs);
  return s;
}

// One-state machine that never raises an output.
MealyMachine silent(std::vector<std::string> ins, std::vector<std::string> outs) {
  MealyMachine m;
  m.inputs = std::move(ins);
  m.outputs = std::move(outs);
  m.initial = 0;
  size_t width = size_t{1} << m.inputs.size();
  m.delta.assign(1, std::vector<int>(width, 0));
  m.out.assign(1, std::vector<uint64_t>(width, 0));
  return m;
}

// The reported trace must itself witness the violation: assumptions hold at
// every judged position through the failure, the named item fails there.
void check_replay(const ReactiveSpec& s, const Counterexample& cex) {
  const Trace& t = cex.trace;
  REQUIRE(!t.empty());
  if (s.preset) CHECK(eval_at(*s.preset, t, 0));
  for (const auto& a : s.assumptions)
    for (size_t q = 0; q <= cex.position; ++q)
      if (q + a.x_depth() < t.size()) CHECK(eval_at(a, t, q));
  bool named = false;
  for (const auto& g : s.guarantees)
    if (g.str() == cex.item) {
      named = true;
      CHECK_FALSE(eval_at(g, t, cex.position));
    }
  CHECK(named);
}

}  // namespace

TEST_CASE("a synthesized machine passes its own objective") {
  ReactiveSpec s = parse_spec(
      "INPUTS { r; } OUTPUTS { g; } GUARANTEES { G (r -> g); }");
  SynthResult res = synthesize(s);
  REQUIRE(res.realizable);
  VerifyReport rep = product_check(s, *res.machine);
  CHECK(rep.ok);
  CHECK_FALSE(rep.counterexample.has_value());
  CHECK(rep.configurations >= 1);
}

TEST_CASE("the silent machine is caught on the first request") {
  ReactiveSpec s = parse_spec(
      "INPUTS { r; } OUTPUTS { g; } GUARANTEES { G (r -> g); }");
  VerifyReport rep = product_check(s, silent({"r"}, {"g"}));
  REQUIRE_FALSE(rep.ok);
  REQUIRE(rep.counterexample.has_value());
  CHECK(rep.counterexample->position == 0);
  CHECK(rep.counterexample->trace.size() == 1);
  CHECK(rep.counterexample->item == "r -> g");
  check_replay(s, *rep.counterexample);
}

TEST_CASE("next-step violations surface one round after the cause") {
  ReactiveSpec s = parse_spec(
      "INPUTS { r; } OUTPUTS { g; } GUARANTEES { G (r -> X g); }");
  VerifyReport rep = product_check(s, silent({"r"}, {"g"}));
  REQUIRE_FALSE(rep.ok);
  CHECK(rep.counterexample->position == 0);
  CHECK(rep.counterexample->trace.size() == 2);  // cause plus judging round
  check_replay(s, *rep.counterexample);
}

TEST_CASE("preset violations are unconditional and at position zero") {
  ReactiveSpec s = mini({"r"}, {"g"});
  s.preset = at("g");
  s.assumptions = {Formula::ff()};  // not even a false assumption excuses it
  VerifyReport rep = product_check(s, silent({"r"}, {"g"}));
  REQUIRE_FALSE(rep.ok);
  CHECK(rep.counterexample->item == "PRESET");
  CHECK(rep.counterexample->position == 0);
  CHECK(rep.counterexample->trace.size() == 1);
}

TEST_CASE("an unsatisfiable environment initial verifies vacuously") {
  ReactiveSpec s = mini({"r"}, {"g"});
  s.initially = Formula::ff();
  s.guarantees = {Formula::ff()};
  VerifyReport rep = product_check(s, silent({"r"}, {"g"}));
  CHECK(rep.ok);
  CHECK(rep.configurations == 1);  // only the root survives
}

TEST_CASE("assumption violations excuse their own position and later ones") {
  ReactiveSpec s = mini({"r"}, {"g"});
  s.assumptions = {Formula::neg(at("r"))};
  s.guarantees = {Formula::neg(at("g"))};

  // Raising g exactly while r is read violates the guarantee only at
  // positions the assumption already excuses.
  MealyMachine echo = silent({"r"}, {"g"});
  echo.out[0][1] = 1;
  CHECK(product_check(s, echo).ok);

  // Raising g one round after r is excused as well: the assumption failed
  // strictly earlier.
  MealyMachine delayed = silent({"r"}, {"g"});
  delayed.delta.assign(2, {0, 1});
  delayed.out = {{0, 0}, {1, 1}};
  delayed.delta[1] = {0, 1};
  CHECK(product_check(s, delayed).ok);

  // Raising g while the assumption still holds is a real violation.
  MealyMachine eager = silent({"r"}, {"g"});
  eager.out[0] = {1, 1};
  VerifyReport rep = product_check(s, eager);
  REQUIRE_FALSE(rep.ok);
  CHECK(rep.counterexample->position == 0);
  CHECK(rep.counterexample->trace == Trace{{"g"}});
  check_replay(s, *rep.counterexample);
}

TEST_CASE("counter machine strategy passes the full product") {
  ReactiveSpec s = parse_spec(testutil::cm_spec_text(2));
  SynthResult res = synthesize(s);
  REQUIRE(res.realizable);
  VerifyReport rep = product_check(s, *res.machine);
  CHECK(rep.ok);
  CHECK(rep.configurations > 1);
  CHECK(rep.configurations < 4096);

  // Corrupt the first response: raising trigger without counter_2 breaks an
  // invariant immediately.
  MealyMachine bad = *res.machine;
  bad.out[bad.initial][0] ^= 8;  // trigger is the fourth declared output
  VerifyReport broken = product_check(s, bad);
  REQUIRE_FALSE(broken.ok);
  CHECK(broken.counterexample->position == 0);
  check_replay(s, *broken.counterexample);
}

TEST_CASE("two-step objectives judge with a two-letter window") {
  ReactiveSpec s = parse_spec(
      "INPUTS { a; } OUTPUTS { b; } GUARANTEES { G (a -> X X b); }");
  SynthResult res = synthesize(s);
  REQUIRE(res.realizable);
  CHECK(product_check(s, *res.machine).ok);

  VerifyReport rep = product_check(s, silent({"a"}, {"b"}));
  REQUIRE_FALSE(rep.ok);
  CHECK(rep.counterexample->position == 0);
  CHECK(rep.counterexample->trace.size() == 3);
  check_replay(s, *rep.counterexample);
}

TEST_CASE("simulate reports the combined letters the machine produces") {
  ReactiveSpec s = parse_spec(
      "INPUTS { r; } OUTPUTS { g; } GUARANTEES { G (r -> g); }");
  MealyMachine m = *synthesize(s).machine;
  Trace t = simulate(m, {{"r"}, {}, {"r"}});
  CHECK(t == Trace{{"r", "g"}, {}, {"r", "g"}});
  CHECK(simulate(m, {}).empty());
  CHECK_THROWS_AS(simulate(m, {{"nope"}}), AlphabetMismatch);
}

TEST_CASE("alphabet mismatches are rejected up front") {
  ReactiveSpec s = parse_spec(
      "INPUTS { r; } OUTPUTS { g; } GUARANTEES { G (r -> g); }");
  CHECK_THROWS_AS(product_check(s, silent({"x"}, {"g"})), AlphabetMismatch);
  CHECK_THROWS_AS(product_check(s, silent({"r"}, {"h"})), AlphabetMismatch);

  // Extra machine outputs beyond the objective's are ignored.
  MealyMachine wide = silent({"r"}, {"g", "h"});
  VerifyReport rep = product_check(mini({"r"}, {"g"}), wide);
  CHECK(rep.ok);
}

TEST_CASE("synthesized strategies verify across a random spec family") {
  std::mt19937 rng(29);
  std::vector<std::string> atoms{"u", "v", "w"};
  int verified = 0;
  for (int i = 0; i < 40; ++i) {
    ReactiveSpec s = mini({"u"}, {"v", "w"});
    s.guarantees = {testutil::random_formula(rng, atoms, 9, 1),
                    testutil::random_formula(rng, atoms, 7, 1)};
    if (i % 2 == 1) s.assumptions = {testutil::random_formula(rng, atoms, 7, 1)};
    SynthResult res = synthesize(s);
    if (!res.realizable) continue;
    ++verified;
    VerifyReport rep = product_check(s, *res.machine);
    CHECK(rep.ok);
    if (!rep.ok && rep.counterexample) check_replay(s, *rep.counterexample);
  }
  CHECK(verified > 10);
}
