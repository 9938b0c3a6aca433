#include "doctest.h"
#include "moby/formula.hpp"

#include <set>
#include <sstream>
#include <vector>

using moby::Formula;
using moby::Kind;

TEST_CASE("structural equality is independent of construction path") {
  Formula p = Formula::atom("p");
  Formula q = Formula::atom("q");
  Formula a = Formula::conj(Formula::neg(p), Formula::next(q));
  Formula b = Formula::conj(Formula::neg(Formula::atom("p")),
                            Formula::next(Formula::atom("q")));
  CHECK(a == b);
  CHECK(a.hash() == b.hash());
  CHECK(a != Formula::conj(Formula::next(q), Formula::neg(p)));
  CHECK(p != q);
  CHECK(Formula::tt() != Formula::ff());
}

TEST_CASE("size and x_depth are precomputed correctly") {
  Formula p = Formula::atom("p");
  CHECK(p.size() == 1);
  CHECK(p.x_depth() == 0);

  Formula f = Formula::implies(p, Formula::next(Formula::next(p)));
  CHECK(f.x_depth() == 2);
  CHECK(f.size() == 5);  // ->, p, X, X, p

  Formula g = Formula::conj(Formula::next(p), p);
  CHECK(g.x_depth() == 1);
}

TEST_CASE("atoms collects every name once") {
  Formula f = Formula::implies(
      Formula::conj(Formula::atom("reset"), Formula::atom("start")),
      Formula::next(Formula::atom("reset")));
  std::set<std::string> expect{"reset", "start"};
  CHECK(f.atoms() == expect);
  CHECK(Formula::tt().atoms().empty());
}

TEST_CASE("ordering is total and deterministic") {
  Formula p = Formula::atom("p");
  Formula q = Formula::atom("q");
  CHECK(p < q);
  CHECK(!(q < p));
  CHECK(!(p < p));

  // Kind order puts constants before atoms before composites.
  CHECK(Formula::tt() < p);
  CHECK(p < Formula::neg(p));

  // Set iteration order is reproducible regardless of insertion order.
  std::set<Formula> s1{Formula::next(p), p, Formula::neg(q), q};
  std::set<Formula> s2{q, Formula::neg(q), p, Formula::next(p)};
  CHECK(std::vector<Formula>(s1.begin(), s1.end()) ==
        std::vector<Formula>(s2.begin(), s2.end()));
}

TEST_CASE("printer uses minimal parentheses") {
  Formula p = Formula::atom("p");
  Formula q = Formula::atom("q");
  Formula r = Formula::atom("r");

  CHECK(p.str() == "p");
  CHECK(Formula::tt().str() == "TRUE");
  CHECK(Formula::ff().str() == "FALSE");
  CHECK(Formula::neg(p).str() == "!p");
  CHECK(Formula::next(p).str() == "X p");
  CHECK(Formula::neg(Formula::next(p)).str() == "!X p");
  CHECK(Formula::next(Formula::conj(p, q)).str() == "X (p && q)");

  CHECK(Formula::conj(p, Formula::disj(q, r)).str() == "p && (q || r)");
  CHECK(Formula::disj(Formula::conj(p, q), r).str() == "p && q || r");
  CHECK(Formula::implies(p, Formula::implies(q, r)).str() == "p -> q -> r");
  CHECK(Formula::implies(Formula::implies(p, q), r).str() == "(p -> q) -> r");
  CHECK(Formula::conj(Formula::implies(p, q), r).str() == "(p -> q) && r");
  CHECK(Formula::implies(Formula::next(p), q).str() == "X p -> q");
}

TEST_CASE("conj_all and disj_all fold left with the right units") {
  Formula p = Formula::atom("p");
  Formula q = Formula::atom("q");
  Formula r = Formula::atom("r");

  CHECK(Formula::conj_all({}) == Formula::tt());
  CHECK(Formula::disj_all({}) == Formula::ff());
  CHECK(Formula::conj_all({p}) == p);
  CHECK(Formula::conj_all({p, q, r}).str() == "p && q && r");
  CHECK(Formula::disj_all({p, q, r}).str() == "p || q || r");
  // Left fold: ((p && q) && r)
  CHECK(Formula::conj_all({p, q, r}) ==
        Formula::conj(Formula::conj(p, q), r));
}
