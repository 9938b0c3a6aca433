#pragma once

// Structural rewrites on Next-only LTL. All functions are pure; inputs are
// never mutated. Formulas here are finite-horizon safety bodies, so pushing
// Next through Boolean connectives is sound (X distributes over &&, ||, !).

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "moby/formula.hpp"

namespace moby {

struct NotANextFormula : std::runtime_error {
  explicit NotANextFormula(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedShape : std::runtime_error {
  explicit UnsupportedShape(const std::string& what) : std::runtime_error(what) {}
};

// Negation normal form with Next pushed inward: the result is built from
// constants, And, Or, and chains X^i lit where lit is an atom or a negated
// atom. Constants absorb Next (X TRUE == TRUE on infinite words).
inline Formula nnf(const Formula& f) {
  struct Impl {
    static Formula wrap_next(Formula f, int depth) {
      for (int i = 0; i < depth; ++i) f = Formula::next(std::move(f));
      return f;
    }
    static Formula push(const Formula& f, bool negate, int depth) {
      switch (f.kind()) {
        case Kind::True:
          return negate ? Formula::ff() : Formula::tt();
        case Kind::False:
          return negate ? Formula::tt() : Formula::ff();
        case Kind::Atom: {
          Formula lit = negate ? Formula::neg(f) : f;
          return wrap_next(std::move(lit), depth);
        }
        case Kind::Not:
          return push(f.child(0), !negate, depth);
        case Kind::Next:
          return push(f.child(0), negate, depth + 1);
        case Kind::And: {
          Formula a = push(f.child(0), negate, depth);
          Formula b = push(f.child(1), negate, depth);
          return negate ? Formula::disj(a, b) : Formula::conj(a, b);
        }
        case Kind::Or: {
          Formula a = push(f.child(0), negate, depth);
          Formula b = push(f.child(1), negate, depth);
          return negate ? Formula::conj(a, b) : Formula::disj(a, b);
        }
        case Kind::Implies: {
          // a -> b == !a || b
          Formula a = push(f.child(0), !negate, depth);
          Formula b = push(f.child(1), negate, depth);
          return negate ? Formula::conj(a, b) : Formula::disj(a, b);
        }
      }
      return f;  // unreachable
    }
  };
  return Impl::push(f, false, 0);
}

// Constant propagation. Does not reassociate or deduplicate; shape is
// otherwise preserved so printed output stays close to the source.
inline Formula simpl(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
      return f;
    case Kind::Not: {
      Formula c = simpl(f.child(0));
      if (c.is_true()) return Formula::ff();
      if (c.is_false()) return Formula::tt();
      if (c.kind() == Kind::Not) return c.child(0);
      return c == f.child(0) ? f : Formula::neg(c);
    }
    case Kind::Next: {
      Formula c = simpl(f.child(0));
      if (c.is_const()) return c;
      return c == f.child(0) ? f : Formula::next(c);
    }
    case Kind::And: {
      Formula a = simpl(f.child(0));
      Formula b = simpl(f.child(1));
      if (a.is_false() || b.is_false()) return Formula::ff();
      if (a.is_true()) return b;
      if (b.is_true()) return a;
      if (a == f.child(0) && b == f.child(1)) return f;
      return Formula::conj(a, b);
    }
    case Kind::Or: {
      Formula a = simpl(f.child(0));
      Formula b = simpl(f.child(1));
      if (a.is_true() || b.is_true()) return Formula::tt();
      if (a.is_false()) return b;
      if (b.is_false()) return a;
      if (a == f.child(0) && b == f.child(1)) return f;
      return Formula::disj(a, b);
    }
    case Kind::Implies: {
      Formula a = simpl(f.child(0));
      Formula b = simpl(f.child(1));
      if (a.is_false() || b.is_true()) return Formula::tt();
      if (a.is_true()) return b;
      if (b.is_false()) return simpl(Formula::neg(a));
      if (a == f.child(0) && b == f.child(1)) return f;
      return Formula::implies(a, b);
    }
  }
  return f;  // unreachable
}

// Outside-in replacement: when a subtree matches a key it is replaced whole
// and the replacement is not rescanned. Keys that nest (X X p over X p) are
// therefore matched largest-first for free.
inline Formula substitute(const Formula& f, const std::map<Formula, Formula>& map) {
  auto it = map.find(f);
  if (it != map.end()) return it->second;
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
      return f;
    case Kind::Not:
      return Formula::neg(substitute(f.child(0), map));
    case Kind::Next:
      return Formula::next(substitute(f.child(0), map));
    case Kind::And:
      return Formula::conj(substitute(f.child(0), map), substitute(f.child(1), map));
    case Kind::Or:
      return Formula::disj(substitute(f.child(0), map), substitute(f.child(1), map));
    case Kind::Implies:
      return Formula::implies(substitute(f.child(0), map),
                              substitute(f.child(1), map));
  }
  return f;  // unreachable
}

inline Formula substitute(const Formula& f, const Formula& target,
                          const Formula& replacement) {
  return substitute(f, {{target, replacement}});
}

// Peels exactly one Next off the root. Callers hold formulas of shape X^i lit
// (obligations); anything else is a usage error.
inline Formula rm_next(const Formula& f) {
  if (f.kind() != Kind::Next)
    throw NotANextFormula("rm_next: formula is not rooted at X: " + f.str());
  return f.child(0);
}

// Maximal subformulas free of Next. Walks the surface form: a Next-free
// subtree is taken whole; nothing below a Next node is collected.
inline std::set<Formula> asf(const Formula& f) {
  std::set<Formula> out;
  struct Impl {
    static void walk(const Formula& f, std::set<Formula>& out) {
      if (f.x_depth() == 0) {
        out.insert(f);
        return;
      }
      if (f.kind() == Kind::Next) return;
      for (size_t i = 0; i < f.arity(); ++i) walk(f.child(i), out);
    }
  };
  Impl::walk(f, out);
  return out;
}

// Maximal Next-rooted subformulas: every Next node whose parent is not Next.
// Recurses below collected nodes, so nested mixed shapes like X(p && X q)
// report both the outer and the inner chain.
inline std::set<Formula> nsf(const Formula& f) {
  std::set<Formula> out;
  struct Impl {
    static void walk(const Formula& f, bool parent_is_next, std::set<Formula>& out) {
      bool is_next = f.kind() == Kind::Next;
      if (is_next && !parent_is_next) out.insert(f);
      for (size_t i = 0; i < f.arity(); ++i) walk(f.child(i), is_next, out);
    }
  };
  Impl::walk(f, false, out);
  return out;
}

// Fresh-atom name for an obligation X^i lit: "s_" + one X per level + "n" for
// a negated literal + "_" + the atom. X p -> s_X_p, X !p -> s_Xn_p,
// X X p -> s_XX_p. Plain literals name themselves (no variable needed).
inline Formula obligation_var(const Formula& f) {
  if (f.is_literal()) return f;
  int depth = 0;
  Formula cur = f;
  while (cur.kind() == Kind::Next) {
    ++depth;
    cur = cur.child(0);
  }
  if (depth == 0 || !cur.is_literal())
    throw UnsupportedShape("obligation_var: not of shape X^i literal: " + f.str());
  bool negated = cur.kind() == Kind::Not;
  const std::string& atom = negated ? cur.child(0).name() : cur.name();
  std::string name = "s_";
  name.append(depth, 'X');
  if (negated) name += 'n';
  name += '_';
  name += atom;
  return Formula::atom(name);
}

}  // namespace moby
