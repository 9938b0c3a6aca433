#pragma once

// Finite trace prefixes as vectors of letters; a letter is the set of atoms
// true at that instant. Absent atoms are false: all machinery in this project
// shares the convention that a letter mentions only what holds.

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "moby/formula.hpp"

namespace moby {

using Letter = std::set<std::string>;
using Trace = std::vector<Letter>;

struct WindowTooShort : std::runtime_error {
  explicit WindowTooShort(const std::string& what) : std::runtime_error(what) {}
};

// Truth of f at position pos of the prefix. Throws when the formula reads past
// the end (pos + nesting of X exceeds the last letter); a prefix decides a
// body only if it is long enough to see every offset the body mentions.
inline bool eval_at(const Formula& f, const Trace& trace, size_t pos) {
  switch (f.kind()) {
    case Kind::True:
      return true;
    case Kind::False:
      return false;
    case Kind::Atom:
      if (pos >= trace.size())
        throw WindowTooShort("eval: position " + std::to_string(pos) +
                             " past end of trace of length " +
                             std::to_string(trace.size()));
      return trace[pos].count(f.name()) > 0;
    case Kind::Not:
      return !eval_at(f.child(0), trace, pos);
    case Kind::Next:
      return eval_at(f.child(0), trace, pos + 1);
    case Kind::And:
      return eval_at(f.child(0), trace, pos) && eval_at(f.child(1), trace, pos);
    case Kind::Or:
      return eval_at(f.child(0), trace, pos) || eval_at(f.child(1), trace, pos);
    case Kind::Implies:
      return !eval_at(f.child(0), trace, pos) || eval_at(f.child(1), trace, pos);
  }
  return false;  // unreachable
}

}  // namespace moby
