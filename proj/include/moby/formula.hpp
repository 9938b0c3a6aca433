#pragma once

// Propositional LTL with Next as the only temporal connective. Formulas are
// immutable DAG nodes behind shared_ptr; copying a Formula is a pointer copy.
// Equality is structural, ordering is deterministic (kind, then payload), so
// std::set<Formula> iterates in a reproducible order independent of addresses.

#include <cstdint>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace moby {

enum class Kind : uint8_t { True, False, Atom, Not, And, Or, Implies, Next };

class Formula;

namespace detail {

struct Node {
  Kind kind;
  std::string name;                  // Atom only
  std::vector<Formula> children;     // Not/Next: 1, And/Or/Implies: 2
  uint64_t hash = 0;                 // FNV-1a over the structure, precomputed
  int x_depth = 0;                   // max nesting of Next
  size_t size = 1;                   // node count, children included
};

}  // namespace detail

class Formula {
 public:
  Formula() = default;  // empty handle; only comparisons and bool() are safe

  Kind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  const Formula& child(size_t i) const { return node_->children[i]; }
  size_t arity() const { return node_->children.size(); }
  uint64_t hash() const { return node_->hash; }
  int x_depth() const { return node_->x_depth; }
  size_t size() const { return node_->size; }

  explicit operator bool() const { return node_ != nullptr; }

  bool is_true() const { return node_->kind == Kind::True; }
  bool is_false() const { return node_->kind == Kind::False; }
  bool is_const() const { return is_true() || is_false(); }
  bool is_atom() const { return node_->kind == Kind::Atom; }

  // Atom or negated atom.
  bool is_literal() const {
    return is_atom() ||
           (node_->kind == Kind::Not && child(0).is_atom());
  }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    if (a.hash() != b.hash()) return false;
    return structurally_equal(a, b);
  }
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

  // Total order: kind first, atoms by name, composites lexicographic over
  // children. Used by std::set<Formula> to fix iteration order.
  friend bool operator<(const Formula& a, const Formula& b) {
    return compare(a, b) < 0;
  }

  // All atom names occurring anywhere in the formula.
  std::set<std::string> atoms() const {
    std::set<std::string> out;
    collect_atoms(*this, out);
    return out;
  }

  std::string str() const {
    std::ostringstream os;
    print(os, *this, 0);
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Formula& f) {
    print(os, f, 0);
    return os;
  }

  // Factories. conj/disj do not flatten or simplify; see simpl() for that.
  static Formula tt() { return leaf(Kind::True); }
  static Formula ff() { return leaf(Kind::False); }

  static Formula atom(std::string name) {
    auto n = std::make_shared<detail::Node>();
    n->kind = Kind::Atom;
    n->name = std::move(name);
    n->hash = hash_atom(n->name);
    return Formula(std::move(n));
  }

  static Formula neg(Formula f) { return unary(Kind::Not, std::move(f)); }
  static Formula next(Formula f) { return unary(Kind::Next, std::move(f)); }

  static Formula conj(Formula a, Formula b) {
    return binary(Kind::And, std::move(a), std::move(b));
  }
  static Formula disj(Formula a, Formula b) {
    return binary(Kind::Or, std::move(a), std::move(b));
  }
  static Formula implies(Formula a, Formula b) {
    return binary(Kind::Implies, std::move(a), std::move(b));
  }

  // Left fold; empty list gives the unit (True for And, False for Or).
  static Formula conj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return tt();
    Formula acc = fs[0];
    for (size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
    return acc;
  }
  static Formula disj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return ff();
    Formula acc = fs[0];
    for (size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
    return acc;
  }

 private:
  explicit Formula(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}

  static Formula leaf(Kind k) {
    auto n = std::make_shared<detail::Node>();
    n->kind = k;
    n->hash = fnv_step(kFnvBasis, static_cast<uint64_t>(k));
    return Formula(std::move(n));
  }

  static Formula unary(Kind k, Formula c) {
    auto n = std::make_shared<detail::Node>();
    n->kind = k;
    n->hash = fnv_step(fnv_step(kFnvBasis, static_cast<uint64_t>(k)), c.hash());
    n->x_depth = c.x_depth() + (k == Kind::Next ? 1 : 0);
    n->size = c.size() + 1;
    n->children.push_back(std::move(c));
    return Formula(std::move(n));
  }

  static Formula binary(Kind k, Formula a, Formula b) {
    auto n = std::make_shared<detail::Node>();
    n->kind = k;
    n->hash = fnv_step(
        fnv_step(fnv_step(kFnvBasis, static_cast<uint64_t>(k)), a.hash()),
        b.hash());
    n->x_depth = std::max(a.x_depth(), b.x_depth());
    n->size = a.size() + b.size() + 1;
    n->children.push_back(std::move(a));
    n->children.push_back(std::move(b));
    return Formula(std::move(n));
  }

  static constexpr uint64_t kFnvBasis = 14695981039346656037ull;
  static constexpr uint64_t kFnvPrime = 1099511628211ull;

  static uint64_t fnv_step(uint64_t h, uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (i * 8)) & 0xff;
      h *= kFnvPrime;
    }
    return h;
  }

  static uint64_t hash_atom(const std::string& name) {
    uint64_t h = fnv_step(kFnvBasis, static_cast<uint64_t>(Kind::Atom));
    for (unsigned char c : name) {
      h ^= c;
      h *= kFnvPrime;
    }
    return h;
  }

  static bool structurally_equal(const Formula& a, const Formula& b) {
    if (a.kind() != b.kind()) return false;
    if (a.kind() == Kind::Atom) return a.name() == b.name();
    if (a.arity() != b.arity()) return false;
    for (size_t i = 0; i < a.arity(); ++i)
      if (!(a.child(i) == b.child(i))) return false;
    return true;
  }

  static int compare(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return 0;
    if (a.kind() != b.kind())
      return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
    if (a.kind() == Kind::Atom) return a.name().compare(b.name());
    if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
    for (size_t i = 0; i < a.arity(); ++i) {
      int c = compare(a.child(i), b.child(i));
      if (c != 0) return c;
    }
    return 0;
  }

  static void collect_atoms(const Formula& f, std::set<std::string>& out) {
    if (f.is_atom()) {
      out.insert(f.name());
      return;
    }
    for (size_t i = 0; i < f.arity(); ++i) collect_atoms(f.child(i), out);
  }

  // Precedence, loosest to tightest: -> (right assoc), ||, &&, unary (! X),
  // atoms/constants. print(f, min_prec) parenthesizes iff prec(f) < min_prec,
  // so associativity decides which side re-enters at its own level.
  static int prec_of(Kind k) {
    switch (k) {
      case Kind::Implies: return 1;
      case Kind::Or: return 2;
      case Kind::And: return 3;
      case Kind::Not:
      case Kind::Next: return 4;
      default: return 5;
    }
  }

  static void print(std::ostream& os, const Formula& f, int min_prec) {
    int p = prec_of(f.kind());
    bool paren = p < min_prec;
    if (paren) os << '(';
    switch (f.kind()) {
      case Kind::True: os << "TRUE"; break;
      case Kind::False: os << "FALSE"; break;
      case Kind::Atom: os << f.name(); break;
      case Kind::Not:
        os << '!';
        print(os, f.child(0), 4);
        break;
      case Kind::Next:
        os << "X ";
        print(os, f.child(0), 4);
        break;
      case Kind::And:
        print(os, f.child(0), 3);
        os << " && ";
        print(os, f.child(1), 4);
        break;
      case Kind::Or:
        print(os, f.child(0), 2);
        os << " || ";
        print(os, f.child(1), 3);
        break;
      case Kind::Implies:
        print(os, f.child(0), 2);
        os << " -> ";
        print(os, f.child(1), 1);
        break;
    }
    if (paren) os << ')';
  }

  std::shared_ptr<const detail::Node> node_;
};

// Convenience for `set<Formula>` keys in unordered containers.
struct FormulaHash {
  size_t operator()(const Formula& f) const { return static_cast<size_t>(f.hash()); }
};

}  // namespace moby
