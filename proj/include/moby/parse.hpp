#pragma once

// Recursive-descent parser for the TLSF subset and the modes file format.
// Parameters, buses, indexed big-operators and macros are expanded here, so
// everything downstream sees plain scalar atoms.
//
// Grammar (EBNF, also documented in the README):
//
//   spec        = { section } ;
//   section     = "PARAMETERS"  "{" { ident "=" int-expr ";" } "}"
//               | "INPUTS"      "{" { decl ";" } "}"
//               | "OUTPUTS"     "{" { decl ";" } "}"
//               | "INITIALLY"   "{" { formula ";" } "}"
//               | "PRESET"      "{" { formula ";" } "}"
//               | "ASSUMPTIONS" "{" { item ";" } "}"
//               | "GUARANTEES"  "{" { item ";" } "}"
//               | "DEFINITIONS" "{" { ident "(" ident ")" "=" item ";" } "}" ;
//   decl        = ident [ "[" int-expr "]" ] ;            (* bus of width k *)
//   item        = [ "G" ] formula ;                       (* G wraps the item *)
//   formula     = implication { "<->" implication } ;
//   implication = disjunction [ "->" implication ] ;
//   disjunction = conjunction { "||" conjunction } ;
//   conjunction = unary { "&&" unary } ;
//   unary       = "!" unary | "X" unary | primary ;
//   primary     = "(" formula ")" | "TRUE" | "FALSE"
//               | ident [ "[" int-expr "]" | "(" ident ")" ]   (* atom, bus, macro *)
//               | ("&&" | "||") "[" bound "]" unary ;          (* indexed operator *)
//   bound       = int-expr ("<"|"<=") ident ("<"|"<=") int-expr
//                 [ "\" "{" int-expr { "," int-expr } "}" ] ;
//   int-expr    = affine arithmetic over ints, parameters, bound variables ;
//
// Modes files:
//
//   modes    = mode { mode } [ relation ] ;
//   mode     = "MODE" ident "{" "pred" "=" formula ";" "init" "=" formula ";"
//              [ "arrival" "=" formula ";" ] "}" ;
//   relation = "RELATION" "{" { ident "->" ident ";" } "}" ;

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "moby/formula.hpp"
#include "moby/spec.hpp"

namespace moby {

struct SyntaxError : std::runtime_error {
  int line, col;
  SyntaxError(const std::string& what, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) +
                           ": " + what),
        line(line),
        col(col) {}
};

struct UndeclaredAtom : SyntaxError {
  using SyntaxError::SyntaxError;
};
struct ArityError : SyntaxError {
  using SyntaxError::SyntaxError;
};
struct UnboundParameter : SyntaxError {
  using SyntaxError::SyntaxError;
};
struct NonSafetyOperator : SyntaxError {
  using SyntaxError::SyntaxError;
};
struct UnknownAtom : SyntaxError {
  using SyntaxError::SyntaxError;
};
struct EmptyModeList : std::runtime_error {
  EmptyModeList() : std::runtime_error("modes file declares no MODE blocks") {}
};

namespace detail {

enum class Tok {
  Ident, Int, LBrace, RBrace, LParen, RParen, LBracket, RBracket,
  Semi, Comma, Assign, Backslash, AndAnd, OrOr, Not, Arrow, Equiv,
  Lt, Le, Plus, Minus, Star, End
};

struct Token {
  Tok kind;
  std::string text;
  long value = 0;
  int line = 1, col = 1;
};

inline std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](Tok k, std::string text, long v = 0) {
    out.push_back({k, std::move(text), v, line, col});
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) ||
                                src[j] == '_'))
        ++j;
      push(Tok::Ident, src.substr(i, j - i));
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      long v = 0;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
        v = v * 10 + (src[j] - '0');
        ++j;
      }
      push(Tok::Int, src.substr(i, j - i), v);
      col += static_cast<int>(j - i);
      i = j;
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    if (two('&', '&')) { push(Tok::AndAnd, "&&"); i += 2; col += 2; continue; }
    if (two('|', '|')) { push(Tok::OrOr, "||"); i += 2; col += 2; continue; }
    if (c == '<' && i + 2 < src.size() && src[i + 1] == '-' && src[i + 2] == '>') {
      push(Tok::Equiv, "<->"); i += 3; col += 3; continue;
    }
    if (two('-', '>')) { push(Tok::Arrow, "->"); i += 2; col += 2; continue; }
    if (two('<', '=')) { push(Tok::Le, "<="); i += 2; col += 2; continue; }
    switch (c) {
      case '{': push(Tok::LBrace, "{"); break;
      case '}': push(Tok::RBrace, "}"); break;
      case '(': push(Tok::LParen, "("); break;
      case ')': push(Tok::RParen, ")"); break;
      case '[': push(Tok::LBracket, "["); break;
      case ']': push(Tok::RBracket, "]"); break;
      case ';': push(Tok::Semi, ";"); break;
      case ',': push(Tok::Comma, ","); break;
      case '=': push(Tok::Assign, "="); break;
      case '\\': push(Tok::Backslash, "\\"); break;
      case '!': push(Tok::Not, "!"); break;
      case '<': push(Tok::Lt, "<"); break;
      case '+': push(Tok::Plus, "+"); break;
      case '-': push(Tok::Minus, "-"); break;
      case '*': push(Tok::Star, "*"); break;
      default:
        throw SyntaxError(std::string("unexpected character '") + c + "'", line,
                          col);
    }
    ++i;
    ++col;
  }
  out.push_back({Tok::End, "<eof>", 0, line, col});
  return out;
}

// Symbol tables shared between the spec parser and the modes parser (the
// latter resolves atoms against an already-parsed spec).
struct Symbols {
  std::map<std::string, int> params;
  std::map<std::string, int> buses;      // bus name -> width
  std::map<std::string, AtomKind> atoms; // expanded scalar atoms
  std::vector<std::string>* input_order = nullptr;
  std::vector<std::string>* output_order = nullptr;
};

struct Macro {
  std::string formal;         // the one bus parameter
  bool has_g = false;         // body was written with a leading G
  std::vector<Token> body;    // token slice ending in Tok::End
};

class FormulaParser {
 public:
  FormulaParser(const std::vector<Token>& toks, Symbols& syms,
                std::map<std::string, Macro>& macros)
      : toks_(toks), syms_(syms), macros_(macros) {}

  // Environment of bound index variables (indexed operators, macro indices).
  std::map<std::string, long> env;
  // Bus aliasing during macro expansion: formal name -> actual bus.
  std::map<std::string, std::string> bus_alias;

  size_t pos = 0;

  const Token& peek(int ahead = 0) const {
    size_t p = pos + ahead;
    return p < toks_.size() ? toks_[p] : toks_.back();
  }
  const Token& get() { return toks_[pos < toks_.size() - 1 ? pos++ : pos]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    get();
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k)
      throw SyntaxError(std::string("expected ") + what + ", found '" +
                            peek().text + "'",
                        peek().line, peek().col);
    return toks_[pos++];
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, peek().line, peek().col);
  }

  // ---- integer expressions -------------------------------------------------

  long int_expr() {
    long v = int_term();
    for (;;) {
      if (accept(Tok::Plus)) v += int_term();
      else if (accept(Tok::Minus)) v -= int_term();
      else return v;
    }
  }

  long int_term() {
    long v = int_factor();
    while (accept(Tok::Star)) v *= int_factor();
    return v;
  }

  long int_factor() {
    const Token& t = peek();
    if (t.kind == Tok::Int) return get().value;
    if (t.kind == Tok::Minus) {
      get();
      return -int_factor();
    }
    if (t.kind == Tok::LParen) {
      get();
      long v = int_expr();
      expect(Tok::RParen, ")");
      return v;
    }
    if (t.kind == Tok::Ident) {
      auto env_it = env.find(t.text);
      if (env_it != env.end()) {
        get();
        return env_it->second;
      }
      auto par_it = syms_.params.find(t.text);
      if (par_it != syms_.params.end()) {
        get();
        return par_it->second;
      }
      throw UnboundParameter("unbound parameter '" + t.text + "'", t.line, t.col);
    }
    fail("expected integer expression");
  }

  // ---- formulas --------------------------------------------------------

  Formula formula() {
    Formula f = implication();
    while (peek().kind == Tok::Equiv) {
      get();
      Formula g = implication();
      f = Formula::conj(Formula::implies(f, g), Formula::implies(g, f));
    }
    check_no_infix_temporal();
    return f;
  }

  Formula implication() {
    Formula f = disjunction();
    if (accept(Tok::Arrow)) return Formula::implies(f, implication());
    return f;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (peek().kind == Tok::OrOr && peek(1).kind != Tok::LBracket) {
      get();
      f = Formula::disj(f, conjunction());
    }
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (peek().kind == Tok::AndAnd && peek(1).kind != Tok::LBracket) {
      get();
      f = Formula::conj(f, unary());
    }
    return f;
  }

  Formula unary() {
    const Token& t = peek();
    if (t.kind == Tok::Not) {
      get();
      return Formula::neg(unary());
    }
    if (t.kind == Tok::Ident && t.text == "X") {
      get();
      return Formula::next(unary());
    }
    if (t.kind == Tok::Ident && (t.text == "G" || t.text == "F" || t.text == "U" ||
                                 t.text == "R" || t.text == "W")) {
      throw NonSafetyOperator("operator '" + t.text +
                                  "' is not allowed inside a formula",
                              t.line, t.col);
    }
    return primary();
  }

  Formula primary() {
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
      get();
      Formula f = formula();
      expect(Tok::RParen, ")");
      return f;
    }
    if ((t.kind == Tok::AndAnd || t.kind == Tok::OrOr) &&
        peek(1).kind == Tok::LBracket)
      return indexed_op();
    if (t.kind == Tok::Ident) {
      if (t.text == "TRUE") { get(); return Formula::tt(); }
      if (t.text == "FALSE") { get(); return Formula::ff(); }
      return atom_or_call();
    }
    fail("expected formula");
  }

  // Indexed big operator: &&[lo <= i <= hi \ {e,...}] body. The body slice is
  // re-parsed once per index value with the variable bound.
  Formula indexed_op() {
    bool is_and = get().kind == Tok::AndAnd;
    expect(Tok::LBracket, "[");
    long lo = int_expr();
    bool lo_strict = bound_rel();
    const Token& var = expect(Tok::Ident, "index variable");
    std::string name = var.text;
    if (env.count(name))
      throw SyntaxError("index variable '" + name + "' shadows an outer index",
                        var.line, var.col);
    bool hi_strict = bound_rel();
    long hi = int_expr();
    if (lo_strict) ++lo;
    if (hi_strict) --hi;
    std::set<long> excluded;
    if (accept(Tok::Backslash)) {
      expect(Tok::LBrace, "{");
      excluded.insert(int_expr());
      while (accept(Tok::Comma)) excluded.insert(int_expr());
      expect(Tok::RBrace, "}");
    }
    expect(Tok::RBracket, "]");

    size_t body_start = pos;
    std::vector<Formula> parts;
    bool parsed_any = false;
    for (long v = lo; v <= hi; ++v) {
      if (excluded.count(v)) continue;
      pos = body_start;
      env[name] = v;
      parts.push_back(unary());
      parsed_any = true;
    }
    env.erase(name);
    if (!parsed_any) {
      // Empty range: parse the body once to advance past it, discarding the
      // result. Semantic checks stay on; the dummy binding keeps indices sane.
      pos = body_start;
      env[name] = lo <= hi ? lo : 0;
      (void)unary();
      env.erase(name);
      return is_and ? Formula::tt() : Formula::ff();
    }
    return is_and ? Formula::conj_all(parts) : Formula::disj_all(parts);
  }

  bool bound_rel() {
    if (accept(Tok::Le)) return false;
    if (accept(Tok::Lt)) return true;
    fail("expected '<' or '<=' in index bound");
  }

  // ident, ident[expr] (bus element), or ident(bus) (macro call).
  Formula atom_or_call() {
    const Token& t = get();
    std::string name = t.text;
    auto alias = bus_alias.find(name);
    if (alias != bus_alias.end()) name = alias->second;

    if (peek().kind == Tok::LBracket) {
      get();
      long k = int_expr();
      expect(Tok::RBracket, "]");
      auto bus = syms_.buses.find(name);
      if (bus == syms_.buses.end())
        throw ArityError("'" + name + "' is not a bus", t.line, t.col);
      if (k < 0 || k >= bus->second)
        throw ArityError("index " + std::to_string(k) + " out of range for bus '" +
                             name + "[" + std::to_string(bus->second) + "]'",
                         t.line, t.col);
      return Formula::atom(name + "_" + std::to_string(k));
    }

    if (peek().kind == Tok::LParen && macros_.count(name)) {
      const Macro& mac = macros_.at(name);
      if (mac.has_g)
        throw NonSafetyOperator(
            "macro '" + name + "' carries a top-level G and cannot appear "
            "inside a formula",
            t.line, t.col);
      return expand_macro(mac, t);
    }

    if (syms_.atoms.count(name)) return Formula::atom(name);
    if (syms_.buses.count(name))
      throw ArityError("bus '" + name + "' used without an index", t.line, t.col);
    throw UndeclaredAtom("undeclared atom '" + name + "'", t.line, t.col);
  }

  Formula expand_macro(const Macro& mac, const Token& at) {
    expect(Tok::LParen, "(");
    const Token& arg = expect(Tok::Ident, "bus argument");
    std::string actual = arg.text;
    auto alias = bus_alias.find(actual);
    if (alias != bus_alias.end()) actual = alias->second;
    if (!syms_.buses.count(actual))
      throw ArityError("macro argument '" + actual + "' is not a declared bus",
                       arg.line, arg.col);
    expect(Tok::RParen, ")");

    FormulaParser sub(mac.body, syms_, macros_);
    sub.env = env;
    sub.bus_alias = bus_alias;
    sub.bus_alias[mac.formal] = actual;
    Formula f = sub.formula();
    if (sub.peek().kind != Tok::End)
      throw SyntaxError("trailing tokens in macro '" + at.text + "' body",
                        sub.peek().line, sub.peek().col);
    return f;
  }

  // U/R/W written infix (e.g. `a U b`) land here after a complete formula.
  void check_no_infix_temporal() const {
    const Token& t = peek();
    if (t.kind == Tok::Ident &&
        (t.text == "U" || t.text == "R" || t.text == "W"))
      throw NonSafetyOperator("operator '" + t.text + "' is not supported",
                              t.line, t.col);
  }

 private:
  const std::vector<Token>& toks_;
  Symbols& syms_;
  std::map<std::string, Macro>& macros_;
};

inline void require_atoms(const Formula& f, const ReactiveSpec& spec,
                          AtomKind kind, const char* where, int line, int col) {
  for (const auto& a : f.atoms()) {
    bool ok = kind == AtomKind::Input ? spec.is_input(a) : spec.is_output(a);
    if (!ok)
      throw SyntaxError(std::string(where) + " may only constrain " +
                            (kind == AtomKind::Input ? "input" : "output") +
                            " atoms, found '" + a + "'",
                        line, col);
  }
}

}  // namespace detail

inline ReactiveSpec parse_spec(const std::string& text) {
  using namespace detail;
  std::vector<Token> toks = lex(text);
  ReactiveSpec spec;
  Symbols syms;
  std::map<std::string, Macro> macros;
  FormulaParser p(toks, syms, macros);
  std::set<std::string> seen_sections;

  auto declare = [&](const std::string& name, AtomKind kind, int line, int col) {
    if (syms.atoms.count(name) || syms.buses.count(name))
      throw SyntaxError("duplicate declaration of '" + name + "'", line, col);
    syms.atoms[name] = kind;
    (kind == AtomKind::Input ? spec.inputs : spec.outputs).push_back(name);
  };

  auto parse_decls = [&](AtomKind kind) {
    p.expect(Tok::LBrace, "{");
    while (!p.accept(Tok::RBrace)) {
      const Token& name = p.expect(Tok::Ident, "atom or bus name");
      if (p.accept(Tok::LBracket)) {
        long width = p.int_expr();
        p.expect(Tok::RBracket, "]");
        if (width <= 0)
          throw ArityError("bus '" + name.text + "' must have positive width",
                           name.line, name.col);
        if (syms.buses.count(name.text) || syms.atoms.count(name.text))
          throw SyntaxError("duplicate declaration of '" + name.text + "'",
                            name.line, name.col);
        syms.buses[name.text] = static_cast<int>(width);
        for (long k = 0; k < width; ++k)
          declare(name.text + "_" + std::to_string(k), kind, name.line, name.col);
      } else {
        declare(name.text, kind, name.line, name.col);
      }
      p.expect(Tok::Semi, ";");
    }
  };

  // Item = [G] formula, or a whole-item G-carrying macro call.
  auto parse_item = [&]() -> std::pair<bool, Formula> {
    const Token& t = p.peek();
    if (t.kind == Tok::Ident && t.text == "G") {
      p.get();
      return {true, p.formula()};
    }
    if (t.kind == Tok::Ident && macros.count(t.text) && macros.at(t.text).has_g &&
        p.peek(1).kind == Tok::LParen) {
      p.get();
      return {true, p.expand_macro(macros.at(t.text), t)};
    }
    return {false, p.formula()};
  };

  auto conjoin = [](std::optional<Formula>& slot, const Formula& f) {
    slot = slot ? Formula::conj(*slot, f) : f;
  };

  while (p.peek().kind != Tok::End) {
    const Token& sect = p.expect(Tok::Ident, "section name");
    std::string name = sect.text;
    if (!seen_sections.insert(name).second)
      throw SyntaxError("duplicate section " + name, sect.line, sect.col);

    if (name == "PARAMETERS") {
      p.expect(Tok::LBrace, "{");
      while (!p.accept(Tok::RBrace)) {
        const Token& id = p.expect(Tok::Ident, "parameter name");
        p.expect(Tok::Assign, "=");
        long v = p.int_expr();
        p.expect(Tok::Semi, ";");
        syms.params[id.text] = static_cast<int>(v);
        spec.params[id.text] = static_cast<int>(v);
      }
    } else if (name == "INPUTS") {
      parse_decls(AtomKind::Input);
    } else if (name == "OUTPUTS") {
      parse_decls(AtomKind::Output);
    } else if (name == "INITIALLY" || name == "PRESET") {
      bool is_initially = name == "INITIALLY";
      p.expect(Tok::LBrace, "{");
      while (!p.accept(Tok::RBrace)) {
        const Token& at = p.peek();
        Formula f = p.formula();
        p.expect(Tok::Semi, ";");
        if (f.x_depth() != 0)
          throw SyntaxError(name + " must be X-free", at.line, at.col);
        require_atoms(f, spec, is_initially ? AtomKind::Input : AtomKind::Output,
                      name.c_str(), at.line, at.col);
        conjoin(is_initially ? spec.initially : spec.preset, f);
      }
    } else if (name == "ASSUMPTIONS" || name == "GUARANTEES") {
      bool is_assump = name == "ASSUMPTIONS";
      p.expect(Tok::LBrace, "{");
      while (!p.accept(Tok::RBrace)) {
        const Token& at = p.peek();
        auto [has_g, f] = parse_item();
        p.expect(Tok::Semi, ";");
        if (has_g) {
          (is_assump ? spec.assumptions : spec.guarantees).push_back(f);
        } else {
          // Un-G'd items are initial-state constraints.
          if (f.x_depth() != 0)
            throw SyntaxError("item without G must be X-free", at.line, at.col);
          require_atoms(f, spec, is_assump ? AtomKind::Input : AtomKind::Output,
                        is_assump ? "ASSUMPTIONS initial item"
                                  : "GUARANTEES initial item",
                        at.line, at.col);
          conjoin(is_assump ? spec.initially : spec.preset, f);
        }
      }
    } else if (name == "DEFINITIONS") {
      p.expect(Tok::LBrace, "{");
      while (!p.accept(Tok::RBrace)) {
        const Token& id = p.expect(Tok::Ident, "macro name");
        p.expect(Tok::LParen, "(");
        const Token& formal = p.expect(Tok::Ident, "macro parameter");
        p.expect(Tok::RParen, ")");
        p.expect(Tok::Assign, "=");
        Macro mac;
        mac.formal = formal.text;
        if (p.peek().kind == Tok::Ident && p.peek().text == "G") {
          p.get();
          mac.has_g = true;
        }
        // Capture the body tokens verbatim up to the terminating ';'.
        while (p.peek().kind != Tok::Semi && p.peek().kind != Tok::End)
          mac.body.push_back(p.get());
        p.expect(Tok::Semi, ";");
        mac.body.push_back({Tok::End, "<eof>", 0, id.line, id.col});
        if (macros.count(id.text))
          throw SyntaxError("duplicate macro '" + id.text + "'", id.line, id.col);
        macros[id.text] = std::move(mac);
      }
    } else {
      throw SyntaxError("unknown section '" + name + "'", sect.line, sect.col);
    }
  }
  return spec;
}

// Parses one bare formula against an already-parsed spec's atoms. Used for
// formula strings embedded in manifests and on the command line.
inline Formula parse_formula(const std::string& text, const ReactiveSpec& spec) {
  using namespace detail;
  std::vector<Token> toks = lex(text);
  Symbols syms;
  syms.params = spec.params;
  for (const auto& a : spec.inputs) syms.atoms[a] = AtomKind::Input;
  for (const auto& a : spec.outputs) syms.atoms[a] = AtomKind::Output;
  std::map<std::string, Macro> macros;
  FormulaParser p(toks, syms, macros);
  Formula f = p.formula();
  if (p.peek().kind != Tok::End)
    throw SyntaxError("trailing tokens after formula", p.peek().line,
                      p.peek().col);
  return f;
}

inline ModeDecomposition parse_modes(const std::string& text,
                                     const ReactiveSpec& spec) {
  using namespace detail;
  std::vector<Token> toks = lex(text);

  // Resolve atoms against the spec's symbol table. Buses were already
  // expanded when the spec was parsed, so modes files use scalar names.
  Symbols syms;
  syms.params = spec.params;
  for (const auto& a : spec.inputs) syms.atoms[a] = AtomKind::Input;
  for (const auto& a : spec.outputs) syms.atoms[a] = AtomKind::Output;
  std::map<std::string, Macro> macros;
  FormulaParser p(toks, syms, macros);

  ModeDecomposition result;
  std::map<std::string, int> index_of;

  auto mode_formula = [&](AtomKind kind, const char* what) {
    const Token& at = p.peek();
    Formula f = [&] {
      try {
        return p.formula();
      } catch (const UndeclaredAtom& e) {
        // Same condition, but the modes-file contract names it UnknownAtom.
        std::string msg = e.what();
        msg = msg.substr(msg.find(": ") + 2);
        throw UnknownAtom(msg, e.line, e.col);
      }
    }();
    if (f.x_depth() != 0)
      throw SyntaxError(std::string(what) + " must be X-free", at.line, at.col);
    for (const auto& a : f.atoms()) {
      if (!spec.declares(a))
        throw UnknownAtom("unknown atom '" + a + "'", at.line, at.col);
      bool ok = kind == AtomKind::Input ? spec.is_input(a) : spec.is_output(a);
      if (!ok)
        throw UnknownAtom("atom '" + a + "' is not " +
                              (kind == AtomKind::Input ? "an input" : "an output"),
                          at.line, at.col);
    }
    return f;
  };

  while (p.peek().kind != Tok::End) {
    const Token& kw = p.expect(Tok::Ident, "MODE or RELATION");
    if (kw.text == "MODE") {
      const Token& name = p.expect(Tok::Ident, "mode name");
      if (index_of.count(name.text))
        throw SyntaxError("duplicate mode '" + name.text + "'", name.line,
                          name.col);
      Mode mode;
      mode.name = name.text;
      mode.arrival = Formula::tt();
      bool saw_pred = false, saw_init = false;
      p.expect(Tok::LBrace, "{");
      while (!p.accept(Tok::RBrace)) {
        const Token& key = p.expect(Tok::Ident, "pred, init or arrival");
        p.expect(Tok::Assign, "=");
        if (key.text == "pred") {
          mode.pred = mode_formula(AtomKind::Output, "mode predicate");
          saw_pred = true;
        } else if (key.text == "init") {
          mode.init = mode_formula(AtomKind::Output, "mode initial condition");
          saw_init = true;
        } else if (key.text == "arrival") {
          mode.arrival = mode_formula(AtomKind::Input, "arrival condition");
        } else {
          throw SyntaxError("unknown mode field '" + key.text + "'", key.line,
                            key.col);
        }
        p.expect(Tok::Semi, ";");
      }
      if (!saw_pred || !saw_init)
        throw SyntaxError("mode '" + mode.name + "' needs both pred and init",
                          name.line, name.col);
      index_of[mode.name] = static_cast<int>(result.modes.size());
      result.modes.push_back(std::move(mode));
    } else if (kw.text == "RELATION") {
      p.expect(Tok::LBrace, "{");
      while (!p.accept(Tok::RBrace)) {
        const Token& from = p.expect(Tok::Ident, "mode name");
        p.expect(Tok::Arrow, "->");
        const Token& to = p.expect(Tok::Ident, "mode name");
        p.expect(Tok::Semi, ";");
        auto fi = index_of.find(from.text), ti = index_of.find(to.text);
        if (fi == index_of.end())
          throw SyntaxError("unknown mode '" + from.text + "' in relation",
                            from.line, from.col);
        if (ti == index_of.end())
          throw SyntaxError("unknown mode '" + to.text + "' in relation",
                            to.line, to.col);
        if (fi->second == ti->second)
          throw SyntaxError("relation must be irreflexive: " + from.text +
                                " -> " + to.text,
                            from.line, from.col);
        result.relation.emplace(fi->second, ti->second);
      }
    } else {
      throw SyntaxError("expected MODE or RELATION, found '" + kw.text + "'",
                        kw.line, kw.col);
    }
  }

  if (result.modes.empty()) throw EmptyModeList();

  // Omitted relation means "any mode may follow any other".
  if (result.relation.empty() && result.modes.size() > 1) {
    int n = static_cast<int>(result.modes.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) result.relation.emplace(i, j);
  }
  return result;
}

}  // namespace moby
