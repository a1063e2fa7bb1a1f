#pragma once

// ASCII surface syntax for patterns, signature files, and text renderings of
// substitutions, problems and traces.
//
//   expr  ::= 'ex' x '.' expr | 'all' x '.' expr | iff
//   iff   ::= imp ('<->' imp)*             left-assoc
//   imp   ::= or ('->' imp)?               right-assoc
//   or    ::= and ('\/' and)*              left-assoc
//   and   ::= rel ('/\' rel)*              left-assoc
//   rel   ::= unary (('=' | 'in' | 'subset') unary)?
//   unary ::= '!' unary | app
//   app   ::= atom atom*                   left-assoc
//   atom  ::= ident | integer | 'bot' | 'top' | 'ceil' | 'floor' atom | '(' expr ')'
//
// A binder may also appear wherever an operand is expected; its body extends
// as far right as possible.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mlunify/engine.hpp"
#include "mlunify/pattern.hpp"
#include "mlunify/substitution.hpp"
#include "mlunify/theory.hpp"

namespace mlu {

struct Diagnostic {
  std::size_t line = 1;
  std::size_t column = 1;
  std::string message;
};

class ParseError : public Error {
 public:
  explicit ParseError(std::vector<Diagnostic> diags)
      : Error(render(diags)), diagnostics_(std::move(diags)) {}

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  static std::string render(const std::vector<Diagnostic>& diags) {
    std::string out;
    for (const auto& d : diags) {
      if (!out.empty()) out += '\n';
      out += std::to_string(d.line) + ":" + std::to_string(d.column) + ": " + d.message;
    }
    return out;
  }

  std::vector<Diagnostic> diagnostics_;
};

struct ParseOptions {
  /// Accept names with the reserved prefix (used when reading generated files).
  bool allow_reserved = false;
};

inline bool is_keyword(std::string_view s) {
  static constexpr std::string_view kws[] = {"bot", "top", "ex", "all", "ceil", "floor", "in", "subset", "symbol", "arity"};
  for (auto k : kws) {
    if (k == s) return true;
  }
  return false;
}

namespace detail {

enum class Tok { Ident, Int, LParen, RParen, Dot, Bang, And, Or, Arrow, Iff, Eq, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto fail = [&](const std::string& msg) { throw ParseError({Diagnostic{line, col, msg}}); };
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    const std::size_t l = line, cl = col;
    auto emit = [&](Tok k, std::size_t n) {
      out.push_back({k, std::string(src.substr(i, n)), l, cl});
      advance(n);
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i + 1;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\'')) ++j;
      emit(Tok::Ident, j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i + 1;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      emit(Tok::Int, j - i);
    } else if (c == '(') {
      emit(Tok::LParen, 1);
    } else if (c == ')') {
      emit(Tok::RParen, 1);
    } else if (c == '.') {
      emit(Tok::Dot, 1);
    } else if (c == '!') {
      emit(Tok::Bang, 1);
    } else if (c == '=') {
      emit(Tok::Eq, 1);
    } else if (src.substr(i, 2) == "/\\") {
      emit(Tok::And, 2);
    } else if (src.substr(i, 2) == "\\/") {
      emit(Tok::Or, 2);
    } else if (src.substr(i, 2) == "->") {
      emit(Tok::Arrow, 2);
    } else if (src.substr(i, 3) == "<->") {
      emit(Tok::Iff, 3);
    } else {
      fail(std::string("unknown token '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  Parser(std::string_view src, Signature& sig, ParseOptions opts) : toks_(tokenize(src)), sig_(sig), opts_(opts) {}

  Pattern parse_all() {
    Pattern p = expr();
    if (peek().kind != Tok::End) fail(peek(), "unexpected '" + peek().text + "'");
    return p;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }
  bool at_ident(std::string_view s) const { return peek().kind == Tok::Ident && peek().text == s; }
  bool at_binder() const { return at_ident("ex") || at_ident("all"); }

  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    throw ParseError({Diagnostic{t.line, t.column, msg}});
  }

  void expect(Tok k, std::string_view what) {
    if (peek().kind != k) fail(peek(), "expected " + std::string(what));
    take();
  }

  Pattern expr() { return at_binder() ? binder() : iff_level(); }

  // Operand position: a binder is allowed and swallows the rest.
  template <class F>
  Pattern operand(F next) {
    return at_binder() ? binder() : (this->*next)();
  }

  Pattern binder() {
    const bool is_forall = take().text == "all";
    const Token& v = take();
    if (v.kind != Tok::Ident || is_keyword(v.text)) fail(v, "expected a variable after binder");
    check_name(v);
    expect(Tok::Dot, "'.' after bound variable");
    scope_.push_back(v.text);
    Pattern body = expr();
    scope_.pop_back();
    return is_forall ? forall(v.text, body) : Pattern::exists(v.text, body);
  }

  Pattern iff_level() {
    Pattern lhs = imp_level();
    while (peek().kind == Tok::Iff) {
      take();
      lhs = iff(lhs, operand(&Parser::imp_level));
    }
    return lhs;
  }

  Pattern imp_level() {
    Pattern lhs = or_level();
    if (peek().kind == Tok::Arrow) {
      take();
      return Pattern::imp(lhs, operand(&Parser::imp_level));
    }
    return lhs;
  }

  Pattern or_level() {
    Pattern lhs = and_level();
    while (peek().kind == Tok::Or) {
      take();
      lhs = lor(lhs, operand(&Parser::and_level));
    }
    return lhs;
  }

  Pattern and_level() {
    Pattern lhs = rel_level();
    while (peek().kind == Tok::And) {
      take();
      lhs = land(lhs, operand(&Parser::rel_level));
    }
    return lhs;
  }

  Pattern rel_level() {
    Pattern lhs = unary_level();
    auto rel = [&]() -> int {
      if (peek().kind == Tok::Eq) return 1;
      if (at_ident("in")) return 2;
      if (at_ident("subset")) return 3;
      return 0;
    };
    if (int r = rel()) {
      take();
      Pattern rhs = operand(&Parser::unary_level);
      if (rel()) fail(peek(), "'=', 'in' and 'subset' do not associate; add parentheses");
      if (r == 1) return equal(lhs, rhs);
      if (r == 2) return member(lhs, rhs);
      return subset(lhs, rhs);
    }
    return lhs;
  }

  Pattern unary_level() {
    if (peek().kind == Tok::Bang) {
      take();
      return neg(operand(&Parser::unary_level));
    }
    return app_level();
  }

  bool starts_atom() const {
    const Token& t = peek();
    if (t.kind == Tok::Int || t.kind == Tok::LParen) return true;
    if (t.kind != Tok::Ident) return false;
    return t.text != "in" && t.text != "subset" && t.text != "ex" && t.text != "all";
  }

  Pattern app_level() {
    Pattern fn = atom();
    while (starts_atom()) fn = Pattern::app(fn, atom());
    return fn;
  }

  void check_name(const Token& t) const {
    if (is_reserved_name(t.text) && !opts_.allow_reserved) {
      fail(t, "names starting with '" + std::string(1, kReservedPrefix) + "' are reserved");
    }
  }

  Pattern atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::LParen: {
        take();
        Pattern p = expr();
        expect(Tok::RParen, "')'");
        return p;
      }
      case Tok::Int:
        take();
        sig_.declare(t.text, 0u);
        return Pattern::sym(t.text);
      case Tok::Ident: {
        if (t.text == "bot") return take(), Pattern::bot();
        if (t.text == "top") return take(), top();
        if (t.text == "ceil") return take(), definedness_symbol();
        if (t.text == "floor") {
          take();
          if (!starts_atom()) fail(peek(), "expected an operand after 'floor'");
          return total(atom());
        }
        if (is_keyword(t.text)) fail(t, "unexpected keyword '" + t.text + "'");
        check_name(t);
        take();
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
          if (*it == t.text) return Pattern::evar(t.text);
        }
        if (sig_.contains(t.text)) return Pattern::sym(t.text);
        return Pattern::evar(t.text);
      }
      case Tok::End:
        fail(t, "unexpected end of input");
      case Tok::RParen:
        fail(t, "unbalanced ')'");
      default:
        fail(t, "unexpected '" + t.text + "'");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Signature& sig_;
  ParseOptions opts_;
  std::vector<std::string> scope_;
};

}  // namespace detail

/// Parses a pattern. Declared symbols parse as symbols, other identifiers as
/// variables; integer literals are declared as nullary symbols on first use.
inline Pattern parse_pattern(std::string_view src, Signature& sig, ParseOptions opts = {}) {
  return detail::Parser(src, sig, opts).parse_all();
}

inline Pattern parse_pattern(std::string_view src, const Signature& sig, ParseOptions opts = {}) {
  Signature copy = sig;
  return parse_pattern(src, copy, opts);
}

/// Parses and requires a term pattern.
inline Pattern parse_term(std::string_view src, Signature& sig, ParseOptions opts = {}) {
  Pattern p = parse_pattern(src, sig, opts);
  if (!p.is_term()) throw ParseError({Diagnostic{1, 1, "'" + std::string(src) + "' is not a term pattern"}});
  return p;
}

// ---------------------------------------------------------------------------
// Printing.

namespace detail {

// Precedence levels, loosest first.
enum Level : int { kBinder = 0, kIff, kImp, kOr, kAnd, kRel, kUnary, kApp, kAtom };

struct Shown {
  std::string text;
  int level;
};

Shown show(const Pattern& p);

inline std::string at(const Pattern& p, int min_level) {
  Shown s = show(p);
  return s.level >= min_level ? std::move(s.text) : "(" + s.text + ")";
}

inline Shown show(const Pattern& p) {
  using K = Pattern::Kind;
  switch (p.kind()) {
    case K::Bot:
      return {"bot", kAtom};
    case K::Sym:
    case K::EVar:
      return {p.name(), kAtom};
    case K::Exists:
      return {"ex " + p.name() + " . " + at(p.body(), kBinder), kBinder};
    case K::App:
      if (is_definedness_symbol(p.left())) {
        if (auto c = match_and(p.right())) return {at(c->first, kUnary) + " in " + at(c->second, kUnary), kRel};
      }
      return {at(p.left(), kApp) + " " + at(p.right(), kAtom), kApp};
    case K::Imp:
      break;
  }
  if (is_top(p)) return {"top", kAtom};
  if (p.right().is(K::Bot)) {
    if (auto t = match_total(p)) {
      if (auto e = match_iff(*t)) return {at(e->first, kUnary) + " = " + at(e->second, kUnary), kRel};
      if (t->is(K::Imp) && !t->right().is(K::Bot)) {
        return {at(t->left(), kUnary) + " subset " + at(t->right(), kUnary), kRel};
      }
      return {"floor(" + at(*t, kBinder) + ")", kAtom};
    }
    if (auto f = match_forall(p)) return {"all " + f->first + " . " + at(f->second, kBinder), kBinder};
    if (auto c = match_and(p)) {
      if (auto e = match_iff(p)) return {at(e->first, kIff) + " <-> " + at(e->second, kImp), kIff};
      return {at(c->first, kAnd) + " /\\ " + at(c->second, kRel), kAnd};
    }
    return {"!" + at(p.left(), kUnary), kUnary};
  }
  if (auto d = match_or(p)) return {at(d->first, kOr) + " \\/ " + at(d->second, kAnd), kOr};
  return {at(p.left(), kOr) + " -> " + at(p.right(), kImp), kImp};
}

}  // namespace detail

inline std::string print_pattern(const Pattern& p) { return detail::show(p).text; }

inline std::ostream& operator<<(std::ostream& os, const Pattern& p) { return os << print_pattern(p); }

inline std::string format_substitution(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [x, t] : s.bindings()) {
    if (!first) out += ", ";
    first = false;
    out += x + " |-> " + print_pattern(t);
  }
  return out + "}";
}

inline std::string format_equation(const Equation& e) {
  return "<" + print_pattern(e.lhs) + ", " + print_pattern(e.rhs) + ">";
}

template <UnificationProblem P>
std::string format_problem(const P& p) {
  if (p.is_failed()) return "bot";
  if (p.pairs().empty()) return "{}";
  std::string out;
  for (const auto& e : p.pairs()) {
    if (!out.empty()) out += " <| ";
    out += format_equation(e);
  }
  return out;
}

/// One line for the initial problem, then `RULE  pair -> problem` per step.
template <UnificationProblem P>
std::string format_trace(const UnifTrace<P>& trace) {
  std::string out = format_problem(trace.initial) + "\n";
  for (const auto& s : trace.steps) {
    out += std::string(rule_name(s.rule)) + "  " + format_equation(s.pair) + " -> " + format_problem(s.after) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Signature files: one `symbol <name> [arity <n>]` per line, `#` comments.

inline Signature parse_signature(std::string_view text) {
  Signature sig;
  std::vector<Diagnostic> diags;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::vector<std::string> w;
    for (std::string s; words >> s;) w.push_back(s);
    if (w.empty()) continue;
    auto bad = [&](const std::string& msg) { diags.push_back({lineno, 1, msg}); };
    if (w[0] != "symbol" || (w.size() != 2 && w.size() != 4) || (w.size() == 4 && w[2] != "arity")) {
      bad("expected 'symbol <name> [arity <n>]'");
      continue;
    }
    const std::string& name = w[1];
    const bool ident = (std::isalpha(static_cast<unsigned char>(name[0])) &&
                        std::all_of(name.begin(), name.end(), [](char c) {
                          return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
                        })) ||
                       std::all_of(name.begin(), name.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    if (!ident || is_keyword(name)) {
      bad("invalid symbol name '" + name + "'");
      continue;
    }
    std::optional<unsigned> arity;
    if (w.size() == 4) {
      unsigned n = 0;
      auto [ptr, ec] = std::from_chars(w[3].data(), w[3].data() + w[3].size(), n);
      if (ec != std::errc() || ptr != w[3].data() + w[3].size()) {
        bad("invalid arity '" + w[3] + "'");
        continue;
      }
      arity = n;
    }
    try {
      sig.declare(name, arity);
    } catch (const Error& e) {
      bad(e.what());
    }
  }
  if (!diags.empty()) throw ParseError(std::move(diags));
  return sig;
}

inline std::string format_signature(const Signature& sig) {
  std::string out;
  for (const auto& [name, arity] : sig.symbols()) {
    out += "symbol " + name;
    if (arity) out += " arity " + std::to_string(*arity);
    out += '\n';
  }
  return out;
}

}  // namespace mlu
