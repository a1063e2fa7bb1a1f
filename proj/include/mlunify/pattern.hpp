#pragma once

// Applicative matching-logic patterns: the core AST, alpha-insensitive
// comparison, free variables, capture-avoiding substitution, contexts and
// the derived connectives.

#include <algorithm>
#include <atomic>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mlu {

using VarName = std::string;
using VarSet = std::set<VarName>;

/// Surface and internal name of the definedness symbol.
inline constexpr std::string_view kDefinednessSymbol = "ceil";

/// Names starting with this character are reserved for generated variables.
inline constexpr char kReservedPrefix = '_';

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Pattern {
 public:
  enum class Kind : std::uint8_t { Sym, EVar, App, Bot, Imp, Exists };

  /// The default pattern is bottom.
  Pattern() = default;

  static Pattern evar(VarName name);
  static Pattern sym(std::string name);
  static Pattern bot() { return Pattern(); }
  static Pattern app(Pattern fn, Pattern arg);
  static Pattern imp(Pattern lhs, Pattern rhs);
  static Pattern exists(VarName binder, Pattern body);

  Kind kind() const;
  bool is(Kind k) const { return kind() == k; }

  /// Variable name, symbol name or binder name.
  const std::string& name() const;
  /// App: function part; Imp: premise.
  const Pattern& left() const;
  /// App: argument; Imp: conclusion; Exists: body.
  const Pattern& right() const;
  const Pattern& body() const { return right(); }

  /// Number of nodes.
  std::size_t size() const;
  bool has_binder() const;
  /// True iff the pattern is built from variables, symbols and application.
  bool is_term() const;

  bool same_node(const Pattern& other) const { return node_ == other.node_; }

  friend std::weak_ordering compare(const Pattern& a, const Pattern& b);
  friend bool operator==(const Pattern& a, const Pattern& b) { return compare(a, b) == 0; }
  friend std::weak_ordering operator<=>(const Pattern& a, const Pattern& b) { return compare(a, b); }

 private:
  struct Node;
  explicit Pattern(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Pattern leaf(Kind k, std::string name);
  static Pattern binary(Kind k, Pattern l, Pattern r);

  std::shared_ptr<const Node> node_;
};

struct Pattern::Node {
  Kind kind = Kind::Bot;
  std::string name;
  Pattern a;
  Pattern b;
  std::size_t size = 1;
  bool has_binder = false;
  bool is_term = false;
};

inline Pattern Pattern::leaf(Kind k, std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->name = std::move(name);
  n->is_term = true;
  return Pattern(std::move(n));
}

inline Pattern Pattern::binary(Kind k, Pattern l, Pattern r) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->size = 1 + l.size() + r.size();
  n->has_binder = l.has_binder() || r.has_binder();
  n->is_term = k == Kind::App && l.is_term() && r.is_term();
  n->a = std::move(l);
  n->b = std::move(r);
  return Pattern(std::move(n));
}

inline Pattern Pattern::evar(VarName name) { return leaf(Kind::EVar, std::move(name)); }
inline Pattern Pattern::sym(std::string name) { return leaf(Kind::Sym, std::move(name)); }
inline Pattern Pattern::app(Pattern fn, Pattern arg) { return binary(Kind::App, std::move(fn), std::move(arg)); }
inline Pattern Pattern::imp(Pattern lhs, Pattern rhs) { return binary(Kind::Imp, std::move(lhs), std::move(rhs)); }

inline Pattern Pattern::exists(VarName binder, Pattern body) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Exists;
  n->name = std::move(binder);
  n->size = 1 + body.size();
  n->has_binder = true;
  n->b = std::move(body);
  return Pattern(std::move(n));
}

inline Pattern::Kind Pattern::kind() const { return node_ ? node_->kind : Kind::Bot; }

inline const std::string& Pattern::name() const {
  static const std::string empty;
  return node_ ? node_->name : empty;
}

inline const Pattern& Pattern::left() const { return node_->a; }
inline const Pattern& Pattern::right() const { return node_->b; }
inline std::size_t Pattern::size() const { return node_ ? node_->size : 1; }
inline bool Pattern::has_binder() const { return node_ && node_->has_binder; }
inline bool Pattern::is_term() const { return node_ && node_->is_term; }

namespace detail {

// Binder stacks for alpha-insensitive comparison; innermost binder last.
using BinderStack = std::vector<const std::string*>;

inline std::optional<std::size_t> binder_index(const BinderStack& env, const std::string& name) {
  for (std::size_t i = env.size(); i-- > 0;) {
    if (*env[i] == name) return env.size() - 1 - i;
  }
  return std::nullopt;
}

inline int kind_rank(Pattern::Kind k) { return static_cast<int>(k); }

inline std::weak_ordering compare_in(const Pattern& a, const Pattern& b, BinderStack& ea, BinderStack& eb) {
  using K = Pattern::Kind;
  if (ea.empty() && eb.empty() && a.same_node(b)) return std::weak_ordering::equivalent;
  if (a.kind() != b.kind()) return kind_rank(a.kind()) <=> kind_rank(b.kind());
  switch (a.kind()) {
    case K::Bot:
      return std::weak_ordering::equivalent;
    case K::Sym:
      return a.name().compare(b.name()) <=> 0;
    case K::EVar: {
      auto ia = binder_index(ea, a.name());
      auto ib = binder_index(eb, b.name());
      if (ia && ib) return *ia <=> *ib;
      if (ia) return std::weak_ordering::less;
      if (ib) return std::weak_ordering::greater;
      return a.name().compare(b.name()) <=> 0;
    }
    case K::App:
    case K::Imp: {
      if (auto c = compare_in(a.left(), b.left(), ea, eb); c != 0) return c;
      return compare_in(a.right(), b.right(), ea, eb);
    }
    case K::Exists: {
      ea.push_back(&a.name());
      eb.push_back(&b.name());
      auto c = compare_in(a.body(), b.body(), ea, eb);
      ea.pop_back();
      eb.pop_back();
      return c;
    }
  }
  return std::weak_ordering::equivalent;
}

}  // namespace detail

/// Total order on patterns, insensitive to the names of bound variables.
/// Symbols sort before variables, variables before applications.
inline std::weak_ordering compare(const Pattern& a, const Pattern& b) {
  detail::BinderStack ea, eb;
  return detail::compare_in(a, b, ea, eb);
}

/// Generates a variable name that cannot clash with user input.
inline VarName fresh_var(std::string_view hint = "v") {
  static std::atomic<std::uint64_t> counter{0};
  return std::string(1, kReservedPrefix) + std::string(hint) + std::to_string(counter.fetch_add(1));
}

inline bool is_reserved_name(std::string_view name) { return !name.empty() && name.front() == kReservedPrefix; }

namespace detail {

inline void collect_free(const Pattern& p, std::vector<const std::string*>& bound, VarSet& out) {
  using K = Pattern::Kind;
  switch (p.kind()) {
    case K::EVar:
      if (std::none_of(bound.begin(), bound.end(), [&](const std::string* b) { return *b == p.name(); })) {
        out.insert(p.name());
      }
      return;
    case K::App:
    case K::Imp:
      collect_free(p.left(), bound, out);
      collect_free(p.right(), bound, out);
      return;
    case K::Exists:
      bound.push_back(&p.name());
      collect_free(p.body(), bound, out);
      bound.pop_back();
      return;
    default:
      return;
  }
}

}  // namespace detail

inline VarSet free_vars(const Pattern& p) {
  VarSet out;
  std::vector<const std::string*> bound;
  detail::collect_free(p, bound, out);
  return out;
}

inline bool occurs_free(const VarName& x, const Pattern& p) {
  using K = Pattern::Kind;
  switch (p.kind()) {
    case K::EVar:
      return p.name() == x;
    case K::App:
    case K::Imp:
      return occurs_free(x, p.left()) || occurs_free(x, p.right());
    case K::Exists:
      return p.name() != x && occurs_free(x, p.body());
    default:
      return false;
  }
}

/// Collects every variable name in `p`, bound or free.
inline void all_var_names(const Pattern& p, VarSet& out) {
  using K = Pattern::Kind;
  switch (p.kind()) {
    case K::EVar:
      out.insert(p.name());
      return;
    case K::App:
    case K::Imp:
      all_var_names(p.left(), out);
      all_var_names(p.right(), out);
      return;
    case K::Exists:
      out.insert(p.name());
      all_var_names(p.body(), out);
      return;
    default:
      return;
  }
}

inline bool is_term_pattern(const Pattern& p) { return p.is_term(); }

/// Simultaneous capture-avoiding substitution of the free variables in the
/// domain of `bindings`.
inline Pattern substitute_all(const Pattern& p, const std::map<VarName, Pattern>& bindings) {
  using K = Pattern::Kind;
  if (bindings.empty()) return p;
  switch (p.kind()) {
    case K::EVar: {
      auto it = bindings.find(p.name());
      return it == bindings.end() ? p : it->second;
    }
    case K::App:
    case K::Imp: {
      Pattern l = substitute_all(p.left(), bindings);
      Pattern r = substitute_all(p.right(), bindings);
      if (l.same_node(p.left()) && r.same_node(p.right())) return p;
      return p.is(K::App) ? Pattern::app(std::move(l), std::move(r)) : Pattern::imp(std::move(l), std::move(r));
    }
    case K::Exists: {
      const VarSet body_free = free_vars(p.body());
      std::map<VarName, Pattern> inner;
      for (const auto& [x, q] : bindings) {
        if (x != p.name() && body_free.count(x)) inner.emplace(x, q);
      }
      if (inner.empty()) return p;
      bool capture = false;
      for (const auto& [x, q] : inner) {
        if (occurs_free(p.name(), q)) {
          capture = true;
          break;
        }
      }
      if (!capture) return Pattern::exists(p.name(), substitute_all(p.body(), inner));
      VarName renamed = fresh_var("b");
      Pattern body = substitute_all(p.body(), {{p.name(), Pattern::evar(renamed)}});
      return Pattern::exists(std::move(renamed), substitute_all(body, inner));
    }
    default:
      return p;
  }
}

/// p[q/x]
inline Pattern substitute(const Pattern& p, const VarName& x, const Pattern& q) {
  return substitute_all(p, {{x, q}});
}

// ---------------------------------------------------------------------------
// Derived connectives and their recognizers.

inline Pattern neg(Pattern p) { return Pattern::imp(std::move(p), Pattern::bot()); }
inline Pattern top() { return neg(Pattern::bot()); }
inline Pattern lor(Pattern a, Pattern b) { return Pattern::imp(neg(std::move(a)), std::move(b)); }
inline Pattern land(Pattern a, Pattern b) { return neg(lor(neg(std::move(a)), neg(std::move(b)))); }
inline Pattern iff(const Pattern& a, const Pattern& b) { return land(Pattern::imp(a, b), Pattern::imp(b, a)); }
inline Pattern forall(VarName x, Pattern p) { return neg(Pattern::exists(std::move(x), neg(std::move(p)))); }

/// Right-nested conjunction; the empty conjunction is top.
inline Pattern conjoin(const std::vector<Pattern>& parts) {
  if (parts.empty()) return top();
  Pattern acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = land(parts[i], acc);
  return acc;
}

using PatternPair = std::pair<Pattern, Pattern>;

inline bool is_top(const Pattern& p) {
  return p.is(Pattern::Kind::Imp) && p.left().is(Pattern::Kind::Bot) && p.right().is(Pattern::Kind::Bot);
}

inline std::optional<Pattern> match_neg(const Pattern& p) {
  if (p.is(Pattern::Kind::Imp) && p.right().is(Pattern::Kind::Bot)) return p.left();
  return std::nullopt;
}

inline std::optional<PatternPair> match_or(const Pattern& p) {
  if (!p.is(Pattern::Kind::Imp)) return std::nullopt;
  auto a = match_neg(p.left());
  if (!a) return std::nullopt;
  return PatternPair{*a, p.right()};
}

inline std::optional<PatternPair> match_and(const Pattern& p) {
  auto inner = match_neg(p);
  if (!inner) return std::nullopt;
  auto disj = match_or(*inner);
  if (!disj) return std::nullopt;
  auto a = match_neg(disj->first);
  auto b = match_neg(disj->second);
  if (!a || !b) return std::nullopt;
  return PatternPair{*a, *b};
}

inline std::optional<PatternPair> match_iff(const Pattern& p) {
  auto c = match_and(p);
  if (!c || !c->first.is(Pattern::Kind::Imp) || !c->second.is(Pattern::Kind::Imp)) return std::nullopt;
  const Pattern& l = c->first;
  const Pattern& r = c->second;
  if (l.left() == r.right() && l.right() == r.left()) return PatternPair{l.left(), l.right()};
  return std::nullopt;
}

inline std::optional<std::pair<VarName, Pattern>> match_forall(const Pattern& p) {
  auto inner = match_neg(p);
  if (!inner || !inner->is(Pattern::Kind::Exists)) return std::nullopt;
  auto body = match_neg(inner->body());
  if (!body) return std::nullopt;
  return std::pair<VarName, Pattern>{inner->name(), *body};
}

/// Splits the right-nested conjunction spine into at most `max_parts` parts.
inline std::vector<Pattern> split_conjunction(const Pattern& p, std::size_t max_parts) {
  std::vector<Pattern> out;
  Pattern cur = p;
  while (out.size() + 1 < max_parts) {
    auto c = match_and(cur);
    if (!c) break;
    out.push_back(c->first);
    cur = c->second;
  }
  out.push_back(cur);
  return out;
}

// ---------------------------------------------------------------------------
// Contexts.

/// A pattern with a distinguished hole variable that is never bound inside it.
class PatternContext {
 public:
  PatternContext(Pattern pattern, VarName hole) : pattern_(std::move(pattern)), hole_(std::move(hole)) {
    VarSet names;
    collect_binders(pattern_, names);
    if (names.count(hole_)) throw Error("context hole '" + hole_ + "' occurs bound");
  }

  /// Builds a context around a freshly generated hole.
  static PatternContext around(const std::function<Pattern(const Pattern&)>& build) {
    VarName hole = fresh_var("h");
    Pattern body = build(Pattern::evar(hole));
    return PatternContext(std::move(body), std::move(hole));
  }

  const Pattern& pattern() const { return pattern_; }
  const VarName& hole() const { return hole_; }

  Pattern plug(const Pattern& p) const { return substitute(pattern_, hole_, p); }

  friend bool operator==(const PatternContext& a, const PatternContext& b) {
    return a.hole_ == b.hole_ && a.pattern_ == b.pattern_;
  }

 private:
  static void collect_binders(const Pattern& p, VarSet& out) {
    if (p.is(Pattern::Kind::Exists)) {
      out.insert(p.name());
      collect_binders(p.body(), out);
    } else if (p.is(Pattern::Kind::App) || p.is(Pattern::Kind::Imp)) {
      collect_binders(p.left(), out);
      collect_binders(p.right(), out);
    }
  }

  Pattern pattern_;
  VarName hole_;
};

/// A context whose root-to-hole path consists only of applications.
class AppContext {
 public:
  /// The identity context.
  AppContext() : hole_(fresh_var("h")), pattern_(Pattern::evar(hole_)) {}

  /// C[] applied to `arg`, i.e. the context `C arg`.
  AppContext apply_to(const Pattern& arg) const { return AppContext(hole_, Pattern::app(pattern_, arg)); }
  /// `fn C`
  AppContext applied_by(const Pattern& fn) const { return AppContext(hole_, Pattern::app(fn, pattern_)); }

  const Pattern& pattern() const { return pattern_; }
  const VarName& hole() const { return hole_; }

  Pattern plug(const Pattern& p) const { return substitute(pattern_, hole_, p); }
  PatternContext as_pattern_context() const { return PatternContext(pattern_, hole_); }

 private:
  AppContext(VarName hole, Pattern p) : hole_(std::move(hole)), pattern_(std::move(p)) {}
  VarName hole_;
  Pattern pattern_;
};

/// Checks the application-context shape: one hole, reached through App nodes only.
inline bool is_app_context(const Pattern& p, const VarName& hole) {
  std::size_t count = 0;
  std::function<bool(const Pattern&, bool)> walk = [&](const Pattern& q, bool on_app_path) -> bool {
    switch (q.kind()) {
      case Pattern::Kind::EVar:
        if (q.name() == hole) {
          ++count;
          return on_app_path;
        }
        return true;
      case Pattern::Kind::App:
        return walk(q.left(), on_app_path) && walk(q.right(), on_app_path);
      case Pattern::Kind::Imp:
        return walk(q.left(), false) && walk(q.right(), false);
      case Pattern::Kind::Exists:
        return walk(q.body(), false);
      default:
        return true;
    }
  };
  return walk(p, true) && count == 1;
}

}  // namespace mlu
