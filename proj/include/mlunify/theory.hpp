#pragma once

// Signatures, the definedness notations, and theories given by axiom schemes.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mlunify/pattern.hpp"

namespace mlu {

// ---------------------------------------------------------------------------
// Definedness notations.

inline Pattern definedness_symbol() { return Pattern::sym(std::string(kDefinednessSymbol)); }

/// ⌈p⌉
inline Pattern defined(Pattern p) { return Pattern::app(definedness_symbol(), std::move(p)); }
/// ⌊p⌋ = ¬⌈¬p⌉
inline Pattern total(Pattern p) { return neg(defined(neg(std::move(p)))); }
/// p = q, read as totality of the equivalence.
inline Pattern equal(const Pattern& p, const Pattern& q) { return total(iff(p, q)); }
/// p ∈ q = ⌈p ∧ q⌉
inline Pattern member(Pattern p, Pattern q) { return defined(land(std::move(p), std::move(q))); }
/// p ⊆ q = ⌊p → q⌋
inline Pattern subset(Pattern p, Pattern q) { return total(Pattern::imp(std::move(p), std::move(q))); }
inline Pattern not_equal(const Pattern& p, const Pattern& q) { return neg(equal(p, q)); }
inline Pattern not_member(Pattern p, Pattern q) { return neg(member(std::move(p), std::move(q))); }
inline Pattern not_subset(Pattern p, Pattern q) { return neg(subset(std::move(p), std::move(q))); }

inline bool is_definedness_symbol(const Pattern& p) {
  return p.is(Pattern::Kind::Sym) && p.name() == kDefinednessSymbol;
}

inline std::optional<Pattern> match_defined(const Pattern& p) {
  if (p.is(Pattern::Kind::App) && is_definedness_symbol(p.left())) return p.right();
  return std::nullopt;
}

inline std::optional<Pattern> match_total(const Pattern& p) {
  auto inner = match_neg(p);
  if (!inner) return std::nullopt;
  auto d = match_defined(*inner);
  if (!d) return std::nullopt;
  return match_neg(*d);
}

inline std::optional<PatternPair> match_equal(const Pattern& p) {
  auto t = match_total(p);
  if (!t) return std::nullopt;
  return match_iff(*t);
}

inline std::optional<PatternPair> match_member(const Pattern& p) {
  auto d = match_defined(p);
  if (!d) return std::nullopt;
  return match_and(*d);
}

/// Syntactic predicate patterns: closed under the propositional connectives
/// and quantification, with definedness applications as the base case.
inline bool is_predicate_pattern(const Pattern& p) {
  switch (p.kind()) {
    case Pattern::Kind::Bot:
      return true;
    case Pattern::Kind::Imp:
      return is_predicate_pattern(p.left()) && is_predicate_pattern(p.right());
    case Pattern::Kind::Exists:
      return is_predicate_pattern(p.body());
    case Pattern::Kind::App:
      return is_definedness_symbol(p.left());
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Signatures.

/// Constant symbols with optional arity hints. The definedness symbol is
/// always present and cannot be redeclared.
class Signature {
 public:
  void declare(const std::string& name, std::optional<unsigned> arity = std::nullopt) {
    if (name.empty()) throw Error("empty symbol name");
    if (name == kDefinednessSymbol) throw Error("'" + name + "' is the reserved definedness symbol");
    if (is_reserved_name(name)) throw Error("symbol name '" + name + "' uses the reserved prefix");
    auto [it, inserted] = symbols_.emplace(name, arity);
    if (!inserted && arity && it->second && *it->second != *arity) {
      throw Error("symbol '" + name + "' redeclared with a different arity");
    }
    if (!inserted && arity) it->second = arity;
  }

  bool contains(const std::string& name) const {
    return name == kDefinednessSymbol || symbols_.count(name) != 0;
  }

  std::optional<unsigned> arity(const std::string& name) const {
    auto it = symbols_.find(name);
    return it == symbols_.end() ? std::nullopt : it->second;
  }

  /// User symbols, without the definedness symbol.
  const std::map<std::string, std::optional<unsigned>>& symbols() const { return symbols_; }

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  std::map<std::string, std::optional<unsigned>> symbols_;
};

/// f x1 ... xn = f y1 ... yn → x1 = y1 ∧ ... ∧ xn = yn, universally closed.
inline Pattern injectivity_instance(const std::string& symbol, unsigned arity) {
  if (arity == 0) throw Error("injectivity needs a positive arity (symbol '" + symbol + "')");
  std::vector<VarName> xs, ys;
  for (unsigned i = 1; i <= arity; ++i) {
    xs.push_back("x" + std::to_string(i));
    ys.push_back("y" + std::to_string(i));
  }
  Pattern lhs = Pattern::sym(symbol);
  Pattern rhs = Pattern::sym(symbol);
  std::vector<Pattern> eqs;
  for (unsigned i = 0; i < arity; ++i) {
    lhs = Pattern::app(lhs, Pattern::evar(xs[i]));
    rhs = Pattern::app(rhs, Pattern::evar(ys[i]));
    eqs.push_back(equal(Pattern::evar(xs[i]), Pattern::evar(ys[i])));
  }
  Pattern body = Pattern::imp(equal(lhs, rhs), conjoin(eqs));
  for (unsigned i = arity; i-- > 0;) body = forall(ys[i], body);
  for (unsigned i = arity; i-- > 0;) body = forall(xs[i], body);
  return body;
}

// ---------------------------------------------------------------------------
// Theories.

struct DefinednessScheme {
  friend bool operator==(const DefinednessScheme&, const DefinednessScheme&) = default;
};

struct InjectivityScheme {
  std::string symbol;
  unsigned arity = 1;
  friend bool operator==(const InjectivityScheme&, const InjectivityScheme&) = default;
};

struct UserAxiom {
  Pattern axiom;
  friend bool operator==(const UserAxiom&, const UserAxiom&) = default;
};

using AxiomScheme = std::variant<DefinednessScheme, InjectivityScheme, UserAxiom>;

/// A possibly infinite theory given by a finite list of schemes.
class Theory {
 public:
  Theory() = default;
  explicit Theory(std::vector<AxiomScheme> schemes) : schemes_(std::move(schemes)) {}

  /// Definedness plus one injectivity instance per symbol with positive arity.
  static Theory standard(const Signature& sig) {
    std::vector<AxiomScheme> schemes{DefinednessScheme{}};
    for (const auto& [name, arity] : sig.symbols()) {
      if (arity && *arity > 0) schemes.push_back(InjectivityScheme{name, *arity});
    }
    return Theory(std::move(schemes));
  }

  const std::vector<AxiomScheme>& schemes() const { return schemes_; }

  bool has_definedness() const {
    for (const auto& s : schemes_) {
      if (std::holds_alternative<DefinednessScheme>(s)) return true;
    }
    return false;
  }

  bool has_injectivity(const std::string& symbol, unsigned arity) const {
    for (const auto& s : schemes_) {
      if (const auto* inj = std::get_if<InjectivityScheme>(&s); inj && inj->symbol == symbol && inj->arity == arity) {
        return true;
      }
    }
    return false;
  }

  /// Whether `p` is an instance of one of the schemes.
  bool contains(const Pattern& p) const {
    for (const auto& s : schemes_) {
      if (std::holds_alternative<DefinednessScheme>(s)) {
        auto d = match_defined(p);
        if (d && d->is(Pattern::Kind::EVar)) return true;
      } else if (const auto* inj = std::get_if<InjectivityScheme>(&s)) {
        if (p == injectivity_instance(inj->symbol, inj->arity)) return true;
      } else if (p == std::get<UserAxiom>(s).axiom) {
        return true;
      }
    }
    return false;
  }

  void add(AxiomScheme scheme) { schemes_.push_back(std::move(scheme)); }

  friend bool operator==(const Theory&, const Theory&) = default;

 private:
  std::vector<AxiomScheme> schemes_;
};

}  // namespace mlu
