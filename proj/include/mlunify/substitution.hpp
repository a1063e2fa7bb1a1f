#pragma once

// Multi-binding substitutions over term patterns.

#include <initializer_list>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "mlunify/pattern.hpp"
#include "mlunify/theory.hpp"

namespace mlu {

/// Finite map from element variables to term patterns. Bindings x ↦ x are
/// never stored.
class Substitution {
 public:
  using Map = std::map<VarName, Pattern>;

  Substitution() = default;
  Substitution(std::initializer_list<std::pair<const VarName, Pattern>> init) {
    for (const auto& [x, t] : init) bind(x, t);
  }
  explicit Substitution(const Map& m) {
    for (const auto& [x, t] : m) bind(x, t);
  }

  /// Adds or replaces a binding. Identity bindings are dropped.
  void bind(const VarName& x, const Pattern& t) {
    if (!t.is_term()) throw Error("substitution image for '" + x + "' is not a term pattern");
    if (t.is(Pattern::Kind::EVar) && t.name() == x) {
      map_.erase(x);
      return;
    }
    map_.insert_or_assign(x, t);
  }

  const Map& bindings() const { return map_; }
  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }

  VarSet domain() const {
    VarSet out;
    for (const auto& [x, _] : map_) out.insert(x);
    return out;
  }

  /// Image of `x`, which is `x` itself outside the domain.
  Pattern operator()(const VarName& x) const {
    auto it = map_.find(x);
    return it == map_.end() ? Pattern::evar(x) : it->second;
  }

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  Map map_;
};

/// Simultaneous application.
inline Pattern apply(const Substitution& s, const Pattern& p) { return substitute_all(p, s.bindings()); }

/// Applies `s` then `e`: apply(compose(s, e), p) == apply(e, apply(s, p)).
inline Substitution compose(const Substitution& s, const Substitution& e) {
  Substitution out;
  for (const auto& [x, t] : s.bindings()) out.bind(x, apply(e, t));
  for (const auto& [y, u] : e.bindings()) {
    if (!s.bindings().count(y)) out.bind(y, u);
  }
  return out;
}

inline bool substitutions_equal_on(const Substitution& s, const Substitution& e, const std::vector<Pattern>& terms) {
  for (const auto& t : terms) {
    if (apply(s, t) != apply(e, t)) return false;
  }
  return true;
}

inline bool substitutions_equal_on(const Substitution& s, const Substitution& e, const VarSet& vars) {
  for (const auto& x : vars) {
    if (s(x) != e(x)) return false;
  }
  return true;
}

/// Extensional equality decided on the union of both domains.
inline bool substitutions_equal(const Substitution& s, const Substitution& e) {
  VarSet vars = s.domain();
  for (const auto& x : e.domain()) vars.insert(x);
  return substitutions_equal_on(s, e, vars);
}

namespace detail {

// One-sided matching on term patterns: extends `theta` so that
// theta(pattern) == target.
inline bool match_term(const Pattern& pattern, const Pattern& target, std::map<VarName, Pattern>& theta) {
  switch (pattern.kind()) {
    case Pattern::Kind::EVar: {
      auto [it, inserted] = theta.emplace(pattern.name(), target);
      return inserted || it->second == target;
    }
    case Pattern::Kind::Sym:
      return target.is(Pattern::Kind::Sym) && target.name() == pattern.name();
    case Pattern::Kind::App:
      return target.is(Pattern::Kind::App) && match_term(pattern.left(), target.left(), theta) &&
             match_term(pattern.right(), target.right(), theta);
    default:
      return false;
  }
}

}  // namespace detail

/// Returns θ with compose(s, θ) equal to e on dom(s) ∪ dom(e), if any.
inline std::optional<Substitution> more_general(const Substitution& s, const Substitution& e) {
  VarSet vars = s.domain();
  for (const auto& x : e.domain()) vars.insert(x);
  std::map<VarName, Pattern> theta;
  for (const auto& x : vars) {
    if (!detail::match_term(s(x), e(x), theta)) return std::nullopt;
  }
  return Substitution(theta);
}

inline bool is_unifier(const Substitution& s, const Pattern& t1, const Pattern& t2) {
  return apply(s, t1) == apply(s, t2);
}

/// ϕ^σ: equalities x = σ(x) ordered by variable name, right-nested; ⊤ when empty.
inline Pattern predicate_of(const Substitution& s) {
  std::vector<Pattern> eqs;
  eqs.reserve(s.size());
  for (const auto& [x, t] : s.bindings()) eqs.push_back(equal(Pattern::evar(x), t));
  return conjoin(eqs);
}

}  // namespace mlu
