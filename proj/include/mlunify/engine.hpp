#pragma once

// Curried rule-based unification over abstract unification problems.

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string_view>
#include <tuple>
#include <vector>

#include "mlunify/problem.hpp"
#include "mlunify/substitution.hpp"

namespace mlu {

enum class Rule { Delete, Decomposition, SymbolClashL, SymbolClashR, Orient, OccursCheck, Elimination };

/// Rules in the order the driver tries them on a pair.
inline constexpr std::array<Rule, 7> kRulePriority{Rule::Delete,       Rule::Decomposition, Rule::SymbolClashL,
                                                   Rule::SymbolClashR, Rule::OccursCheck,   Rule::Orient,
                                                   Rule::Elimination};

inline std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::Delete: return "Delete";
    case Rule::Decomposition: return "Decomposition";
    case Rule::SymbolClashL: return "SymbolClashL";
    case Rule::SymbolClashR: return "SymbolClashR";
    case Rule::Orient: return "Orient";
    case Rule::OccursCheck: return "OccursCheck";
    case Rule::Elimination: return "Elimination";
  }
  return "?";
}

inline std::optional<Rule> rule_from_name(std::string_view name) {
  for (Rule r : kRulePriority) {
    if (rule_name(r) == name) return r;
  }
  return std::nullopt;
}

/// How the driver picks the next step.
enum class Strategy {
  /// Walk pairs in order; on each pair try rules by priority.
  PairFirst,
  /// Walk rules by priority; for each rule take the first pair it applies to.
  RuleFirst,
};

template <UnificationProblem P>
struct UnifStep {
  Rule rule;
  std::size_t index = 0;
  Equation pair;
  P before;
  P after;

  friend bool operator==(const UnifStep&, const UnifStep&) = default;
};

template <UnificationProblem P>
struct UnifTrace {
  P initial;
  std::vector<UnifStep<P>> steps;

  const P& final_problem() const { return steps.empty() ? initial : steps.back().after; }

  friend bool operator==(const UnifTrace&, const UnifTrace&) = default;
};

/// Result of applying `rule` to pair `index` of `p` under the rule's own side
/// condition, or nullopt when the rule does not apply there.
template <UnificationProblem P>
std::optional<P> apply_rule(const P& p, std::size_t index, Rule rule) {
  if (p.is_failed()) throw Error("step on failed problem");
  const auto& pairs = p.pairs();
  if (index >= pairs.size()) return std::nullopt;
  const Pattern& s = pairs[index].lhs;
  const Pattern& t = pairs[index].rhs;
  using K = Pattern::Kind;
  switch (rule) {
    case Rule::Delete:
      if (s == t) return p.remove_at(index);
      return std::nullopt;
    case Rule::Decomposition:
      if (s.is(K::App) && t.is(K::App)) {
        return p.remove_at(index).insert_at(index, s.left(), t.left()).insert_at(index + 1, s.right(), t.right());
      }
      return std::nullopt;
    case Rule::SymbolClashL:
      if (s.is(K::Sym) && t != s && !t.is(K::EVar)) return P::failed();
      return std::nullopt;
    case Rule::SymbolClashR:
      if (t.is(K::Sym) && s != t && !s.is(K::EVar)) return P::failed();
      return std::nullopt;
    case Rule::Orient:
      if (t.is(K::EVar) && !s.is(K::EVar)) return p.remove_at(index).insert_at(index, t, s);
      return std::nullopt;
    case Rule::OccursCheck:
      if (s.is(K::EVar) && s != t && occurs_free(s.name(), t)) return P::failed();
      return std::nullopt;
    case Rule::Elimination:
      if (s.is(K::EVar) && !occurs_free(s.name(), t)) {
        return p.remove_at(index).subst(s.name(), t).insert_at(index, s, t);
      }
      return std::nullopt;
  }
  return std::nullopt;
}

/// One rule application on one pair, with the side condition verified.
template <UnificationProblem P>
std::optional<UnifStep<P>> step(const P& p, std::size_t index, Rule rule) {
  auto after = apply_rule(p, index, rule);
  if (!after) return std::nullopt;
  return UnifStep<P>{rule, index, p.pairs()[index], p, std::move(*after)};
}

namespace detail {

template <UnificationProblem P>
bool occurs_elsewhere(const P& p, std::size_t index, const VarName& x) {
  const auto& pairs = p.pairs();
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    if (j != index && (occurs_free(x, pairs[j].lhs) || occurs_free(x, pairs[j].rhs))) return true;
  }
  return false;
}

template <UnificationProblem P>
std::optional<UnifStep<P>> try_rule(const P& p, std::size_t i, Rule r) {
  if (r == Rule::Elimination) {
    const Pattern& s = p.pairs()[i].lhs;
    if (!s.is(Pattern::Kind::EVar) || !occurs_elsewhere(p, i, s.name())) return std::nullopt;
  }
  return step(p, i, r);
}

}  // namespace detail

/// The next step chosen by the deterministic strategy, or nullopt when no
/// rule applies (the problem is then in solved form).
template <UnificationProblem P>
std::optional<UnifStep<P>> next_step(const P& p, Strategy strategy = Strategy::PairFirst) {
  if (p.is_failed()) throw Error("step on failed problem");
  const std::size_t n = p.pairs().size();
  if (strategy == Strategy::PairFirst) {
    for (std::size_t i = 0; i < n; ++i) {
      for (Rule r : kRulePriority) {
        if (auto s = detail::try_rule(p, i, r)) return s;
      }
    }
  } else {
    for (Rule r : kRulePriority) {
      for (std::size_t i = 0; i < n; ++i) {
        if (auto s = detail::try_rule(p, i, r)) return s;
      }
    }
  }
  return std::nullopt;
}

/// ⊥, or pairs ⟨x_i, t_i⟩ with distinct x_i none of which occurs in any t_j.
template <UnificationProblem P>
bool is_solved_form(const P& p) {
  if (p.is_failed()) return true;
  VarSet lhs;
  for (const auto& e : p.pairs()) {
    if (!e.lhs.is(Pattern::Kind::EVar) || !lhs.insert(e.lhs.name()).second) return false;
  }
  for (const auto& e : p.pairs()) {
    for (const auto& x : lhs) {
      if (occurs_free(x, e.rhs)) return false;
    }
  }
  return true;
}

/// Reads a non-failed solved problem as a substitution.
template <UnificationProblem P>
Substitution solved_reading(const P& p) {
  if (p.is_failed() || !is_solved_form(p)) throw Error("problem is not a solved, non-failed problem");
  Substitution s;
  for (const auto& e : p.pairs()) s.bind(e.lhs.name(), e.rhs);
  return s;
}

template <UnificationProblem P>
bool check_step(const UnifStep<P>& s) {
  if (s.before.is_failed()) return false;
  const auto& pairs = s.before.pairs();
  if (s.index >= pairs.size() || !(pairs[s.index] == s.pair)) return false;
  auto expected = apply_rule(s.before, s.index, s.rule);
  return expected && *expected == s.after;
}

/// Lexicographic termination measure: (unsolved variables, total pattern
/// size, pairs ⟨t, x⟩ with t not a variable). ⊥ has no measure and counts as
/// smaller than every live problem.
using Measure = std::tuple<std::size_t, std::size_t, std::size_t>;

template <UnificationProblem P>
std::optional<Measure> measure(const P& p) {
  if (p.is_failed()) return std::nullopt;
  std::map<VarName, std::size_t> occurrences;
  std::function<void(const Pattern&)> count = [&](const Pattern& q) {
    if (q.is(Pattern::Kind::EVar)) {
      ++occurrences[q.name()];
    } else if (q.is(Pattern::Kind::App)) {
      count(q.left());
      count(q.right());
    }
  };
  std::size_t size = 0, misoriented = 0;
  for (const auto& e : p.pairs()) {
    count(e.lhs);
    count(e.rhs);
    size += e.lhs.size() + e.rhs.size();
    if (e.rhs.is(Pattern::Kind::EVar) && !e.lhs.is(Pattern::Kind::EVar)) ++misoriented;
  }
  std::size_t unsolved = occurrences.size();
  for (const auto& e : p.pairs()) {
    if (e.lhs.is(Pattern::Kind::EVar) && occurrences[e.lhs.name()] == 1) --unsolved;
  }
  return Measure{unsolved, size, misoriented};
}

template <UnificationProblem P>
bool measure_decreases(const P& before, const P& after) {
  auto b = measure(before);
  auto a = measure(after);
  if (!b) return false;
  if (!a) return true;
  return *a < *b;
}

template <UnificationProblem P>
struct SolveResult {
  UnifTrace<P> trace;
  std::optional<Substitution> mgu;
  /// The rule that produced ⊥, when unification failed.
  std::optional<Rule> failure;
};

template <UnificationProblem P>
SolveResult<P> solve(const Pattern& t1, const Pattern& t2, Strategy strategy = Strategy::PairFirst) {
  if (!t1.is_term() || !t2.is_term()) throw Error("solve expects term patterns");
  SolveResult<P> out{UnifTrace<P>{P::singleton(t1, t2), {}}, std::nullopt, std::nullopt};
  P current = out.trace.initial;
  while (!current.is_failed()) {
    auto s = next_step(current, strategy);
    if (!s) break;
    current = s->after;
    out.trace.steps.push_back(std::move(*s));
  }
  if (current.is_failed()) {
    out.failure = out.trace.steps.back().rule;
  } else {
    out.mgu = solved_reading(current);
  }
  return out;
}

}  // namespace mlu
