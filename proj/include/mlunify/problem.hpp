#pragma once

// The abstract unification problem and its two containers.
//
// A problem is either failed (⊥) or a finite collection of term-pattern
// pairs. Positions passed to insert_at/remove_at index into pairs().

#include <algorithm>
#include <concepts>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "mlunify/pattern.hpp"
#include "mlunify/theory.hpp"

namespace mlu {

struct Equation {
  Pattern lhs;
  Pattern rhs;

  friend bool operator==(const Equation&, const Equation&) = default;
  friend std::weak_ordering operator<=>(const Equation& a, const Equation& b) {
    if (auto c = compare(a.lhs, b.lhs); c != 0) return c;
    return compare(a.rhs, b.rhs);
  }
};

inline Pattern equation_predicate(const Equation& e) { return equal(e.lhs, e.rhs); }

template <class P>
concept UnificationProblem = requires(const P& p, const Pattern& t, const VarName& x, std::size_t i,
                                      std::vector<Equation> eqs) {
  { P::singleton(t, t) } -> std::same_as<P>;
  { P::failed() } -> std::same_as<P>;
  { P::empty() } -> std::same_as<P>;
  { P::from_pairs(std::move(eqs)) } -> std::same_as<P>;
  { p.insert(t, t) } -> std::same_as<P>;
  { p.insert_at(i, t, t) } -> std::same_as<P>;
  { p.remove_at(i) } -> std::same_as<P>;
  { p.subst(x, t) } -> std::same_as<P>;
  { p.predicate() } -> std::same_as<Pattern>;
  { p.is_failed() } -> std::convertible_to<bool>;
  { p.pairs() } -> std::convertible_to<const std::vector<Equation>&>;
  { P::kind_name } -> std::convertible_to<std::string_view>;
  { p == p } -> std::convertible_to<bool>;
};

namespace detail {

template <class Self>
class ProblemBase {
 public:
  bool is_failed() const { return !pairs_.has_value(); }

  const std::vector<Equation>& pairs() const {
    if (!pairs_) throw Error("pairs of a failed unification problem");
    return *pairs_;
  }

  friend bool operator==(const ProblemBase&, const ProblemBase&) = default;

 protected:
  void require_live(std::string_view op) const {
    if (!pairs_) throw Error(std::string(op) + " on a failed unification problem");
  }

  static std::vector<Equation> substituted(const std::vector<Equation>& eqs, const VarName& x, const Pattern& t) {
    std::vector<Equation> out;
    out.reserve(eqs.size());
    for (const auto& e : eqs) out.push_back({substitute(e.lhs, x, t), substitute(e.rhs, x, t)});
    return out;
  }

  static void require_terms(const Pattern& a, const Pattern& b) {
    if (!a.is_term() || !b.is_term()) throw Error("unification problems hold term patterns only");
  }

  std::optional<std::vector<Equation>> pairs_;
};

}  // namespace detail

/// Pairs kept as an ordered set; ϕ^P conjoins them in canonical order.
class SetProblem : public detail::ProblemBase<SetProblem> {
 public:
  static constexpr std::string_view kind_name = "set";

  static SetProblem failed() { return SetProblem(); }
  static SetProblem empty() { return SetProblem(std::vector<Equation>{}); }
  static SetProblem singleton(const Pattern& t1, const Pattern& t2) { return empty().insert(t1, t2); }
  static SetProblem from_pairs(std::vector<Equation> eqs) {
    for (const auto& e : eqs) require_terms(e.lhs, e.rhs);
    return SetProblem(std::move(eqs));
  }

  SetProblem insert(const Pattern& t1, const Pattern& t2) const {
    require_live("insert");
    require_terms(t1, t2);
    std::vector<Equation> eqs = *pairs_;
    eqs.push_back({t1, t2});
    return SetProblem(std::move(eqs));
  }

  /// Sets have no positions; the pair lands at its canonical place.
  SetProblem insert_at(std::size_t, const Pattern& t1, const Pattern& t2) const { return insert(t1, t2); }

  SetProblem remove_at(std::size_t i) const {
    require_live("remove");
    std::vector<Equation> eqs = *pairs_;
    eqs.erase(eqs.begin() + static_cast<std::ptrdiff_t>(i));
    return SetProblem(std::move(eqs));
  }

  SetProblem subst(const VarName& x, const Pattern& t) const {
    require_live("subst");
    return SetProblem(substituted(*pairs_, x, t));
  }

  Pattern predicate() const {
    if (!pairs_) return Pattern::bot();
    std::vector<Pattern> eqs;
    for (const auto& e : *pairs_) eqs.push_back(equation_predicate(e));
    return conjoin(eqs);
  }

  friend bool operator==(const SetProblem&, const SetProblem&) = default;

 private:
  SetProblem() = default;
  explicit SetProblem(std::vector<Equation> eqs) {
    std::sort(eqs.begin(), eqs.end());
    eqs.erase(std::unique(eqs.begin(), eqs.end()), eqs.end());
    pairs_ = std::move(eqs);
  }
};

/// Pairs kept in insertion order, duplicates allowed. ϕ^P conjoins in reverse
/// insertion order so that ϕ^(P ◁ ⟨a,b⟩) is literally (a = b) ∧ ϕ^P.
class ListProblem : public detail::ProblemBase<ListProblem> {
 public:
  static constexpr std::string_view kind_name = "list";

  static ListProblem failed() { return ListProblem(); }
  static ListProblem empty() { return ListProblem(std::vector<Equation>{}); }
  static ListProblem singleton(const Pattern& t1, const Pattern& t2) { return empty().insert(t1, t2); }
  static ListProblem from_pairs(std::vector<Equation> eqs) {
    for (const auto& e : eqs) require_terms(e.lhs, e.rhs);
    return ListProblem(std::move(eqs));
  }

  ListProblem insert(const Pattern& t1, const Pattern& t2) const {
    require_live("insert");
    return insert_at(pairs_->size(), t1, t2);
  }

  ListProblem insert_at(std::size_t i, const Pattern& t1, const Pattern& t2) const {
    require_live("insert");
    require_terms(t1, t2);
    std::vector<Equation> eqs = *pairs_;
    eqs.insert(eqs.begin() + static_cast<std::ptrdiff_t>(std::min(i, eqs.size())), Equation{t1, t2});
    return ListProblem(std::move(eqs));
  }

  ListProblem remove_at(std::size_t i) const {
    require_live("remove");
    std::vector<Equation> eqs = *pairs_;
    eqs.erase(eqs.begin() + static_cast<std::ptrdiff_t>(i));
    return ListProblem(std::move(eqs));
  }

  ListProblem subst(const VarName& x, const Pattern& t) const {
    require_live("subst");
    return ListProblem(substituted(*pairs_, x, t));
  }

  Pattern predicate() const {
    if (!pairs_) return Pattern::bot();
    std::vector<Pattern> eqs;
    for (auto it = pairs_->rbegin(); it != pairs_->rend(); ++it) eqs.push_back(equation_predicate(*it));
    return conjoin(eqs);
  }

  friend bool operator==(const ListProblem&, const ListProblem&) = default;

 private:
  ListProblem() = default;
  explicit ListProblem(std::vector<Equation> eqs) { pairs_ = std::move(eqs); }
};

static_assert(UnificationProblem<SetProblem>);
static_assert(UnificationProblem<ListProblem>);

/// Flattens the conjunction spine of a problem predicate into a sorted,
/// duplicate-free conjunction; used to compare set-instance predicates modulo
/// conjunct order and repetition.
inline Pattern normalize_conjunction(const Pattern& p) {
  std::vector<Pattern> parts;
  Pattern cur = p;
  while (auto c = match_and(cur)) {
    parts.push_back(c->first);
    cur = c->second;
  }
  if (!is_top(cur)) parts.push_back(cur);
  std::sort(parts.begin(), parts.end());
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
  return conjoin(parts);
}

}  // namespace mlu
