#pragma once

// Sequents, proof trees, and the checker for core and derived rules.

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mlunify/engine.hpp"
#include "mlunify/pattern.hpp"
#include "mlunify/problem.hpp"
#include "mlunify/substitution.hpp"
#include "mlunify/theory.hpp"

namespace mlu {

using TheoryRef = std::shared_ptr<const Theory>;

/// Γ ▶ Δ ⊢ ψ
struct Sequent {
  TheoryRef theory;
  std::vector<Pattern> context;
  Pattern goal;

  friend bool operator==(const Sequent& a, const Sequent& b) {
    const bool same_theory = a.theory == b.theory || (a.theory && b.theory && *a.theory == *b.theory);
    return same_theory && a.context == b.context && a.goal == b.goal;
  }
};

enum class CoreRule {
  Inherit, Weaken, Cut, Hyp, ImpL, AndL, OrL, BotL, ImpR, AndR, OrR_L, OrR_R,
  ForallL, ExistsL, ForallR, ExistsR, Deduction, EqRefl, EqRewrite,
};

enum class DerivedRule {
  Congruence, DefinednessIntro, MemberToEq, CondEquiv, CondEq, TermConjToEq, SubstEq, SubstPredicate,
  StepSound, ChainSound, MguForward, UnifierBackward, Injectivity, EqSymmetry, EqTransitivity, TopIntro,
};

inline constexpr std::array<CoreRule, 19> kCoreRules{
    CoreRule::Inherit, CoreRule::Weaken,  CoreRule::Cut,     CoreRule::Hyp,     CoreRule::ImpL,
    CoreRule::AndL,    CoreRule::OrL,     CoreRule::BotL,    CoreRule::ImpR,    CoreRule::AndR,
    CoreRule::OrR_L,   CoreRule::OrR_R,   CoreRule::ForallL, CoreRule::ExistsL, CoreRule::ForallR,
    CoreRule::ExistsR, CoreRule::Deduction, CoreRule::EqRefl, CoreRule::EqRewrite};

inline constexpr std::array<DerivedRule, 16> kDerivedRules{
    DerivedRule::Congruence,     DerivedRule::DefinednessIntro, DerivedRule::MemberToEq,
    DerivedRule::CondEquiv,      DerivedRule::CondEq,           DerivedRule::TermConjToEq,
    DerivedRule::SubstEq,        DerivedRule::SubstPredicate,   DerivedRule::StepSound,
    DerivedRule::ChainSound,     DerivedRule::MguForward,       DerivedRule::UnifierBackward,
    DerivedRule::Injectivity,    DerivedRule::EqSymmetry,       DerivedRule::EqTransitivity,
    DerivedRule::TopIntro};

inline std::string_view rule_name(CoreRule r) {
  static constexpr std::string_view names[] = {
      "Inherit", "Weaken",  "Cut",     "Hyp",     "ImpL",    "AndL",      "OrL",    "BotL",    "ImpR",     "AndR",
      "OrR_L",   "OrR_R",   "ForallL", "ExistsL", "ForallR", "ExistsR",   "Deduction", "EqRefl", "EqRewrite"};
  return names[static_cast<std::size_t>(r)];
}

inline std::string_view rule_name(DerivedRule r) {
  static constexpr std::string_view names[] = {
      "Congruence", "DefinednessIntro", "MemberToEq",  "CondEquiv",       "CondEq",      "TermConjToEq",
      "SubstEq",    "SubstPredicate",   "StepSound",   "ChainSound",      "MguForward",  "UnifierBackward",
      "Injectivity", "EqSymmetry",      "EqTransitivity", "TopIntro"};
  return names[static_cast<std::size_t>(r)];
}

inline std::optional<CoreRule> core_rule_from_name(std::string_view s) {
  for (auto r : kCoreRules) {
    if (rule_name(r) == s) return r;
  }
  return std::nullopt;
}

inline std::optional<DerivedRule> derived_rule_from_name(std::string_view s) {
  for (auto r : kDerivedRules) {
    if (rule_name(r) == s) return r;
  }
  return std::nullopt;
}

using ProofRule = std::variant<CoreRule, DerivedRule>;

inline std::string_view rule_name(const ProofRule& r) {
  return std::visit([](auto x) { return rule_name(x); }, r);
}

/// Algorithmic evidence carried by StepSound, ChainSound and MguForward leaves.
using Evidence = std::variant<std::monostate, UnifStep<SetProblem>, UnifStep<ListProblem>, UnifTrace<SetProblem>,
                              UnifTrace<ListProblem>>;

/// Rule parameters. Which fields a rule reads is fixed per rule; unused fields
/// must stay empty.
struct RuleParams {
  std::vector<std::size_t> indices;
  std::vector<VarName> vars;
  std::vector<Pattern> patterns;
  std::optional<PatternContext> context;
  std::optional<Substitution> subst;
  Evidence evidence;

  friend bool operator==(const RuleParams&, const RuleParams&) = default;
};

struct ProofNode {
  Sequent conclusion;
  ProofRule rule;
  RuleParams params;
  std::vector<ProofNode> children;

  friend bool operator==(const ProofNode&, const ProofNode&) = default;
};

struct CheckResult {
  bool ok = true;
  /// Path of the first failing node, e.g. "root.1.0".
  std::string path;
  std::string rule;
  std::string reason;

  explicit operator bool() const { return ok; }
  static CheckResult pass() { return {}; }
};

namespace detail {

struct Failure {
  std::string reason;
};

inline void require(bool cond, const std::string& reason) {
  if (!cond) throw Failure{reason};
}

// Parameter-shape check: exact sizes for each field.
inline void shape(const RuleParams& p, std::size_t indices, std::size_t vars, std::size_t patterns, bool context,
                  bool subst, bool evidence) {
  require(p.indices.size() == indices, "expected " + std::to_string(indices) + " index parameter(s)");
  require(p.vars.size() == vars, "expected " + std::to_string(vars) + " variable parameter(s)");
  require(p.patterns.size() == patterns, "expected " + std::to_string(patterns) + " pattern parameter(s)");
  require(p.context.has_value() == context, context ? "missing context parameter" : "unexpected context parameter");
  require(p.subst.has_value() == subst, subst ? "missing substitution parameter" : "unexpected substitution parameter");
  require(!std::holds_alternative<std::monostate>(p.evidence) == evidence,
          evidence ? "missing evidence" : "unexpected evidence");
}

inline std::vector<Pattern> without(const std::vector<Pattern>& ctx, std::size_t i) {
  std::vector<Pattern> out = ctx;
  out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
  return out;
}

inline std::vector<Pattern> replaced(const std::vector<Pattern>& ctx, std::size_t i, std::vector<Pattern> with) {
  std::vector<Pattern> out(ctx.begin(), ctx.begin() + static_cast<std::ptrdiff_t>(i));
  out.insert(out.end(), with.begin(), with.end());
  out.insert(out.end(), ctx.begin() + static_cast<std::ptrdiff_t>(i) + 1, ctx.end());
  return out;
}

inline VarSet context_free_vars(const std::vector<Pattern>& ctx) {
  VarSet out;
  for (const auto& p : ctx) {
    for (const auto& x : free_vars(p)) out.insert(x);
  }
  return out;
}

inline Pattern var(const VarName& x) { return Pattern::evar(x); }

class NodeChecker {
 public:
  explicit NodeChecker(const ProofNode& n) : n_(n), s_(n.conclusion), p_(n.params) {}

  void check() {
    require(s_.theory != nullptr, "sequent has no theory");
    for (const auto& c : n_.children) {
      require(c.conclusion.theory && (c.conclusion.theory == s_.theory || *c.conclusion.theory == *s_.theory),
              "child sequent uses a different theory");
    }
    if (const auto* core = std::get_if<CoreRule>(&n_.rule)) {
      check_core(*core);
    } else {
      check_derived(std::get<DerivedRule>(n_.rule));
    }
  }

 private:
  void children(std::size_t k) {
    require(n_.children.size() == k, "expected " + std::to_string(k) + " premise(s), found " +
                                         std::to_string(n_.children.size()));
  }

  void premise(std::size_t k, const std::vector<Pattern>& ctx, const Pattern& goal) {
    const Sequent& c = n_.children[k].conclusion;
    require(c.context == ctx, "premise " + std::to_string(k) + " has the wrong local context");
    require(c.goal == goal, "premise " + std::to_string(k) + " has the wrong conclusion");
  }

  std::size_t index(std::size_t bound_exclusive) {
    require(p_.indices[0] < bound_exclusive, "index " + std::to_string(p_.indices[0]) + " out of range");
    return p_.indices[0];
  }

  const Pattern& hyp(std::size_t i) { return s_.context[i]; }

  void needs_definedness() {
    require(s_.theory->has_definedness(), "rule requires the definedness theory in Γ");
  }

  void check_core(CoreRule r) {
    const auto& ctx = s_.context;
    const Pattern& goal = s_.goal;
    switch (r) {
      case CoreRule::Inherit:
        shape(p_, 0, 0, 0, false, false, false);
        children(0);
        require(ctx.empty(), "Inherit needs an empty local context");
        require(s_.theory->contains(goal), "conclusion is not an axiom of Γ");
        return;
      case CoreRule::Weaken: {
        shape(p_, 1, 0, 0, false, false, false);
        children(1);
        std::size_t i = index(ctx.size());
        premise(0, without(ctx, i), goal);
        return;
      }
      case CoreRule::Cut: {
        shape(p_, 1, 0, 1, false, false, false);
        children(2);
        std::size_t i = index(ctx.size() + 1);
        const Pattern& phi = p_.patterns[0];
        std::vector<Pattern> front(ctx.begin(), ctx.begin() + static_cast<std::ptrdiff_t>(i));
        premise(0, front, phi);
        std::vector<Pattern> extended = ctx;
        extended.insert(extended.begin() + static_cast<std::ptrdiff_t>(i), phi);
        premise(1, extended, goal);
        return;
      }
      case CoreRule::Hyp: {
        shape(p_, 1, 0, 0, false, false, false);
        children(0);
        std::size_t i = index(ctx.size());
        require(hyp(i) == goal, "hypothesis does not match the conclusion");
        return;
      }
      case CoreRule::ImpL: {
        shape(p_, 1, 0, 0, false, false, false);
        children(2);
        std::size_t i = index(ctx.size());
        require(hyp(i).is(Pattern::Kind::Imp), "hypothesis is not an implication");
        premise(0, without(ctx, i), hyp(i).left());
        premise(1, replaced(ctx, i, {hyp(i).right()}), goal);
        return;
      }
      case CoreRule::AndL: {
        shape(p_, 1, 0, 0, false, false, false);
        children(1);
        std::size_t i = index(ctx.size());
        auto c = match_and(hyp(i));
        require(c.has_value(), "hypothesis is not a conjunction");
        premise(0, replaced(ctx, i, {c->first, c->second}), goal);
        return;
      }
      case CoreRule::OrL: {
        shape(p_, 1, 0, 0, false, false, false);
        children(2);
        std::size_t i = index(ctx.size());
        auto d = match_or(hyp(i));
        require(d.has_value(), "hypothesis is not a disjunction");
        premise(0, replaced(ctx, i, {d->first}), goal);
        premise(1, replaced(ctx, i, {d->second}), goal);
        return;
      }
      case CoreRule::BotL: {
        shape(p_, 1, 0, 0, false, false, false);
        children(0);
        std::size_t i = index(ctx.size());
        require(hyp(i).is(Pattern::Kind::Bot), "hypothesis is not bottom");
        return;
      }
      case CoreRule::ImpR: {
        shape(p_, 0, 0, 0, false, false, false);
        children(1);
        require(goal.is(Pattern::Kind::Imp), "conclusion is not an implication");
        std::vector<Pattern> extended = ctx;
        extended.push_back(goal.left());
        premise(0, extended, goal.right());
        return;
      }
      case CoreRule::AndR: {
        shape(p_, 0, 0, 0, false, false, false);
        children(2);
        auto c = match_and(goal);
        require(c.has_value(), "conclusion is not a conjunction");
        premise(0, ctx, c->first);
        premise(1, ctx, c->second);
        return;
      }
      case CoreRule::OrR_L:
      case CoreRule::OrR_R: {
        shape(p_, 0, 0, 0, false, false, false);
        children(1);
        auto d = match_or(goal);
        require(d.has_value(), "conclusion is not a disjunction");
        premise(0, ctx, r == CoreRule::OrR_L ? d->first : d->second);
        return;
      }
      case CoreRule::ForallL: {
        shape(p_, 1, 1, 0, false, false, false);
        children(1);
        std::size_t i = index(ctx.size());
        auto f = match_forall(hyp(i));
        require(f.has_value(), "hypothesis is not universally quantified");
        premise(0, replaced(ctx, i, {substitute(f->second, f->first, var(p_.vars[0]))}), goal);
        return;
      }
      case CoreRule::ExistsL: {
        shape(p_, 1, 1, 0, false, false, false);
        children(1);
        std::size_t i = index(ctx.size());
        require(hyp(i).is(Pattern::Kind::Exists), "hypothesis is not existentially quantified");
        const VarName& y = p_.vars[0];
        require(!context_free_vars(ctx).count(y) && !occurs_free(y, goal),
                "variable '" + y + "' is not fresh for the local context and conclusion");
        premise(0, replaced(ctx, i, {substitute(hyp(i).body(), hyp(i).name(), var(y))}), goal);
        return;
      }
      case CoreRule::ForallR: {
        shape(p_, 0, 1, 0, false, false, false);
        children(1);
        auto f = match_forall(goal);
        require(f.has_value(), "conclusion is not universally quantified");
        const VarName& y = p_.vars[0];
        require(!context_free_vars(ctx).count(y) && !occurs_free(y, goal),
                "variable '" + y + "' is not fresh for the local context and conclusion");
        premise(0, ctx, substitute(f->second, f->first, var(y)));
        return;
      }
      case CoreRule::ExistsR: {
        shape(p_, 0, 1, 0, false, false, false);
        children(1);
        require(goal.is(Pattern::Kind::Exists), "conclusion is not existentially quantified");
        premise(0, ctx, substitute(goal.body(), goal.name(), var(p_.vars[0])));
        return;
      }
      case CoreRule::Deduction:
        require(false, "Deduction is only available inside derived rules");
        return;
      case CoreRule::EqRefl: {
        shape(p_, 0, 0, 0, false, false, false);
        children(0);
        needs_definedness();
        auto e = match_equal(goal);
        require(e && e->first == e->second, "conclusion is not of the form p = p");
        return;
      }
      case CoreRule::EqRewrite: {
        shape(p_, 1, 0, 0, true, false, false);
        children(1);
        needs_definedness();
        std::size_t i = index(ctx.size());
        auto e = match_equal(hyp(i));
        require(e.has_value(), "hypothesis is not an equality");
        require(p_.context->plug(e->first) == goal, "conclusion is not C[lhs] for the addressed equality");
        premise(0, ctx, p_.context->plug(e->second));
        return;
      }
    }
  }

  // Derived rules are closed leaves: empty local context, fixed schema.
  void conclusion_is(const Pattern& expected) {
    require(s_.context.empty(), "derived rules conclude with an empty local context");
    require(s_.goal == expected, "conclusion does not match the rule schema");
  }

  template <class F>
  void with_step(F f) {
    if (const auto* s = std::get_if<UnifStep<SetProblem>>(&p_.evidence)) return f(*s);
    if (const auto* s = std::get_if<UnifStep<ListProblem>>(&p_.evidence)) return f(*s);
    require(false, "evidence is not a unification step");
  }

  template <class F>
  void with_trace(F f) {
    if (const auto* t = std::get_if<UnifTrace<SetProblem>>(&p_.evidence)) return f(*t);
    if (const auto* t = std::get_if<UnifTrace<ListProblem>>(&p_.evidence)) return f(*t);
    require(false, "evidence is not a unification trace");
  }

  template <class P>
  static void replay(const UnifTrace<P>& t) {
    const P* cur = &t.initial;
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
      const auto& s = t.steps[k];
      require(s.before == *cur, "trace step " + std::to_string(k) + " does not start where the previous ended");
      require(check_step(s), "trace step " + std::to_string(k) + " is not a valid " + std::string(rule_name(s.rule)) +
                                 " step");
      cur = &s.after;
    }
  }

  void term_args(std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) require(p_.patterns[k].is_term(), "argument is not a term pattern");
  }

  void check_derived(DerivedRule r) {
    const auto& ps = p_.patterns;
    switch (r) {
      case DerivedRule::Congruence: {
        shape(p_, 0, 0, 2, true, false, false);
        children(1);
        premise(0, {}, iff(ps[0], ps[1]));
        conclusion_is(iff(p_.context->plug(ps[0]), p_.context->plug(ps[1])));
        return;
      }
      case DerivedRule::DefinednessIntro:
        shape(p_, 0, 0, 1, false, false, false);
        children(0);
        needs_definedness();
        conclusion_is(Pattern::imp(ps[0], defined(ps[0])));
        return;
      case DerivedRule::MemberToEq:
        shape(p_, 0, 0, 2, false, false, false);
        children(0);
        needs_definedness();
        term_args(2);
        conclusion_is(Pattern::imp(member(ps[0], ps[1]), equal(ps[0], ps[1])));
        return;
      case DerivedRule::CondEquiv:
        shape(p_, 0, 0, 3, false, false, false);
        children(0);
        conclusion_is(iff(iff(land(ps[0], ps[1]), land(ps[0], ps[2])), Pattern::imp(ps[0], iff(ps[1], ps[2]))));
        return;
      case DerivedRule::CondEq:
        shape(p_, 0, 0, 3, false, false, false);
        children(0);
        needs_definedness();
        require(is_predicate_pattern(ps[0]), "condition is not a predicate pattern");
        conclusion_is(
            iff(equal(land(ps[0], ps[1]), land(ps[0], ps[2])), Pattern::imp(ps[0], equal(ps[1], ps[2]))));
        return;
      case DerivedRule::TermConjToEq:
        shape(p_, 0, 0, 2, false, false, false);
        children(0);
        needs_definedness();
        term_args(2);
        conclusion_is(iff(land(ps[0], ps[1]), land(ps[0], equal(ps[0], ps[1]))));
        return;
      case DerivedRule::SubstEq:
        shape(p_, 0, 1, 2, false, false, false);
        children(0);
        needs_definedness();
        conclusion_is(Pattern::imp(equal(var(p_.vars[0]), ps[0]),
                                   equal(substitute(ps[1], p_.vars[0], ps[0]), ps[1])));
        return;
      case DerivedRule::SubstPredicate: {
        shape(p_, 0, 0, 1, false, true, false);
        children(0);
        needs_definedness();
        const Pattern phi = predicate_of(*p_.subst);
        conclusion_is(iff(land(apply(*p_.subst, ps[0]), phi), land(ps[0], phi)));
        return;
      }
      case DerivedRule::StepSound:
        shape(p_, 0, 0, 0, false, false, true);
        children(0);
        needs_definedness();
        with_step([&](const auto& s) {
          require(check_step(s), "embedded step is not a valid " + std::string(rule_name(s.rule)) + " step");
          require(!s.after.is_failed(), "embedded step ends in bottom");
          conclusion_is(Pattern::imp(s.before.predicate(), s.after.predicate()));
        });
        return;
      case DerivedRule::ChainSound:
        shape(p_, 0, 0, 0, false, false, true);
        children(0);
        needs_definedness();
        with_trace([&](const auto& t) {
          replay(t);
          require(!t.final_problem().is_failed(), "embedded trace ends in bottom");
          conclusion_is(Pattern::imp(t.initial.predicate(), t.final_problem().predicate()));
        });
        return;
      case DerivedRule::MguForward:
        shape(p_, 0, 0, 2, false, true, true);
        children(0);
        needs_definedness();
        term_args(2);
        with_trace([&](const auto& t) {
          using P = std::decay_t<decltype(t.initial)>;
          require(t.initial == P::singleton(ps[0], ps[1]), "trace does not start from the singleton problem");
          replay(t);
          const auto& last = t.final_problem();
          require(!last.is_failed() && is_solved_form(last), "trace does not end in a solved form");
          require(solved_reading(last) == *p_.subst, "substitution is not the reading of the final problem");
          conclusion_is(Pattern::imp(equal(ps[0], ps[1]), predicate_of(*p_.subst)));
        });
        return;
      case DerivedRule::UnifierBackward:
        shape(p_, 0, 0, 2, false, true, false);
        children(0);
        needs_definedness();
        term_args(2);
        require(is_unifier(*p_.subst, ps[0], ps[1]), "substitution is not a unifier");
        conclusion_is(Pattern::imp(predicate_of(*p_.subst), equal(ps[0], ps[1])));
        return;
      case DerivedRule::Injectivity: {
        shape(p_, 1, 0, 1, false, false, false);
        children(0);
        require(ps[0].is(Pattern::Kind::Sym), "injectivity parameter is not a symbol");
        const auto arity = p_.indices[0];
        require(arity > 0 && arity <= 64, "injectivity arity out of range");
        require(s_.theory->has_injectivity(ps[0].name(), static_cast<unsigned>(arity)),
                "Γ has no injectivity scheme for '" + ps[0].name() + "'");
        conclusion_is(injectivity_instance(ps[0].name(), static_cast<unsigned>(arity)));
        return;
      }
      case DerivedRule::EqSymmetry:
        shape(p_, 0, 0, 2, false, false, false);
        children(0);
        needs_definedness();
        conclusion_is(Pattern::imp(equal(ps[0], ps[1]), equal(ps[1], ps[0])));
        return;
      case DerivedRule::EqTransitivity:
        shape(p_, 0, 0, 3, false, false, false);
        children(0);
        needs_definedness();
        conclusion_is(Pattern::imp(equal(ps[0], ps[1]), Pattern::imp(equal(ps[1], ps[2]), equal(ps[0], ps[2]))));
        return;
      case DerivedRule::TopIntro:
        shape(p_, 0, 0, 0, false, false, false);
        children(0);
        conclusion_is(top());
        return;
    }
  }

  const ProofNode& n_;
  const Sequent& s_;
  const RuleParams& p_;
};

}  // namespace detail

/// Checks one node against its children's conclusions.
inline CheckResult check_node(const ProofNode& n) {
  try {
    detail::NodeChecker(n).check();
    return CheckResult::pass();
  } catch (const detail::Failure& f) {
    return {false, "root", std::string(rule_name(n.rule)), f.reason};
  } catch (const Error& e) {
    return {false, "root", std::string(rule_name(n.rule)), e.what()};
  }
}

/// Checks every node, reporting the first failure in pre-order.
inline CheckResult check_tree(const ProofNode& n, const std::string& path = "root") {
  CheckResult r = check_node(n);
  if (!r.ok) {
    r.path = path;
    return r;
  }
  for (std::size_t k = 0; k < n.children.size(); ++k) {
    r = check_tree(n.children[k], path + "." + std::to_string(k));
    if (!r.ok) return r;
  }
  return CheckResult::pass();
}

inline std::size_t tree_size(const ProofNode& n) {
  std::size_t s = 1;
  for (const auto& c : n.children) s += tree_size(c);
  return s;
}

}  // namespace mlu
