#pragma once

// Certificates for the soundness of a unification run:
//   Γ ⊢ t1 = t2 ↔ ϕ^σ            (the equation tree)
//   Γ ⊢ t1 ∧ t2 ↔ t1 ∧ ϕ^σ        (the conjunction tree)

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mlunify/engine.hpp"
#include "mlunify/proof.hpp"
#include "mlunify/substitution.hpp"
#include "mlunify/theory.hpp"

namespace mlu {

using AnyTrace = std::variant<UnifTrace<SetProblem>, UnifTrace<ListProblem>>;

struct Certificate {
  Signature signature;
  TheoryRef theory;
  Pattern t1;
  Pattern t2;
  Substitution sigma;
  AnyTrace trace;
  ProofNode equation_proof;
  ProofNode conjunction_proof;

  friend bool operator==(const Certificate& a, const Certificate& b) {
    return a.signature == b.signature && *a.theory == *b.theory && a.t1 == b.t1 && a.t2 == b.t2 &&
           a.sigma == b.sigma && a.trace == b.trace && a.equation_proof == b.equation_proof &&
           a.conjunction_proof == b.conjunction_proof;
  }
};

/// The two claims a certificate must establish.
inline Pattern equation_claim(const Pattern& t1, const Pattern& t2, const Substitution& s) {
  return iff(equal(t1, t2), predicate_of(s));
}

inline Pattern conjunction_claim(const Pattern& t1, const Pattern& t2, const Substitution& s) {
  return iff(land(t1, t2), land(t1, predicate_of(s)));
}

struct CertificateOptions {
  /// Forward direction from one StepSound leaf per step instead of a single
  /// ChainSound leaf.
  bool expand_chain = false;
  /// Backward direction from CondEq, SubstPredicate and Congruence instead of a
  /// single UnifierBackward leaf.
  bool expand_backward = true;
};

/// Proof-building helpers. Every function returns a tree whose root concludes
/// Γ ▶ ctx ⊢ goal for the documented goal.
class Tactics {
 public:
  explicit Tactics(TheoryRef theory) : theory_(std::move(theory)) {}

  const TheoryRef& theory() const { return theory_; }

  ProofNode node(std::vector<Pattern> ctx, Pattern goal, ProofRule rule, RuleParams params = {},
                 std::vector<ProofNode> children = {}) const {
    return ProofNode{Sequent{theory_, std::move(ctx), std::move(goal)}, rule, std::move(params), std::move(children)};
  }

  ProofNode leaf(DerivedRule rule, Pattern goal, RuleParams params = {}, std::vector<ProofNode> children = {}) const {
    return node({}, std::move(goal), rule, std::move(params), std::move(children));
  }

  static RuleParams at(std::size_t i) {
    RuleParams p;
    p.indices = {i};
    return p;
  }

  static RuleParams cut_at(std::size_t i, const Pattern& phi) {
    RuleParams p = at(i);
    p.patterns = {phi};
    return p;
  }

  static const Pattern& goal(const ProofNode& n) { return n.conclusion.goal; }
  static const std::vector<Pattern>& ctx(const ProofNode& n) { return n.conclusion.context; }

  /// Lifts a proof with empty context to context `to` by weakening.
  ProofNode weaken_to(ProofNode p, const std::vector<Pattern>& to) const {
    for (std::size_t k = 1; k <= to.size(); ++k) {
      std::vector<Pattern> c(to.begin(), to.begin() + static_cast<std::ptrdiff_t>(k));
      Pattern g = goal(p);
      p = node(std::move(c), std::move(g), CoreRule::Weaken, at(k - 1), {std::move(p)});
    }
    return p;
  }

  /// Adds one hypothesis at the end of the context.
  ProofNode lift(ProofNode p, const Pattern& extra) const {
    std::vector<Pattern> c = ctx(p);
    c.push_back(extra);
    Pattern g = goal(p);
    const std::size_t i = ctx(p).size();
    return node(std::move(c), std::move(g), CoreRule::Weaken, at(i), {std::move(p)});
  }

  ProofNode hyp(const std::vector<Pattern>& c, std::size_t i) const {
    return node(c, c.at(i), CoreRule::Hyp, at(i));
  }

  /// From Δ ⊢ A → B and Δ ⊢ A, derives Δ ⊢ B.
  ProofNode mp(ProofNode imp, ProofNode arg) const {
    const auto c = ctx(imp);
    const Pattern a_to_b = goal(imp);
    const Pattern b = a_to_b.right();
    const std::size_t n = c.size();
    std::vector<Pattern> with_imp = c;
    with_imp.push_back(a_to_b);
    std::vector<Pattern> with_b = c;
    with_b.push_back(b);
    ProofNode use = node(with_imp, b, CoreRule::ImpL, at(n), {std::move(arg), hyp(with_b, n)});
    return node(c, b, CoreRule::Cut, cut_at(n, a_to_b), {std::move(imp), std::move(use)});
  }

  /// From Δ ⊢ A ↔ B, derives Δ ⊢ A → B (left) or Δ ⊢ B → A (right).
  ProofNode iff_elim(ProofNode p, bool left) const {
    const auto c = ctx(p);
    const Pattern both = goal(p);
    auto parts = match_and(both);
    if (!parts) throw Error("iff_elim on a non-equivalence");
    const std::size_t n = c.size();
    std::vector<Pattern> split = c;
    split.push_back(parts->first);
    split.push_back(parts->second);
    const Pattern target = left ? parts->first : parts->second;
    std::vector<Pattern> with_both = c;
    with_both.push_back(both);
    ProofNode take = node(with_both, target, CoreRule::AndL, at(n), {hyp(split, left ? n : n + 1)});
    return node(c, target, CoreRule::Cut, cut_at(n, both), {std::move(p), std::move(take)});
  }

  ProofNode iff_intro(ProofNode ab, ProofNode ba) const {
    const Pattern a = goal(ab).left();
    const Pattern b = goal(ab).right();
    return node(ctx(ab), iff(a, b), CoreRule::AndR, {}, {std::move(ab), std::move(ba)});
  }

  ProofNode iff_sym(const ProofNode& p) const { return iff_intro(iff_elim(p, false), iff_elim(p, true)); }

  /// From Δ ⊢ A → B and Δ ⊢ B → C, derives Δ ⊢ A → C.
  ProofNode imp_trans(const ProofNode& ab, const ProofNode& bc) const {
    const Pattern a = goal(ab).left();
    const Pattern c = goal(bc).right();
    std::vector<Pattern> inner = ctx(ab);
    inner.push_back(a);
    ProofNode get_b = mp(lift(ab, a), hyp(inner, inner.size() - 1));
    ProofNode get_c = mp(lift(bc, a), std::move(get_b));
    return node(ctx(ab), Pattern::imp(a, c), CoreRule::ImpR, {}, {std::move(get_c)});
  }

  /// From Δ ⊢ A ↔ B and Δ ⊢ B ↔ C, derives Δ ⊢ A ↔ C.
  ProofNode iff_trans(const ProofNode& ab, const ProofNode& bc) const {
    return iff_intro(imp_trans(iff_elim(ab, true), iff_elim(bc, true)),
                     imp_trans(iff_elim(bc, false), iff_elim(ab, false)));
  }

  /// Δ ⊢ (A ∧ B) → (B ∧ A)
  ProofNode and_swap(const std::vector<Pattern>& c, const Pattern& a, const Pattern& b) const {
    const std::size_t n = c.size();
    std::vector<Pattern> with_conj = c;
    with_conj.push_back(land(a, b));
    std::vector<Pattern> split = c;
    split.push_back(a);
    split.push_back(b);
    ProofNode build = node(split, land(b, a), CoreRule::AndR, {}, {hyp(split, n + 1), hyp(split, n)});
    ProofNode open = node(with_conj, land(b, a), CoreRule::AndL, at(n), {std::move(build)});
    return node(c, Pattern::imp(land(a, b), land(b, a)), CoreRule::ImpR, {}, {std::move(open)});
  }

  /// Δ ⊢ (A ∧ B) ↔ (B ∧ A)
  ProofNode and_comm(const std::vector<Pattern>& c, const Pattern& a, const Pattern& b) const {
    return iff_intro(and_swap(c, a, b), and_swap(c, b, a));
  }

  /// Δ ⊢ F → G where F and G conjoin the same conjuncts in possibly different
  /// orders. `from` and `to` list the conjuncts of F and G.
  ProofNode conj_permute(const std::vector<Pattern>& c, const std::vector<Pattern>& from,
                         const std::vector<Pattern>& to) const {
    const Pattern f = conjoin(from);
    const Pattern g = conjoin(to);
    std::vector<Pattern> hyps = c;
    hyps.push_back(f);
    ProofNode body = build_conj(hyps, c.size(), from, to, 0);
    return node(c, Pattern::imp(f, g), CoreRule::ImpR, {}, {std::move(body)});
  }

 private:
  // Context `hyps` ends with the conjunction of from[k..] at position `pos`.
  // Opens it with AndL, then assembles `to` from hypotheses.
  ProofNode build_conj(const std::vector<Pattern>& hyps, std::size_t pos, const std::vector<Pattern>& from,
                       const std::vector<Pattern>& to, std::size_t k) const {
    const Pattern g = conjoin(to);
    if (from.empty()) {
      if (!to.empty()) throw Error("conj_permute: conjunct sets differ");
      return weaken_to(leaf(DerivedRule::TopIntro, top()), hyps);
    }
    if (k + 1 < from.size()) {
      std::vector<Pattern> rest(from.begin() + static_cast<std::ptrdiff_t>(k) + 1, from.end());
      std::vector<Pattern> split = hyps;
      split.pop_back();
      split.push_back(from[k]);
      split.push_back(conjoin(rest));
      ProofNode inner = build_conj(split, pos + 1, from, to, k + 1);
      return node(hyps, g, CoreRule::AndL, at(pos), {std::move(inner)});
    }
    // All conjuncts of `from` now sit at positions base .. base + |from| - 1.
    const std::size_t base = hyps.size() - from.size();
    return assemble(hyps, base, from, to, 0);
  }

  ProofNode assemble(const std::vector<Pattern>& hyps, std::size_t base, const std::vector<Pattern>& from,
                     const std::vector<Pattern>& to, std::size_t k) const {
    auto find = [&](const Pattern& p) {
      for (std::size_t i = 0; i < from.size(); ++i) {
        if (from[i] == p) return base + i;
      }
      throw Error("conj_permute: conjunct missing from source");
    };
    if (to.empty()) throw Error("conj_permute: conjunct sets differ");
    if (k + 1 == to.size()) return hyp(hyps, find(to[k]));
    std::vector<Pattern> rest(to.begin() + static_cast<std::ptrdiff_t>(k) + 1, to.end());
    return node(hyps, land(to[k], conjoin(rest)), CoreRule::AndR, {},
                {hyp(hyps, find(to[k])), assemble(hyps, base, from, to, k + 1)});
  }

  TheoryRef theory_;
};

namespace detail {

inline std::vector<Pattern> conjuncts_of(const Substitution& s) {
  std::vector<Pattern> out;
  for (const auto& [x, t] : s.bindings()) out.push_back(equal(Pattern::evar(x), t));
  return out;
}

// Conjuncts of ϕ^P in the order predicate() conjoins them.
template <UnificationProblem P>
std::vector<Pattern> conjuncts_of(const P& p) {
  const Pattern whole = p.predicate();
  const std::size_t n = p.pairs().size();
  if (n == 0) return {};
  return split_conjunction(whole, n);
}

template <UnificationProblem P>
ProofNode forward_proof(const Tactics& tc, const Pattern& t1, const Pattern& t2, const UnifTrace<P>& trace,
                        const Substitution& sigma, const CertificateOptions& opts) {
  const Pattern e = equal(t1, t2);
  const std::vector<Pattern> ctx{e};
  // [E] ⊢ ϕ^{P_final}
  ProofNode reached = tc.hyp(ctx, 0);
  if (opts.expand_chain) {
    for (const auto& s : trace.steps) {
      RuleParams rp;
      rp.evidence = s;
      ProofNode step = tc.leaf(DerivedRule::StepSound, Pattern::imp(s.before.predicate(), s.after.predicate()), rp);
      reached = tc.mp(tc.weaken_to(std::move(step), ctx), std::move(reached));
    }
  } else {
    RuleParams rp;
    rp.evidence = trace;
    ProofNode chain = tc.leaf(DerivedRule::ChainSound,
                              Pattern::imp(trace.initial.predicate(), trace.final_problem().predicate()), rp);
    reached = tc.mp(tc.weaken_to(std::move(chain), ctx), std::move(reached));
  }
  ProofNode reorder = tc.conj_permute(ctx, conjuncts_of(trace.final_problem()), conjuncts_of(sigma));
  ProofNode phi = tc.mp(std::move(reorder), std::move(reached));
  return tc.node({}, Pattern::imp(e, predicate_of(sigma)), CoreRule::ImpR, {}, {std::move(phi)});
}

inline ProofNode backward_proof(const Tactics& tc, const Pattern& t1, const Pattern& t2, const Substitution& sigma,
                                const CertificateOptions& opts) {
  const Pattern phi = predicate_of(sigma);
  if (!opts.expand_backward) {
    RuleParams rp;
    rp.patterns = {t1, t2};
    rp.subst = sigma;
    return tc.leaf(DerivedRule::UnifierBackward, Pattern::imp(phi, equal(t1, t2)), rp);
  }
  const Pattern s1 = apply(sigma, t1);
  const Pattern s2 = apply(sigma, t2);
  if (s1 != s2) throw Error("substitution is not a unifier of the inputs");

  auto subst_pred = [&](const Pattern& t) {
    RuleParams rp;
    rp.patterns = {t};
    rp.subst = sigma;
    return tc.leaf(DerivedRule::SubstPredicate, iff(land(apply(sigma, t), phi), land(t, phi)), rp);
  };
  // ϕ ∧ t1 ↔ t1 ∧ ϕ ↔ t1σ ∧ ϕ = t2σ ∧ ϕ ↔ t2 ∧ ϕ ↔ ϕ ∧ t2
  ProofNode lr = tc.iff_trans(tc.and_comm({}, phi, t1), tc.iff_sym(subst_pred(t1)));
  lr = tc.iff_trans(lr, subst_pred(t2));
  lr = tc.iff_trans(lr, tc.and_comm({}, t2, phi));

  const Pattern l = land(phi, t1);
  const Pattern r = land(phi, t2);
  PatternContext c = PatternContext::around([&](const Pattern& hole) { return equal(l, hole); });
  RuleParams cong_params;
  cong_params.patterns = {l, r};
  cong_params.context = c;
  ProofNode cong = tc.leaf(DerivedRule::Congruence, iff(c.plug(l), c.plug(r)), cong_params, {std::move(lr)});
  ProofNode refl = tc.node({}, equal(l, l), CoreRule::EqRefl);
  ProofNode eq_lr = tc.mp(tc.iff_elim(cong, true), std::move(refl));

  RuleParams ce;
  ce.patterns = {phi, t1, t2};
  ProofNode cond = tc.leaf(DerivedRule::CondEq, iff(equal(l, r), Pattern::imp(phi, equal(t1, t2))), ce);
  return tc.mp(tc.iff_elim(cond, true), std::move(eq_lr));
}

template <UnificationProblem P>
ProofNode equation_tree(const Tactics& tc, const Pattern& t1, const Pattern& t2, const UnifTrace<P>& trace,
                        const Substitution& sigma, const CertificateOptions& opts) {
  return tc.iff_intro(forward_proof(tc, t1, t2, trace, sigma, opts), backward_proof(tc, t1, t2, sigma, opts));
}

inline ProofNode conjunction_tree(const Tactics& tc, const Pattern& t1, const Pattern& t2, const ProofNode& eq_tree,
                                  const Substitution& sigma) {
  const Pattern e = equal(t1, t2);
  const Pattern phi = predicate_of(sigma);
  RuleParams lemma;
  lemma.patterns = {t1, t2};
  ProofNode to_eq = tc.leaf(DerivedRule::TermConjToEq, iff(land(t1, t2), land(t1, e)), lemma);
  PatternContext c = PatternContext::around([&](const Pattern& hole) { return land(t1, hole); });
  RuleParams cp;
  cp.patterns = {e, phi};
  cp.context = c;
  ProofNode cong = tc.leaf(DerivedRule::Congruence, iff(c.plug(e), c.plug(phi)), cp, {eq_tree});
  return tc.iff_trans(to_eq, cong);
}

}  // namespace detail

/// Builds both proofs from a solved, non-failed trace starting at ⟨t1, t2⟩.
template <UnificationProblem P>
Certificate generate_certificate(const Signature& sig, const Pattern& t1, const Pattern& t2, const UnifTrace<P>& trace,
                                 const Substitution& sigma, const CertificateOptions& opts = {}) {
  if (!(trace.initial == P::singleton(t1, t2))) throw Error("trace does not start from the input pair");
  const P& last = trace.final_problem();
  if (last.is_failed()) throw Error("cannot certify a failed unification");
  if (!is_solved_form(last)) throw Error("trace does not end in solved form");
  if (!(solved_reading(last) == sigma)) throw Error("substitution is not the reading of the final problem");

  auto theory = std::make_shared<const Theory>(Theory::standard(sig));
  Tactics tc(theory);
  ProofNode eq = detail::equation_tree(tc, t1, t2, trace, sigma, opts);
  ProofNode conj = detail::conjunction_tree(tc, t1, t2, eq, sigma);
  return Certificate{sig, theory, t1, t2, sigma, AnyTrace{trace}, std::move(eq), std::move(conj)};
}

/// Runs the engine and certifies its result; throws when the terms do not unify.
template <UnificationProblem P>
Certificate certify(const Signature& sig, const Pattern& t1, const Pattern& t2, const CertificateOptions& opts = {},
                    Strategy strategy = Strategy::PairFirst) {
  auto r = solve<P>(t1, t2, strategy);
  if (!r.mgu) throw Error("terms do not unify");
  return generate_certificate(sig, t1, t2, r.trace, *r.mgu, opts);
}

struct Verdict {
  bool accepted = false;
  /// Which part failed: "equation", "conjunction", "trace", "sigma", ...
  std::string where;
  CheckResult detail;
  std::string message;

  explicit operator bool() const { return accepted; }
};

inline Verdict check_certificate(const Certificate& c) {
  auto reject = [](std::string where, std::string msg, CheckResult r = {}) {
    return Verdict{false, std::move(where), std::move(r), std::move(msg)};
  };
  if (!c.theory) return reject("theory", "certificate has no theory");
  if (!(*c.theory == Theory::standard(c.signature))) {
    return reject("theory", "theory is not the standard theory of the signature");
  }
  if (!c.t1.is_term() || !c.t2.is_term()) return reject("terms", "inputs are not term patterns");
  for (const Pattern* t : {&c.t1, &c.t2}) {
    std::function<bool(const Pattern&)> declared = [&](const Pattern& p) -> bool {
      if (p.is(Pattern::Kind::Sym)) return c.signature.contains(p.name()) && !is_definedness_symbol(p);
      if (p.is(Pattern::Kind::App)) return declared(p.left()) && declared(p.right());
      return true;
    };
    if (!declared(*t)) return reject("terms", "inputs use undeclared symbols");
  }

  const std::string trace_error = std::visit(
      [&](const auto& t) -> std::string {
        using P = std::decay_t<decltype(t.initial)>;
        if (!(t.initial == P::singleton(c.t1, c.t2))) return "trace does not start from the input pair";
        const P* cur = &t.initial;
        for (std::size_t k = 0; k < t.steps.size(); ++k) {
          if (!(t.steps[k].before == *cur)) return "trace step " + std::to_string(k) + " is disconnected";
          if (!check_step(t.steps[k])) return "trace step " + std::to_string(k) + " does not replay";
          cur = &t.steps[k].after;
        }
        if (cur->is_failed() || !is_solved_form(*cur)) return "trace does not end in a solved form";
        if (!(solved_reading(*cur) == c.sigma)) return "sigma is not the reading of the final problem";
        return "";
      },
      c.trace);
  if (!trace_error.empty()) return reject("trace", trace_error);
  if (!is_unifier(c.sigma, c.t1, c.t2)) return reject("sigma", "sigma is not a unifier of t1 and t2");

  const Sequent eq_claim{c.theory, {}, equation_claim(c.t1, c.t2, c.sigma)};
  const Sequent conj_claim{c.theory, {}, conjunction_claim(c.t1, c.t2, c.sigma)};
  if (!(c.equation_proof.conclusion == eq_claim)) return reject("equation", "equation proof concludes the wrong sequent");
  if (!(c.conjunction_proof.conclusion == conj_claim)) {
    return reject("conjunction", "conjunction proof concludes the wrong sequent");
  }
  if (auto r = check_tree(c.equation_proof); !r) return reject("equation", r.reason, r);
  if (auto r = check_tree(c.conjunction_proof); !r) return reject("conjunction", r.reason, r);
  return Verdict{true, "", CheckResult::pass(), "accepted"};
}

inline std::string describe(const Verdict& v) {
  if (v.accepted) return "ACCEPT";
  std::string out = "REJECT (" + v.where + ")";
  if (!v.detail.ok) out += " at " + v.detail.path + " [" + v.detail.rule + "]";
  return out + ": " + v.message;
}

}  // namespace mlu
