#include <gtest/gtest.h>

#include "mlunify/engine.hpp"
#include "mlunify/surface.hpp"
#include "support/gen.hpp"
#include "support/oracle.hpp"

using namespace mlu;

namespace {

Signature ex1_sig() {
  Signature sig;
  sig.declare("f", 3u);
  sig.declare("g", 1u);
  sig.declare("1", 0u);
  return sig;
}

Pattern T(const std::string& src) {
  Signature sig = ex1_sig();
  sig.declare("a", 0u);
  sig.declare("b", 0u);
  return parse_term(src, sig);
}

template <class P>
P problem(std::initializer_list<std::pair<const char*, const char*>> pairs) {
  std::vector<Equation> eqs;
  for (const auto& [l, r] : pairs) eqs.push_back({T(l), T(r)});
  return P::from_pairs(std::move(eqs));
}

const char* kT1 = "f x (g 1) (g z)";
const char* kT2 = "f (g y) (g y) (g (g x))";

}  // namespace

TEST(Problems, ListKeepsOrderAndDuplicates) {
  auto p = ListProblem::empty().insert(T("x"), T("a")).insert(T("x"), T("a"));
  EXPECT_EQ(p.pairs().size(), 2u);
  EXPECT_EQ(p.insert_at(0, T("y"), T("b")).pairs().front(), (Equation{T("y"), T("b")}));
  EXPECT_EQ(p.predicate(), land(equal(T("x"), T("a")), equal(T("x"), T("a"))));
}

TEST(Problems, SetIsOrderInsensitive) {
  auto p = SetProblem::empty().insert(T("x"), T("a")).insert(T("y"), T("b"));
  auto q = SetProblem::empty().insert(T("y"), T("b")).insert(T("x"), T("a")).insert(T("x"), T("a"));
  EXPECT_EQ(p, q);
  EXPECT_EQ(p.pairs().size(), 2u);
}

TEST(Problems, FailedProblem) {
  EXPECT_TRUE(ListProblem::failed().is_failed());
  EXPECT_EQ(ListProblem::failed().predicate(), Pattern::bot());
  EXPECT_THROW(ListProblem::failed().insert(T("x"), T("a")), Error);
  EXPECT_THROW(ListProblem::empty().insert(T("x"), Pattern::bot()), Error);
  EXPECT_EQ(SetProblem::empty().predicate(), top());
}

TEST(Step, Examples) {
  auto p = problem<ListProblem>({{"f", "f"}, {"x", "g y"}});
  auto del = step(p, 0, Rule::Delete);
  ASSERT_TRUE(del);
  EXPECT_EQ(del->after, problem<ListProblem>({{"x", "g y"}}));

  auto dec = step(ListProblem::singleton(T(kT1), T(kT2)), 0, Rule::Decomposition);
  ASSERT_TRUE(dec);
  EXPECT_EQ(dec->after, problem<ListProblem>({{"f x (g 1)", "f (g y) (g y)"}, {"g z", "g (g x)"}}));

  auto ay = ListProblem::singleton(T("a"), T("y"));
  EXPECT_FALSE(step(ay, 0, Rule::SymbolClashL));
  EXPECT_FALSE(step(ay, 0, Rule::SymbolClashR));
  auto orient = next_step(ay);
  ASSERT_TRUE(orient);
  EXPECT_EQ(orient->rule, Rule::Orient);
  EXPECT_EQ(orient->after, problem<ListProblem>({{"y", "a"}}));

  auto occ = step(ListProblem::singleton(T("x"), T("g x")), 0, Rule::OccursCheck);
  ASSERT_TRUE(occ);
  EXPECT_TRUE(occ->after.is_failed());
}

TEST(Step, SideConditions) {
  EXPECT_FALSE(step(ListProblem::singleton(T("x"), T("y")), 0, Rule::Delete));
  EXPECT_FALSE(step(ListProblem::singleton(T("x"), T("x")), 0, Rule::OccursCheck));
  EXPECT_FALSE(step(ListProblem::singleton(T("x"), T("g x")), 0, Rule::Elimination));
  EXPECT_FALSE(step(ListProblem::singleton(T("g x"), T("a")), 0, Rule::Decomposition));
  EXPECT_TRUE(step(ListProblem::singleton(T("g x"), T("a")), 0, Rule::SymbolClashR));
  EXPECT_TRUE(step(ListProblem::singleton(T("a"), T("b")), 0, Rule::SymbolClashL));
  EXPECT_FALSE(step(ListProblem::singleton(T("x"), T("a")), 0, Rule::Orient));
  EXPECT_THROW(step(ListProblem::failed(), 0, Rule::Delete), Error);
}

TEST(Step, EliminationKeepsThePair) {
  auto p = problem<ListProblem>({{"x", "g y"}, {"z", "g x"}});
  auto e = step(p, 0, Rule::Elimination);
  ASSERT_TRUE(e);
  EXPECT_EQ(e->after, problem<ListProblem>({{"x", "g y"}, {"z", "g (g y)"}}));
}

TEST(Solve, Examples) {
  auto r = solve<SetProblem>(T(kT1), T(kT2));
  ASSERT_TRUE(r.mgu);
  EXPECT_EQ(*r.mgu, (Substitution{{"x", T("g 1")}, {"y", T("1")}, {"z", T("g (g 1)")}}));

  auto same = solve<ListProblem>(T("f x"), T("f x"));
  ASSERT_TRUE(same.mgu);
  EXPECT_TRUE(same.mgu->empty());
  for (const auto& s : same.trace.steps) EXPECT_NE(s.rule, Rule::Elimination);

  auto clash = solve<ListProblem>(T("f x"), T("g x"));
  EXPECT_FALSE(clash.mgu);
  ASSERT_EQ(clash.trace.steps.size(), 2u);
  EXPECT_EQ(clash.trace.steps[0].rule, Rule::Decomposition);
  EXPECT_EQ(clash.failure, Rule::SymbolClashL);

  auto occurs = solve<ListProblem>(T("x"), T("g x"));
  EXPECT_FALSE(occurs.mgu);
  EXPECT_EQ(occurs.failure, Rule::OccursCheck);

  EXPECT_THROW(solve<ListProblem>(Pattern::bot(), T("x")), Error);
}

TEST(SolvedForm, Examples) {
  EXPECT_TRUE(is_solved_form(ListProblem::failed()));
  EXPECT_FALSE(is_solved_form(problem<ListProblem>({{"x", "g y"}, {"y", "1"}, {"z", "g x"}})));
  EXPECT_TRUE(is_solved_form(problem<ListProblem>({{"x", "g 1"}, {"y", "1"}, {"z", "g (g 1)"}})));
  EXPECT_FALSE(is_solved_form(problem<ListProblem>({{"x", "a"}, {"x", "b"}})));
  EXPECT_FALSE(is_solved_form(problem<ListProblem>({{"a", "x"}})));
  EXPECT_TRUE(is_solved_form(ListProblem::empty()));
}

TEST(CheckStep, RejectsForgedSteps) {
  auto xy = ListProblem::singleton(T("x"), T("y"));
  EXPECT_FALSE(check_step(UnifStep<ListProblem>{Rule::Delete, 0, {T("x"), T("y")}, xy, ListProblem::empty()}));

  auto p = problem<ListProblem>({{"x", "g y"}, {"z", "g x"}});
  UnifStep<ListProblem> elim = *step(p, 0, Rule::Elimination);
  EXPECT_TRUE(check_step(elim));
  elim.after = elim.after.remove_at(0);
  EXPECT_FALSE(check_step(elim));

  UnifStep<ListProblem> wrong_index = *step(p, 0, Rule::Elimination);
  wrong_index.index = 1;
  EXPECT_FALSE(check_step(wrong_index));
}

// Rule-first over a list: nine steps to the solved core, then Elimination.
TEST(WorkedTrace, RuleFirstListReproducesListing) {
  auto r = solve<ListProblem>(T(kT1), T(kT2), Strategy::RuleFirst);
  const std::vector<std::pair<Rule, ListProblem>> expected{
      {Rule::Decomposition, problem<ListProblem>({{"f x (g 1)", "f (g y) (g y)"}, {"g z", "g (g x)"}})},
      {Rule::Decomposition, problem<ListProblem>({{"f x", "f (g y)"}, {"g 1", "g y"}, {"g z", "g (g x)"}})},
      {Rule::Decomposition, problem<ListProblem>({{"f", "f"}, {"x", "g y"}, {"g 1", "g y"}, {"g z", "g (g x)"}})},
      {Rule::Delete, problem<ListProblem>({{"x", "g y"}, {"g 1", "g y"}, {"g z", "g (g x)"}})},
      {Rule::Decomposition, problem<ListProblem>({{"x", "g y"}, {"g", "g"}, {"1", "y"}, {"g z", "g (g x)"}})},
      {Rule::Delete, problem<ListProblem>({{"x", "g y"}, {"1", "y"}, {"g z", "g (g x)"}})},
      {Rule::Decomposition, problem<ListProblem>({{"x", "g y"}, {"1", "y"}, {"g", "g"}, {"z", "g x"}})},
      {Rule::Delete, problem<ListProblem>({{"x", "g y"}, {"1", "y"}, {"z", "g x"}})},
      {Rule::Orient, problem<ListProblem>({{"x", "g y"}, {"y", "1"}, {"z", "g x"}})},
  };
  ASSERT_GE(r.trace.steps.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(r.trace.steps[i].rule, expected[i].first) << "step " << i;
    EXPECT_EQ(r.trace.steps[i].after, expected[i].second) << "step " << i;
  }
  for (std::size_t i = expected.size(); i < r.trace.steps.size(); ++i) {
    EXPECT_EQ(r.trace.steps[i].rule, Rule::Elimination);
  }
  ASSERT_TRUE(r.mgu);
  EXPECT_EQ(*r.mgu, (Substitution{{"x", T("g 1")}, {"y", T("1")}, {"z", T("g (g 1)")}}));
}

TEST(WorkedTrace, EveryStepReplaysAndChains) {
  for (auto strategy : {Strategy::PairFirst, Strategy::RuleFirst}) {
    auto r = solve<SetProblem>(T(kT1), T(kT2), strategy);
    const SetProblem* cur = &r.trace.initial;
    for (const auto& s : r.trace.steps) {
      EXPECT_EQ(s.before, *cur);
      EXPECT_TRUE(check_step(s));
      EXPECT_TRUE(measure_decreases(s.before, s.after));
      cur = &s.after;
    }
    EXPECT_TRUE(is_solved_form(*cur));
  }
}

TEST(Measure, DecreasesOnRandomRuns) {
  harness::Rng rng(17);
  const auto atoms = harness::default_atoms();
  for (int i = 0; i < 2000; ++i) {
    const Pattern t1 = harness::random_term(rng, atoms, 11), t2 = harness::random_term(rng, atoms, 11);
    for (auto strategy : {Strategy::PairFirst, Strategy::RuleFirst}) {
      auto r = solve<ListProblem>(t1, t2, strategy);
      for (const auto& s : r.trace.steps) {
        ASSERT_TRUE(measure_decreases(s.before, s.after)) << print_pattern(t1) << " ~ " << print_pattern(t2);
        ASSERT_TRUE(check_step(s));
      }
      if (r.mgu) {
        EXPECT_TRUE(is_unifier(*r.mgu, t1, t2));
      }
    }
  }
}

TEST(Measure, ComponentsOnSmallProblems) {
  // x and y occur; x is solved, y is not.
  EXPECT_EQ(measure(problem<ListProblem>({{"x", "g y"}, {"a", "y"}})), (Measure{1, 6, 1}));
  EXPECT_EQ(measure(ListProblem::failed()), std::nullopt);
}

TEST(Strategies, AgreeUpToRenamingOfTheMgu) {
  harness::Rng rng(23);
  const auto atoms = harness::default_atoms();
  for (int i = 0; i < 1000; ++i) {
    const Pattern t1 = harness::random_term(rng, atoms, 9), t2 = harness::random_term(rng, atoms, 9);
    auto a = solve<SetProblem>(t1, t2, Strategy::PairFirst);
    auto b = solve<ListProblem>(t1, t2, Strategy::RuleFirst);
    ASSERT_EQ(a.mgu.has_value(), b.mgu.has_value());
    if (a.mgu) {
      EXPECT_TRUE(more_general(*a.mgu, *b.mgu));
      EXPECT_TRUE(more_general(*b.mgu, *a.mgu));
    }
  }
}

// Properties of the problem data type, on both containers.
template <class P>
void check_laws(std::uint64_t seed) {
  harness::Rng rng(seed);
  const auto atoms = harness::default_atoms();
  const bool is_set = std::is_same_v<P, SetProblem>;
  auto norm = [&](const Pattern& p) { return is_set ? normalize_conjunction(p) : p; };
  for (int i = 0; i < 1000; ++i) {
    const Pattern a = harness::random_term(rng, atoms, 7), b = harness::random_term(rng, atoms, 7);
    EXPECT_EQ(P::singleton(a, b).predicate(), equal(a, b));

    const P p = harness::random_problem<P>(rng, atoms, 1 + harness::pick(rng, 3), 7);
    EXPECT_EQ(norm(p.insert(a, b).predicate()), norm(land(equal(a, b), p.predicate())));

    const VarName x = atoms.vars[harness::pick(rng, atoms.vars.size())];
    EXPECT_EQ(norm(p.subst(x, a).predicate()), norm(substitute(p.predicate(), x, a)));

    EXPECT_FALSE(p.insert(a, b).is_failed());
  }
}

TEST(ProblemLaws, List) { check_laws<ListProblem>(101); }
TEST(ProblemLaws, Set) { check_laws<SetProblem>(202); }

TEST(ProblemLaws, ListInsertIsLiterallyConjunction) {
  const auto p = problem<ListProblem>({{"x", "a"}});
  EXPECT_EQ(p.insert(T("y"), T("b")).predicate(), land(equal(T("y"), T("b")), equal(T("x"), T("a"))));
}

TEST(RuleNames, RoundTrip) {
  for (Rule r : kRulePriority) EXPECT_EQ(rule_from_name(rule_name(r)), r);
  EXPECT_EQ(rule_from_name("Nope"), std::nullopt);
}

TEST(Oracle, PrunedSearchMatchesPlainEnumeration) {
  const auto atoms = harness::default_atoms();
  const harness::GroundTerms ground(atoms.symbols, 2);
  harness::Rng rng(41);
  for (int i = 0; i < 200; ++i) {
    const Pattern t1 = harness::random_term(rng, atoms, 4), t2 = harness::random_term(rng, atoms, 4);
    VarSet fv = free_vars(t1);
    for (const auto& x : free_vars(t2)) fv.insert(x);
    const std::vector<VarName> vars(fv.begin(), fv.end());
    std::vector<Substitution> plain;
    std::vector<std::size_t> idx(vars.size(), 0);
    for (bool done = false; !done;) {
      Substitution s;
      for (std::size_t k = 0; k < vars.size(); ++k) s.bind(vars[k], ground.term(static_cast<std::uint32_t>(idx[k])));
      if (apply(s, t1) == apply(s, t2)) plain.push_back(s);
      std::size_t k = vars.size();
      while (k > 0 && ++idx[k - 1] == ground.size()) idx[--k] = 0;
      done = k == 0;
    }
    EXPECT_EQ(ground.unifiers(t1, t2), plain) << print_pattern(t1) << " ~ " << print_pattern(t2);
  }
}

TEST(Oracle, EngineAgreesOnSmallPairs) {
  const auto atoms = harness::default_atoms();
  const harness::GroundTerms ground(atoms.symbols, 3);
  harness::Rng rng(42);
  for (int i = 0; i < 300; ++i) {
    const Pattern t1 = harness::random_term(rng, atoms, 3), t2 = harness::random_term(rng, atoms, 3);
    const auto r = solve<SetProblem>(t1, t2);
    const auto found = ground.unifiers(t1, t2, 50);
    EXPECT_EQ(r.mgu.has_value(), !found.empty()) << print_pattern(t1) << " ~ " << print_pattern(t2);
    for (const auto& theta : found) EXPECT_TRUE(more_general(*r.mgu, theta));
  }
}
