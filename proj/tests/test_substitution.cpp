#include <gtest/gtest.h>

#include "mlunify/engine.hpp"
#include "mlunify/substitution.hpp"
#include "support/gen.hpp"

using namespace mlu;

namespace {

Pattern v(const char* n) { return Pattern::evar(n); }
Pattern s(const char* n) { return Pattern::sym(n); }
Pattern ap(Pattern a, Pattern b) { return Pattern::app(std::move(a), std::move(b)); }
Pattern ap(Pattern a, Pattern b, Pattern c) { return ap(ap(std::move(a), std::move(b)), std::move(c)); }
Pattern ap(Pattern a, Pattern b, Pattern c, Pattern d) { return ap(ap(std::move(a), std::move(b), std::move(c)), std::move(d)); }
Pattern g(Pattern a) { return ap(s("g"), std::move(a)); }

Substitution ex1_mgu() { return Substitution{{"x", g(s("1"))}, {"y", s("1")}, {"z", g(g(s("1")))}}; }
Pattern ex1_t1() { return ap(s("f"), v("x"), g(s("1")), g(v("z"))); }
Pattern ex1_t2() { return ap(s("f"), g(v("y")), g(v("y")), g(g(v("x")))); }

}  // namespace

TEST(Apply, Examples) {
  EXPECT_EQ(apply(Substitution{}, ex1_t1()), ex1_t1());
  // z |-> g (g 1) sits under the outer g, so the last argument has three g's.
  EXPECT_EQ(apply(ex1_mgu(), ex1_t1()), ap(s("f"), g(s("1")), g(s("1")), g(g(g(s("1"))))));
  EXPECT_EQ(apply(ex1_mgu(), ex1_t2()), apply(ex1_mgu(), ex1_t1()));
  EXPECT_EQ(apply(Substitution{{"x", v("y")}, {"y", v("x")}}, ap(s("f"), v("x"), v("y"))), ap(s("f"), v("y"), v("x")));
}

TEST(Apply, IdentityBindingsAreDropped) {
  Substitution sub{{"x", v("x")}};
  EXPECT_TRUE(sub.empty());
  EXPECT_THROW(sub.bind("x", Pattern::bot()), Error);
}

TEST(Compose, Examples) {
  const Substitution a{{"x", g(v("y"))}};
  EXPECT_EQ(compose(a, {}), a);
  EXPECT_EQ(compose({}, a), a);
  EXPECT_EQ(compose(a, Substitution{{"y", s("1")}}), (Substitution{{"x", g(s("1"))}, {"y", s("1")}}));
  EXPECT_EQ(compose(Substitution{{"x", v("y")}}, Substitution{{"y", v("x")}}), (Substitution{{"y", v("x")}}));
}

TEST(Compose, AgreesWithSequentialApplication) {
  harness::Rng rng(11);
  const auto atoms = harness::default_atoms();
  for (int i = 0; i < 3000; ++i) {
    Substitution a, b;
    for (const auto& x : atoms.vars) {
      if (harness::coin(rng)) a.bind(x, harness::random_term(rng, atoms, 5));
      if (harness::coin(rng)) b.bind(x, harness::random_term(rng, atoms, 5));
    }
    const Pattern t = harness::random_term(rng, atoms, 9);
    EXPECT_EQ(apply(compose(a, b), t), apply(b, apply(a, t)));
  }
}

TEST(EqualOn, Examples) {
  const Substitution a{{"x", v("y")}};
  EXPECT_TRUE(substitutions_equal_on(a, a, VarSet{"x", "q"}));
  EXPECT_FALSE(substitutions_equal_on(a, Substitution{{"x", v("z")}}, VarSet{"x"}));
  EXPECT_TRUE(substitutions_equal_on(Substitution{{"x", v("y")}, {"y", v("y")}}, a, VarSet{"x", "y"}));
  EXPECT_TRUE(substitutions_equal_on(a, Substitution{}, std::vector<Pattern>{g(s("1"))}));
  EXPECT_FALSE(substitutions_equal_on(a, Substitution{}, std::vector<Pattern>{g(v("x"))}));
  EXPECT_TRUE(substitutions_equal(a, a));
  EXPECT_FALSE(substitutions_equal(a, Substitution{}));
}

TEST(MoreGeneral, Examples) {
  const Substitution a{{"x", g(v("y"))}};
  EXPECT_EQ(more_general(a, a), Substitution{});
  EXPECT_EQ(more_general(a, Substitution{{"x", g(s("1"))}, {"y", s("1")}}), (Substitution{{"y", s("1")}}));
  EXPECT_EQ(more_general(Substitution{{"x", s("1")}}, Substitution{{"x", s("2")}}), std::nullopt);
  // Inconsistent demands on y.
  EXPECT_EQ(more_general(Substitution{{"x", ap(s("f"), v("y"), v("y"))}},
                         Substitution{{"x", ap(s("f"), s("1"), s("2"))}}),
            std::nullopt);
}

TEST(MoreGeneral, WitnessComposes) {
  harness::Rng rng(5);
  const auto atoms = harness::default_atoms();
  int found = 0;
  for (int i = 0; i < 3000; ++i) {
    Substitution a;
    for (const auto& x : atoms.vars) {
      if (harness::coin(rng)) a.bind(x, harness::random_term(rng, atoms, 5));
    }
    Substitution theta;
    for (const auto& x : atoms.vars) {
      if (harness::coin(rng)) theta.bind(x, harness::random_term(rng, atoms, 3));
    }
    const Substitution e = compose(a, theta);
    auto w = more_general(a, e);
    VarSet on = a.domain();
    for (const auto& x : e.domain()) on.insert(x);
    if (w) {
      ++found;
      EXPECT_TRUE(substitutions_equal_on(compose(a, *w), e, on));
    }
  }
  // Not every instance is recognised (theta may rebind a domain variable that
  // also occurs in an image), but most are.
  EXPECT_GT(found, 1500);
}

TEST(IsUnifier, Examples) {
  EXPECT_TRUE(is_unifier(ex1_mgu(), ex1_t1(), ex1_t2()));
  EXPECT_TRUE(is_unifier({}, ex1_t1(), ex1_t1()));
  EXPECT_FALSE(is_unifier({}, s("f"), s("g")));
  EXPECT_FALSE(is_unifier(Substitution{{"x", s("1")}}, ex1_t1(), ex1_t2()));
}

TEST(PredicateOf, Examples) {
  EXPECT_EQ(predicate_of({}), top());
  EXPECT_EQ(predicate_of(ex1_mgu()),
            land(equal(v("x"), g(s("1"))), land(equal(v("y"), s("1")), equal(v("z"), g(g(s("1")))))));
  EXPECT_EQ(predicate_of(Substitution{{"x", v("t")}}), equal(v("x"), v("t")));
  // Insertion order does not matter.
  Substitution a, b;
  a.bind("z", s("1"));
  a.bind("a", s("2"));
  b.bind("a", s("2"));
  b.bind("z", s("1"));
  EXPECT_EQ(predicate_of(a), predicate_of(b));
}

TEST(MguProperties, IdempotentOnRandomPairs) {
  harness::Rng rng(3);
  const auto atoms = harness::default_atoms();
  int solved = 0;
  for (int i = 0; i < 3000; ++i) {
    const Pattern t1 = harness::random_term(rng, atoms, 9), t2 = harness::random_term(rng, atoms, 9);
    auto r = solve<SetProblem>(t1, t2);
    if (!r.mgu) continue;
    ++solved;
    EXPECT_TRUE(is_unifier(*r.mgu, t1, t2));
    EXPECT_TRUE(substitutions_equal_on(compose(*r.mgu, *r.mgu), *r.mgu, r.mgu->domain()));
  }
  EXPECT_GT(solved, 100);
}
