#include <gtest/gtest.h>

#include "mlunify/pattern.hpp"
#include "support/gen.hpp"

using namespace mlu;

namespace {

Pattern v(const char* n) { return Pattern::evar(n); }
Pattern s(const char* n) { return Pattern::sym(n); }
Pattern ap(Pattern a, Pattern b) { return Pattern::app(std::move(a), std::move(b)); }
Pattern ap(Pattern a, Pattern b, Pattern c) { return ap(ap(std::move(a), std::move(b)), std::move(c)); }
Pattern ap(Pattern a, Pattern b, Pattern c, Pattern d) { return ap(ap(std::move(a), std::move(b), std::move(c)), std::move(d)); }

// f x (g 1) (g z)
Pattern ex1_left() { return ap(s("f"), v("x"), ap(s("g"), s("1")), ap(s("g"), v("z"))); }

}  // namespace

TEST(FreeVars, Basics) {
  EXPECT_TRUE(free_vars(Pattern::bot()).empty());
  EXPECT_EQ(free_vars(Pattern::exists("x", ap(v("x"), v("y")))), (VarSet{"y"}));
  EXPECT_EQ(free_vars(ex1_left()), (VarSet{"x", "z"}));
}

TEST(FreeVars, BinderOnlyHidesItsBody) {
  // (ex x . x) x : the outer x is free
  EXPECT_EQ(free_vars(ap(Pattern::exists("x", v("x")), v("x"))), (VarSet{"x"}));
  EXPECT_TRUE(occurs_free("x", ap(Pattern::exists("x", v("x")), v("x"))));
  EXPECT_FALSE(occurs_free("x", Pattern::exists("x", v("x"))));
}

TEST(Substitute, Examples) {
  const Pattern q = ap(s("g"), v("w"));
  EXPECT_EQ(substitute(v("x"), "x", q), q);
  EXPECT_EQ(substitute(Pattern::exists("x", v("x")), "x", q), Pattern::exists("x", v("x")));
  EXPECT_EQ(substitute(ap(s("g"), v("z")), "z", ap(s("g"), v("x"))), ap(s("g"), ap(s("g"), v("x"))));
}

TEST(Substitute, AvoidsCapture) {
  // (ex y . x y)[y/x] must not capture: result is ex y' . y y'
  const Pattern p = Pattern::exists("y", ap(v("x"), v("y")));
  const Pattern r = substitute(p, "x", v("y"));
  ASSERT_TRUE(r.is(Pattern::Kind::Exists));
  EXPECT_NE(r.name(), "y");
  EXPECT_EQ(r.body(), ap(v("y"), Pattern::evar(r.name())));
  EXPECT_EQ(free_vars(r), (VarSet{"y"}));
  // Alpha-equivalent to the hand-renamed version.
  EXPECT_EQ(r, Pattern::exists("u", ap(v("y"), v("u"))));
}

TEST(Substitute, SimultaneousSwap) {
  const Pattern t = ap(s("f"), v("x"), v("y"));
  const Pattern r = substitute_all(t, {{"x", v("y")}, {"y", v("x")}});
  EXPECT_EQ(r, ap(s("f"), v("y"), v("x")));
}

TEST(AlphaEquality, BinderNamesDoNotMatter) {
  EXPECT_EQ(Pattern::exists("x", v("x")), Pattern::exists("y", v("y")));
  EXPECT_NE(Pattern::exists("x", v("z")), Pattern::exists("y", v("y")));
  EXPECT_NE(Pattern::exists("x", ap(v("x"), v("y"))), Pattern::exists("y", ap(v("y"), v("y"))));
  EXPECT_EQ(forall("a", Pattern::exists("b", ap(v("a"), v("b")))), forall("c", Pattern::exists("d", ap(v("c"), v("d")))));
}

TEST(IsTerm, Fragment) {
  EXPECT_TRUE(is_term_pattern(ap(s("f"), v("x"), ap(s("g"), s("1")))));
  EXPECT_FALSE(is_term_pattern(Pattern::bot()));
  EXPECT_FALSE(is_term_pattern(Pattern::imp(v("x"), v("y"))));
  EXPECT_FALSE(is_term_pattern(ap(s("f"), Pattern::exists("x", v("x")))));
  EXPECT_TRUE(is_term_pattern(v("x")));
}

TEST(Sugar, DesugarsToCore) {
  const Pattern a = v("a"), b = v("b");
  EXPECT_EQ(neg(a), Pattern::imp(a, Pattern::bot()));
  EXPECT_EQ(top(), Pattern::imp(Pattern::bot(), Pattern::bot()));
  EXPECT_EQ(lor(a, b), Pattern::imp(Pattern::imp(a, Pattern::bot()), b));
  EXPECT_EQ(land(a, b), neg(lor(neg(a), neg(b))));
  EXPECT_EQ(iff(a, b), land(Pattern::imp(a, b), Pattern::imp(b, a)));
  EXPECT_EQ(forall("x", a), neg(Pattern::exists("x", neg(a))));
}

TEST(Sugar, RecognizersInvertBuilders) {
  const Pattern a = ap(s("f"), v("a")), b = v("b");
  EXPECT_EQ(match_neg(neg(a)), a);
  EXPECT_EQ(match_or(lor(a, b)), (PatternPair{a, b}));
  EXPECT_EQ(match_and(land(a, b)), (PatternPair{a, b}));
  EXPECT_EQ(match_iff(iff(a, b)), (PatternPair{a, b}));
  EXPECT_TRUE(is_top(top()));
  auto fa = match_forall(forall("x", a));
  ASSERT_TRUE(fa);
  EXPECT_EQ(fa->second, a);
  EXPECT_FALSE(match_and(a));
  EXPECT_FALSE(match_iff(land(a, b)));
}

TEST(Sugar, ConjoinIsRightNested) {
  const Pattern a = v("a"), b = v("b"), c = v("c");
  EXPECT_EQ(conjoin({}), top());
  EXPECT_EQ(conjoin({a}), a);
  EXPECT_EQ(conjoin({a, b, c}), land(a, land(b, c)));
  EXPECT_EQ(split_conjunction(conjoin({a, b, c}), 3), (std::vector<Pattern>{a, b, c}));
  EXPECT_EQ(split_conjunction(conjoin({a, b, c}), 2), (std::vector<Pattern>{a, land(b, c)}));
}

TEST(Contexts, Plug) {
  const AppContext hole;
  const Pattern p = ap(s("g"), v("x"));
  EXPECT_EQ(hole.plug(p), p);
  EXPECT_EQ(hole.applied_by(s("f")).plug(v("x")), ap(s("f"), v("x")));
  EXPECT_TRUE(is_app_context(hole.applied_by(s("f")).apply_to(v("y")).pattern(), hole.hole()));
}

TEST(Contexts, SubstitutionAsContextRoundTrip) {
  // phi[box/x][x/box] = phi for phi = g z, box placed at z.
  const Pattern phi = ap(s("g"), v("z"));
  const PatternContext c = PatternContext::around([&](const Pattern& h) { return substitute(phi, "z", h); });
  EXPECT_EQ(c.plug(v("z")), phi);
  EXPECT_EQ(c.plug(ap(s("g"), s("1"))), ap(s("g"), ap(s("g"), s("1"))));
}

TEST(Contexts, HoleMustNotBeBound) {
  EXPECT_THROW(PatternContext(Pattern::exists("h", v("h")), "h"), Error);
  EXPECT_FALSE(is_app_context(Pattern::imp(v("h"), v("a")), "h"));
  EXPECT_FALSE(is_app_context(ap(v("h"), v("h")), "h"));
}

TEST(FreshVars, AreReservedAndDistinct) {
  const VarName a = fresh_var(), b = fresh_var();
  EXPECT_NE(a, b);
  EXPECT_TRUE(is_reserved_name(a));
  EXPECT_FALSE(is_reserved_name("x"));
}

TEST(SubstituteLaws, RandomPatterns) {
  harness::Rng rng(7);
  const auto atoms = harness::default_atoms();
  for (int i = 0; i < 2000; ++i) {
    const Pattern p = harness::random_pattern(rng, atoms, 4);
    const Pattern q = harness::random_pattern(rng, atoms, 2);
    const VarName x = atoms.vars[harness::pick(rng, atoms.vars.size())];
    EXPECT_EQ(substitute(p, x, Pattern::evar(x)), p);
    const Pattern r = substitute(p, x, q);
    VarSet expected = free_vars(p);
    if (expected.erase(x)) {
      for (const auto& y : free_vars(q)) expected.insert(y);
      EXPECT_EQ(free_vars(r), expected);
    } else {
      EXPECT_EQ(r, p);
    }
  }
}
