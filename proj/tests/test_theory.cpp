#include <gtest/gtest.h>

#include "mlunify/theory.hpp"

using namespace mlu;

namespace {

Pattern v(const char* n) { return Pattern::evar(n); }
Pattern s(const char* n) { return Pattern::sym(n); }
Pattern ceil_sym() { return definedness_symbol(); }

}  // namespace

TEST(Notation, Definedness) {
  EXPECT_EQ(defined(v("x")), Pattern::app(ceil_sym(), v("x")));
  EXPECT_EQ(defined(Pattern::bot()), Pattern::app(ceil_sym(), Pattern::bot()));
  EXPECT_EQ(defined(Pattern::app(s("f"), v("x"))), Pattern::app(ceil_sym(), Pattern::app(s("f"), v("x"))));
}

TEST(Notation, DerivedForms) {
  const Pattern p = v("p"), q = v("q");
  const Pattern floor_of = neg(Pattern::app(ceil_sym(), neg(iff(p, p))));
  EXPECT_EQ(equal(p, p), floor_of);
  EXPECT_EQ(total(p), neg(defined(neg(p))));
  EXPECT_EQ(member(v("x"), v("y")), Pattern::app(ceil_sym(), land(v("x"), v("y"))));
  EXPECT_EQ(subset(Pattern::bot(), p), neg(defined(neg(Pattern::imp(Pattern::bot(), p)))));
  EXPECT_EQ(not_equal(p, q), neg(equal(p, q)));
  EXPECT_EQ(not_member(p, q), neg(member(p, q)));
  EXPECT_EQ(not_subset(p, q), neg(subset(p, q)));
  EXPECT_NE(equal(p, q), equal(q, p));
}

TEST(Notation, Recognizers) {
  const Pattern p = Pattern::app(s("g"), v("x")), q = v("y");
  EXPECT_EQ(match_defined(defined(p)), p);
  EXPECT_EQ(match_total(total(p)), p);
  EXPECT_EQ(match_equal(equal(p, q)), (PatternPair{p, q}));
  EXPECT_EQ(match_member(member(p, q)), (PatternPair{p, q}));
  EXPECT_FALSE(match_equal(subset(p, q)));
  EXPECT_FALSE(match_defined(p));
  EXPECT_TRUE(is_predicate_pattern(equal(p, q)));
  EXPECT_TRUE(is_predicate_pattern(land(equal(p, q), top())));
  EXPECT_FALSE(is_predicate_pattern(p));
}

TEST(Injectivity, UnaryInstance) {
  const Pattern expected =
      forall("x1", forall("y1", Pattern::imp(equal(Pattern::app(s("g"), v("x1")), Pattern::app(s("g"), v("y1"))),
                                             equal(v("x1"), v("y1")))));
  EXPECT_EQ(injectivity_instance("g", 1), expected);
}

TEST(Injectivity, TernaryInstanceHasCurriedSidesAndRightNestedConclusion) {
  Pattern lhs = s("f"), rhs = s("f");
  for (const char* x : {"x1", "x2", "x3"}) lhs = Pattern::app(lhs, v(x));
  for (const char* y : {"y1", "y2", "y3"}) rhs = Pattern::app(rhs, v(y));
  Pattern body = Pattern::imp(
      equal(lhs, rhs), land(equal(v("x1"), v("y1")), land(equal(v("x2"), v("y2")), equal(v("x3"), v("y3")))));
  for (const char* b : {"y3", "y2", "y1", "x3", "x2", "x1"}) body = forall(b, body);
  EXPECT_EQ(injectivity_instance("f", 3), body);
}

TEST(Injectivity, NullaryIsAnError) { EXPECT_THROW(injectivity_instance("f", 0), Error); }

TEST(SignatureTest, Declarations) {
  Signature sig;
  sig.declare("f", 3u);
  sig.declare("a");
  EXPECT_TRUE(sig.contains("f"));
  EXPECT_EQ(sig.arity("f"), 3u);
  EXPECT_EQ(sig.arity("a"), std::nullopt);
  EXPECT_FALSE(sig.contains("b"));
  EXPECT_TRUE(sig.contains(std::string(kDefinednessSymbol)));
  EXPECT_THROW(sig.declare("f", 2u), Error);
  EXPECT_THROW(sig.declare(std::string(kDefinednessSymbol)), Error);
  EXPECT_THROW(sig.declare("_x"), Error);
  sig.declare("a", 0u);
  EXPECT_EQ(sig.arity("a"), 0u);
}

TEST(StandardTheory, ContainsDefinednessAndInjectivity) {
  Signature sig;
  sig.declare("f", 3u);
  sig.declare("g", 1u);
  sig.declare("1", 0u);
  const Theory t = Theory::standard(sig);
  EXPECT_TRUE(t.has_definedness());
  EXPECT_TRUE(t.has_injectivity("f", 3));
  EXPECT_TRUE(t.has_injectivity("g", 1));
  EXPECT_FALSE(t.has_injectivity("1", 0));
  EXPECT_FALSE(t.has_injectivity("g", 2));
  EXPECT_TRUE(t.contains(defined(v("x"))));
  EXPECT_TRUE(t.contains(defined(v("anything"))));
  EXPECT_FALSE(t.contains(defined(s("g"))));
  EXPECT_TRUE(t.contains(injectivity_instance("g", 1)));
  EXPECT_FALSE(t.contains(injectivity_instance("h", 1)));
  EXPECT_EQ(t.schemes().size(), 3u);
}
