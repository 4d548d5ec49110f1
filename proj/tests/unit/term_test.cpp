#include "chcta/errors.hpp"
#include "chcta/term.hpp"

#include "term_eval.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace chcta;
using chcta::testing::Assignment;
using chcta::testing::evaluate;
using chcta::testing::evaluate_bool;

namespace {

TermPtr x() { return mk_var("x", Sort::integer()); }
TermPtr y() { return mk_var("y", Sort::integer()); }
TermPtr r() { return mk_var("r", Sort::real()); }

}  // namespace

TEST(Sort, EqualityAndPrinting) {
  EXPECT_EQ(Sort::integer(), Sort("Int"));
  EXPECT_NE(Sort::integer(), Sort::real());
  EXPECT_TRUE(Sort("U").is_opaque());
  EXPECT_FALSE(Sort::boolean().is_opaque());
  EXPECT_EQ(Sort::array(Sort::integer(), Sort::boolean()).to_string(), "(Array Int Bool)");
}

TEST(Term, SortChecking) {
  EXPECT_THROW(mk_app("+", {x(), r()}), SortError);
  EXPECT_THROW(mk_app("and", {x()}), SortError);
  EXPECT_THROW(mk_app("frobnicate", {x()}), SortError);
  EXPECT_THROW(mk_app("<=", {x(), mk_true()}), SortError);
  EXPECT_EQ(mk_app("+", {x(), mk_int(1)})->sort(), Sort::integer());
  EXPECT_EQ(mk_app("<", {r(), mk_real(Rational(1, 2))})->sort(), Sort::boolean());
  EXPECT_EQ(mk_app("to_real", {x()})->sort(), Sort::real());
}

TEST(Term, Printing) {
  EXPECT_EQ(to_smtlib(mk_int(-3)), "(- 3)");
  EXPECT_EQ(to_smtlib(mk_real(Rational(1, 3))), "(/ 1.0 3.0)");
  EXPECT_EQ(to_smtlib(mk_real(Rational(-2))), "(- 2.0)");
  EXPECT_EQ(to_smtlib(mk_app("+", {x(), mk_int(1)})), "(+ x 1)");
  EXPECT_EQ(to_smtlib(mk_var("a b", Sort::integer())), "|a b|");
  EXPECT_EQ(to_smtlib(mk_forall({x()}, mk_app(">", {x(), y()}))), "(forall ((x Int)) (> x y))");
}

TEST(Term, FreeVars) {
  TermPtr t = mk_forall({x()}, mk_app(">", {x(), y()}));
  VarSet fv = free_vars(t);
  ASSERT_EQ(fv.size(), 1u);
  EXPECT_EQ(fv.begin()->first, "y");
}

TEST(Substitute, ReplacesFreeOccurrences) {
  TermPtr t = mk_app("+", {x(), mk_int(1)});
  EXPECT_EQ(to_smtlib(substitute(t, {{"x", mk_int(5)}})), "(+ 5 1)");
}

TEST(Substitute, EmptyMappingIsIdentity) {
  TermPtr t = mk_app("+", {x(), y()});
  EXPECT_TRUE(structurally_equal(substitute(t, {}), t));
}

TEST(Substitute, AvoidsCapture) {
  TermPtr t = mk_forall({x()}, mk_app(">", {x(), y()}));
  TermPtr s = substitute(t, {{"x", mk_int(0)}, {"y", x()}});
  EXPECT_EQ(to_smtlib(s), "(forall ((|x'| Int)) (> |x'| x))");
}

TEST(Substitute, SortMismatchIsError) {
  EXPECT_THROW(substitute(x(), {{"x", mk_true()}}), SortError);
}

TEST(Substitute, DisjointDomainsCommute) {
  TermPtr t = mk_app("+", {x(), y(), mk_var("z", Sort::integer())});
  Substitution a{{"x", mk_app("*", {mk_int(2), mk_var("w", Sort::integer())})}};
  Substitution b{{"y", mk_int(7)}};
  EXPECT_TRUE(structurally_equal(substitute(substitute(t, a), b), substitute(substitute(t, b), a)));
}

TEST(Simplify, FoldsConstants) {
  EXPECT_EQ(to_smtlib(simplify(mk_app("+", {mk_int(2), mk_int(3)}))), "5");
  TermPtr b = mk_var("b", Sort::boolean());
  EXPECT_TRUE(simplify(mk_and({b, mk_app("<=", {x(), y()}), mk_not(b)}))->is_false());
  EXPECT_TRUE(simplify(mk_or({mk_not(b), b}))->is_true());
  EXPECT_EQ(to_smtlib(simplify(mk_not(mk_app("<=", {x(), y()})))), "(> x y)");
  EXPECT_TRUE(simplify(mk_app("<", {mk_int(1), mk_int(2)}))->is_true());
  EXPECT_EQ(to_smtlib(simplify(mk_app("mod", {mk_int(-7), mk_int(3)}))), "2");
  EXPECT_EQ(to_smtlib(simplify(mk_app("div", {mk_int(-7), mk_int(3)}))), "(- 3)");
}

namespace {

/// Random linear-arithmetic formula over x, y.
TermPtr random_formula(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_int_distribution<int> lit(-3, 3);
  auto atom = [&]() -> TermPtr {
    auto lin = [&]() -> TermPtr {
      switch (pick(rng) % 4) {
        case 0:
          return x();
        case 1:
          return y();
        case 2:
          return mk_int(lit(rng));
        default:
          return mk_app("+", {pick(rng) % 2 ? x() : y(), mk_app("*", {mk_int(lit(rng)), y()})});
      }
    };
    static const char* ops[] = {"<=", "<", ">=", ">", "=", "distinct"};
    return mk_app(ops[pick(rng) % 6], {lin(), lin()});
  };
  if (depth == 0) return atom();
  switch (pick(rng) % 7) {
    case 0:
      return mk_and({random_formula(rng, depth - 1), random_formula(rng, depth - 1)});
    case 1:
      return mk_or({random_formula(rng, depth - 1), random_formula(rng, depth - 1)});
    case 2:
      return mk_not(random_formula(rng, depth - 1));
    case 3:
      return mk_implies(random_formula(rng, depth - 1), random_formula(rng, depth - 1));
    case 4:
      return mk_app("ite", {random_formula(rng, depth - 1), random_formula(rng, depth - 1),
                            random_formula(rng, depth - 1)});
    case 5:
      return mk_app("xor", {random_formula(rng, depth - 1), random_formula(rng, depth - 1)});
    default:
      return atom();
  }
}

}  // namespace

TEST(Simplify, PreservesTruthOnSmallDomain) {
  std::mt19937 rng(7);
  for (int i = 0; i < 500; ++i) {
    TermPtr f = random_formula(rng, 3);
    TermPtr s = simplify(f);
    for (int vx = -3; vx <= 3; ++vx)
      for (int vy = -3; vy <= 3; ++vy) {
        Assignment env{{"x", Rational(vx)}, {"y", Rational(vy)}};
        ASSERT_EQ(evaluate_bool(f, env), evaluate_bool(s, env))
            << to_smtlib(f) << " vs " << to_smtlib(s);
      }
  }
}

TEST(Conjuncts, FlattensNestedAnd) {
  TermPtr a = mk_app("<", {x(), y()});
  TermPtr b = mk_app("<", {y(), x()});
  TermPtr c = mk_app("=", {x(), mk_int(0)});
  EXPECT_EQ(conjuncts(mk_and({a, mk_and({b, c})})).size(), 3u);
  EXPECT_TRUE(conjuncts(mk_true()).empty());
}

TEST(Evaluator, QuantifierOverBoundedRange) {
  TermPtr f = mk_exists({x()}, mk_app("=", {mk_app("*", {mk_int(2), x()}), y()}));
  EXPECT_TRUE(evaluate_bool(f, {{"y", Rational(4)}}));
  EXPECT_FALSE(evaluate_bool(f, {{"y", Rational(3)}}));
}
