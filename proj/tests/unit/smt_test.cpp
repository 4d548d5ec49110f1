#include "chcta/errors.hpp"
#include "chcta/interpolation.hpp"
#include "chcta/process.hpp"
#include "chcta/smt.hpp"

#include "fake_solver.hpp"

#include <gtest/gtest.h>

using namespace chcta;
using namespace std::chrono_literals;
using chcta::testing::real_solver_available;
using chcta::testing::real_solver_command;

namespace {

TermPtr ivar(const std::string& n) { return mk_var(n, Sort::integer()); }
TermPtr x() { return ivar("x"); }
TermPtr y() { return ivar("y"); }
TermPtr num(int v) { return mk_int(v); }
TermPtr gt(TermPtr a, TermPtr b) { return mk_app(">", {std::move(a), std::move(b)}); }
TermPtr ge(TermPtr a, TermPtr b) { return mk_app(">=", {std::move(a), std::move(b)}); }
TermPtr lt(TermPtr a, TermPtr b) { return mk_app("<", {std::move(a), std::move(b)}); }
TermPtr eq(TermPtr a, TermPtr b) { return mk_eq(std::move(a), std::move(b)); }

SolverConfig real_config() {
  SolverConfig c;
  c.command = real_solver_command();
  return c;
}

class RealSolver : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!real_solver_available()) GTEST_SKIP() << "no solver: " << real_solver_command();
  }
};

}  // namespace

TEST(SplitCommand, Quoting) {
  EXPECT_EQ(split_command("z3 -in"), (std::vector<std::string>{"z3", "-in"}));
  EXPECT_EQ(split_command("sh -c 'cat >/dev/null'"),
            (std::vector<std::string>{"sh", "-c", "cat >/dev/null"}));
  EXPECT_EQ(split_command(R"(a "b c" d\ e)"), (std::vector<std::string>{"a", "b c", "d e"}));
  EXPECT_THROW(split_command("a 'b"), BackendError);
}

TEST(Declarations, SortedAndComplete) {
  TermPtr u = mk_var("u", Sort("U"));
  TermPtr f = mk_uf_app("f", {x()}, Sort::integer());
  std::string d = declarations({gt(f, y()), eq(u, u)});
  EXPECT_EQ(d,
            "(declare-sort U 0)\n(declare-fun f (Int) Int)\n(declare-fun u () U)\n"
            "(declare-fun x () Int)\n(declare-fun y () Int)\n");
  EXPECT_THROW(declarations({gt(x(), num(0)), mk_var("x", Sort::boolean())}), SortError);
}

TEST(Spawn, MissingProgramIsBackendError) {
  SolverConfig c;
  c.command = "/nonexistent/solver-binary -in";
  EXPECT_THROW(SolverHandle{c}, BackendError);
}

TEST(FakeSolver, TimeoutIsUnknownAndHandleRecovers) {
  SolverConfig c;
  c.command = chcta::testing::silent_solver();
  c.timeout = 200ms;
  SolverHandle h(c);
  SmtVerdict v = h.check_sat({eq(x(), num(1))});
  EXPECT_TRUE(v.is_unknown());
  EXPECT_EQ(v.reason, "timeout");
  EXPECT_EQ(h.stats().timeouts, 1u);
  EXPECT_TRUE(h.check_sat({eq(x(), num(1))}).is_unknown());
  EXPECT_GE(h.stats().restarts, 1u);
}

TEST(FakeSolver, DeadlineCapsPerQueryTimeout) {
  SolverConfig c;
  c.command = chcta::testing::silent_solver();
  c.timeout = 10s;
  SolverHandle h(c);
  auto start = std::chrono::steady_clock::now();
  h.set_deadline(start + 150ms);
  EXPECT_EQ(h.check_sat({eq(x(), num(1))}).reason, "timeout");
  EXPECT_LT(std::chrono::steady_clock::now() - start, 3s);
  EXPECT_TRUE(h.check_sat({eq(x(), num(1))}).is_unknown());
  EXPECT_EQ(h.stats().timeouts, 2u);
  h.set_deadline(std::nullopt);
}

TEST(FakeSolver, GarbageIsBackendErrorWithTranscript) {
  SolverConfig c;
  c.command = chcta::testing::garbage_solver();
  SolverHandle h(c);
  try {
    h.check_sat({eq(x(), num(1))});
    FAIL() << "expected BackendError";
  } catch (const BackendError& e) {
    EXPECT_NE(e.transcript().find("(check-sat)"), std::string::npos);
    EXPECT_NE(e.transcript().find(")))"), std::string::npos);
  }
  EXPECT_FALSE(h.alive());
  EXPECT_THROW(h.check_sat({eq(x(), num(1))}), BackendError);
}

TEST(FakeSolver, NonsenseAnswerIsBackendError) {
  SolverConfig c;
  c.command = chcta::testing::nonsense_solver();
  SolverHandle h(c);
  EXPECT_THROW(h.check_sat({eq(x(), num(1))}), BackendError);
}

TEST(FakeSolver, ProcessDeathIsBackendError) {
  SolverConfig c;
  c.command = chcta::testing::dying_solver();
  SolverHandle h(c);
  EXPECT_THROW(h.check_sat({eq(x(), num(1))}), BackendError);
  EXPECT_FALSE(h.alive());
}

TEST(Reproducibility, IdenticalScripts) {
  SolverConfig c;
  c.command = chcta::testing::silent_solver();
  c.seed = 42;
  SolverHandle a(c), b(c);
  std::vector<NamedTerm> q{{"c0", gt(x(), y())}, {"c1", lt(y(), num(3))}};
  EXPECT_EQ(a.render_check_sat(q), b.render_check_sat(q));
  EXPECT_NE(a.render_check_sat(q).find("(set-option :random-seed 42)"), std::string::npos);
  EXPECT_NE(a.render_check_sat(q).find("(assert (! (> x y) :named c0))"), std::string::npos);
}

TEST_F(RealSolver, UnsatWithCore) {
  SolverHandle h(real_config());
  SmtVerdict v = h.check_sat({{"c0", gt(x(), num(0))}, {"c1", lt(x(), num(0))}}, false, true);
  ASSERT_TRUE(v.is_unsat());
  for (const auto& n : v.core) EXPECT_TRUE(n == "c0" || n == "c1");
  EXPECT_TRUE(v.model.empty());
}

TEST_F(RealSolver, SatWithModel) {
  SolverHandle h(real_config());
  SmtVerdict v = h.check_sat({eq(x(), num(1))}, true);
  ASSERT_TRUE(v.is_sat());
  ASSERT_TRUE(v.model.count("x"));
  EXPECT_EQ(std::get<Rational>(v.model.at("x")), Rational(1));
  EXPECT_TRUE(v.core.empty());
}

TEST_F(RealSolver, NegativeAndRationalModelValues) {
  SolverHandle h(real_config());
  TermPtr r = mk_var("r", Sort::real());
  SmtVerdict v = h.check_sat(
      {eq(x(), num(-3)), eq(mk_app("*", {mk_real(3), r}), mk_real(1)), mk_var("b", Sort::boolean())},
      true);
  ASSERT_TRUE(v.is_sat());
  EXPECT_EQ(std::get<Rational>(v.model.at("x")), Rational(-3));
  EXPECT_EQ(std::get<Rational>(v.model.at("r")), Rational(1, 3));
  EXPECT_EQ(std::get<bool>(v.model.at("b")), true);
}

TEST_F(RealSolver, EmptyConjunctionIsSat) {
  SolverHandle h(real_config());
  EXPECT_TRUE(h.check_sat(std::vector<TermPtr>{}).is_sat());
}

TEST_F(RealSolver, Validity) {
  SolverHandle h(real_config());
  EXPECT_EQ(h.check_validity({ge(x(), num(1))}, ge(x(), num(0))), Validity::Valid);
  EXPECT_EQ(h.check_validity({}, mk_false()), Validity::Invalid);
  TermPtr phi = mk_or({gt(x(), y()), eq(x(), num(7))});
  EXPECT_EQ(h.check_validity({phi}, phi), Validity::Valid);
}

TEST_F(RealSolver, OpaqueSortsAndFunctions) {
  SolverHandle h(real_config());
  TermPtr u = mk_var("u", Sort("U")), w = mk_var("w", Sort("U"));
  TermPtr f = mk_uf_app("f", {u}, Sort::integer());
  TermPtr g = mk_uf_app("f", {w}, Sort::integer());
  EXPECT_EQ(h.check_validity({eq(u, w)}, eq(f, g)), Validity::Valid);
}

TEST_F(RealSolver, ResetPreservesConfigurationAndStats) {
  SolverHandle h(real_config());
  h.check_sat({eq(x(), num(1))});
  h.reset();
  h.reset();
  EXPECT_TRUE(h.check_sat({eq(x(), num(1))}).is_sat());
  EXPECT_EQ(h.stats().queries, 2u);
  EXPECT_EQ(h.stats().restarts, 2u);
}

TEST_F(RealSolver, ResetAfterTimeout) {
  SolverConfig c = real_config();
  c.timeout = 1ms;
  SolverHandle h(c);
  // Nonlinear query that takes longer than a millisecond.
  TermPtr a = ivar("a"), b = ivar("b"), cc = ivar("c");
  TermPtr cube = [&](TermPtr v) { return mk_app("*", {v, v, v}); }(a);
  SmtVerdict v = h.check_sat(
      {eq(mk_app("+", {cube, mk_app("*", {b, b, b})}), mk_app("*", {cc, cc, cc})), gt(a, num(0)),
       gt(b, num(0)), gt(cc, num(0))});
  EXPECT_TRUE(v.is_unknown());
  h.reset();
  EXPECT_TRUE(h.alive());
  SmtVerdict after = h.check_sat({eq(x(), num(1))});
  EXPECT_TRUE(after.is_sat() || after.reason == "timeout");
}

TEST_F(RealSolver, QuantifierElimination) {
  SolverHandle h(real_config());
  auto f = h.eliminate_quantifiers(mk_exists({y()}, mk_and({eq(x(), mk_app("*", {num(2), y()})),
                                                            gt(y(), num(0))})));
  ASSERT_TRUE(f);
  EXPECT_FALSE(has_quantifier(*f));
  TermPtr expected = mk_and({eq(mk_app("mod", {x(), num(2)}), num(0)), ge(x(), num(2))});
  EXPECT_EQ(h.check_validity({*f}, expected), Validity::Valid);
  EXPECT_EQ(h.check_validity({expected}, *f), Validity::Valid);
}

// ---------------------------------------------------------------------------
// Tree interpolation

namespace {

/// Root: x > 0 over child interface x; leaf: x = 0.
InterpolationProblem chain_problem() {
  InterpolationProblem p;
  p.nodes.push_back({gt(x(), num(0)), {}, {1}});
  p.nodes.push_back({eq(x(), num(0)), {x()}, {}});
  return p;
}

/// Root joins two children: x = y + 1 (leaf, interface x) and y >= 0 plus
/// a local z (leaf, interface y), requiring x < 1 at the root.
InterpolationProblem binary_problem() {
  TermPtr z = ivar("z");
  InterpolationProblem p;
  p.nodes.push_back({lt(x(), mk_app("+", {y(), num(1)})), {}, {1, 2}});
  p.nodes.push_back({eq(x(), mk_app("+", {z, num(1)})), {x()}, {}});
  p.nodes.push_back({mk_and({ge(z, num(0)), eq(y(), z)}), {y()}, {}});
  p.nodes[1].label = mk_and({eq(x(), mk_app("+", {ivar("z1"), num(1)})), ge(ivar("z1"), num(5))});
  p.nodes[2].label = mk_and({ge(ivar("z2"), num(0)), lt(ivar("z2"), num(2)), eq(y(), ivar("z2"))});
  return p;
}

}  // namespace

TEST(Subtree, SingleNodeFalse) {
  InterpolationProblem p;
  p.nodes.push_back({mk_false(), {}, {}});
  auto t = subtree_interpolants(p);
  ASSERT_EQ(t.formulas.size(), 1u);
  EXPECT_TRUE(t.formulas[0]->is_false());
}

TEST(Subtree, ExistentialSummary) {
  InterpolationProblem p;
  p.nodes.push_back({mk_false(), {}, {1}});
  p.nodes.push_back({eq(x(), mk_app("+", {y(), num(1)})), {x()}, {}});
  auto t = subtree_interpolants(p);
  EXPECT_EQ(to_smtlib(*t.formulas[1]), "(exists ((y Int)) (= x (+ y 1)))");
}

TEST_F(RealSolver, ChainInterpolantVerifies) {
  SolverHandle h(real_config());
  for (auto mode : {InterpolationMode::External, InterpolationMode::Subtree}) {
    InterpolationOptions opts;
    opts.mode = mode;
    InterpolationReport rep;
    TreeInterpolant t = tree_interpolants(chain_problem(), opts, h, &rep);
    EXPECT_EQ(verify_tree_interpolant(chain_problem(), t, h).validity, Validity::Valid);
    EXPECT_TRUE(t.formulas[0]->is_false());
    EXPECT_EQ(h.check_validity({t.formulas[1]}, mk_app("<=", {x(), num(0)})), Validity::Valid);
    EXPECT_GE(rep.verified_nodes, 2u);
  }
}

TEST_F(RealSolver, BinaryTreeInterpolantVerifies) {
  SolverHandle h(real_config());
  for (auto mode : {InterpolationMode::External, InterpolationMode::Subtree})
    for (bool weaken : {false, true}) {
      InterpolationOptions opts;
      opts.mode = mode;
      opts.weaken = weaken;
      InterpolationReport rep;
      TreeInterpolant t = tree_interpolants(binary_problem(), opts, h, &rep);
      EXPECT_EQ(rep.used, mode);
      VerificationResult v = verify_tree_interpolant(binary_problem(), t, h);
      EXPECT_EQ(v.validity, Validity::Valid) << v.reason;
      for (const auto& f : t.formulas) EXPECT_FALSE(has_quantifier(f)) << to_smtlib(*f);
    }
}

TEST_F(RealSolver, WeakeningDropsUnneededConjuncts) {
  SolverHandle h(real_config());
  InterpolationProblem p;
  p.nodes.push_back({lt(x(), num(0)), {}, {1}});
  p.nodes.push_back({mk_and({eq(x(), num(3)), eq(y(), num(4))}), {x(), y()}, {}});
  InterpolationOptions opts;
  opts.mode = InterpolationMode::Subtree;
  InterpolationReport rep;
  TreeInterpolant t = tree_interpolants(p, opts, h, &rep);
  EXPECT_GT(rep.weakened_conjuncts, 0u);
  EXPECT_EQ(to_smtlib(*t.formulas[1]), "(>= x 3)");
}

TEST_F(RealSolver, VerificationRejectsBadInterpolants) {
  SolverHandle h(real_config());
  InterpolationProblem p = chain_problem();
  TreeInterpolant wrong{{mk_false(), gt(x(), num(5))}};
  EXPECT_EQ(verify_tree_interpolant(p, wrong, h).validity, Validity::Invalid);
  TreeInterpolant leaky{{mk_false(), eq(y(), num(0))}};
  EXPECT_EQ(verify_tree_interpolant(p, leaky, h).validity, Validity::Invalid);
  TreeInterpolant weak_root{{mk_true(), eq(x(), num(0))}};
  VerificationResult v = verify_tree_interpolant(p, weak_root, h);
  EXPECT_EQ(v.validity, Validity::Invalid);
  EXPECT_EQ(v.node, 0u);
}

TEST_F(RealSolver, TreeDialectFallsBackWhenUnsupported) {
  SolverConfig c = real_config();
  c.dialect = InterpolationDialect::Tree;
  SolverHandle h(c);
  InterpolationReport rep;
  TreeInterpolant t = tree_interpolants(binary_problem(), {}, h, &rep);
  EXPECT_EQ(rep.used, InterpolationMode::Subtree);
  EXPECT_FALSE(rep.notice.empty());
  EXPECT_EQ(verify_tree_interpolant(binary_problem(), t, h).validity, Validity::Valid);
}
