#include "chcta/derivation.hpp"
#include "chcta/engine.hpp"
#include "chcta/errors.hpp"
#include "chcta/generalize.hpp"
#include "chcta/parser.hpp"

#include "corpus.hpp"
#include "fake_solver.hpp"
#include "tree_enum.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace chcta;
using namespace std::chrono_literals;
using chcta::testing::enumerate_trees;
using chcta::testing::language_mismatches;

namespace {

ChcSystem sys(const std::string& text) { return parse(text + "\n(check-sat)\n").system; }

const char* kFactQuery = R"(
(set-logic HORN)
(declare-fun P (Int) Bool)
(assert (forall ((x Int)) (=> (= x 0) (P x))))
(assert (forall ((x Int)) (=> (and (P x) (> x 0)) false)))
)";

const char* kCounterUnsat = R"(
(set-logic HORN)
(declare-fun P (Int) Bool)
(assert (forall ((x Int)) (=> (= x 0) (P x))))
(assert (forall ((x Int) (y Int)) (=> (and (P x) (= y (+ x 1))) (P y))))
(assert (forall ((x Int)) (=> (and (P x) (>= x 3)) false)))
)";

const char* kCounterSat = R"(
(set-logic HORN)
(declare-fun P (Int) Bool)
(assert (forall ((x Int)) (=> (= x 0) (P x))))
(assert (forall ((x Int) (y Int)) (=> (and (P x) (< x 5) (= y (+ x 1))) (P y))))
(assert (forall ((x Int)) (=> (and (P x) (>= x 10)) false)))
)";

const char* kTrueFalse = "(set-logic HORN)\n(assert (=> true false))\n";

const char* kNoQuery = R"(
(set-logic HORN)
(declare-fun P (Int) Bool)
(declare-fun Q (Int Int) Bool)
(assert (forall ((x Int)) (=> (= x 0) (P x))))
(assert (forall ((x Int) (y Int)) (=> (and (P x) (= y x)) (Q x y))))
)";

Tree leaf(int id) { return Tree{{id, 0}, {}}; }
Tree node(int id, std::vector<Tree> kids) {
  Tree t{{id, kids.size()}, std::move(kids)};
  return t;
}
/// query(def^k(fact)) for the counter systems: fact 0, def 1, query 2.
Tree counter_chain(std::size_t k) {
  Tree t = leaf(0);
  for (std::size_t i = 0; i < k; ++i) t = node(1, {t});
  return node(2, {t});
}

SolverConfig real_config() {
  SolverConfig c;
  c.command = chcta::testing::real_solver_command();
  return c;
}

EngineConfig engine_config() {
  EngineConfig c;
  c.solver = real_config();
  c.timeout = 120s;
  return c;
}

class WithSolver : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!chcta::testing::real_solver_available())
      GTEST_SKIP() << "no solver: " << chcta::testing::real_solver_command();
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Initial automaton

TEST(InitialAutomaton, SingleDerivationShape) {
  ChcSystem s = sys(kFactQuery);
  TreeAutomaton a = build_initial_automaton(s);
  EXPECT_EQ(a.num_states(), 2u);
  std::vector<Tree> accepted;
  for (const Tree& t : enumerate_trees(a.alphabet(), 4))
    if (accepts(a, t)) accepted.push_back(t);
  ASSERT_EQ(accepted.size(), 1u);
  EXPECT_EQ(accepted[0].to_string(), "(1 (0))");
}

TEST(InitialAutomaton, NoQueryMeansEmptyLanguage) {
  EXPECT_TRUE(is_empty(build_initial_automaton(sys(kNoQuery))));
}

TEST(InitialAutomaton, CounterChainsExactly) {
  ChcSystem s = sys(kCounterUnsat);
  TreeAutomaton a = build_initial_automaton(s);
  std::size_t count = 0;
  for (const Tree& t : enumerate_trees(a.alphabet(), 5)) {
    bool is_chain = false;
    for (std::size_t k = 0; k + 2 <= 5; ++k) is_chain = is_chain || t == counter_chain(k);
    EXPECT_EQ(accepts(a, t), is_chain) << t.to_string();
    count += is_chain;
  }
  EXPECT_EQ(count, 4u);
}

// ---------------------------------------------------------------------------
// Derivations

TEST(Instantiate, DisjointFreshVariablesAndSharedInterfaces) {
  ChcSystem s = sys(kCounterUnsat);
  DerivationTree d = instantiate(counter_chain(2), s);
  ASSERT_EQ(d.size(), 4u);
  EXPECT_EQ(d.clauses, (std::vector<int>{2, 1, 1, 0}));
  EXPECT_TRUE(d.interfaces[0].empty());
  for (std::size_t n = 1; n < d.size(); ++n) {
    ASSERT_EQ(d.interfaces[n].size(), 1u);
    EXPECT_EQ(d.children[n - 1], std::vector<std::size_t>{n});
  }
  std::map<std::string, std::size_t> owner;
  for (std::size_t n = 0; n < d.size(); ++n) {
    std::set<std::string> shared;
    for (const auto& v : d.interfaces[n]) shared.insert(v->name());
    for (std::size_t c : d.children[n])
      for (const auto& v : d.interfaces[c]) shared.insert(v->name());
    for (const auto& [var, inst] : d.instances[n]) {
      if (shared.count(inst->name())) continue;
      EXPECT_TRUE(inst->name().starts_with("ta!" + std::to_string(n) + "!")) << inst->name();
      EXPECT_FALSE(owner.count(inst->name()));
      owner[inst->name()] = n;
    }
  }
}

TEST(Instantiate, MalformedTreesNameTheNode) {
  ChcSystem s = sys(kCounterUnsat);
  auto message = [&](const Tree& t) {
    try {
      instantiate(t, s);
    } catch (const MalformedInput& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message(node(1, {leaf(0)})).find("node 0"), std::string::npos);
  EXPECT_NE(message(node(2, {node(2, {leaf(0)})})).find("node 1"), std::string::npos);
  EXPECT_NE(message(node(2, {leaf(7)})).find("node 1"), std::string::npos);
  EXPECT_NE(message(Tree{{2, 1}, {}}).find("node 0"), std::string::npos);
}

TEST(DerivationConstraints, SingleQueryNode) {
  ChcSystem s = sys(kTrueFalse);
  InterpolationProblem p = derivation_constraints(instantiate(leaf(0), s), s);
  ASSERT_EQ(p.nodes.size(), 1u);
  EXPECT_TRUE(p.nodes[0].label->is_true());
}

TEST(DerivationConstraints, IdentificationBySubstitution) {
  ChcSystem s = sys(kFactQuery);
  InterpolationProblem p = derivation_constraints(instantiate(node(1, {leaf(0)}), s), s);
  ASSERT_EQ(p.nodes.size(), 2u);
  EXPECT_EQ(to_smtlib(p.nodes[0].label), "(> ta!0!x 0)");
  EXPECT_EQ(to_smtlib(p.nodes[1].label), "(= ta!0!x 0)");
  EXPECT_EQ(p.nodes[1].interface.size(), 1u);
}

TEST_F(WithSolver, FeasibilityExamples) {
  SolverHandle h(real_config());
  ChcSystem tf = sys(kTrueFalse);
  EXPECT_TRUE(check_feasibility(instantiate(leaf(0), tf), tf, h).feasible);

  ChcSystem ff = sys("(set-logic HORN)\n(assert (=> false false))\n");
  EXPECT_FALSE(check_feasibility(instantiate(leaf(0), ff), ff, h).feasible);

  ChcSystem fq = sys(kFactQuery);
  EXPECT_FALSE(check_feasibility(instantiate(node(1, {leaf(0)}), fq), fq, h).feasible);
}

TEST_F(WithSolver, CounterChainOfLengthFourIsFeasible) {
  SolverHandle h(real_config());
  ChcSystem s = sys(kCounterUnsat);
  DerivationTree d = instantiate(counter_chain(3), s);
  Feasibility f = check_feasibility(d, s, h);
  ASSERT_TRUE(f.feasible);
  // Node n's head value (its interface) counts down from the root: 3, 2, 1, 0.
  for (std::size_t n = 1; n < d.size(); ++n) {
    const ModelValue& v = f.assignment.at(d.interfaces[n][0]->name());
    EXPECT_EQ(std::get<Rational>(v), Rational(static_cast<int>(4 - n)));
  }
  for (const auto& [name, value] : f.assignment) EXPECT_TRUE(name.starts_with("ta!"));
}

// ---------------------------------------------------------------------------
// Generalization

TEST_F(WithSolver, SingleNodeGeneralization) {
  SolverHandle h(real_config());
  ChcSystem s = sys("(set-logic HORN)\n(assert (=> (< 1 0) false))\n");
  DerivationTree d = instantiate(leaf(0), s);
  auto g = generalize(d, TreeInterpolant{{mk_false()}}, s, h);
  TreeAutomaton m = g->materialize();
  EXPECT_EQ(m.num_rules(), 1u);
  EXPECT_EQ(m.dump(), "states: 2\naccepting: q0\n-f0-> q0\n");
  EXPECT_TRUE(accepts(m, d.tree));
}

TEST_F(WithSolver, CounterRuleFromHandComputedImplication) {
  SolverHandle h(real_config());
  ChcSystem s = sys(kCounterUnsat);
  InterpolantAutomaton g(s, h);
  Sort i = Sort::integer();
  TermPtr p0 = canonical_param(0, i);
  StateId zero = g.intern({i}, mk_eq(p0, mk_int(0)));
  StateId le1 = g.intern({i}, mk_app("<=", {p0, mk_int(1)}));
  StateId ge5 = g.intern({i}, mk_app(">=", {p0, mk_int(5)}));
  std::vector<StateId> src{zero};
  std::vector<StateId> t = g.targets(src, {1, 1});
  EXPECT_TRUE(std::count(t.begin(), t.end(), le1));
  EXPECT_FALSE(std::count(t.begin(), t.end(), ge5));
  EXPECT_TRUE(std::count(t.begin(), t.end(), InterpolantAutomaton::kTrue));
  std::size_t asked = g.stats().rule_queries;
  g.targets(src, {1, 1});
  EXPECT_EQ(g.stats().rule_queries, asked);
  EXPECT_EQ(g.intern({i}, mk_app("<=", {p0, mk_int(1)})), le1);
  EXPECT_EQ(g.intern({i}, mk_and({mk_true(), mk_eq(p0, mk_int(0))})), zero);
}

TEST_F(WithSolver, EagerAndOnDemandSubtractTheSameLanguageOnCorpus) {
  std::size_t checked = 0;
  for (const auto& path : chcta::testing::corpus_files()) {
    ChcSystem s = parse(chcta::testing::read_file(path)).system;
    SolverHandle h(real_config());
    TreeAutomaton a = build_initial_automaton(s);
    for (int round = 0; round < 2; ++round) {
      auto w = sample_witness(a);
      if (!w) break;
      DerivationTree d = instantiate(*w, s);
      if (check_feasibility(d, s, h).feasible) break;
      TreeInterpolant itp = tree_interpolants(derivation_constraints(d, s), {}, h);
      auto lazy = generalize(d, itp, s, h);
      auto eager = generalize(d, itp, s, h);
      TreeAutomaton g = eager->materialize();
      EXPECT_TRUE(accepts(g, *w)) << path;
      TreeAutomaton by_lazy = difference_lazy(a, *lazy);
      TreeAutomaton by_eager = difference(a, g);
      EXPECT_TRUE(language_mismatches(by_lazy, by_eager, 3).empty()) << path;
      EXPECT_FALSE(accepts(by_lazy, *w)) << path;
      EXPECT_LE(lazy->stats().rule_queries, eager->stats().rule_queries) << path;
      a = minimize_bisim(by_lazy);
      ++checked;
    }
  }
  EXPECT_GT(checked, 5u);
}

// ---------------------------------------------------------------------------
// Refinement loop

TEST_F(WithSolver, NoQueryIsSatWithoutIterations) {
  SolveOutcome r = refine_loop(sys(kNoQuery), engine_config());
  EXPECT_EQ(r.verdict, Verdict::Sat);
  EXPECT_EQ(r.stats.iterations, 0u);
  ASSERT_TRUE(r.model);
  for (const auto& [pred, f] : *r.model) EXPECT_TRUE(f->is_false() || f->is_true()) << pred;
}

TEST_F(WithSolver, FactOnlyModelIsTrue) {
  ChcSystem s = sys(
      "(set-logic HORN)\n(declare-fun P (Int) Bool)\n"
      "(assert (forall ((x Int)) (=> (= x 0) (P x))))\n");
  SolveOutcome r = refine_loop(s, engine_config());
  ASSERT_TRUE(r.model);
  EXPECT_TRUE(r.model->at("P")->is_true());
  SolverHandle h(real_config());
  EXPECT_EQ(check_model(s, *r.model, h), Validity::Valid);
}

TEST_F(WithSolver, TrueFalseIsUnsatInOneIteration) {
  SolveOutcome r = refine_loop(sys(kTrueFalse), engine_config());
  EXPECT_EQ(r.verdict, Verdict::Unsat);
  EXPECT_EQ(r.stats.iterations, 1u);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->derivation.tree.to_string(), "(0)");
  EXPECT_EQ(r.stats.witness_rechecks, 1u);
}

TEST_F(WithSolver, CounterSatWithinTenIterations) {
  ChcSystem s = sys(kCounterSat);
  for (auto mode : {InterpolationMode::External, InterpolationMode::Subtree}) {
    EngineConfig c = engine_config();
    c.interpolation.mode = mode;
    SolveOutcome r = refine_loop(s, c);
    ASSERT_EQ(r.verdict, Verdict::Sat) << to_string(mode) << ": " << r.reason;
    EXPECT_LE(r.stats.iterations, 10u);
    ASSERT_TRUE(r.model);
    SolverHandle h(real_config());
    EXPECT_EQ(check_model(s, *r.model, h), Validity::Valid);
    TermPtr p0 = canonical_param(0, Sort::integer());
    EXPECT_EQ(h.check_validity({r.model->at("P")}, mk_app("<=", {p0, mk_int(5)})),
              Validity::Valid);
  }
}

TEST_F(WithSolver, CounterUnsatWitnessIsTheShortestChain) {
  SolveOutcome r = refine_loop(sys(kCounterUnsat), engine_config());
  ASSERT_EQ(r.verdict, Verdict::Unsat) << r.reason;
  EXPECT_EQ(r.witness->derivation.tree, counter_chain(3));
  SolverHandle fresh(real_config());
  EXPECT_TRUE(check_feasibility(r.witness->derivation, sys(kCounterUnsat), fresh).feasible);
}

TEST_F(WithSolver, LanguageShrinksEveryIteration) {
  for (const char* text : {kCounterSat, kCounterUnsat}) {
    ChcSystem s = sys(text);
    for (auto m : {MinimizeMode::None, MinimizeMode::Naive, MinimizeMode::Bisim}) {
      EngineConfig c = engine_config();
      c.minimize = m;
      Engine e(c);
      std::size_t calls = 0;
      e.set_observer([&](const IterationView& v) {
        ++calls;
        EXPECT_FALSE(accepts(v.after, v.witness));
        EXPECT_TRUE(accepts(v.before, v.witness));
        for (const Tree& t : enumerate_trees(v.before.alphabet(), 3))
          if (accepts(v.after, t)) EXPECT_TRUE(accepts(v.before, t)) << t.to_string();
      });
      SolveOutcome r = e.solve(s);
      EXPECT_NE(r.verdict, Verdict::Unknown) << r.reason;
      EXPECT_EQ(calls + (r.verdict == Verdict::Unsat ? 1 : 0), r.stats.iterations);
    }
  }
}

TEST_F(WithSolver, DeterministicAcrossRuns) {
  EngineConfig c = engine_config();
  c.solver.seed = 7;
  SolveOutcome a = refine_loop(sys(kCounterSat), c);
  SolveOutcome b = refine_loop(sys(kCounterSat), c);
  EXPECT_EQ(a.verdict, b.verdict);
  EXPECT_EQ(a.stats.iterations, b.stats.iterations);
  EXPECT_EQ(a.stats.rule_queries, b.stats.rule_queries);
}

TEST_F(WithSolver, IterationBudget) {
  EngineConfig c = engine_config();
  c.max_iterations = 1;
  SolveOutcome r = refine_loop(sys(kCounterUnsat), c);
  EXPECT_EQ(r.verdict, Verdict::Unknown);
  EXPECT_EQ(r.reason, "iteration limit reached");
  EXPECT_EQ(r.stats.iterations, 1u);
}

TEST(Engine, SilentSolverGivesUnknownWithinBudget) {
  EngineConfig c;
  c.solver.command = chcta::testing::silent_solver();
  c.timeout = 500ms;
  auto start = std::chrono::steady_clock::now();
  SolveOutcome r = refine_loop(sys(kCounterUnsat), c);
  EXPECT_EQ(r.verdict, Verdict::Unknown);
  EXPECT_EQ(r.reason, "timeout");
  EXPECT_LT(std::chrono::steady_clock::now() - start, 5s);
}

TEST(Engine, GarbageSolverGivesUnknownWithReason) {
  EngineConfig c;
  c.solver.command = chcta::testing::garbage_solver();
  SolveOutcome r = refine_loop(sys(kCounterUnsat), c);
  EXPECT_EQ(r.verdict, Verdict::Unknown);
  EXPECT_NE(r.reason.find("solver failure"), std::string::npos) << r.reason;
}

TEST(Engine, RejectsNonPositiveBudgets) {
  EngineConfig c;
  c.max_iterations = 0;
  EXPECT_THROW(Engine{c}, MalformedInput);
  c.max_iterations = 1;
  c.timeout = 0ms;
  EXPECT_THROW(Engine{c}, MalformedInput);
}

TEST(Stats, KeyValueLines) {
  EngineStats st;
  st.iterations = 2;
  st.per_iteration.resize(2);
  st.per_iteration[1].a_states = 5;
  std::string kv = st.to_key_value();
  EXPECT_NE(kv.find("iterations=2\n"), std::string::npos);
  EXPECT_NE(kv.find("iter.2.a_states=5\n"), std::string::npos);
  for (std::size_t pos = 0, next; (next = kv.find('\n', pos)) != std::string::npos; pos = next + 1)
    EXPECT_NE(kv.substr(pos, next - pos).find('='), std::string::npos);
}

TEST(Model, Formatting) {
  ChcSystem s = sys(kCounterSat);
  PredicateModel m{{"P", mk_app("<=", {canonical_param(0, Sort::integer()), mk_int(5)})}};
  EXPECT_EQ(format_model(s, m), "(define-fun P ((ta!p0 Int)) Bool (<= ta!p0 5))\n");
}
