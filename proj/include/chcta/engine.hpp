#ifndef CHCTA_ENGINE_HPP
#define CHCTA_ENGINE_HPP

#include "chcta/chc.hpp"
#include "chcta/derivation.hpp"
#include "chcta/generalize.hpp"
#include "chcta/interpolation.hpp"
#include "chcta/smt.hpp"
#include "chcta/tree_automaton.hpp"

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace chcta {

enum class MinimizeMode { None, Naive, Bisim };
const char* to_string(MinimizeMode mode);

struct EngineConfig {
  SolverConfig solver;
  InterpolationOptions interpolation;
  MinimizeMode minimize = MinimizeMode::Bisim;
  /// Subtract interpolant automata lazily instead of materializing them.
  bool on_demand = true;
  std::size_t max_iterations = 1000;
  std::optional<std::chrono::milliseconds> timeout;
  bool extract_model = true;
  bool semantic_dedup = false;
  /// Upper bound on product states explored by model extraction.
  std::size_t model_product_limit = 20000;
};

/// Snapshot handed to the observer after every subtraction.
struct IterationView {
  std::size_t iteration = 0;
  const Tree& witness;
  const TreeAutomaton& before;
  const TreeAutomaton& after;
};

struct IterationStats {
  std::size_t a_states = 0;
  std::size_t a_rules = 0;
  std::size_t g_states = 0;
  std::size_t g_rules = 0;
  std::size_t rule_queries = 0;
  std::size_t smt_queries = 0;
  std::size_t witness_size = 0;
  double wall_ms = 0;
};

struct EngineStats {
  std::size_t iterations = 0;
  std::size_t peak_states = 0;
  std::size_t rule_queries = 0;
  std::size_t trivial_rules = 0;
  std::size_t unknown_rules = 0;
  std::size_t smt_queries = 0;
  std::size_t smt_timeouts = 0;
  std::size_t interpolants_verified = 0;
  std::size_t weakened_conjuncts = 0;
  std::size_t witness_rechecks = 0;
  std::size_t model_checks = 0;
  std::string interpolation_notice;
  double wall_ms = 0;
  std::vector<IterationStats> per_iteration;

  /// `key=value` lines, then one `iter.<k>.<field>=...` line per iteration.
  std::string to_key_value() const;
};

enum class Verdict { Sat, Unsat, Unknown };
const char* to_string(Verdict v);

struct UnsatWitness {
  DerivationTree derivation;
  std::map<std::string, ModelValue> assignment;
};

/// Interpretation of each predicate over its canonical parameters.
using PredicateModel = std::map<std::string, TermPtr>;

struct SolveOutcome {
  Verdict verdict = Verdict::Unknown;
  std::optional<UnsatWitness> witness;
  std::optional<PredicateModel> model;
  std::string reason;
  EngineStats stats;
};

/// Subset-construction product of the initial automaton with every
/// interpolant automaton of the run. A predicate is interpreted as the
/// disjunction, over reachable product states at that predicate, of the
/// conjunction of the formulas in each component subset. Returns the model
/// only if every clause checks valid under it.
std::optional<PredicateModel> extract_model(
    const ChcSystem& s, const std::vector<std::unique_ptr<InterpolantAutomaton>>& history,
    SolverHandle& solver, std::size_t product_limit = 20000, std::size_t* checks = nullptr);

/// True iff every clause of `s` is valid under `model`.
Validity check_model(const ChcSystem& s, const PredicateModel& model, SolverHandle& solver);

/// SMT-LIB `define-fun` forms, one per predicate.
std::string format_model(const ChcSystem& s, const PredicateModel& model);

class Engine {
 public:
  explicit Engine(EngineConfig config = {});

  /// Called after every iteration's subtraction (and minimization).
  void set_observer(std::function<void(const IterationView&)> fn) { observer_ = std::move(fn); }

  /// Trace abstraction refinement. Solver failures and budget exhaustion
  /// yield Unknown with a reason.
  SolveOutcome solve(const ChcSystem& s);

  const EngineConfig& config() const { return config_; }

 private:
  EngineConfig config_;
  std::function<void(const IterationView&)> observer_;
};

inline SolveOutcome refine_loop(const ChcSystem& s, const EngineConfig& config = {}) {
  return Engine(config).solve(s);
}

}  // namespace chcta

#endif  // CHCTA_ENGINE_HPP
