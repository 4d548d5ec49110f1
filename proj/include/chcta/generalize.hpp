#ifndef CHCTA_GENERALIZE_HPP
#define CHCTA_GENERALIZE_HPP

#include "chcta/chc.hpp"
#include "chcta/derivation.hpp"
#include "chcta/interpolation.hpp"
#include "chcta/smt.hpp"
#include "chcta/tree_automaton.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

namespace chcta {

/// Canonical parameter `ta!p<i>` of a predicate position.
TermPtr canonical_param(std::size_t i, const Sort& sort);

/// Normal form used to compare interpolant states: simplified, conjuncts
/// sorted, constants folded.
TermPtr canonical_form(const TermPtr& formula);

struct GeneralizeStats {
  /// Validity checks actually sent to the solver.
  std::size_t rule_queries = 0;
  /// Candidates that were valid without asking (true target, false source).
  std::size_t trivial_rules = 0;
  /// Candidates dropped because the solver answered unknown.
  std::size_t unknown_rules = 0;
};

/// The canonical interpolant automaton of one derivation. States are
/// 0 = `false` (accepting) and 1 = `true`, both usable at any predicate,
/// followed by the distinct interpolant formulas per predicate signature
/// over canonical parameters. A rule (φ₁..φₙ, c, φ) exists iff
/// φ₁σ₁ ∧ … ∧ φₙσₙ ∧ C_c ⊨ φσ where σᵢ maps the parameters to the
/// arguments of the i-th body atom of c.
///
/// As a RuleOracle it answers rules on demand with caching; materialize()
/// enumerates every candidate. The rules tracing the derivation itself are
/// known valid and never queried.
class InterpolantAutomaton : public RuleOracle {
 public:
  static constexpr StateId kFalse = 0;
  static constexpr StateId kTrue = 1;

  InterpolantAutomaton(const ChcSystem& s, SolverHandle& solver);

  /// State for `formula` over the canonical parameters of `signature`;
  /// adds it when new.
  StateId intern(const std::vector<Sort>& signature, const TermPtr& formula);

  /// Records a rule as valid without checking it.
  void assume_rule(std::vector<StateId> sources, int clause_id, StateId target);

  /// Enables semantic deduplication: intern() first asks the solver for an
  /// equivalent existing state of the same signature.
  void set_semantic_dedup(bool on) { semantic_dedup_ = on; }
  /// Called before every solver query; may throw to abort.
  void set_interrupt(std::function<void()> check) { interrupt_ = std::move(check); }

  const std::vector<RankedSymbol>& alphabet() const override { return alphabet_; }
  std::size_t num_states() const override { return formulas_.size(); }
  bool is_accepting(StateId q) const override { return q == kFalse; }
  std::vector<StateId> targets(std::span<const StateId> sources,
                               const RankedSymbol& symbol) override;
  std::string label(StateId q) const override;

  const TermPtr& formula(StateId q) const { return formulas_.at(q); }
  /// Empty for the `false` and `true` states.
  const std::vector<Sort>& signature(StateId q) const { return signatures_.at(q); }

  /// Every rule, in clause order and then lexicographic order of states.
  TreeAutomaton materialize();
  /// Rules known so far (assumed or answered).
  std::size_t known_rules() const;
  const GeneralizeStats& stats() const { return stats_; }

 private:
  bool compatible(StateId q, const std::vector<Sort>& sorts) const;
  bool valid(const std::vector<StateId>& sources, const HornClause& clause, StateId target);

  const ChcSystem& system_;
  SolverHandle& solver_;
  std::vector<RankedSymbol> alphabet_;
  std::vector<TermPtr> formulas_;
  std::vector<std::vector<Sort>> signatures_;
  std::map<std::string, StateId> index_;
  std::map<std::tuple<std::vector<StateId>, int, StateId>, bool> cache_;
  std::map<std::pair<std::vector<StateId>, int>, std::vector<StateId>> answers_;
  bool semantic_dedup_ = false;
  std::function<void()> interrupt_;
  GeneralizeStats stats_;
};

/// Builds the interpolant automaton of `d` from a verified tree interpolant.
/// The result accepts d.
std::unique_ptr<InterpolantAutomaton> generalize(const DerivationTree& d,
                                                 const TreeInterpolant& itp, const ChcSystem& s,
                                                 SolverHandle& solver, bool semantic_dedup = false);

}  // namespace chcta

#endif  // CHCTA_GENERALIZE_HPP
