#ifndef CHCTA_TREE_AUTOMATON_HPP
#define CHCTA_TREE_AUTOMATON_HPP

#include "chcta/errors.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chcta {

using StateId = std::uint32_t;

/// Alphabet symbol: a clause id together with its number of body atoms.
struct RankedSymbol {
  int clause_id = 0;
  std::size_t rank = 0;

  friend auto operator<=>(const RankedSymbol&, const RankedSymbol&) = default;
};

/// Ranked tree; a node has exactly `symbol.rank` children.
struct Tree {
  RankedSymbol symbol;
  std::vector<Tree> children;

  /// A leaf has height 1.
  std::size_t height() const;
  std::size_t size() const;
  /// Clause ids in preorder.
  std::vector<int> preorder() const;
  /// Nested parenthesized clause ids, e.g. `(2 (1 (0)))`.
  std::string to_string() const;

  friend bool operator==(const Tree& a, const Tree& b);
};

struct Rule {
  std::vector<StateId> sources;
  RankedSymbol symbol;
  StateId target = 0;

  friend auto operator<=>(const Rule&, const Rule&) = default;
};

/// Bottom-up nondeterministic finite tree automaton. States are dense ids
/// with optional labels for debugging.
class TreeAutomaton {
 public:
  explicit TreeAutomaton(std::vector<RankedSymbol> alphabet = {});

  const std::vector<RankedSymbol>& alphabet() const { return alphabet_; }
  bool has_symbol(const RankedSymbol& symbol) const;

  StateId add_state(std::string label = {});
  std::size_t num_states() const { return labels_.size(); }
  const std::string& label(StateId q) const { return labels_.at(q); }

  void set_accepting(StateId q, bool accepting = true);
  bool is_accepting(StateId q) const { return accepting_.at(q); }
  std::vector<StateId> accepting_states() const;

  /// Adds a rule; duplicates are ignored. Throws MalformedInput on unknown
  /// states, a symbol outside the alphabet or a rank mismatch.
  void add_rule(std::vector<StateId> sources, RankedSymbol symbol, StateId target);
  const std::vector<Rule>& rules() const { return rules_; }
  std::size_t num_rules() const { return rules_.size(); }

  /// Targets of rules with exactly these sources and symbol.
  std::span<const StateId> targets(std::span<const StateId> sources,
                                   const RankedSymbol& symbol) const;
  /// Indices into rules() of rules labelled with `symbol`.
  std::span<const std::size_t> rules_with_symbol(const RankedSymbol& symbol) const;

  /// At most one target per (sources, symbol).
  bool is_deterministic() const;

  /// One rule per line (`q1 q2 -f3-> q0`, leaves as `-f0-> q1`) after a
  /// header naming the accepting states. Stable for golden tests.
  std::string dump() const;

 private:
  using Key = std::pair<RankedSymbol, std::vector<StateId>>;

  std::vector<RankedSymbol> alphabet_;
  std::vector<std::string> labels_;
  std::vector<bool> accepting_;
  std::vector<Rule> rules_;
  std::map<Key, std::vector<StateId>> index_;
  std::map<RankedSymbol, std::vector<std::size_t>> by_symbol_;
};

/// Lazily answered rule set of an automaton that is never materialized.
/// Answers must be stable for the lifetime of the oracle.
class RuleOracle {
 public:
  virtual ~RuleOracle() = default;

  virtual const std::vector<RankedSymbol>& alphabet() const = 0;
  virtual std::size_t num_states() const = 0;
  virtual bool is_accepting(StateId q) const = 0;
  virtual std::vector<StateId> targets(std::span<const StateId> sources,
                                       const RankedSymbol& symbol) = 0;
  virtual std::string label(StateId q) const { return "g" + std::to_string(q); }
};

struct OracleQuery {
  std::vector<StateId> sources;
  RankedSymbol symbol;

  std::string to_string() const;
  friend auto operator<=>(const OracleQuery&, const OracleQuery&) = default;
};

/// Failure inside a RuleOracle, annotated with the query that triggered it.
class OracleError : public Error {
 public:
  OracleError(const std::string& message, OracleQuery query)
      : Error(message + " [query " + query.to_string() + "]"), query_(std::move(query)) {}
  const OracleQuery& query() const { return query_; }

 private:
  OracleQuery query_;
};

/// Exposes a materialized automaton through the oracle interface and logs
/// every query.
class AutomatonOracle : public RuleOracle {
 public:
  explicit AutomatonOracle(const TreeAutomaton& automaton) : automaton_(automaton) {}

  const std::vector<RankedSymbol>& alphabet() const override { return automaton_.alphabet(); }
  std::size_t num_states() const override { return automaton_.num_states(); }
  bool is_accepting(StateId q) const override { return automaton_.is_accepting(q); }
  std::vector<StateId> targets(std::span<const StateId> sources,
                               const RankedSymbol& symbol) override;

  const std::vector<OracleQuery>& log() const { return log_; }

 private:
  const TreeAutomaton& automaton_;
  std::vector<OracleQuery> log_;
};

/// True iff some run labels the root with an accepting state. Throws
/// MalformedInput when `t` uses a symbol outside the alphabet.
bool accepts(const TreeAutomaton& a, const Tree& t);

/// An accepted tree of minimal height, ties broken by node count and then
/// by the preorder sequence of clause ids; nullopt iff the language is empty.
std::optional<Tree> sample_witness(const TreeAutomaton& a);
inline bool is_empty(const TreeAutomaton& a) { return !sample_witness(a).has_value(); }

/// Reachable product; L = L(a) ∩ L(b).
TreeAutomaton intersect(const TreeAutomaton& a, const TreeAutomaton& b);

/// Bottom-up subset construction over reachable subsets. The empty subset
/// is the implicit sink and is not materialized.
TreeAutomaton determinize(const TreeAutomaton& a);

/// Determinize, materialize the sink when some transition is missing, and
/// flip acceptance. L = all trees over the alphabet minus L(a).
TreeAutomaton complement(const TreeAutomaton& a);

/// L(a) minus L(b), as intersect(a, complement(b)).
TreeAutomaton difference(const TreeAutomaton& a, const TreeAutomaton& b);

/// L(a) minus L(oracle). The oracle side is determinized on the fly and is
/// only queried for source tuples whose product states are reachable.
TreeAutomaton difference_lazy(const TreeAutomaton& a, RuleOracle& oracle);

/// Drops states that are unreachable or from which no accepting state can
/// be reached.
TreeAutomaton remove_useless(const TreeAutomaton& a);

struct MinimizeStats {
  bool determinized = false;
  std::size_t states_before = 0;
  std::size_t states_after = 0;
};

/// Myhill-Nerode quotient by iterated splitting of the accepting/rejecting
/// partition. Determinizes first when needed.
TreeAutomaton minimize_naive(const TreeAutomaton& a, MinimizeStats* stats = nullptr);

/// Quotient by the coarsest backward bisimulation, after removing useless
/// states. Works directly on nondeterministic automata.
TreeAutomaton minimize_bisim(const TreeAutomaton& a, MinimizeStats* stats = nullptr);

}  // namespace chcta

#endif  // CHCTA_TREE_AUTOMATON_HPP
