#ifndef CHCTA_CHC_HPP
#define CHCTA_CHC_HPP

#include "chcta/term.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chcta {

/// Identifiers starting with this prefix are generated by the library and
/// rejected in user input.
inline constexpr std::string_view kReservedPrefix = "ta!";

struct PredicateSymbol {
  std::string name;
  std::vector<Sort> param_sorts;

  std::size_t arity() const { return param_sorts.size(); }
  friend bool operator==(const PredicateSymbol&, const PredicateSymbol&) = default;
};

/// An uninterpreted theory function (or constant) declared by the input.
struct FunctionSymbol {
  std::string name;
  std::vector<Sort> param_sorts;
  Sort range;
};

/// Predicate application. After normalization every argument is a variable
/// and all variables across one clause's atoms are pairwise distinct.
struct PredApp {
  std::string predicate;
  std::vector<TermPtr> args;
};

enum class ClauseKind { Fact, Definite, Query };

const char* to_string(ClauseKind kind);

struct HornClause {
  int id = 0;
  std::vector<PredApp> body;
  TermPtr constraint = mk_true();
  /// Empty for the distinguished `false` head.
  std::optional<PredApp> head;

  /// Number of body atoms; the clause's rank as an alphabet symbol.
  std::size_t rank() const { return body.size(); }
  bool is_query() const { return !head.has_value(); }
  /// All variables of the clause (atoms and constraint).
  VarSet variables() const;
};

ClauseKind classify(const HornClause& clause);

struct ChcSystem {
  std::string logic = "HORN";
  std::vector<Sort> declared_sorts;
  std::vector<FunctionSymbol> functions;
  std::vector<PredicateSymbol> predicates;
  std::vector<HornClause> clauses;

  /// Index into `predicates`, or nullopt when undeclared.
  std::optional<std::size_t> predicate_index(std::string_view name) const;
  const PredicateSymbol& predicate(std::string_view name) const;
  const HornClause& clause(int id) const;
};

/// Per-system monotone counter producing names under kReservedPrefix.
class FreshNames {
 public:
  explicit FreshNames(std::string stem = "z") : stem_(std::move(stem)) {}

  TermPtr fresh_var(const Sort& sort);
  std::uint64_t issued() const { return next_; }

 private:
  std::string stem_;
  std::uint64_t next_ = 0;
};

/// Rewrites a raw clause so that every atom applies its predicate to fresh
/// pairwise-distinct variables, moving the original argument terms into
/// equalities inside the constraint. Arguments that are already variables
/// not used by an earlier atom are kept. Throws MalformedInput on an
/// undeclared predicate, an arity mismatch or a sort mismatch.
HornClause normalize_clause(const ChcSystem& signature, std::vector<PredApp> raw_body,
                            TermPtr raw_constraint, std::optional<PredApp> raw_head,
                            FreshNames& fresh, int id = 0);

/// True when every atom of `clause` uses pairwise-distinct variables.
bool is_normalized(const HornClause& clause);

struct Diagnostic {
  std::optional<int> clause_id;
  std::string reason;
};

/// Checks the ChcSystem invariants; an empty result means the system is valid.
std::vector<Diagnostic> validate_system(const ChcSystem& system);

/// Renders a clause as `P(x) /\ C -> Q(y)` for logs and diagnostics.
std::string describe(const HornClause& clause);

}  // namespace chcta

#endif  // CHCTA_CHC_HPP
