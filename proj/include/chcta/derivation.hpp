#ifndef CHCTA_DERIVATION_HPP
#define CHCTA_DERIVATION_HPP

#include "chcta/chc.hpp"
#include "chcta/interpolation.hpp"
#include "chcta/smt.hpp"
#include "chcta/tree_automaton.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chcta {

/// Alphabet of a system: one ranked symbol per clause.
std::vector<RankedSymbol> clause_alphabet(const ChcSystem& s);

/// States are the predicates (in declaration order, labelled by name)
/// followed by the accepting `false` state. Each clause contributes one
/// rule from its body predicates to its head predicate, so the language is
/// every well-shaped derivation of false, constraints ignored.
TreeAutomaton build_initial_automaton(const ChcSystem& s);

/// A resolution tree with a fresh variable instance per node.
struct DerivationTree {
  Tree tree;
  /// Node `n` (preorder) uses clause `clauses[n]`.
  std::vector<int> clauses;
  std::vector<std::vector<std::size_t>> children;
  /// Clause variable name to instance variable, per node.
  std::vector<Substitution> instances;
  /// Instance variables shared with the parent (the head arguments).
  std::vector<std::vector<TermPtr>> interfaces;

  std::size_t size() const { return clauses.size(); }
};

/// Checks the shape of `t` against `s` and assigns instance variables
/// `ta!<node>!<var>`. A child's head variables are identified with the
/// parent's body atom variables. Throws MalformedInput naming the offending
/// node when the root is not a query, a clause is unknown, a child count
/// differs from the body length or a child's head predicate does not match.
DerivationTree instantiate(const Tree& t, const ChcSystem& s);

/// Per node, the instantiated clause constraint; the tree of these labels.
InterpolationProblem derivation_constraints(const DerivationTree& d, const ChcSystem& s);

struct Feasibility {
  bool feasible = false;
  /// Values of the instance variables when feasible.
  std::map<std::string, ModelValue> assignment;
};

/// Feasible iff the conjunction of all node constraints is satisfiable.
/// Throws SolverUnknown when the solver cannot decide.
Feasibility check_feasibility(const DerivationTree& d, const ChcSystem& s, SolverHandle& solver);

}  // namespace chcta

#endif  // CHCTA_DERIVATION_HPP
