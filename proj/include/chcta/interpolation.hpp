#ifndef CHCTA_INTERPOLATION_HPP
#define CHCTA_INTERPOLATION_HPP

#include "chcta/smt.hpp"
#include "chcta/term.hpp"

#include <string>
#include <vector>

namespace chcta {

struct InterpolationNode {
  /// Constraint of this node (instantiated clause constraint).
  TermPtr label;
  /// Variables shared with the parent; empty for the root.
  std::vector<TermPtr> interface;
  std::vector<std::size_t> children;
};

/// Rooted tree of labelled formulas whose conjunction is unsatisfiable.
/// Node 0 is the root; a node's variables other than its interface and
/// its children's interfaces must not occur elsewhere.
struct InterpolationProblem {
  std::vector<InterpolationNode> nodes;

  /// Nodes in post-order (children before parents, left to right).
  std::vector<std::size_t> post_order() const;
  /// Conjunction of all labels in the subtree rooted at `n`.
  std::vector<TermPtr> subtree_labels(std::size_t n) const;
};

struct TreeInterpolant {
  std::vector<TermPtr> formulas;
};

enum class InterpolationMode { External, Subtree };
const char* to_string(InterpolationMode mode);

struct InterpolationOptions {
  InterpolationMode mode = InterpolationMode::External;
  /// Replace quantified formulas by quantifier-free equivalents when the
  /// solver can compute them.
  bool eliminate_quantifiers = true;
  /// Greedily drop conjuncts that the parent does not need.
  bool weaken = true;
};

struct InterpolationReport {
  InterpolationMode used = InterpolationMode::External;
  /// Set when external interpolation was requested but unavailable.
  std::string notice;
  /// Number of per-node implications verified.
  std::size_t verified_nodes = 0;
  std::size_t weakened_conjuncts = 0;
};

/// Per-node summaries: ∃(non-interface variables). ∧ labels of the subtree,
/// with `false` at the root. Needs no solver.
TreeInterpolant subtree_interpolants(const InterpolationProblem& p);

/// Outcome of checking the defining conditions of a tree interpolant.
struct VerificationResult {
  Validity validity = Validity::Valid;
  /// First node whose condition is violated or undecided.
  std::size_t node = 0;
  std::string reason;
};

/// Checks, for every node n, that ∧ I(children) ∧ label(n) ⊨ I(n), that the
/// root formula is unsatisfiable and that I(n) only mentions n's interface.
VerificationResult verify_tree_interpolant(const InterpolationProblem& p, const TreeInterpolant& t,
                                           SolverHandle& solver);

/// Computes a tree interpolant and verifies it before returning. Throws
/// BackendError ("bad interpolant") when verification fails and
/// SolverUnknown when a required query is undecided.
TreeInterpolant tree_interpolants(const InterpolationProblem& p, const InterpolationOptions& opts,
                                  SolverHandle& solver, InterpolationReport* report = nullptr);

}  // namespace chcta

#endif  // CHCTA_INTERPOLATION_HPP
