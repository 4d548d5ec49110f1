#ifndef CHCTA_TESTS_TREE_ENUM_HPP
#define CHCTA_TESTS_TREE_ENUM_HPP

#include "chcta/tree_automaton.hpp"

#include <vector>

namespace chcta::testing {

/// Every tree over `alphabet` of height at most `max_height`, in order of
/// increasing height.
std::vector<Tree> enumerate_trees(const std::vector<RankedSymbol>& alphabet,
                                  std::size_t max_height);

/// Reference membership: top-down search for a run that labels the root
/// with an accepting state.
bool reference_accepts(const TreeAutomaton& a, const Tree& t);

/// Reference membership for a lazily given automaton.
bool reference_accepts(RuleOracle& oracle, const Tree& t);

/// Trees of height <= max_height on which the two memberships disagree.
std::vector<Tree> language_mismatches(const TreeAutomaton& a, const TreeAutomaton& b,
                                      std::size_t max_height);

}  // namespace chcta::testing

#endif
