#ifndef CHCTA_SMT2_TERMS_HPP
#define CHCTA_SMT2_TERMS_HPP

#include "chcta/chc.hpp"
#include "chcta/sexpr.hpp"
#include "chcta/term.hpp"

#include <map>
#include <string>

namespace chcta {

/// Declarations visible while converting s-expressions to terms.
struct Signature {
  std::map<std::string, Sort, std::less<>> sorts;
  /// Declared functions; Bool-ranged entries include predicates.
  std::map<std::string, FunctionSymbol, std::less<>> functions;
};

/// Names bound by quantifiers, lets or an enclosing declaration context.
using Scope = std::map<std::string, TermPtr, std::less<>>;

Sort sexpr_to_sort(const SExpr& e, const Signature& sig);

/// Converts an SMT-LIB term. `let` is expanded, `!` annotations are
/// dropped. Throws ParseError carrying the position of the offending node.
TermPtr sexpr_to_term(const SExpr& e, const Signature& sig, const Scope& scope);

/// Parses a rational from an SMT-LIB numeral or decimal literal text.
Rational parse_decimal(std::string_view text);

}  // namespace chcta

#endif  // CHCTA_SMT2_TERMS_HPP
