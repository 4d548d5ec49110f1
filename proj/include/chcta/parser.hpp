#ifndef CHCTA_PARSER_HPP
#define CHCTA_PARSER_HPP

#include "chcta/chc.hpp"
#include "chcta/sexpr.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chcta {

enum class CommandKind {
  SetLogic,
  SetInfo,
  SetOption,
  DeclareSort,
  DeclareFun,
  DeclareConst,
  Assert,
  CheckSat,
  GetModel,
  Exit,
};

struct Command {
  CommandKind kind;
  SExpr expr;
  SourcePos pos;
};

/// Commands of a CHC-COMP script in source order. Reading enforces the
/// command vocabulary; `parse` enforces the rest of the script shape.
struct Script {
  std::vector<Command> commands;
};

Script read_script(std::string_view text);

struct ParseDiagnostic {
  SourcePos pos;
  std::string severity;
  std::string message;

  /// `file:line:col: severity: message`
  std::string format(std::string_view file) const;
};

struct ParseResult {
  ChcSystem system;
  std::vector<ParseDiagnostic> warnings;
  /// Value of `(set-info :status ...)`, when present.
  std::optional<std::string> status;
};

/// Parses a CHC-COMP SMT-LIB script into a normalized clause system.
/// Throws ParseError (with position) on malformed input and NotHornError
/// on asserts outside the constrained-Horn fragment.
ParseResult parse(std::string_view text);

/// Prints a system as a script that parses back to the same system up to
/// variable renaming. Variables are renamed per clause in order of first
/// occurrence, so the output is canonical.
std::string unparse(const ChcSystem& system);

}  // namespace chcta

#endif  // CHCTA_PARSER_HPP
