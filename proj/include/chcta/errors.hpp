#ifndef CHCTA_ERRORS_HPP
#define CHCTA_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace chcta {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ill-sorted term construction or substitution.
class SortError : public Error {
 public:
  using Error::Error;
};

/// Input that violates a data-model precondition (bad arity, bad sort, ...).
class MalformedInput : public Error {
 public:
  using Error::Error;
};

struct SourcePos {
  std::size_t line = 1;
  std::size_t column = 1;
};

/// Lexical, syntactic or semantic error in SMT-LIB input, with position.
class ParseError : public Error {
 public:
  ParseError(SourcePos pos, const std::string& message)
      : Error(message), pos_(pos) {}

  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

/// An assert that is well-formed SMT-LIB but not a constrained Horn clause.
class NotHornError : public ParseError {
 public:
  using ParseError::ParseError;
};

/// The external solver misbehaved: process death, garbage output, bad
/// interpolant. Carries the transcript of the failing exchange.
class BackendError : public Error {
 public:
  BackendError(const std::string& message, std::string transcript = {})
      : Error(message), transcript_(std::move(transcript)) {}

  const std::string& transcript() const { return transcript_; }

 private:
  std::string transcript_;
};

/// A solver query needed for a definite answer came back unknown (for
/// example on timeout).
class SolverUnknown : public Error {
 public:
  using Error::Error;
};

/// An internal invariant of the refinement loop failed. Indicates a bug,
/// never a property of the input.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace chcta

#endif  // CHCTA_ERRORS_HPP
