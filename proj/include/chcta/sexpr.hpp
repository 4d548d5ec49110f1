#ifndef CHCTA_SEXPR_HPP
#define CHCTA_SEXPR_HPP

#include "chcta/errors.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chcta {

struct SExpr {
  enum class Kind { Symbol, Keyword, Numeral, Decimal, Hexadecimal, Binary, String, List };

  Kind kind = Kind::List;
  /// Atom text; symbols are stored unquoted, strings unescaped.
  std::string text;
  std::vector<SExpr> items;
  SourcePos pos;

  bool is_list() const { return kind == Kind::List; }
  bool is_symbol() const { return kind == Kind::Symbol; }
  bool is_symbol(std::string_view s) const { return kind == Kind::Symbol && text == s; }
  /// `(head ...)` where head is the given symbol.
  bool is_call(std::string_view head) const {
    return is_list() && !items.empty() && items.front().is_symbol(head);
  }

  std::string to_string() const;
};

/// Raised when input ends in the middle of a datum. Streaming readers use
/// it to wait for more bytes.
class IncompleteInput : public ParseError {
 public:
  using ParseError::ParseError;
};

/// Reads SMT-LIB 2.6 s-expressions from a text buffer.
class SExprReader {
 public:
  /// In streaming mode an atom that touches the end of the buffer is
  /// reported as incomplete.
  explicit SExprReader(std::string_view text, bool streaming = false);

  /// Next datum, or nullopt at end of input. Throws ParseError.
  std::optional<SExpr> next();
  /// Bytes consumed so far (after the last complete datum).
  std::size_t offset() const { return offset_; }

 private:
  void skip_space();
  SExpr read();
  SExpr read_atom();
  char peek() const { return text_[offset_]; }
  bool at_end() const { return offset_ >= text_.size(); }
  void advance();

  std::string_view text_;
  bool streaming_;
  std::size_t offset_ = 0;
  SourcePos pos_;
};

/// Parses all data in `text`.
std::vector<SExpr> read_all(std::string_view text);

}  // namespace chcta

#endif  // CHCTA_SEXPR_HPP
