#include "chcta/sexpr.hpp"

#include "chcta/term.hpp"

#include <cctype>

namespace chcta {

namespace {

constexpr std::size_t kMaxDepth = 4096;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

bool is_delimiter(char c) { return is_space(c) || c == '(' || c == ')' || c == ';' || c == '"' || c == '|'; }

}  // namespace

SExprReader::SExprReader(std::string_view text, bool streaming)
    : text_(text), streaming_(streaming) {}

void SExprReader::advance() {
  if (text_[offset_] == '\n') {
    ++pos_.line;
    pos_.column = 1;
  } else {
    ++pos_.column;
  }
  ++offset_;
}

void SExprReader::skip_space() {
  while (!at_end()) {
    char c = peek();
    if (is_space(c)) {
      advance();
    } else if (c == ';') {
      while (!at_end() && peek() != '\n') advance();
    } else {
      return;
    }
  }
}

std::optional<SExpr> SExprReader::next() {
  std::size_t saved_offset = offset_;
  SourcePos saved_pos = pos_;
  skip_space();
  if (at_end()) return std::nullopt;
  try {
    return read();
  } catch (const IncompleteInput&) {
    offset_ = saved_offset;
    pos_ = saved_pos;
    throw;
  }
}

SExpr SExprReader::read() {
  // Explicit stack instead of recursion.
  std::vector<SExpr> stack;
  for (;;) {
    skip_space();
    if (at_end()) throw IncompleteInput(pos_, "unexpected end of input");
    char c = peek();
    if (c == '(') {
      if (stack.size() >= kMaxDepth) throw ParseError(pos_, "nesting too deep");
      SExpr list;
      list.kind = SExpr::Kind::List;
      list.pos = pos_;
      advance();
      stack.push_back(std::move(list));
      continue;
    }
    SExpr done;
    if (c == ')') {
      if (stack.empty()) throw ParseError(pos_, "unexpected ')'");
      advance();
      done = std::move(stack.back());
      stack.pop_back();
    } else {
      done = read_atom();
    }
    if (stack.empty()) return done;
    stack.back().items.push_back(std::move(done));
  }
}

SExpr SExprReader::read_atom() {
  SExpr atom;
  atom.pos = pos_;
  char c = peek();
  if (c == '"') {
    atom.kind = SExpr::Kind::String;
    advance();
    for (;;) {
      if (at_end()) throw IncompleteInput(atom.pos, "unterminated string literal");
      char d = peek();
      advance();
      if (d == '"') {
        if (!at_end() && peek() == '"') {
          atom.text += '"';
          advance();
          continue;
        }
        if (at_end() && streaming_) throw IncompleteInput(atom.pos, "string may continue");
        break;
      }
      atom.text += d;
    }
    return atom;
  }
  if (c == '|') {
    atom.kind = SExpr::Kind::Symbol;
    advance();
    for (;;) {
      if (at_end()) throw IncompleteInput(atom.pos, "unterminated quoted symbol");
      char d = peek();
      advance();
      if (d == '|') break;
      if (d == '\\') throw ParseError(atom.pos, "backslash in quoted symbol");
      atom.text += d;
    }
    return atom;
  }
  std::size_t start = offset_;
  while (!at_end() && !is_delimiter(peek())) advance();
  if (at_end() && streaming_) throw IncompleteInput(atom.pos, "atom may continue");
  std::string_view tok = text_.substr(start, offset_ - start);
  if (tok.empty()) throw ParseError(atom.pos, std::string("unexpected character '") + c + "'");
  atom.text = std::string(tok);
  auto all = [&](std::size_t from, auto pred) {
    if (from >= tok.size()) return false;
    for (std::size_t i = from; i < tok.size(); ++i)
      if (!pred(static_cast<unsigned char>(tok[i]))) return false;
    return true;
  };
  auto is_digit = [](unsigned char ch) { return std::isdigit(ch) != 0; };
  if (tok[0] == ':') {
    atom.kind = SExpr::Kind::Keyword;
  } else if (std::isdigit(static_cast<unsigned char>(tok[0]))) {
    std::size_t dot = tok.find('.');
    if (dot == std::string_view::npos) {
      if (!all(0, is_digit)) throw ParseError(atom.pos, "malformed numeral '" + atom.text + "'");
      if (tok.size() > 1 && tok[0] == '0')
        throw ParseError(atom.pos, "numeral with leading zero '" + atom.text + "'");
      atom.kind = SExpr::Kind::Numeral;
    } else {
      std::string_view whole = tok.substr(0, dot);
      std::string_view frac = tok.substr(dot + 1);
      bool ok = !whole.empty() && !frac.empty();
      for (char ch : whole) ok = ok && std::isdigit(static_cast<unsigned char>(ch));
      for (char ch : frac) ok = ok && std::isdigit(static_cast<unsigned char>(ch));
      if (!ok) throw ParseError(atom.pos, "malformed decimal '" + atom.text + "'");
      atom.kind = SExpr::Kind::Decimal;
    }
  } else if (tok.size() > 2 && tok[0] == '#' && tok[1] == 'x') {
    if (!all(2, [](unsigned char ch) { return std::isxdigit(ch) != 0; }))
      throw ParseError(atom.pos, "malformed hexadecimal '" + atom.text + "'");
    atom.kind = SExpr::Kind::Hexadecimal;
  } else if (tok.size() > 2 && tok[0] == '#' && tok[1] == 'b') {
    if (!all(2, [](unsigned char ch) { return ch == '0' || ch == '1'; }))
      throw ParseError(atom.pos, "malformed binary '" + atom.text + "'");
    atom.kind = SExpr::Kind::Binary;
  } else {
    for (char ch : tok) {
      unsigned char u = static_cast<unsigned char>(ch);
      if (!std::isalnum(u) && std::string_view("~!@$%^&*_-+=<>.?/").find(ch) == std::string_view::npos)
        throw ParseError(atom.pos, "invalid character in symbol '" + atom.text + "'");
    }
    atom.kind = SExpr::Kind::Symbol;
  }
  return atom;
}

std::string SExpr::to_string() const {
  switch (kind) {
    case Kind::List: {
      std::string out = "(";
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ' ';
        out += items[i].to_string();
      }
      return out + ")";
    }
    case Kind::Symbol:
      return quote_symbol(text);
    case Kind::String: {
      std::string out = "\"";
      for (char c : text) {
        if (c == '"') out += '"';
        out += c;
      }
      return out + "\"";
    }
    default:
      return text;
  }
}

std::vector<SExpr> read_all(std::string_view text) {
  SExprReader reader(text);
  std::vector<SExpr> out;
  while (auto e = reader.next()) out.push_back(std::move(*e));
  return out;
}

}  // namespace chcta
