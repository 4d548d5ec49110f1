#include "chcta/smt2_terms.hpp"

#include "chcta/errors.hpp"

namespace chcta {

namespace {

[[noreturn]] void fail(const SExpr& at, const std::string& message) {
  throw ParseError(at.pos, message);
}

std::vector<TermPtr> bind_vars(const SExpr& list, const Signature& sig, Scope& scope) {
  if (!list.is_list() || list.items.empty()) fail(list, "expected non-empty variable list");
  std::vector<TermPtr> vars;
  for (const auto& decl : list.items) {
    if (!decl.is_list() || decl.items.size() != 2 || !decl.items[0].is_symbol())
      fail(decl, "expected (name sort) binding");
    TermPtr v = mk_var(decl.items[0].text, sexpr_to_sort(decl.items[1], sig));
    scope[decl.items[0].text] = v;
    vars.push_back(std::move(v));
  }
  return vars;
}

}  // namespace

Rational parse_decimal(std::string_view text) {
  std::size_t dot = text.find('.');
  if (dot == std::string_view::npos) return Rational(Integer(std::string(text)));
  std::string digits = std::string(text.substr(0, dot)) + std::string(text.substr(dot + 1));
  Integer den = 1;
  for (std::size_t i = dot + 1; i < text.size(); ++i) den *= 10;
  return Rational(Integer(digits), den);
}

Sort sexpr_to_sort(const SExpr& e, const Signature& sig) {
  if (e.is_symbol()) {
    if (e.text == "Bool" || e.text == "Int" || e.text == "Real") return Sort(e.text);
    auto it = sig.sorts.find(e.text);
    if (it == sig.sorts.end()) fail(e, "unknown sort '" + e.text + "'");
    return it->second;
  }
  if (e.is_call("Array") && e.items.size() == 3)
    return Sort::array(sexpr_to_sort(e.items[1], sig), sexpr_to_sort(e.items[2], sig));
  fail(e, "unsupported sort " + e.to_string());
}

TermPtr sexpr_to_term(const SExpr& e, const Signature& sig, const Scope& scope) {
  switch (e.kind) {
    case SExpr::Kind::Numeral:
      return mk_int(Integer(e.text));
    case SExpr::Kind::Decimal:
      return mk_real(parse_decimal(e.text));
    case SExpr::Kind::Symbol: {
      if (auto it = scope.find(e.text); it != scope.end()) return it->second;
      if (e.text == "true") return mk_true();
      if (e.text == "false") return mk_false();
      auto f = sig.functions.find(e.text);
      if (f != sig.functions.end()) {
        if (!f->second.param_sorts.empty())
          fail(e, "function '" + e.text + "' used without arguments");
        return mk_uf_app(e.text, {}, f->second.range);
      }
      fail(e, "unknown symbol '" + e.text + "'");
    }
    case SExpr::Kind::List:
      break;
    default:
      fail(e, "unsupported literal " + e.to_string());
  }

  if (e.items.empty()) fail(e, "empty application");
  const SExpr& head = e.items.front();
  if (head.is_call("_") && head.items.size() == 3 && head.items[1].is_symbol("divisible") &&
      head.items[2].kind == SExpr::Kind::Numeral && e.items.size() == 2) {
    TermPtr arg = sexpr_to_term(e.items[1], sig, scope);
    try {
      return mk_eq(mk_app("mod", {arg, mk_int(Integer(head.items[2].text))}), mk_int(0));
    } catch (const SortError& err) {
      fail(e, err.what());
    }
  }
  if (!head.is_symbol()) fail(head, "unsupported application head " + head.to_string());
  const std::string& op = head.text;

  if (op == "let") {
    if (e.items.size() != 3 || !e.items[1].is_list()) fail(e, "malformed let");
    Scope inner = scope;
    for (const auto& binding : e.items[1].items) {
      if (!binding.is_list() || binding.items.size() != 2 || !binding.items[0].is_symbol())
        fail(binding, "malformed let binding");
      // Parallel let: bindings see the outer scope only.
      inner[binding.items[0].text] = sexpr_to_term(binding.items[1], sig, scope);
    }
    return sexpr_to_term(e.items[2], sig, inner);
  }
  if (op == "forall" || op == "exists") {
    if (e.items.size() != 3) fail(e, "malformed quantifier");
    Scope inner = scope;
    std::vector<TermPtr> vars = bind_vars(e.items[1], sig, inner);
    TermPtr body = sexpr_to_term(e.items[2], sig, inner);
    try {
      return op == "forall" ? mk_forall(std::move(vars), body) : mk_exists(std::move(vars), body);
    } catch (const SortError& err) {
      fail(e, err.what());
    }
  }
  if (op == "!") {
    if (e.items.size() < 2) fail(e, "malformed annotation");
    return sexpr_to_term(e.items[1], sig, scope);
  }

  std::vector<TermPtr> args;
  args.reserve(e.items.size() - 1);
  for (std::size_t i = 1; i < e.items.size(); ++i)
    args.push_back(sexpr_to_term(e.items[i], sig, scope));

  try {
    if (is_builtin_symbol(op)) {
      // Unary minus on a literal is a negative literal.
      if (op == "-" && args.size() == 1 && args[0]->kind() == TermKind::IntConst)
        return mk_int(-boost::multiprecision::numerator(args[0]->value()));
      if (op == "-" && args.size() == 1 && args[0]->kind() == TermKind::RealConst)
        return mk_real(-args[0]->value());
      return mk_app(op, std::move(args));
    }
  } catch (const SortError& err) {
    fail(e, err.what());
  }
  auto f = sig.functions.find(op);
  if (f == sig.functions.end()) fail(head, "unknown function symbol '" + op + "'");
  const FunctionSymbol& fn = f->second;
  if (fn.param_sorts.size() != args.size())
    fail(e, "'" + op + "' expects " + std::to_string(fn.param_sorts.size()) + " arguments");
  for (std::size_t i = 0; i < args.size(); ++i)
    if (args[i]->sort() != fn.param_sorts[i])
      fail(e.items[i + 1], "argument " + std::to_string(i) + " of '" + op + "' has sort " +
                               args[i]->sort().to_string() + ", expected " +
                               fn.param_sorts[i].to_string());
  return mk_uf_app(op, std::move(args), fn.range);
}

}  // namespace chcta
