#include "chcta/term.hpp"

#include "chcta/errors.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace chcta {

// ---------------------------------------------------------------------------
// Sort

Sort::Sort(std::string name, std::vector<Sort> params)
    : name_(std::move(name)), params_(std::move(params)) {
  if (name_.empty()) throw SortError("empty sort name");
}

Sort Sort::boolean() { return Sort("Bool"); }
Sort Sort::integer() { return Sort("Int"); }
Sort Sort::real() { return Sort("Real"); }
Sort Sort::array(Sort index, Sort element) {
  return Sort("Array", {std::move(index), std::move(element)});
}

bool Sort::is_opaque() const { return !is_bool() && !is_int() && !is_real() && !is_array(); }

std::string Sort::to_string() const {
  if (params_.empty()) return quote_symbol(name_);
  std::string out = "(" + quote_symbol(name_);
  for (const auto& p : params_) out += " " + p.to_string();
  return out + ")";
}

std::ostream& operator<<(std::ostream& os, const Sort& sort) { return os << sort.to_string(); }

// ---------------------------------------------------------------------------
// Construction

Term::Term(TermKind kind, Sort sort, std::string name, std::vector<TermPtr> args,
           std::vector<TermPtr> bound, Rational value)
    : kind_(kind),
      sort_(std::move(sort)),
      name_(std::move(name)),
      args_(std::move(args)),
      bound_(std::move(bound)),
      value_(std::move(value)) {}

namespace {

TermPtr make(TermKind kind, Sort sort, std::string name = {}, std::vector<TermPtr> args = {},
             std::vector<TermPtr> bound = {}, Rational value = 0) {
  return std::make_shared<const Term>(kind, std::move(sort), std::move(name), std::move(args),
                                      std::move(bound), std::move(value));
}

[[noreturn]] void sort_error(const std::string& op, const std::string& why,
                             const std::vector<TermPtr>& args) {
  std::ostringstream os;
  os << "ill-sorted application of '" << op << "': " << why << " (argument sorts:";
  for (const auto& a : args) os << ' ' << a->sort();
  os << ')';
  throw SortError(os.str());
}

void require_count(const std::string& op, const std::vector<TermPtr>& args, std::size_t lo,
                   std::size_t hi = SIZE_MAX) {
  if (args.size() < lo || args.size() > hi) sort_error(op, "wrong number of arguments", args);
}

void require_all(const std::string& op, const std::vector<TermPtr>& args, const Sort& sort) {
  for (const auto& a : args)
    if (a->sort() != sort) sort_error(op, "expected " + sort.to_string(), args);
}

Sort require_same_numeric(const std::string& op, const std::vector<TermPtr>& args) {
  const Sort& s = args.front()->sort();
  if (!s.is_numeric()) sort_error(op, "expected Int or Real", args);
  require_all(op, args, s);
  return s;
}

const std::set<std::string, std::less<>>& builtins() {
  static const std::set<std::string, std::less<>> table = {
      "and", "or", "not", "=>", "xor", "=", "distinct", "ite", "+", "-", "*", "/", "div",
      "mod", "abs", "<=", "<", ">=", ">", "to_real", "to_int", "is_int", "select", "store"};
  return table;
}

}  // namespace

bool is_builtin_symbol(std::string_view op) { return builtins().count(op) != 0; }

TermPtr mk_var(std::string name, Sort sort) {
  if (name.empty()) throw SortError("empty variable name");
  return make(TermKind::Variable, std::move(sort), std::move(name));
}

TermPtr mk_bool(bool value) { return value ? mk_true() : mk_false(); }

TermPtr mk_true() {
  static const TermPtr t = make(TermKind::BoolConst, Sort::boolean(), {}, {}, {}, 1);
  return t;
}

TermPtr mk_false() {
  static const TermPtr f = make(TermKind::BoolConst, Sort::boolean(), {}, {}, {}, 0);
  return f;
}

TermPtr mk_int(Integer value) {
  return make(TermKind::IntConst, Sort::integer(), {}, {}, {}, Rational(value));
}

TermPtr mk_real(Rational value) {
  return make(TermKind::RealConst, Sort::real(), {}, {}, {}, std::move(value));
}

TermPtr mk_app(std::string op, std::vector<TermPtr> args) {
  Sort result = Sort::boolean();
  if (op == "and" || op == "or" || op == "xor") {
    require_count(op, args, 1);
    require_all(op, args, Sort::boolean());
  } else if (op == "not") {
    require_count(op, args, 1, 1);
    require_all(op, args, Sort::boolean());
  } else if (op == "=>") {
    require_count(op, args, 2);
    require_all(op, args, Sort::boolean());
  } else if (op == "=" || op == "distinct") {
    require_count(op, args, 2);
    require_all(op, args, args.front()->sort());
  } else if (op == "ite") {
    require_count(op, args, 3, 3);
    if (!args[0]->sort().is_bool() || args[1]->sort() != args[2]->sort())
      sort_error(op, "expected (ite Bool S S)", args);
    result = args[1]->sort();
  } else if (op == "+" || op == "*" || op == "-") {
    require_count(op, args, 1);
    result = require_same_numeric(op, args);
  } else if (op == "/") {
    require_count(op, args, 2);
    require_all(op, args, Sort::real());
    result = Sort::real();
  } else if (op == "div" || op == "mod") {
    require_count(op, args, 2, 2);
    require_all(op, args, Sort::integer());
    result = Sort::integer();
  } else if (op == "abs") {
    require_count(op, args, 1, 1);
    require_all(op, args, Sort::integer());
    result = Sort::integer();
  } else if (op == "<=" || op == "<" || op == ">=" || op == ">") {
    require_count(op, args, 2);
    require_same_numeric(op, args);
  } else if (op == "to_real") {
    require_count(op, args, 1, 1);
    require_all(op, args, Sort::integer());
    result = Sort::real();
  } else if (op == "to_int" || op == "is_int") {
    require_count(op, args, 1, 1);
    require_all(op, args, Sort::real());
    result = op == "to_int" ? Sort::integer() : Sort::boolean();
  } else if (op == "select") {
    require_count(op, args, 2, 2);
    const Sort& a = args[0]->sort();
    if (!a.is_array() || a.params()[0] != args[1]->sort())
      sort_error(op, "expected (select (Array I E) I)", args);
    result = a.params()[1];
  } else if (op == "store") {
    require_count(op, args, 3, 3);
    const Sort& a = args[0]->sort();
    if (!a.is_array() || a.params()[0] != args[1]->sort() || a.params()[1] != args[2]->sort())
      sort_error(op, "expected (store (Array I E) I E)", args);
    result = a;
  } else {
    throw SortError("unknown function symbol '" + op + "'");
  }
  return make(TermKind::Apply, std::move(result), std::move(op), std::move(args));
}

TermPtr mk_uf_app(std::string op, std::vector<TermPtr> args, Sort range) {
  if (is_builtin_symbol(op)) throw SortError("'" + op + "' is an interpreted symbol");
  return make(TermKind::Apply, std::move(range), std::move(op), std::move(args));
}

namespace {

TermPtr mk_quantifier(TermKind kind, std::vector<TermPtr> vars, TermPtr body) {
  if (!body->sort().is_bool()) throw SortError("quantifier body must be Bool");
  for (const auto& v : vars)
    if (!v->is_var()) throw SortError("quantifier binds a non-variable");
  if (vars.empty()) return body;
  return make(kind, Sort::boolean(), {}, {std::move(body)}, std::move(vars));
}

}  // namespace

TermPtr mk_forall(std::vector<TermPtr> vars, TermPtr body) {
  return mk_quantifier(TermKind::Forall, std::move(vars), std::move(body));
}

TermPtr mk_exists(std::vector<TermPtr> vars, TermPtr body) {
  return mk_quantifier(TermKind::Exists, std::move(vars), std::move(body));
}

TermPtr mk_and(std::vector<TermPtr> args) {
  if (args.empty()) return mk_true();
  if (args.size() == 1) return args.front();
  return mk_app("and", std::move(args));
}

TermPtr mk_or(std::vector<TermPtr> args) {
  if (args.empty()) return mk_false();
  if (args.size() == 1) return args.front();
  return mk_app("or", std::move(args));
}

TermPtr mk_not(TermPtr arg) { return mk_app("not", {std::move(arg)}); }

TermPtr mk_implies(TermPtr lhs, TermPtr rhs) {
  return mk_app("=>", {std::move(lhs), std::move(rhs)});
}

TermPtr mk_eq(TermPtr lhs, TermPtr rhs) { return mk_app("=", {std::move(lhs), std::move(rhs)}); }

// ---------------------------------------------------------------------------
// Printing

namespace {

bool is_symbol_char(char c) {
  if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) return true;
  return std::string_view("~!@$%^&*_-+=<>.?/").find(c) != std::string_view::npos;
}

const std::set<std::string, std::less<>>& reserved_words() {
  static const std::set<std::string, std::less<>> words = {
      "par", "NUMERAL", "DECIMAL", "STRING", "_", "!", "as", "let", "exists", "forall", "match"};
  return words;
}

void print_integer(std::ostream& os, const Integer& v) {
  if (v < 0)
    os << "(- " << Integer(-v) << ')';
  else
    os << v;
}

void print_real(std::ostream& os, const Rational& v) {
  bool negative = v < 0;
  Rational a = negative ? Rational(-v) : v;
  if (negative) os << "(- ";
  Integer num = boost::multiprecision::numerator(a);
  Integer den = boost::multiprecision::denominator(a);
  if (den == 1)
    os << num << ".0";
  else
    os << "(/ " << num << ".0 " << den << ".0)";
  if (negative) os << ')';
}

void print(std::ostream& os, const Term& t) {
  switch (t.kind()) {
    case TermKind::Variable:
      os << quote_symbol(t.name());
      return;
    case TermKind::BoolConst:
      os << (t.is_true() ? "true" : "false");
      return;
    case TermKind::IntConst:
      print_integer(os, boost::multiprecision::numerator(t.value()));
      return;
    case TermKind::RealConst:
      print_real(os, t.value());
      return;
    case TermKind::Apply:
      if (t.args().empty()) {
        os << quote_symbol(t.name());
        return;
      }
      os << '(' << quote_symbol(t.name());
      for (const auto& a : t.args()) {
        os << ' ';
        print(os, *a);
      }
      os << ')';
      return;
    case TermKind::Forall:
    case TermKind::Exists:
      os << (t.kind() == TermKind::Forall ? "(forall (" : "(exists (");
      for (std::size_t i = 0; i < t.bound().size(); ++i) {
        if (i) os << ' ';
        os << '(' << quote_symbol(t.bound()[i]->name()) << ' ' << t.bound()[i]->sort() << ')';
      }
      os << ") ";
      print(os, *t.body());
      os << ')';
      return;
  }
}

}  // namespace

bool is_simple_symbol(std::string_view name) {
  if (name.empty() || (name[0] >= '0' && name[0] <= '9')) return false;
  if (reserved_words().count(name)) return false;
  return std::all_of(name.begin(), name.end(), is_symbol_char);
}

std::string quote_symbol(std::string_view name) {
  if (is_simple_symbol(name)) return std::string(name);
  return "|" + std::string(name) + "|";
}

std::string to_smtlib(const Term& term) {
  std::ostringstream os;
  print(os, term);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Term& term) {
  print(os, term);
  return os;
}

// ---------------------------------------------------------------------------
// Traversal

void visit(const TermPtr& term, const std::function<void(const TermPtr&)>& fn) {
  fn(term);
  for (const auto& a : term->args()) visit(a, fn);
}

namespace {

void collect_free(const TermPtr& t, std::set<std::string>& bound, VarSet& out) {
  switch (t->kind()) {
    case TermKind::Variable:
      if (!bound.count(t->name())) out.emplace(t->name(), t->sort());
      return;
    case TermKind::Forall:
    case TermKind::Exists: {
      std::vector<std::string> added;
      for (const auto& v : t->bound())
        if (bound.insert(v->name()).second) added.push_back(v->name());
      collect_free(t->body(), bound, out);
      for (const auto& n : added) bound.erase(n);
      return;
    }
    default:
      for (const auto& a : t->args()) collect_free(a, bound, out);
  }
}

}  // namespace

VarSet free_vars(const TermPtr& term) {
  VarSet out;
  std::set<std::string> bound;
  collect_free(term, bound, out);
  return out;
}

bool has_quantifier(const TermPtr& term) {
  if (term->is_quantifier()) return true;
  return std::any_of(term->args().begin(), term->args().end(), has_quantifier);
}

bool structurally_equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (a->kind() != b->kind() || a->sort() != b->sort() || a->name() != b->name() ||
      a->value() != b->value() || a->args().size() != b->args().size() ||
      a->bound().size() != b->bound().size())
    return false;
  for (std::size_t i = 0; i < a->args().size(); ++i)
    if (!structurally_equal(a->args()[i], b->args()[i])) return false;
  for (std::size_t i = 0; i < a->bound().size(); ++i)
    if (!structurally_equal(a->bound()[i], b->bound()[i])) return false;
  return true;
}

std::vector<TermPtr> conjuncts(const TermPtr& term) {
  std::vector<TermPtr> out;
  std::function<void(const TermPtr&)> go = [&](const TermPtr& t) {
    if (t->is_true()) return;
    if (t->is_app("and")) {
      for (const auto& a : t->args()) go(a);
      return;
    }
    out.push_back(t);
  };
  go(term);
  return out;
}

// ---------------------------------------------------------------------------
// Substitution

TermPtr substitute(const TermPtr& term, const Substitution& mapping) {
  if (mapping.empty()) return term;
  switch (term->kind()) {
    case TermKind::Variable: {
      auto it = mapping.find(term->name());
      if (it == mapping.end()) return term;
      if (it->second->sort() != term->sort())
        throw SortError("substitution of '" + term->name() + "' changes its sort from " +
                        term->sort().to_string() + " to " + it->second->sort().to_string());
      return it->second;
    }
    case TermKind::BoolConst:
    case TermKind::IntConst:
    case TermKind::RealConst:
      return term;
    case TermKind::Apply: {
      std::vector<TermPtr> args;
      args.reserve(term->args().size());
      bool changed = false;
      for (const auto& a : term->args()) {
        args.push_back(substitute(a, mapping));
        changed |= args.back() != a;
      }
      if (!changed) return term;
      return make(TermKind::Apply, term->sort(), term->name(), std::move(args));
    }
    case TermKind::Forall:
    case TermKind::Exists: {
      VarSet body_free = free_vars(term->body());
      Substitution inner;
      for (const auto& [name, image] : mapping) {
        bool shadowed = std::any_of(term->bound().begin(), term->bound().end(),
                                    [&](const TermPtr& v) { return v->name() == name; });
        if (!shadowed && body_free.count(name)) inner.emplace(name, image);
      }
      if (inner.empty()) return term;
      std::set<std::string> taken;
      for (const auto& [name, image] : inner)
        for (const auto& [fv, sort] : free_vars(image)) taken.insert(fv);
      std::set<std::string> avoid = taken;
      for (const auto& [fv, sort] : body_free) avoid.insert(fv);
      for (const auto& v : term->bound()) avoid.insert(v->name());
      std::vector<TermPtr> new_bound;
      for (const auto& v : term->bound()) {
        if (!taken.count(v->name())) {
          new_bound.push_back(v);
          continue;
        }
        std::string fresh = v->name() + "'";
        while (avoid.count(fresh)) fresh += "'";
        avoid.insert(fresh);
        TermPtr renamed = mk_var(fresh, v->sort());
        inner[v->name()] = renamed;
        new_bound.push_back(renamed);
      }
      return make(term->kind(), term->sort(), {}, {substitute(term->body(), inner)},
                  std::move(new_bound));
    }
  }
  return term;
}

// ---------------------------------------------------------------------------
// Simplification

namespace {

TermPtr literal_of(const Sort& sort, Rational v) {
  if (sort.is_int()) return mk_int(boost::multiprecision::numerator(v));
  return mk_real(std::move(v));
}

bool is_numeric_literal(const TermPtr& t) {
  return t->kind() == TermKind::IntConst || t->kind() == TermKind::RealConst;
}

bool all_numeric_literals(const std::vector<TermPtr>& args) {
  return std::all_of(args.begin(), args.end(), is_numeric_literal);
}

std::string negated_comparison(const std::string& op) {
  if (op == "<=") return ">";
  if (op == "<") return ">=";
  if (op == ">=") return "<";
  return "<=";
}

bool compare(const std::string& op, const Rational& a, const Rational& b) {
  if (op == "<=") return a <= b;
  if (op == "<") return a < b;
  if (op == ">=") return a >= b;
  return a > b;
}

Integer euclid_div(const Integer& m, const Integer& n) {
  Integer q = m / n;  // truncates toward zero
  Integer r = m - n * q;
  if (r < 0) q += (n > 0 ? -1 : 1);
  return q;
}

TermPtr simplify_app(const std::string& op, std::vector<TermPtr> args, const Sort& sort);

TermPtr simplify_junction(bool is_and, std::vector<TermPtr> args) {
  std::map<std::string, TermPtr> items;
  std::vector<TermPtr> work = std::move(args);
  const char* op = is_and ? "and" : "or";
  while (!work.empty()) {
    TermPtr a = work.back();
    work.pop_back();
    if (a->is_app(op)) {
      work.insert(work.end(), a->args().begin(), a->args().end());
      continue;
    }
    if (a->kind() == TermKind::BoolConst) {
      if (a->is_true() != is_and) return a;  // absorbing element
      continue;
    }
    items.emplace(to_smtlib(a), a);
  }
  for (const auto& [key, t] : items) {
    if (t->is_app("not") && items.count(to_smtlib(t->args()[0]))) return mk_bool(!is_and);
  }
  std::vector<TermPtr> out;
  out.reserve(items.size());
  for (auto& [key, t] : items) out.push_back(t);
  return is_and ? mk_and(std::move(out)) : mk_or(std::move(out));
}

TermPtr simplify_not(const TermPtr& a) {
  if (a->kind() == TermKind::BoolConst) return mk_bool(!a->is_true());
  if (a->is_app("not")) return a->args()[0];
  if (a->args().size() == 2 &&
      (a->is_app("<=") || a->is_app("<") || a->is_app(">=") || a->is_app(">")))
    return mk_app(negated_comparison(a->name()), a->args());
  return mk_not(a);
}

TermPtr simplify_app(const std::string& op, std::vector<TermPtr> args, const Sort& sort) {
  if (op == "and" || op == "or") return simplify_junction(op == "and", std::move(args));
  if (op == "not") return simplify_not(args[0]);
  if (op == "=>") {
    std::vector<TermPtr> disj;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) disj.push_back(simplify_not(args[i]));
    disj.push_back(args.back());
    return simplify_junction(false, std::move(disj));
  }
  if (op == "ite") {
    if (args[0]->kind() == TermKind::BoolConst) return args[0]->is_true() ? args[1] : args[2];
    if (structurally_equal(args[1], args[2])) return args[1];
    if (args[1]->is_true() && args[2]->is_false()) return args[0];
    if (args[1]->is_false() && args[2]->is_true()) return simplify_not(args[0]);
    return mk_app(op, std::move(args));
  }
  if (op == "=" && args.size() == 2) {
    if (structurally_equal(args[0], args[1])) return mk_true();
    if (args[0]->is_literal() && args[1]->is_literal())
      return mk_bool(args[0]->value() == args[1]->value());
    if (args[0]->sort().is_bool()) {
      for (int i = 0; i < 2; ++i) {
        const TermPtr& lit = args[i];
        const TermPtr& other = args[1 - i];
        if (lit->is_true()) return other;
        if (lit->is_false()) return simplify_not(other);
      }
    }
    return mk_app(op, std::move(args));
  }
  if (op == "distinct" && args.size() == 2) {
    if (structurally_equal(args[0], args[1])) return mk_false();
    if (args[0]->is_literal() && args[1]->is_literal())
      return mk_bool(args[0]->value() != args[1]->value());
    return mk_app(op, std::move(args));
  }
  if (op == "+") {
    Rational sum = 0;
    std::vector<TermPtr> rest;
    std::vector<TermPtr> work(args.rbegin(), args.rend());
    while (!work.empty()) {
      TermPtr a = work.back();
      work.pop_back();
      if (a->is_app("+")) {
        work.insert(work.end(), a->args().rbegin(), a->args().rend());
      } else if (is_numeric_literal(a)) {
        sum += a->value();
      } else {
        rest.push_back(a);
      }
    }
    if (sum != 0 || rest.empty()) rest.push_back(literal_of(sort, sum));
    if (rest.size() == 1) return rest.front();
    return mk_app("+", std::move(rest));
  }
  if (op == "*") {
    Rational product = 1;
    std::vector<TermPtr> rest;
    for (auto& a : args) {
      if (is_numeric_literal(a))
        product *= a->value();
      else
        rest.push_back(a);
    }
    if (product == 0) return literal_of(sort, 0);
    if (product != 1 || rest.empty()) rest.insert(rest.begin(), literal_of(sort, product));
    if (rest.size() == 1) return rest.front();
    return mk_app("*", std::move(rest));
  }
  if (op == "-") {
    if (args.size() == 1 && is_numeric_literal(args[0]))
      return literal_of(sort, -args[0]->value());
    if (args.size() == 1 && args[0]->is_app("-") && args[0]->args().size() == 1)
      return args[0]->args()[0];
    if (args.size() >= 2 && all_numeric_literals(args)) {
      Rational v = args[0]->value();
      for (std::size_t i = 1; i < args.size(); ++i) v -= args[i]->value();
      return literal_of(sort, v);
    }
    if (args.size() == 2 && is_numeric_literal(args[1]) && args[1]->value() == 0) return args[0];
    return mk_app(op, std::move(args));
  }
  if (op == "<=" || op == "<" || op == ">=" || op == ">") {
    if (args.size() == 2 && all_numeric_literals(args))
      return mk_bool(compare(op, args[0]->value(), args[1]->value()));
    if (args.size() == 2 && structurally_equal(args[0], args[1]))
      return mk_bool(op == "<=" || op == ">=");
    return mk_app(op, std::move(args));
  }
  if ((op == "div" || op == "mod") && all_numeric_literals(args) && args[1]->value() != 0) {
    Integer m = boost::multiprecision::numerator(args[0]->value());
    Integer n = boost::multiprecision::numerator(args[1]->value());
    Integer q = euclid_div(m, n);
    return mk_int(op == "div" ? q : Integer(m - n * q));
  }
  if (op == "/" && all_numeric_literals(args) && args.size() == 2 && args[1]->value() != 0)
    return mk_real(args[0]->value() / args[1]->value());
  if (op == "to_real" && is_numeric_literal(args[0])) return mk_real(args[0]->value());
  if (op == "abs" && is_numeric_literal(args[0]))
    return literal_of(sort, args[0]->value() < 0 ? Rational(-args[0]->value()) : args[0]->value());
  return mk_app(op, std::move(args));
}

}  // namespace

TermPtr simplify(const TermPtr& term) {
  switch (term->kind()) {
    case TermKind::Variable:
    case TermKind::BoolConst:
    case TermKind::IntConst:
    case TermKind::RealConst:
      return term;
    case TermKind::Forall:
    case TermKind::Exists: {
      TermPtr body = simplify(term->body());
      VarSet body_free = free_vars(body);
      std::vector<TermPtr> kept;
      for (const auto& v : term->bound())
        if (body_free.count(v->name())) kept.push_back(v);
      return term->kind() == TermKind::Forall ? mk_forall(std::move(kept), body)
                                              : mk_exists(std::move(kept), body);
    }
    case TermKind::Apply: {
      if (term->args().empty()) return term;
      std::vector<TermPtr> args;
      args.reserve(term->args().size());
      for (const auto& a : term->args()) args.push_back(simplify(a));
      if (!is_builtin_symbol(term->name()))
        return mk_uf_app(term->name(), std::move(args), term->sort());
      return simplify_app(term->name(), std::move(args), term->sort());
    }
  }
  return term;
}

}  // namespace chcta
