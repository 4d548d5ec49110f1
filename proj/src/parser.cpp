#include "chcta/parser.hpp"

#include "chcta/errors.hpp"
#include "chcta/smt2_terms.hpp"

#include <set>
#include <sstream>

namespace chcta {

std::string ParseDiagnostic::format(std::string_view file) const {
  std::ostringstream os;
  os << file << ':' << pos.line << ':' << pos.column << ": " << severity << ": " << message;
  return os.str();
}

Script read_script(std::string_view text) {
  static const std::map<std::string, CommandKind, std::less<>> names = {
      {"set-logic", CommandKind::SetLogic},       {"set-info", CommandKind::SetInfo},
      {"set-option", CommandKind::SetOption},     {"declare-sort", CommandKind::DeclareSort},
      {"declare-fun", CommandKind::DeclareFun},   {"declare-const", CommandKind::DeclareConst},
      {"assert", CommandKind::Assert},            {"check-sat", CommandKind::CheckSat},
      {"get-model", CommandKind::GetModel},       {"exit", CommandKind::Exit},
  };
  Script script;
  SExprReader reader(text);
  for (;;) {
    std::optional<SExpr> e;
    try {
      e = reader.next();
    } catch (const IncompleteInput& err) {
      throw ParseError(err.pos(), err.what());
    }
    if (!e) break;
    if (!e->is_list() || e->items.empty() || !e->items.front().is_symbol())
      throw ParseError(e->pos, "expected a command");
    auto it = names.find(e->items.front().text);
    if (it == names.end())
      throw ParseError(e->pos, "unsupported command '" + e->items.front().text + "'");
    SourcePos pos = e->pos;
    script.commands.push_back({it->second, std::move(*e), pos});
  }
  return script;
}

namespace {

void reject_reserved(const SExpr& e) {
  if (e.is_list()) {
    for (const auto& item : e.items) reject_reserved(item);
    return;
  }
  if (e.kind == SExpr::Kind::Symbol && e.text.rfind(kReservedPrefix, 0) == 0)
    throw ParseError(e.pos, "identifier '" + e.text + "' uses the reserved prefix '" +
                                std::string(kReservedPrefix) + "'");
}

class ScriptParser {
 public:
  ParseResult run(const Script& script, SourcePos end);

 private:
  void declare(const SExpr& at, const std::string& name, std::vector<Sort> params, Sort range);
  void add_assert(const Command& cmd);

  bool is_predicate_app(const TermPtr& t) const {
    return t->is_app() && predicate_names_.count(t->name()) != 0;
  }
  bool mentions_predicate(const TermPtr& t) const {
    bool found = false;
    visit(t, [&](const TermPtr& s) { found = found || is_predicate_app(s); });
    return found;
  }

  struct RawClause {
    std::vector<PredApp> body;
    std::vector<TermPtr> constraint;
    std::optional<PredApp> head;
    std::set<std::string> names;
  };

  TermPtr lift(const TermPtr& quantified, RawClause& rc);
  void add_body(const TermPtr& b, RawClause& rc, const SExpr& at);
  void analyze_head(const TermPtr& f, RawClause& rc, const SExpr& at);
  static PredApp atom_of(const TermPtr& t) { return {t->name(), t->args()}; }

  ParseResult result_;
  Signature sig_;
  std::set<std::string> predicate_names_;
  FreshNames fresh_{"z"};
  FreshNames lifted_{"q"};
};

void ScriptParser::declare(const SExpr& at, const std::string& name, std::vector<Sort> params,
                           Sort range) {
  if (is_builtin_symbol(name) || name == "true" || name == "false")
    throw ParseError(at.pos, "cannot redeclare theory symbol '" + name + "'");
  if (sig_.functions.count(name)) throw ParseError(at.pos, "'" + name + "' declared twice");
  sig_.functions.emplace(name, FunctionSymbol{name, params, range});
  if (range.is_bool()) {
    predicate_names_.insert(name);
    result_.system.predicates.push_back({name, std::move(params)});
  } else {
    result_.system.functions.push_back({name, std::move(params), std::move(range)});
  }
}

TermPtr ScriptParser::lift(const TermPtr& quantified, RawClause& rc) {
  Substitution rename;
  for (const auto& v : quantified->bound()) {
    if (rc.names.insert(v->name()).second) continue;
    TermPtr fresh = lifted_.fresh_var(v->sort());
    rename[v->name()] = fresh;
    rc.names.insert(fresh->name());
  }
  return substitute(quantified->body(), rename);
}

void ScriptParser::add_body(const TermPtr& b, RawClause& rc, const SExpr& at) {
  if (b->is_app("and")) {
    for (const auto& a : b->args()) add_body(a, rc, at);
  } else if (b->kind() == TermKind::Exists && mentions_predicate(b)) {
    add_body(lift(b, rc), rc, at);
  } else if (is_predicate_app(b)) {
    rc.body.push_back(atom_of(b));
  } else if (!mentions_predicate(b)) {
    if (!b->is_true()) rc.constraint.push_back(b);
  } else {
    throw NotHornError(at.pos, "predicate under negation, disjunction or quantifier in body: " +
                                   to_smtlib(b));
  }
}

void ScriptParser::analyze_head(const TermPtr& f, RawClause& rc, const SExpr& at) {
  if (f->kind() == TermKind::Forall) {
    analyze_head(lift(f, rc), rc, at);
  } else if (f->is_app("=>")) {
    const auto& args = f->args();
    for (std::size_t i = 0; i + 1 < args.size(); ++i) add_body(args[i], rc, at);
    analyze_head(args.back(), rc, at);
  } else if (f->is_app("not")) {
    add_body(f->args()[0], rc, at);
  } else if (f->is_false()) {
    // query with the body gathered so far
  } else if (is_predicate_app(f)) {
    rc.head = atom_of(f);
  } else if (!mentions_predicate(f)) {
    rc.constraint.push_back(simplify(mk_not(f)));
  } else if (f->is_app("or")) {
    throw NotHornError(at.pos, "disjunctive head: " + to_smtlib(f));
  } else {
    throw NotHornError(at.pos, "unsupported clause head: " + to_smtlib(f));
  }
}

void ScriptParser::add_assert(const Command& cmd) {
  if (cmd.expr.items.size() != 2) throw ParseError(cmd.pos, "assert takes one term");
  const SExpr& body = cmd.expr.items[1];
  TermPtr f = sexpr_to_term(body, sig_, {});
  if (!f->sort().is_bool()) throw ParseError(body.pos, "asserted term is not Bool");
  RawClause rc;
  analyze_head(f, rc, body);
  try {
    result_.system.clauses.push_back(
        normalize_clause(result_.system, std::move(rc.body), mk_and(std::move(rc.constraint)),
                         std::move(rc.head), fresh_,
                         static_cast<int>(result_.system.clauses.size())));
  } catch (const MalformedInput& err) {
    throw ParseError(body.pos, err.what());
  }
}

ParseResult ScriptParser::run(const Script& script, SourcePos end) {
  bool seen_logic = false;
  bool seen_check = false;
  for (const Command& cmd : script.commands) {
    const auto& items = cmd.expr.items;
    reject_reserved(cmd.expr);
    switch (cmd.kind) {
      case CommandKind::SetLogic:
        if (seen_logic) throw ParseError(cmd.pos, "set-logic given twice");
        if (items.size() != 2 || !items[1].is_symbol())
          throw ParseError(cmd.pos, "malformed set-logic");
        seen_logic = true;
        result_.system.logic = items[1].text;
        if (items[1].text != "HORN")
          result_.warnings.push_back(
              {cmd.pos, "warning", "unknown logic '" + items[1].text + "', treating as HORN"});
        break;
      case CommandKind::SetInfo:
        if (items.size() == 3 && items[1].kind == SExpr::Kind::Keyword &&
            items[1].text == ":status" && items[2].is_symbol())
          result_.status = items[2].text;
        break;
      case CommandKind::SetOption:
      case CommandKind::GetModel:
      case CommandKind::Exit:
        break;
      case CommandKind::DeclareSort: {
        if (items.size() != 3 || !items[1].is_symbol() || items[2].text != "0")
          throw ParseError(cmd.pos, "only (declare-sort S 0) is supported");
        if (sig_.sorts.count(items[1].text) || items[1].text == "Bool" ||
            items[1].text == "Int" || items[1].text == "Real" || items[1].text == "Array")
          throw ParseError(cmd.pos, "sort '" + items[1].text + "' declared twice");
        Sort s(items[1].text);
        sig_.sorts.emplace(items[1].text, s);
        result_.system.declared_sorts.push_back(s);
        break;
      }
      case CommandKind::DeclareFun: {
        if (items.size() != 4 || !items[1].is_symbol() || !items[2].is_list())
          throw ParseError(cmd.pos, "malformed declare-fun");
        std::vector<Sort> params;
        for (const auto& s : items[2].items) params.push_back(sexpr_to_sort(s, sig_));
        declare(cmd.expr, items[1].text, std::move(params), sexpr_to_sort(items[3], sig_));
        break;
      }
      case CommandKind::DeclareConst:
        if (items.size() != 3 || !items[1].is_symbol())
          throw ParseError(cmd.pos, "malformed declare-const");
        declare(cmd.expr, items[1].text, {}, sexpr_to_sort(items[2], sig_));
        break;
      case CommandKind::Assert:
        if (seen_check) throw ParseError(cmd.pos, "assert after check-sat");
        add_assert(cmd);
        break;
      case CommandKind::CheckSat:
        if (seen_check) throw ParseError(cmd.pos, "multiple check-sat commands");
        seen_check = true;
        break;
    }
  }
  if (!seen_check) throw ParseError(end, "missing check-sat");
  if (!seen_logic) result_.warnings.push_back({SourcePos{}, "warning", "missing set-logic"});
  return std::move(result_);
}

SourcePos end_of(std::string_view text) {
  SourcePos pos;
  for (char c : text) {
    if (c == '\n') {
      ++pos.line;
      pos.column = 1;
    } else {
      ++pos.column;
    }
  }
  return pos;
}

// Canonical per-clause renaming used by unparse.
class ClausePrinter {
 public:
  explicit ClausePrinter(const ChcSystem& system) {
    for (const auto& f : system.functions) taken_.insert(f.name);
    for (const auto& p : system.predicates) taken_.insert(p.name);
    stem_ = "x";
    auto clashes = [&] {
      for (const auto& t : taken_)
        if (t.rfind(stem_, 0) == 0) return true;
      return false;
    };
    while (clashes()) stem_ += "_";
  }

  std::string print(const HornClause& clause) const {
    Substitution rename;
    std::vector<TermPtr> order;
    auto note = [&](const TermPtr& t) {
      VarSet fv = free_vars(t);
      visit(t, [&](const TermPtr& s) {
        if (s->is_var() && !rename.count(s->name())) {
          if (!fv.count(s->name())) return;  // bound occurrence
          TermPtr v = mk_var(stem_ + std::to_string(order.size()), s->sort());
          rename[s->name()] = v;
          order.push_back(v);
        }
      });
    };
    if (clause.head)
      for (const auto& a : clause.head->args) note(a);
    for (const auto& atom : clause.body)
      for (const auto& a : atom.args) note(a);
    note(clause.constraint);

    auto atom = [&](const PredApp& p) {
      std::vector<TermPtr> args;
      for (const auto& a : p.args) args.push_back(substitute(a, rename));
      if (args.empty()) return quote_symbol(p.predicate);
      std::string s = "(" + quote_symbol(p.predicate);
      for (const auto& a : args) s += " " + to_smtlib(a);
      return s + ")";
    };
    std::vector<std::string> parts;
    for (const auto& b : clause.body) parts.push_back(atom(b));
    for (const auto& c : conjuncts(clause.constraint)) parts.push_back(to_smtlib(substitute(c, rename)));
    std::string antecedent;
    if (parts.empty()) {
      antecedent = "true";
    } else if (parts.size() == 1) {
      antecedent = parts.front();
    } else {
      antecedent = "(and";
      for (const auto& p : parts) antecedent += " " + p;
      antecedent += ")";
    }
    std::string matrix =
        "(=> " + antecedent + " " + (clause.head ? atom(*clause.head) : std::string("false")) + ")";
    if (order.empty()) return "(assert " + matrix + ")";
    std::string binders;
    for (std::size_t i = 0; i < order.size(); ++i)
      binders += (i ? " (" : "(") + quote_symbol(order[i]->name()) + " " +
                 order[i]->sort().to_string() + ")";
    return "(assert (forall (" + binders + ") " + matrix + "))";
  }

 private:
  std::set<std::string> taken_;
  std::string stem_;
};

}  // namespace

ParseResult parse(std::string_view text) {
  Script script = read_script(text);
  return ScriptParser{}.run(script, end_of(text));
}

std::string unparse(const ChcSystem& system) {
  std::ostringstream os;
  os << "(set-logic " << quote_symbol(system.logic) << ")\n";
  for (const auto& s : system.declared_sorts) os << "(declare-sort " << s << " 0)\n";
  auto sorts = [&](const std::vector<Sort>& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + v[i].to_string();
    return out + ")";
  };
  for (const auto& f : system.functions)
    os << "(declare-fun " << quote_symbol(f.name) << ' ' << sorts(f.param_sorts) << ' ' << f.range
       << ")\n";
  for (const auto& p : system.predicates)
    os << "(declare-fun " << quote_symbol(p.name) << ' ' << sorts(p.param_sorts) << " Bool)\n";
  ClausePrinter printer(system);
  for (const auto& c : system.clauses) os << printer.print(c) << '\n';
  os << "(check-sat)\n(exit)\n";
  return os.str();
}

}  // namespace chcta
