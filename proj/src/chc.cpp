#include "chcta/chc.hpp"

#include "chcta/errors.hpp"

#include <map>
#include <set>
#include <sstream>

namespace chcta {

const char* to_string(ClauseKind kind) {
  switch (kind) {
    case ClauseKind::Fact:
      return "fact";
    case ClauseKind::Definite:
      return "definite";
    case ClauseKind::Query:
      return "query";
  }
  return "?";
}

ClauseKind classify(const HornClause& clause) {
  if (!clause.head) return ClauseKind::Query;
  return clause.body.empty() ? ClauseKind::Fact : ClauseKind::Definite;
}

VarSet HornClause::variables() const {
  VarSet out = free_vars(constraint);
  auto add = [&](const PredApp& atom) {
    for (const auto& a : atom.args)
      for (auto& [n, s] : free_vars(a)) out.emplace(n, s);
  };
  for (const auto& atom : body) add(atom);
  if (head) add(*head);
  return out;
}

std::optional<std::size_t> ChcSystem::predicate_index(std::string_view name) const {
  for (std::size_t i = 0; i < predicates.size(); ++i)
    if (predicates[i].name == name) return i;
  return std::nullopt;
}

const PredicateSymbol& ChcSystem::predicate(std::string_view name) const {
  auto idx = predicate_index(name);
  if (!idx) throw MalformedInput("undeclared predicate '" + std::string(name) + "'");
  return predicates[*idx];
}

const HornClause& ChcSystem::clause(int id) const {
  if (id >= 0 && static_cast<std::size_t>(id) < clauses.size() && clauses[id].id == id)
    return clauses[id];
  for (const auto& c : clauses)
    if (c.id == id) return c;
  throw MalformedInput("no clause with id " + std::to_string(id));
}

TermPtr FreshNames::fresh_var(const Sort& sort) {
  return mk_var(std::string(kReservedPrefix) + stem_ + std::to_string(next_++), sort);
}

namespace {

void check_atom(const ChcSystem& signature, const PredApp& atom) {
  auto idx = signature.predicate_index(atom.predicate);
  if (!idx) throw MalformedInput("undeclared predicate '" + atom.predicate + "'");
  const PredicateSymbol& p = signature.predicates[*idx];
  if (p.arity() != atom.args.size())
    throw MalformedInput("predicate '" + p.name + "' expects " + std::to_string(p.arity()) +
                         " arguments, got " + std::to_string(atom.args.size()));
  for (std::size_t i = 0; i < atom.args.size(); ++i)
    if (atom.args[i]->sort() != p.param_sorts[i])
      throw MalformedInput("argument " + std::to_string(i) + " of '" + p.name + "' has sort " +
                           atom.args[i]->sort().to_string() + ", expected " +
                           p.param_sorts[i].to_string());
}

}  // namespace

HornClause normalize_clause(const ChcSystem& signature, std::vector<PredApp> raw_body,
                            TermPtr raw_constraint, std::optional<PredApp> raw_head,
                            FreshNames& fresh, int id) {
  if (!raw_constraint->sort().is_bool()) throw MalformedInput("clause constraint is not Bool");
  for (const auto& atom : raw_body) check_atom(signature, atom);
  if (raw_head) check_atom(signature, *raw_head);

  // A variable argument may stay in place only if it is its own unique
  // occurrence among all atom arguments of the clause.
  std::map<std::string, int> occurrences;
  auto count = [&](const PredApp& atom) {
    for (const auto& a : atom.args)
      if (a->is_var()) ++occurrences[a->name()];
  };
  for (const auto& atom : raw_body) count(atom);
  if (raw_head) count(*raw_head);

  std::vector<TermPtr> equalities;
  auto rewrite = [&](PredApp& atom) {
    for (auto& arg : atom.args) {
      if (arg->is_var() && occurrences[arg->name()] == 1) continue;
      TermPtr z = fresh.fresh_var(arg->sort());
      equalities.push_back(mk_eq(z, arg));
      arg = z;
    }
  };
  for (auto& atom : raw_body) rewrite(atom);
  if (raw_head) rewrite(*raw_head);

  HornClause clause;
  clause.id = id;
  clause.body = std::move(raw_body);
  clause.head = std::move(raw_head);
  if (equalities.empty()) {
    clause.constraint = raw_constraint;
  } else {
    std::vector<TermPtr> parts;
    if (raw_constraint->is_app("and"))
      parts = raw_constraint->args();
    else if (!raw_constraint->is_true())
      parts.push_back(raw_constraint);
    parts.insert(parts.end(), equalities.begin(), equalities.end());
    clause.constraint = mk_and(std::move(parts));
  }
  return clause;
}

bool is_normalized(const HornClause& clause) {
  std::set<std::string> seen;
  auto ok = [&](const PredApp& atom) {
    for (const auto& a : atom.args)
      if (!a->is_var() || !seen.insert(a->name()).second) return false;
    return true;
  };
  for (const auto& atom : clause.body)
    if (!ok(atom)) return false;
  return !clause.head || ok(*clause.head);
}

std::vector<Diagnostic> validate_system(const ChcSystem& system) {
  std::vector<Diagnostic> out;
  std::set<std::string> names;
  for (const auto& p : system.predicates) {
    if (!names.insert(p.name).second)
      out.push_back({std::nullopt, "duplicate predicate '" + p.name + "'"});
    if (is_builtin_symbol(p.name))
      out.push_back({std::nullopt, "predicate '" + p.name + "' shadows a theory symbol"});
  }
  for (const auto& f : system.functions)
    if (names.count(f.name))
      out.push_back({std::nullopt, "predicate '" + f.name + "' clashes with a function"});

  std::set<int> ids;
  for (const auto& c : system.clauses) {
    if (!ids.insert(c.id).second) out.push_back({c.id, "duplicate clause id"});
    auto check = [&](const PredApp& atom) {
      auto idx = system.predicate_index(atom.predicate);
      if (!idx) {
        out.push_back({c.id, "undeclared predicate '" + atom.predicate + "'"});
        return;
      }
      const auto& p = system.predicates[*idx];
      if (p.arity() != atom.args.size()) {
        out.push_back({c.id, "arity mismatch for '" + p.name + "'"});
        return;
      }
      for (std::size_t i = 0; i < p.arity(); ++i)
        if (atom.args[i]->sort() != p.param_sorts[i])
          out.push_back({c.id, "sort mismatch in argument " + std::to_string(i) + " of '" +
                                   p.name + "'"});
    };
    for (const auto& atom : c.body) check(atom);
    if (c.head) check(*c.head);
    if (!c.constraint->sort().is_bool()) out.push_back({c.id, "constraint is not Bool"});
    if (!is_normalized(c)) out.push_back({c.id, "clause is not in normal form"});
  }
  if (!ids.empty() && (*ids.begin() != 0 || *ids.rbegin() + 1 != static_cast<int>(ids.size())))
    if (ids.size() == system.clauses.size())
      out.push_back({std::nullopt, "clause ids are not dense"});
  return out;
}

std::string describe(const HornClause& clause) {
  std::ostringstream os;
  auto atom = [&](const PredApp& a) {
    os << a.predicate << '(';
    for (std::size_t i = 0; i < a.args.size(); ++i) os << (i ? "," : "") << *a.args[i];
    os << ')';
  };
  for (const auto& b : clause.body) {
    atom(b);
    os << " /\\ ";
  }
  os << *clause.constraint << " -> ";
  if (clause.head)
    atom(*clause.head);
  else
    os << "false";
  return os.str();
}

}  // namespace chcta
