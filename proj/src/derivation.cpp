#include "chcta/derivation.hpp"

#include "chcta/errors.hpp"

#include <algorithm>

namespace chcta {

std::vector<RankedSymbol> clause_alphabet(const ChcSystem& s) {
  std::vector<RankedSymbol> out;
  for (const auto& c : s.clauses) out.push_back({c.id, c.rank()});
  return out;
}

TreeAutomaton build_initial_automaton(const ChcSystem& s) {
  TreeAutomaton a(clause_alphabet(s));
  for (const auto& p : s.predicates) a.add_state(p.name);
  StateId q_false = a.add_state("false");
  a.set_accepting(q_false);
  auto state_of = [&](const std::string& name) {
    auto idx = s.predicate_index(name);
    if (!idx) throw MalformedInput("undeclared predicate " + name);
    return static_cast<StateId>(*idx);
  };
  for (const auto& c : s.clauses) {
    std::vector<StateId> sources;
    for (const auto& atom : c.body) sources.push_back(state_of(atom.predicate));
    a.add_rule(std::move(sources), {c.id, c.rank()}, c.head ? state_of(c.head->predicate) : q_false);
  }
  return a;
}

namespace {

std::string instance_name(std::size_t node, const std::string& var) {
  return std::string(kReservedPrefix) + std::to_string(node) + "!" + var;
}

const HornClause* find_clause(const ChcSystem& s, int id) {
  for (const auto& c : s.clauses)
    if (c.id == id) return &c;
  return nullptr;
}

}  // namespace

DerivationTree instantiate(const Tree& t, const ChcSystem& s) {
  DerivationTree d;
  d.tree = t;

  struct Frame {
    const Tree* node;
    std::size_t parent;
    std::size_t slot;
  };
  std::vector<Frame> stack{{&t, 0, 0}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    std::size_t n = d.clauses.size();
    auto bad = [&](const std::string& why) {
      return MalformedInput("derivation node " + std::to_string(n) + ": " + why);
    };
    const HornClause* c = find_clause(s, f.node->symbol.clause_id);
    if (!c) throw bad("unknown clause " + std::to_string(f.node->symbol.clause_id));
    if (f.node->children.size() != c->rank() || f.node->symbol.rank != c->rank())
      throw bad("clause " + std::to_string(c->id) + " has " + std::to_string(c->rank()) +
                " body atoms but the node has " + std::to_string(f.node->children.size()) +
                " children");

    d.clauses.push_back(c->id);
    d.children.emplace_back();
    Substitution inst;
    std::vector<TermPtr> interface;
    if (n == 0) {
      if (!c->is_query()) throw bad("root clause " + std::to_string(c->id) + " is not a query");
    } else {
      const HornClause& pc = s.clause(d.clauses[f.parent]);
      const PredApp& expected = pc.body[f.slot];
      if (c->is_query() || c->head->predicate != expected.predicate)
        throw bad("head of clause " + std::to_string(c->id) + " does not match body atom " +
                  expected.predicate + " of the parent");
      d.children[f.parent].push_back(n);
      for (std::size_t j = 0; j < expected.args.size(); ++j) {
        TermPtr shared = d.instances[f.parent].at(expected.args[j]->name());
        inst[c->head->args[j]->name()] = shared;
        interface.push_back(shared);
      }
    }
    for (const auto& [name, sort] : c->variables())
      if (!inst.count(name)) inst[name] = mk_var(instance_name(n, name), sort);
    d.instances.push_back(std::move(inst));
    d.interfaces.push_back(std::move(interface));

    for (std::size_t i = f.node->children.size(); i-- > 0;)
      stack.push_back({&f.node->children[i], n, i});
  }
  return d;
}

InterpolationProblem derivation_constraints(const DerivationTree& d, const ChcSystem& s) {
  InterpolationProblem p;
  for (std::size_t n = 0; n < d.size(); ++n) {
    const HornClause& c = s.clause(d.clauses[n]);
    p.nodes.push_back({substitute(c.constraint, d.instances[n]), d.interfaces[n], d.children[n]});
  }
  return p;
}

Feasibility check_feasibility(const DerivationTree& d, const ChcSystem& s, SolverHandle& solver) {
  InterpolationProblem p = derivation_constraints(d, s);
  std::vector<TermPtr> labels;
  for (const auto& node : p.nodes) labels.push_back(node.label);
  SmtVerdict v = solver.check_sat(labels, true);
  if (v.is_unknown()) throw SolverUnknown("feasibility check: " + v.reason);
  Feasibility out;
  out.feasible = v.is_sat();
  for (auto& [name, value] : v.model)
    if (name.starts_with(kReservedPrefix)) out.assignment.emplace(name, std::move(value));
  return out;
}

}  // namespace chcta
