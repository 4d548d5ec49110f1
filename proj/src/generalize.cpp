#include "chcta/generalize.hpp"

#include "chcta/errors.hpp"

#include <algorithm>

namespace chcta {

TermPtr canonical_param(std::size_t i, const Sort& sort) {
  return mk_var(std::string(kReservedPrefix) + "p" + std::to_string(i), sort);
}

TermPtr canonical_form(const TermPtr& formula) { return simplify(formula); }

namespace {

std::vector<Sort> sorts_of(const ChcSystem& s, const PredApp& atom) {
  return s.predicate(atom.predicate).param_sorts;
}

/// Maps the canonical parameters to the arguments of `atom`.
Substitution params_to(const PredApp& atom) {
  Substitution sigma;
  for (std::size_t j = 0; j < atom.args.size(); ++j)
    sigma[canonical_param(j, atom.args[j]->sort())->name()] = atom.args[j];
  return sigma;
}

}  // namespace

InterpolantAutomaton::InterpolantAutomaton(const ChcSystem& s, SolverHandle& solver)
    : system_(s), solver_(solver), alphabet_(clause_alphabet(s)) {
  std::sort(alphabet_.begin(), alphabet_.end());
  formulas_ = {mk_false(), mk_true()};
  signatures_ = {{}, {}};
}

StateId InterpolantAutomaton::intern(const std::vector<Sort>& signature, const TermPtr& formula) {
  TermPtr f = canonical_form(formula);
  if (f->is_false()) return kFalse;
  if (f->is_true()) return kTrue;
  std::string key;
  for (const auto& sort : signature) key += sort.to_string() + " ";
  key += "| " + to_smtlib(f);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  if (semantic_dedup_) {
    for (StateId q = 2; q < formulas_.size(); ++q) {
      if (signatures_[q] != signature) continue;
      if (interrupt_) interrupt_();
      if (solver_.check_validity({f}, formulas_[q]) == Validity::Valid &&
          solver_.check_validity({formulas_[q]}, f) == Validity::Valid) {
        index_.emplace(key, q);
        return q;
      }
    }
  }
  StateId q = static_cast<StateId>(formulas_.size());
  formulas_.push_back(f);
  signatures_.push_back(signature);
  index_.emplace(key, q);
  return q;
}

void InterpolantAutomaton::assume_rule(std::vector<StateId> sources, int clause_id,
                                       StateId target) {
  cache_[{std::move(sources), clause_id, target}] = true;
}

bool InterpolantAutomaton::compatible(StateId q, const std::vector<Sort>& sorts) const {
  return q == kFalse || q == kTrue || signatures_.at(q) == sorts;
}

std::string InterpolantAutomaton::label(StateId q) const {
  return to_smtlib(formulas_.at(q));
}

bool InterpolantAutomaton::valid(const std::vector<StateId>& sources, const HornClause& clause,
                                 StateId target) {
  if (target == kTrue && !clause.is_query()) {
    ++stats_.trivial_rules;
    return true;
  }
  if (std::find(sources.begin(), sources.end(), kFalse) != sources.end()) {
    ++stats_.trivial_rules;
    return true;
  }
  auto key = std::make_tuple(sources, clause.id, target);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;

  std::vector<TermPtr> premises;
  for (std::size_t i = 0; i < sources.size(); ++i)
    if (sources[i] != kTrue)
      premises.push_back(substitute(formulas_[sources[i]], params_to(clause.body[i])));
  premises.push_back(clause.constraint);
  TermPtr conclusion =
      target == kFalse ? mk_false() : substitute(formulas_[target], params_to(*clause.head));

  if (interrupt_) interrupt_();
  ++stats_.rule_queries;
  Validity v = solver_.check_validity(premises, conclusion);
  if (v == Validity::Unknown) ++stats_.unknown_rules;
  bool ok = v == Validity::Valid;
  cache_.emplace(key, ok);
  return ok;
}

std::vector<StateId> InterpolantAutomaton::targets(std::span<const StateId> sources,
                                                   const RankedSymbol& symbol) {
  const HornClause* clause = nullptr;
  for (const auto& c : system_.clauses)
    if (c.id == symbol.clause_id) clause = &c;
  if (!clause || clause->rank() != symbol.rank || sources.size() != symbol.rank) return {};
  for (std::size_t i = 0; i < sources.size(); ++i)
    if (!compatible(sources[i], sorts_of(system_, clause->body[i]))) return {};

  std::vector<StateId> key_sources(sources.begin(), sources.end());
  auto key = std::make_pair(key_sources, clause->id);
  if (auto it = answers_.find(key); it != answers_.end()) return it->second;

  std::vector<StateId> out;
  if (clause->is_query()) {
    if (valid(key_sources, *clause, kFalse)) out.push_back(kFalse);
  } else {
    std::vector<Sort> head = sorts_of(system_, *clause->head);
    for (StateId q = 0; q < formulas_.size(); ++q)
      if (compatible(q, head) && valid(key_sources, *clause, q)) out.push_back(q);
  }
  answers_.emplace(key, out);
  return out;
}

TreeAutomaton InterpolantAutomaton::materialize() {
  TreeAutomaton a(alphabet_);
  for (StateId q = 0; q < formulas_.size(); ++q) a.add_state(label(q));
  a.set_accepting(kFalse);
  for (const auto& c : system_.clauses) {
    RankedSymbol sym{c.id, c.rank()};
    std::vector<std::vector<StateId>> options;
    for (const auto& atom : c.body) {
      std::vector<StateId> ok;
      std::vector<Sort> sorts = sorts_of(system_, atom);
      for (StateId q = 0; q < formulas_.size(); ++q)
        if (compatible(q, sorts)) ok.push_back(q);
      options.push_back(std::move(ok));
    }
    std::vector<std::size_t> pos(options.size(), 0);
    for (;;) {
      std::vector<StateId> tuple;
      for (std::size_t i = 0; i < options.size(); ++i) tuple.push_back(options[i][pos[i]]);
      for (StateId t : targets(tuple, sym)) a.add_rule(tuple, sym, t);
      std::size_t i = options.size();
      while (i > 0 && ++pos[i - 1] == options[i - 1].size()) pos[--i] = 0;
      if (i == 0) break;
    }
  }
  return a;
}

std::size_t InterpolantAutomaton::known_rules() const {
  std::size_t n = 0;
  for (const auto& [key, targets] : answers_) n += targets.size();
  return n;
}

std::unique_ptr<InterpolantAutomaton> generalize(const DerivationTree& d,
                                                 const TreeInterpolant& itp, const ChcSystem& s,
                                                 SolverHandle& solver, bool semantic_dedup) {
  if (itp.formulas.size() != d.size())
    throw MalformedInput("interpolant does not match the derivation");
  auto g = std::make_unique<InterpolantAutomaton>(s, solver);
  g->set_semantic_dedup(semantic_dedup);
  std::vector<StateId> state(d.size(), InterpolantAutomaton::kFalse);
  for (std::size_t n = 1; n < d.size(); ++n) {
    Substitution to_params;
    std::vector<Sort> signature;
    for (std::size_t j = 0; j < d.interfaces[n].size(); ++j) {
      const TermPtr& v = d.interfaces[n][j];
      to_params[v->name()] = canonical_param(j, v->sort());
      signature.push_back(v->sort());
    }
    state[n] = g->intern(signature, substitute(itp.formulas[n], to_params));
  }
  for (std::size_t n = 0; n < d.size(); ++n) {
    std::vector<StateId> sources;
    for (std::size_t c : d.children[n]) sources.push_back(state[c]);
    g->assume_rule(std::move(sources), d.clauses[n], state[n]);
  }
  return g;
}

}  // namespace chcta
