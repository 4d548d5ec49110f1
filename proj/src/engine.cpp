#include "chcta/engine.hpp"

#include "chcta/errors.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace chcta {

const char* to_string(MinimizeMode mode) {
  switch (mode) {
    case MinimizeMode::None: return "none";
    case MinimizeMode::Naive: return "naive";
    case MinimizeMode::Bisim: return "bisim";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Sat: return "sat";
    case Verdict::Unsat: return "unsat";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

std::string EngineStats::to_key_value() const {
  std::ostringstream os;
  os << "iterations=" << iterations << "\n"
     << "peak_states=" << peak_states << "\n"
     << "rule_queries=" << rule_queries << "\n"
     << "trivial_rules=" << trivial_rules << "\n"
     << "unknown_rules=" << unknown_rules << "\n"
     << "smt_queries=" << smt_queries << "\n"
     << "smt_timeouts=" << smt_timeouts << "\n"
     << "interpolants_verified=" << interpolants_verified << "\n"
     << "weakened_conjuncts=" << weakened_conjuncts << "\n"
     << "witness_rechecks=" << witness_rechecks << "\n"
     << "model_checks=" << model_checks << "\n"
     << "wall_ms=" << static_cast<long long>(wall_ms) << "\n";
  for (std::size_t k = 0; k < per_iteration.size(); ++k) {
    const IterationStats& it = per_iteration[k];
    std::string p = "iter." + std::to_string(k + 1) + ".";
    os << p << "a_states=" << it.a_states << "\n"
       << p << "a_rules=" << it.a_rules << "\n"
       << p << "g_states=" << it.g_states << "\n"
       << p << "g_rules=" << it.g_rules << "\n"
       << p << "rule_queries=" << it.rule_queries << "\n"
       << p << "smt_queries=" << it.smt_queries << "\n"
       << p << "witness_size=" << it.witness_size << "\n"
       << p << "wall_ms=" << static_cast<long long>(it.wall_ms) << "\n";
  }
  return os.str();
}

namespace {

Substitution params_to(const PredApp& atom) {
  Substitution sigma;
  for (std::size_t j = 0; j < atom.args.size(); ++j)
    sigma[canonical_param(j, atom.args[j]->sort())->name()] = atom.args[j];
  return sigma;
}

TermPtr interpretation(const PredicateModel& model, const PredApp& atom) {
  auto it = model.find(atom.predicate);
  if (it == model.end()) throw MalformedInput("model has no entry for " + atom.predicate);
  return substitute(it->second, params_to(atom));
}

using Subset = std::vector<StateId>;

struct ProductState {
  std::vector<Subset> parts;
  friend auto operator<=>(const ProductState&, const ProductState&) = default;
};

class ProductLimit : public Error {
 public:
  using Error::Error;
};

}  // namespace

Validity check_model(const ChcSystem& s, const PredicateModel& model, SolverHandle& solver) {
  Validity worst = Validity::Valid;
  for (const auto& c : s.clauses) {
    std::vector<TermPtr> premises;
    for (const auto& atom : c.body) premises.push_back(interpretation(model, atom));
    premises.push_back(c.constraint);
    TermPtr conclusion = c.head ? interpretation(model, *c.head) : mk_false();
    Validity v = solver.check_validity(premises, conclusion);
    if (v == Validity::Invalid) return v;
    if (v == Validity::Unknown) worst = v;
  }
  return worst;
}

std::optional<PredicateModel> extract_model(
    const ChcSystem& s, const std::vector<std::unique_ptr<InterpolantAutomaton>>& history,
    SolverHandle& solver, std::size_t product_limit, std::size_t* checks) {
  std::size_t k = history.size();
  std::map<std::string, std::vector<ProductState>> states;
  std::map<std::string, std::set<ProductState>> seen;
  for (const auto& p : s.predicates) states[p.name];

  std::size_t total = 0;
  std::size_t work = 0;
  try {
    bool changed = true;
    std::map<std::string, std::size_t> old_size;
    bool first = true;
    while (changed) {
      changed = false;
      std::map<std::string, std::size_t> frontier = old_size;
      for (const auto& [name, list] : states) old_size[name] = list.size();
      for (const auto& c : s.clauses) {
        if (!c.head) continue;
        std::vector<const std::vector<ProductState>*> lists;
        bool empty = false;
        for (const auto& atom : c.body) {
          lists.push_back(&states[atom.predicate]);
          if (lists.back()->empty()) empty = true;
        }
        if (empty) continue;
        std::vector<std::size_t> sizes;
        for (auto* l : lists) sizes.push_back(l->size());
        std::vector<std::size_t> pos(lists.size(), 0);
        for (;;) {
          bool fresh = first || c.body.empty();
          for (std::size_t i = 0; i < pos.size() && !fresh; ++i)
            fresh = pos[i] >= frontier[c.body[i].predicate];
          if (fresh) {
            if (++work > product_limit * 50) throw ProductLimit("model product too large");
            ProductState target;
            for (std::size_t g = 0; g < k; ++g) {
              std::set<StateId> out;
              std::vector<const Subset*> parts;
              bool none = false;
              for (std::size_t i = 0; i < pos.size(); ++i) {
                parts.push_back(&(*lists[i])[pos[i]].parts[g]);
                if (parts.back()->empty()) none = true;
              }
              if (!none) {
                std::vector<std::size_t> mp(parts.size(), 0);
                for (;;) {
                  std::vector<StateId> tuple;
                  for (std::size_t i = 0; i < parts.size(); ++i) tuple.push_back((*parts[i])[mp[i]]);
                  for (StateId t : history[g]->targets(tuple, {c.id, c.rank()})) out.insert(t);
                  std::size_t i = parts.size();
                  while (i > 0 && ++mp[i - 1] == parts[i - 1]->size()) mp[--i] = 0;
                  if (i == 0) break;
                }
              }
              target.parts.emplace_back(out.begin(), out.end());
            }
            const std::string& head = c.head->predicate;
            if (seen[head].insert(target).second) {
              states[head].push_back(std::move(target));
              changed = true;
              if (++total > product_limit) throw ProductLimit("model product too large");
            }
          }
          std::size_t i = pos.size();
          while (i > 0 && ++pos[i - 1] == sizes[i - 1]) pos[--i] = 0;
          if (i == 0) break;
        }
      }
      first = false;
    }
  } catch (const ProductLimit&) {
    return std::nullopt;
  }

  PredicateModel model;
  for (const auto& p : s.predicates) {
    std::vector<std::map<std::string, TermPtr>> cubes;
    for (const auto& ps : states[p.name]) {
      std::map<std::string, TermPtr> cube;
      for (std::size_t g = 0; g < k; ++g)
        for (StateId q : ps.parts[g]) {
          TermPtr f = simplify(history[g]->formula(q));
          if (!f->is_true()) cube.emplace(to_smtlib(f), f);
        }
      cubes.push_back(std::move(cube));
    }
    // A disjunct implied by a smaller one is redundant.
    auto covers = [](const auto& small, const auto& big) {
      return std::includes(big.begin(), big.end(), small.begin(), small.end(),
                           [](const auto& a, const auto& b) { return a.first < b.first; });
    };
    std::vector<TermPtr> disjuncts;
    for (std::size_t i = 0; i < cubes.size(); ++i) {
      bool redundant = false;
      for (std::size_t j = 0; j < cubes.size() && !redundant; ++j)
        if (j != i && covers(cubes[j], cubes[i]) && (cubes[j].size() < cubes[i].size() || j < i))
          redundant = true;
      if (redundant) continue;
      std::vector<TermPtr> conj;
      for (const auto& [key, f] : cubes[i]) conj.push_back(f);
      disjuncts.push_back(mk_and(std::move(conj)));
    }
    model[p.name] = simplify(mk_or(std::move(disjuncts)));
  }
  if (checks) *checks += s.clauses.size();
  if (check_model(s, model, solver) != Validity::Valid) return std::nullopt;
  return model;
}

std::string format_model(const ChcSystem& s, const PredicateModel& model) {
  std::ostringstream os;
  for (const auto& p : s.predicates) {
    auto it = model.find(p.name);
    if (it == model.end()) continue;
    os << "(define-fun " << quote_symbol(p.name) << " (";
    for (std::size_t j = 0; j < p.arity(); ++j) {
      TermPtr v = canonical_param(j, p.param_sorts[j]);
      os << (j ? " " : "") << "(" << quote_symbol(v->name()) << " " << p.param_sorts[j] << ")";
    }
    os << ") Bool " << to_smtlib(it->second) << ")\n";
  }
  return os.str();
}

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
  if (config_.max_iterations == 0) throw MalformedInput("max_iterations must be positive");
  if (config_.timeout && config_.timeout->count() <= 0)
    throw MalformedInput("timeout must be positive");
}

SolveOutcome Engine::solve(const ChcSystem& s) {
  using Clock = std::chrono::steady_clock;
  auto start = Clock::now();
  auto ms_since = [](Clock::time_point t) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
  };
  std::optional<Clock::time_point> deadline;
  if (config_.timeout) deadline = start + *config_.timeout;
  auto expired = [&] { return deadline && Clock::now() >= *deadline; };

  SolveOutcome out;
  EngineStats& st = out.stats;
  SolverHandle solver(config_.solver);
  solver.set_deadline(deadline);

  TreeAutomaton a = build_initial_automaton(s);
  st.peak_states = a.num_states();
  std::vector<std::unique_ptr<InterpolantAutomaton>> history;
  std::set<std::string> sampled;

  auto finish_rule_stats = [&] {
    st.rule_queries = st.trivial_rules = st.unknown_rules = 0;
    for (const auto& g : history) {
      st.rule_queries += g->stats().rule_queries;
      st.trivial_rules += g->stats().trivial_rules;
      st.unknown_rules += g->stats().unknown_rules;
    }
  };

  try {
    for (;;) {
      std::optional<Tree> w = sample_witness(a);
      if (!w) {
        out.verdict = Verdict::Sat;
        break;
      }
      if (st.iterations >= config_.max_iterations) {
        out.reason = "iteration limit reached";
        break;
      }
      if (expired()) {
        out.reason = "timeout";
        break;
      }
      auto iter_start = Clock::now();
      std::size_t queries_before = solver.stats().queries;
      ++st.iterations;
      if (!sampled.insert(w->to_string()).second)
        throw InvariantViolation("derivation sampled twice: " + w->to_string());

      DerivationTree d = instantiate(*w, s);
      Feasibility f = check_feasibility(d, s, solver);
      if (f.feasible) {
        SolverHandle fresh(config_.solver);
        ++st.witness_rechecks;
        if (!check_feasibility(d, s, fresh).feasible) {
          out.reason = "counterexample failed the independent re-check";
          break;
        }
        out.verdict = Verdict::Unsat;
        out.witness = UnsatWitness{std::move(d), std::move(f.assignment)};
        break;
      }

      InterpolationProblem problem = derivation_constraints(d, s);
      InterpolationReport report;
      TreeInterpolant itp = tree_interpolants(problem, config_.interpolation, solver, &report);
      st.interpolants_verified += report.verified_nodes;
      st.weakened_conjuncts += report.weakened_conjuncts;
      if (!report.notice.empty()) st.interpolation_notice = report.notice;

      auto g = generalize(d, itp, s, solver, config_.semantic_dedup);
      g->set_interrupt([&] {
        if (expired()) throw SolverUnknown("timeout");
      });
      IterationStats is;
      is.witness_size = w->size();
      TreeAutomaton next;
      if (config_.on_demand) {
        next = difference_lazy(a, *g);
        is.g_rules = g->known_rules();
      } else {
        TreeAutomaton gm = g->materialize();
        is.g_rules = gm.num_rules();
        next = difference(a, gm);
      }
      is.g_states = g->num_states();
      is.rule_queries = g->stats().rule_queries;
      if (accepts(next, *w))
        throw InvariantViolation("subtraction kept the sampled derivation " + w->to_string());

      switch (config_.minimize) {
        case MinimizeMode::None: break;
        case MinimizeMode::Naive: next = minimize_naive(next); break;
        case MinimizeMode::Bisim: next = minimize_bisim(next); break;
      }
      if (observer_) observer_({st.iterations, *w, a, next});
      a = std::move(next);
      history.push_back(std::move(g));

      is.a_states = a.num_states();
      is.a_rules = a.num_rules();
      is.smt_queries = solver.stats().queries - queries_before;
      is.wall_ms = ms_since(iter_start);
      st.per_iteration.push_back(is);
      st.peak_states = std::max(st.peak_states, a.num_states());
    }
  } catch (const OracleError& e) {
    out.verdict = Verdict::Unknown;
    out.reason = expired() ? "timeout" : std::string("rule oracle failed: ") + e.what();
  } catch (const SolverUnknown& e) {
    out.verdict = Verdict::Unknown;
    out.reason = expired() ? "timeout" : std::string("solver unknown: ") + e.what();
  } catch (const BackendError& e) {
    out.verdict = Verdict::Unknown;
    out.reason = std::string("solver failure: ") + e.what();
  }
  finish_rule_stats();

  if (out.verdict == Verdict::Sat && config_.extract_model) {
    try {
      if (solver.alive()) {
        out.model = extract_model(s, history, solver, config_.model_product_limit,
                                  &st.model_checks);
      }
    } catch (const OracleError&) {
    } catch (const SolverUnknown&) {
    } catch (const BackendError&) {
    }
  }
  st.smt_queries = solver.stats().queries + st.witness_rechecks;
  st.smt_timeouts = solver.stats().timeouts;
  st.wall_ms = ms_since(start);
  return out;
}

}  // namespace chcta
