#include "chcta/interpolation.hpp"

#include "chcta/errors.hpp"

#include <functional>
#include <set>

namespace chcta {

const char* to_string(InterpolationMode mode) {
  return mode == InterpolationMode::External ? "external" : "subtree";
}

std::vector<std::size_t> InterpolationProblem::post_order() const {
  std::vector<std::size_t> out;
  if (nodes.empty()) return out;
  std::function<void(std::size_t)> rec = [&](std::size_t n) {
    for (std::size_t c : nodes[n].children) rec(c);
    out.push_back(n);
  };
  rec(0);
  return out;
}

std::vector<TermPtr> InterpolationProblem::subtree_labels(std::size_t n) const {
  std::vector<TermPtr> out;
  std::vector<std::size_t> stack{n};
  while (!stack.empty()) {
    std::size_t m = stack.back();
    stack.pop_back();
    out.push_back(nodes[m].label);
    for (auto it = nodes[m].children.rbegin(); it != nodes[m].children.rend(); ++it)
      stack.push_back(*it);
  }
  return out;
}

namespace {

std::vector<std::size_t> parents(const InterpolationProblem& p) {
  std::vector<std::size_t> parent(p.nodes.size(), 0);
  for (std::size_t n = 0; n < p.nodes.size(); ++n)
    for (std::size_t c : p.nodes[n].children) parent[c] = n;
  return parent;
}

std::set<std::string> interface_names(const InterpolationNode& node) {
  std::set<std::string> out;
  for (const auto& v : node.interface) out.insert(v->name());
  return out;
}

std::vector<TermPtr> premises_of(const InterpolationProblem& p, const TreeInterpolant& t,
                                 std::size_t n) {
  std::vector<TermPtr> out;
  for (std::size_t c : p.nodes[n].children) out.push_back(t.formulas[c]);
  out.push_back(p.nodes[n].label);
  return out;
}

std::optional<TreeInterpolant> external_binary(const InterpolationProblem& p,
                                               SolverHandle& solver) {
  std::size_t n_nodes = p.nodes.size();
  TreeInterpolant t{std::vector<TermPtr>(n_nodes, mk_false())};
  std::vector<bool> processed(n_nodes, false);
  std::vector<bool> inside(n_nodes, false);

  for (std::size_t n : p.post_order()) {
    if (n == 0) break;
    std::vector<TermPtr> a = premises_of(p, t, n);

    std::fill(inside.begin(), inside.end(), false);
    std::vector<std::size_t> stack{n};
    while (!stack.empty()) {
      std::size_t m = stack.back();
      stack.pop_back();
      inside[m] = true;
      for (std::size_t c : p.nodes[m].children) stack.push_back(c);
    }
    // Everything outside the subtree, with finished subtrees summarized
    // by their interpolants.
    std::vector<TermPtr> b;
    stack = {0};
    while (!stack.empty()) {
      std::size_t m = stack.back();
      stack.pop_back();
      if (inside[m]) continue;
      if (processed[m]) {
        b.push_back(t.formulas[m]);
        continue;
      }
      b.push_back(p.nodes[m].label);
      for (std::size_t c : p.nodes[m].children) stack.push_back(c);
    }
    auto itp = solver.binary_interpolant(mk_and(a), mk_and(b));
    if (!itp) return std::nullopt;
    t.formulas[n] = simplify(*itp);
    processed[n] = true;
  }
  return t;
}

std::optional<TreeInterpolant> external_tree(const InterpolationProblem& p, SolverHandle& solver) {
  std::vector<NamedTerm> partitions;
  std::vector<std::size_t> order = p.post_order();
  for (std::size_t n : order) partitions.push_back({"p" + std::to_string(n), p.nodes[n].label});

  std::function<std::string(std::size_t)> pattern = [&](std::size_t n) {
    std::string out;
    const auto& kids = p.nodes[n].children;
    for (std::size_t i = 0; i < kids.size(); ++i)
      out += i == 0 ? pattern(kids[i]) + " " : "(" + pattern(kids[i]) + ") ";
    return out + "p" + std::to_string(n);
  };
  auto result = solver.tree_interpolants_command(partitions, pattern(0));
  if (!result || result->size() + 1 != order.size()) return std::nullopt;
  TreeInterpolant t{std::vector<TermPtr>(p.nodes.size(), mk_false())};
  for (std::size_t i = 0; i + 1 < order.size(); ++i) t.formulas[order[i]] = simplify((*result)[i]);
  return t;
}

bool verified(const InterpolationProblem& p, const TreeInterpolant& t, SolverHandle& solver,
              InterpolationReport* report) {
  VerificationResult v = verify_tree_interpolant(p, t, solver);
  if (v.validity == Validity::Valid && report) report->verified_nodes += p.nodes.size();
  return v.validity == Validity::Valid;
}

std::vector<TermPtr> split_conjuncts(const TermPtr& f) {
  std::vector<TermPtr> out;
  for (const auto& c : conjuncts(f)) {
    if (c->is_app("=") && c->args().size() == 2 && c->args()[0]->sort().is_numeric()) {
      out.push_back(mk_app("<=", c->args()));
      out.push_back(mk_app(">=", c->args()));
    } else {
      out.push_back(c);
    }
  }
  return out;
}

TreeInterpolant weaken(const InterpolationProblem& p, TreeInterpolant t, SolverHandle& solver,
                       InterpolationReport* report) {
  std::vector<std::size_t> parent = parents(p);
  std::vector<std::size_t> pre;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    std::size_t m = stack.back();
    stack.pop_back();
    pre.push_back(m);
    for (auto it = p.nodes[m].children.rbegin(); it != p.nodes[m].children.rend(); ++it)
      stack.push_back(*it);
  }
  for (std::size_t n : pre) {
    if (n == 0) continue;
    std::size_t up = parent[n];
    std::vector<TermPtr> parts = split_conjuncts(t.formulas[n]);
    for (std::size_t i = 0; i < parts.size();) {
      std::vector<TermPtr> rest = parts;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
      TreeInterpolant candidate = t;
      candidate.formulas[n] = mk_and(rest);
      if (solver.check_validity(premises_of(p, candidate, up), t.formulas[up]) ==
          Validity::Valid) {
        parts = std::move(rest);
        t = std::move(candidate);
        if (report) ++report->weakened_conjuncts;
      } else {
        ++i;
      }
    }
    t.formulas[n] = simplify(mk_and(parts));
  }
  return t;
}

}  // namespace

TreeInterpolant subtree_interpolants(const InterpolationProblem& p) {
  TreeInterpolant t{std::vector<TermPtr>(p.nodes.size(), mk_false())};
  for (std::size_t n = 1; n < p.nodes.size(); ++n) {
    TermPtr body = mk_and(p.subtree_labels(n));
    std::set<std::string> keep = interface_names(p.nodes[n]);
    std::vector<TermPtr> hidden;
    for (const auto& [name, sort] : free_vars(body))
      if (!keep.count(name)) hidden.push_back(mk_var(name, sort));
    t.formulas[n] = simplify(mk_exists(std::move(hidden), body));
  }
  return t;
}

VerificationResult verify_tree_interpolant(const InterpolationProblem& p, const TreeInterpolant& t,
                                           SolverHandle& solver) {
  VerificationResult out;
  if (t.formulas.size() != p.nodes.size()) {
    out.validity = Validity::Invalid;
    out.reason = "wrong number of formulas";
    return out;
  }
  for (std::size_t n = 0; n < p.nodes.size(); ++n) {
    std::set<std::string> allowed = interface_names(p.nodes[n]);
    for (const auto& [name, sort] : free_vars(t.formulas[n]))
      if (!allowed.count(name)) {
        out.validity = Validity::Invalid;
        out.node = n;
        out.reason = "formula mentions non-interface variable " + name;
        return out;
      }
  }
  auto fail = [&](std::size_t n, Validity v, const std::string& what) {
    out.validity = v == Validity::Unknown ? Validity::Unknown : Validity::Invalid;
    out.node = n;
    out.reason = what + (v == Validity::Unknown ? " is undecided" : " does not hold");
    return out;
  };
  Validity root = solver.check_validity({t.formulas[0]}, mk_false());
  if (root != Validity::Valid) return fail(0, root, "root formula unsatisfiability");
  for (std::size_t n : p.post_order()) {
    Validity v = solver.check_validity(premises_of(p, t, n), t.formulas[n]);
    if (v != Validity::Valid)
      return fail(n, v, p.nodes[n].children.empty() ? "leaf implication" : "inner implication");
  }
  return out;
}

TreeInterpolant tree_interpolants(const InterpolationProblem& p, const InterpolationOptions& opts,
                                  SolverHandle& solver, InterpolationReport* report) {
  if (p.nodes.empty()) throw MalformedInput("empty interpolation problem");
  InterpolationReport local;
  InterpolationReport& rep = report ? *report : local;
  rep.used = opts.mode;

  std::optional<TreeInterpolant> t;
  if (opts.mode == InterpolationMode::External) {
    switch (solver.dialect()) {
      case InterpolationDialect::Tree:
        t = external_tree(p, solver);
        break;
      case InterpolationDialect::None:
        break;
      default:
        t = external_binary(p, solver);
        break;
    }
    if (!t) {
      rep.used = InterpolationMode::Subtree;
      rep.notice = "solver provides no interpolants; using subtree summaries";
    }
  }
  if (!t) t = subtree_interpolants(p);

  VerificationResult v = verify_tree_interpolant(p, *t, solver);
  if (v.validity == Validity::Unknown) throw SolverUnknown("interpolant check: " + v.reason);
  if (v.validity == Validity::Invalid)
    throw BackendError("bad interpolant at node " + std::to_string(v.node) + ": " + v.reason,
                       solver.transcript());
  rep.verified_nodes += p.nodes.size();

  if (opts.eliminate_quantifiers) {
    TreeInterpolant q = *t;
    bool changed = false;
    for (std::size_t n = 1; n < p.nodes.size(); ++n) {
      if (!has_quantifier(q.formulas[n])) continue;
      if (auto f = solver.eliminate_quantifiers(q.formulas[n])) {
        q.formulas[n] = simplify(*f);
        changed = true;
      }
    }
    if (changed && verified(p, q, solver, &rep)) t = std::move(q);
  }
  if (opts.weaken) {
    TreeInterpolant w = weaken(p, *t, solver, &rep);
    if (verified(p, w, solver, &rep)) t = std::move(w);
  }
  return *t;
}

}  // namespace chcta
