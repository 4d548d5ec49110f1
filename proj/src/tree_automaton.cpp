#include "chcta/tree_automaton.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <memory>
#include <set>
#include <sstream>

namespace chcta {

std::size_t Tree::height() const {
  std::size_t h = 0;
  for (const auto& c : children) h = std::max(h, c.height());
  return h + 1;
}

std::size_t Tree::size() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

std::vector<int> Tree::preorder() const {
  std::vector<int> out;
  std::vector<const Tree*> stack{this};
  while (!stack.empty()) {
    const Tree* t = stack.back();
    stack.pop_back();
    out.push_back(t->symbol.clause_id);
    for (auto it = t->children.rbegin(); it != t->children.rend(); ++it) stack.push_back(&*it);
  }
  return out;
}

std::string Tree::to_string() const {
  std::string out = "(" + std::to_string(symbol.clause_id);
  for (const auto& c : children) out += " " + c.to_string();
  return out + ")";
}

bool operator==(const Tree& a, const Tree& b) {
  return a.symbol == b.symbol && a.children == b.children;
}

std::string OracleQuery::to_string() const {
  std::string out;
  for (StateId s : sources) out += "g" + std::to_string(s) + " ";
  return out + "-f" + std::to_string(symbol.clause_id) + "->";
}

// ---------------------------------------------------------------------------
// TreeAutomaton

TreeAutomaton::TreeAutomaton(std::vector<RankedSymbol> alphabet) : alphabet_(std::move(alphabet)) {
  std::sort(alphabet_.begin(), alphabet_.end());
  alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
  for (std::size_t i = 1; i < alphabet_.size(); ++i)
    if (alphabet_[i].clause_id == alphabet_[i - 1].clause_id)
      throw MalformedInput("symbol f" + std::to_string(alphabet_[i].clause_id) +
                           " declared with two ranks");
}

bool TreeAutomaton::has_symbol(const RankedSymbol& symbol) const {
  return std::binary_search(alphabet_.begin(), alphabet_.end(), symbol);
}

StateId TreeAutomaton::add_state(std::string label) {
  labels_.push_back(std::move(label));
  accepting_.push_back(false);
  return static_cast<StateId>(labels_.size() - 1);
}

void TreeAutomaton::set_accepting(StateId q, bool accepting) {
  if (q >= num_states()) throw MalformedInput("unknown state q" + std::to_string(q));
  accepting_[q] = accepting;
}

std::vector<StateId> TreeAutomaton::accepting_states() const {
  std::vector<StateId> out;
  for (StateId q = 0; q < num_states(); ++q)
    if (accepting_[q]) out.push_back(q);
  return out;
}

void TreeAutomaton::add_rule(std::vector<StateId> sources, RankedSymbol symbol, StateId target) {
  if (!has_symbol(symbol))
    throw MalformedInput("symbol f" + std::to_string(symbol.clause_id) + "/" +
                         std::to_string(symbol.rank) + " is not in the alphabet");
  if (sources.size() != symbol.rank)
    throw MalformedInput("rule for f" + std::to_string(symbol.clause_id) + " has " +
                         std::to_string(sources.size()) + " sources, rank is " +
                         std::to_string(symbol.rank));
  for (StateId s : sources)
    if (s >= num_states()) throw MalformedInput("unknown state q" + std::to_string(s));
  if (target >= num_states()) throw MalformedInput("unknown state q" + std::to_string(target));

  auto& ts = index_[Key{symbol, sources}];
  if (std::find(ts.begin(), ts.end(), target) != ts.end()) return;
  ts.push_back(target);
  by_symbol_[symbol].push_back(rules_.size());
  rules_.push_back(Rule{std::move(sources), symbol, target});
}

std::span<const StateId> TreeAutomaton::targets(std::span<const StateId> sources,
                                                const RankedSymbol& symbol) const {
  auto it = index_.find(Key{symbol, std::vector<StateId>(sources.begin(), sources.end())});
  if (it == index_.end()) return {};
  return it->second;
}

std::span<const std::size_t> TreeAutomaton::rules_with_symbol(const RankedSymbol& symbol) const {
  auto it = by_symbol_.find(symbol);
  if (it == by_symbol_.end()) return {};
  return it->second;
}

bool TreeAutomaton::is_deterministic() const {
  return std::all_of(index_.begin(), index_.end(),
                     [](const auto& entry) { return entry.second.size() <= 1; });
}

std::string TreeAutomaton::dump() const {
  std::ostringstream os;
  os << "states: " << num_states() << "\naccepting:";
  for (StateId q : accepting_states()) os << " q" << q;
  os << '\n';
  std::vector<Rule> sorted = rules_;
  std::sort(sorted.begin(), sorted.end(), [](const Rule& a, const Rule& b) {
    return std::tie(a.symbol, a.sources, a.target) < std::tie(b.symbol, b.sources, b.target);
  });
  for (const auto& r : sorted) {
    for (StateId s : r.sources) os << 'q' << s << ' ';
    os << "-f" << r.symbol.clause_id << "-> q" << r.target << '\n';
  }
  return os.str();
}

std::vector<StateId> AutomatonOracle::targets(std::span<const StateId> sources,
                                              const RankedSymbol& symbol) {
  log_.push_back(OracleQuery{std::vector<StateId>(sources.begin(), sources.end()), symbol});
  auto ts = automaton_.targets(sources, symbol);
  return std::vector<StateId>(ts.begin(), ts.end());
}

// ---------------------------------------------------------------------------
// Membership and emptiness

namespace {

void require_same_alphabet(const std::vector<RankedSymbol>& a, const std::vector<RankedSymbol>& b) {
  if (a != b) throw MalformedInput("automata are over different alphabets");
}

std::set<StateId> run_states(const TreeAutomaton& a, const Tree& t) {
  if (!a.has_symbol(t.symbol))
    throw MalformedInput("tree uses symbol f" + std::to_string(t.symbol.clause_id) +
                         " outside the alphabet");
  if (t.children.size() != t.symbol.rank)
    throw MalformedInput("node f" + std::to_string(t.symbol.clause_id) + " has " +
                         std::to_string(t.children.size()) + " children, rank is " +
                         std::to_string(t.symbol.rank));
  std::vector<std::set<StateId>> kids;
  kids.reserve(t.children.size());
  for (const auto& c : t.children) kids.push_back(run_states(a, c));
  std::set<StateId> out;
  for (std::size_t idx : a.rules_with_symbol(t.symbol)) {
    const Rule& r = a.rules()[idx];
    bool ok = true;
    for (std::size_t i = 0; ok && i < r.sources.size(); ++i) ok = kids[i].count(r.sources[i]) > 0;
    if (ok) out.insert(r.target);
  }
  return out;
}

struct WitnessNode {
  RankedSymbol symbol;
  std::vector<std::shared_ptr<const WitnessNode>> kids;
  std::size_t size = 1;

  void preorder(std::vector<int>& out) const {
    out.push_back(symbol.clause_id);
    for (const auto& k : kids) k->preorder(out);
  }
  Tree to_tree() const {
    Tree t{symbol, {}};
    for (const auto& k : kids) t.children.push_back(k->to_tree());
    return t;
  }
};
using WitnessPtr = std::shared_ptr<const WitnessNode>;

// Orders candidate trees of equal height by size, then preorder clause ids.
int compare_witness(const WitnessPtr& a, const WitnessPtr& b) {
  if (a == b) return 0;
  if (!a) return 1;
  if (!b) return -1;
  if (a->size != b->size) return a->size < b->size ? -1 : 1;
  std::vector<int> pa, pb;
  a->preorder(pa);
  b->preorder(pb);
  if (pa == pb) return 0;
  return pa < pb ? -1 : 1;
}

}  // namespace

bool accepts(const TreeAutomaton& a, const Tree& t) {
  for (StateId q : run_states(a, t))
    if (a.is_accepting(q)) return true;
  return false;
}

std::optional<Tree> sample_witness(const TreeAutomaton& a) {
  // best[q] is the least tree (by size, then preorder) of height at most h
  // reaching q. Round h+1 recomputes it from the round-h values, so the
  // first round in which an accepting state is reached fixes the height.
  std::vector<WitnessPtr> best(a.num_states());
  for (;;) {
    std::vector<WitnessPtr> next(a.num_states());
    for (const Rule& r : a.rules()) {
      auto node = std::make_shared<WitnessNode>();
      node->symbol = r.symbol;
      bool ok = true;
      for (StateId s : r.sources) {
        if (!best[s]) {
          ok = false;
          break;
        }
        node->kids.push_back(best[s]);
        node->size += best[s]->size;
      }
      if (!ok) continue;
      WitnessPtr cand = node;
      if (compare_witness(cand, next[r.target]) < 0) next[r.target] = cand;
    }
    WitnessPtr found;
    for (StateId q = 0; q < a.num_states(); ++q)
      if (a.is_accepting(q) && next[q] && compare_witness(next[q], found) < 0) found = next[q];
    if (found) return found->to_tree();

    bool changed = false;
    for (StateId q = 0; q < a.num_states() && !changed; ++q)
      changed = compare_witness(next[q], best[q]) != 0;
    if (!changed) return std::nullopt;
    best = std::move(next);
  }
}

// ---------------------------------------------------------------------------
// Reachable products

namespace {

/// Right-hand component of a product: a possibly nondeterministic rule
/// source over dense ids that the product discovers on demand.
class ProductRight {
 public:
  virtual ~ProductRight() = default;
  virtual std::vector<std::size_t> step(std::span<const std::size_t> sources,
                                        const RankedSymbol& symbol) = 0;
  virtual bool accepting(std::size_t r) const = 0;
  virtual std::string label(std::size_t r) const = 0;
};

/// Builds the part of a x right reachable from leaves. A product state is
/// processed once; each a-rule in which its a-component occurs is combined
/// with every already discovered state at the other positions.
TreeAutomaton reachable_product(const TreeAutomaton& a, ProductRight& right) {
  TreeAutomaton out(a.alphabet());
  std::map<std::pair<StateId, std::size_t>, StateId> ids;
  std::vector<std::pair<StateId, std::size_t>> pairs;
  std::vector<std::vector<StateId>> partners(a.num_states());
  std::deque<StateId> work;

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> occurs(a.num_states());
  for (std::size_t i = 0; i < a.rules().size(); ++i) {
    const Rule& r = a.rules()[i];
    for (std::size_t pos = 0; pos < r.sources.size(); ++pos)
      occurs[r.sources[pos]].emplace_back(i, pos);
  }

  auto intern = [&](StateId qa, std::size_t qr) {
    auto [it, fresh] = ids.try_emplace({qa, qr}, 0);
    if (fresh) {
      it->second = out.add_state("(" + a.label(qa) + "," + right.label(qr) + ")");
      out.set_accepting(it->second, a.is_accepting(qa) && right.accepting(qr));
      pairs.emplace_back(qa, qr);
      partners[qa].push_back(it->second);
      work.push_back(it->second);
    }
    return it->second;
  };

  auto fire = [&](const Rule& r, const std::vector<StateId>& tuple) {
    std::vector<std::size_t> rs(tuple.size());
    for (std::size_t i = 0; i < tuple.size(); ++i) rs[i] = pairs[tuple[i]].second;
    for (std::size_t qr : right.step(rs, r.symbol)) out.add_rule(tuple, r.symbol, intern(r.target, qr));
  };

  for (const Rule& r : a.rules())
    if (r.sources.empty()) fire(r, {});

  while (!work.empty()) {
    StateId p = work.front();
    work.pop_front();
    StateId qa = pairs[p].first;
    for (auto [rule_idx, pos] : occurs[qa]) {
      const Rule& r = a.rules()[rule_idx];
      std::size_t n = r.sources.size();
      std::vector<std::size_t> limit(n);
      bool empty = false;
      for (std::size_t j = 0; j < n; ++j) {
        limit[j] = j == pos ? 1 : partners[r.sources[j]].size();
        empty = empty || limit[j] == 0;
      }
      if (empty) continue;
      std::vector<std::size_t> odo(n, 0);
      std::vector<StateId> tuple(n);
      for (;;) {
        for (std::size_t j = 0; j < n; ++j) tuple[j] = j == pos ? p : partners[r.sources[j]][odo[j]];
        fire(r, tuple);
        std::size_t j = 0;
        while (j < n && ++odo[j] == limit[j]) odo[j++] = 0;
        if (j == n) break;
      }
    }
  }
  return out;
}

class AutomatonRight : public ProductRight {
 public:
  explicit AutomatonRight(const TreeAutomaton& b) : b_(b) {}
  std::vector<std::size_t> step(std::span<const std::size_t> sources,
                                const RankedSymbol& symbol) override {
    std::vector<StateId> src(sources.begin(), sources.end());
    auto ts = b_.targets(src, symbol);
    return std::vector<std::size_t>(ts.begin(), ts.end());
  }
  bool accepting(std::size_t r) const override { return b_.is_accepting(static_cast<StateId>(r)); }
  std::string label(std::size_t r) const override {
    const std::string& l = b_.label(static_cast<StateId>(r));
    return l.empty() ? "q" + std::to_string(r) : l;
  }

 private:
  const TreeAutomaton& b_;
};

/// Subset construction over a rule oracle, complemented: a subset accepts
/// iff it contains no accepting oracle state. The empty subset is the sink
/// and is included, so every step has exactly one target.
class ComplementedOracleRight : public ProductRight {
 public:
  explicit ComplementedOracleRight(RuleOracle& oracle) : oracle_(oracle) {}

  std::vector<std::size_t> step(std::span<const std::size_t> sources,
                                const RankedSymbol& symbol) override {
    std::pair<RankedSymbol, std::vector<std::size_t>> key{symbol, {sources.begin(), sources.end()}};
    if (auto it = cache_.find(key); it != cache_.end()) return {it->second};

    std::set<StateId> result;
    std::size_t n = sources.size();
    bool empty = false;
    for (std::size_t j = 0; j < n; ++j) empty = empty || subsets_[sources[j]].empty();
    if (!empty) {
      std::vector<std::size_t> odo(n, 0);
      std::vector<StateId> tuple(n);
      for (;;) {
        for (std::size_t j = 0; j < n; ++j) tuple[j] = subsets_[sources[j]][odo[j]];
        std::vector<StateId> ts;
        try {
          ts = oracle_.targets(tuple, symbol);
        } catch (const OracleError&) {
          throw;
        } catch (const std::exception& e) {
          throw OracleError(e.what(), OracleQuery{tuple, symbol});
        }
        result.insert(ts.begin(), ts.end());
        std::size_t j = 0;
        while (j < n && ++odo[j] == subsets_[sources[j]].size()) odo[j++] = 0;
        if (j == n) break;
      }
    }
    std::size_t id = intern(std::vector<StateId>(result.begin(), result.end()));
    cache_.emplace(std::move(key), id);
    return {id};
  }

  bool accepting(std::size_t r) const override {
    return std::none_of(subsets_[r].begin(), subsets_[r].end(),
                        [&](StateId g) { return oracle_.is_accepting(g); });
  }

  std::string label(std::size_t r) const override {
    std::string out = "{";
    for (std::size_t i = 0; i < subsets_[r].size(); ++i)
      out += (i ? "," : "") + oracle_.label(subsets_[r][i]);
    return out + "}";
  }

 private:
  std::size_t intern(std::vector<StateId> subset) {
    auto [it, fresh] = ids_.try_emplace(subset, subsets_.size());
    if (fresh) subsets_.push_back(std::move(subset));
    return it->second;
  }

  RuleOracle& oracle_;
  std::vector<std::vector<StateId>> subsets_;
  std::map<std::vector<StateId>, std::size_t> ids_;
  std::map<std::pair<RankedSymbol, std::vector<std::size_t>>, std::size_t> cache_;
};

}  // namespace

TreeAutomaton intersect(const TreeAutomaton& a, const TreeAutomaton& b) {
  require_same_alphabet(a.alphabet(), b.alphabet());
  AutomatonRight right(b);
  return reachable_product(a, right);
}

TreeAutomaton difference_lazy(const TreeAutomaton& a, RuleOracle& oracle) {
  require_same_alphabet(a.alphabet(), oracle.alphabet());
  ComplementedOracleRight right(oracle);
  return reachable_product(a, right);
}

// ---------------------------------------------------------------------------
// Determinization and complement

TreeAutomaton determinize(const TreeAutomaton& a) {
  TreeAutomaton out(a.alphabet());
  std::vector<std::vector<StateId>> subsets;
  std::map<std::vector<StateId>, StateId> ids;
  std::deque<StateId> work;

  auto intern = [&](std::vector<StateId> subset) {
    auto [it, fresh] = ids.try_emplace(subset, 0);
    if (fresh) {
      std::string label = "{";
      for (std::size_t i = 0; i < subset.size(); ++i)
        label += (i ? "," : "") + std::string("q") + std::to_string(subset[i]);
      it->second = out.add_state(label + "}");
      out.set_accepting(it->second, std::any_of(subset.begin(), subset.end(), [&](StateId q) {
                          return a.is_accepting(q);
                        }));
      subsets.push_back(std::move(subset));
      work.push_back(it->second);
    }
    return it->second;
  };

  auto step = [&](const RankedSymbol& f, const std::vector<StateId>& tuple) {
    std::set<StateId> target;
    for (std::size_t idx : a.rules_with_symbol(f)) {
      const Rule& r = a.rules()[idx];
      bool ok = true;
      for (std::size_t j = 0; ok && j < tuple.size(); ++j)
        ok = std::binary_search(subsets[tuple[j]].begin(), subsets[tuple[j]].end(), r.sources[j]);
      if (ok) target.insert(r.target);
    }
    if (target.empty()) return;
    StateId t = intern(std::vector<StateId>(target.begin(), target.end()));
    out.add_rule(tuple, f, t);
  };

  for (const auto& f : a.alphabet())
    if (f.rank == 0) step(f, {});

  while (!work.empty()) {
    StateId p = work.front();
    work.pop_front();
    for (const auto& f : a.alphabet()) {
      std::size_t n = f.rank;
      for (std::size_t pos = 0; pos < n; ++pos) {
        std::size_t known = subsets.size();
        std::vector<std::size_t> odo(n, 0);
        std::vector<StateId> tuple(n);
        for (;;) {
          for (std::size_t j = 0; j < n; ++j) tuple[j] = j == pos ? p : static_cast<StateId>(odo[j]);
          step(f, tuple);
          std::size_t j = 0;
          while (j < n && (j == pos || ++odo[j] == known)) {
            odo[j] = 0;
            ++j;
          }
          if (j == n) break;
        }
      }
    }
  }
  return out;
}

TreeAutomaton complement(const TreeAutomaton& a) {
  TreeAutomaton d = a.is_deterministic() ? a : determinize(a);
  TreeAutomaton out(d.alphabet());
  for (StateId q = 0; q < d.num_states(); ++q) {
    out.add_state(d.label(q));
    out.set_accepting(q, !d.is_accepting(q));
  }
  for (const Rule& r : d.rules()) out.add_rule(r.sources, r.symbol, r.target);

  std::optional<StateId> sink;
  auto get_sink = [&] {
    if (!sink) {
      sink = out.add_state("sink");
      out.set_accepting(*sink, true);
    }
    return *sink;
  };

  // Complete over all tuples of states, including the sink once it exists.
  // Adding the sink only enlarges the tuple space, so loop until stable.
  std::size_t done_states = 0;
  bool first = true;
  while (first || done_states < out.num_states()) {
    first = false;
    std::size_t k = out.num_states();
    for (const auto& f : out.alphabet()) {
      std::size_t n = f.rank;
      if (n > 0 && k == 0) continue;
      std::vector<StateId> tuple(n, 0);
      for (;;) {
        bool fresh = n == 0 || std::any_of(tuple.begin(), tuple.end(),
                                          [&](StateId s) { return s >= done_states; });
        if (fresh && out.targets(tuple, f).empty()) out.add_rule(tuple, f, get_sink());
        std::size_t j = 0;
        while (j < n && ++tuple[j] == k) tuple[j++] = 0;
        if (j == n) break;
      }
    }
    done_states = k;
  }
  return out;
}

TreeAutomaton difference(const TreeAutomaton& a, const TreeAutomaton& b) {
  require_same_alphabet(a.alphabet(), b.alphabet());
  return intersect(a, complement(b));
}

// ---------------------------------------------------------------------------
// Trimming and minimization

namespace {

TreeAutomaton restrict_to(const TreeAutomaton& a, const std::vector<bool>& keep) {
  TreeAutomaton out(a.alphabet());
  std::vector<StateId> map(a.num_states(), 0);
  for (StateId q = 0; q < a.num_states(); ++q) {
    if (!keep[q]) continue;
    map[q] = out.add_state(a.label(q));
    out.set_accepting(map[q], a.is_accepting(q));
  }
  for (const Rule& r : a.rules()) {
    if (!keep[r.target]) continue;
    if (!std::all_of(r.sources.begin(), r.sources.end(), [&](StateId s) { return keep[s]; }))
      continue;
    std::vector<StateId> src;
    for (StateId s : r.sources) src.push_back(map[s]);
    out.add_rule(std::move(src), r.symbol, map[r.target]);
  }
  return out;
}

TreeAutomaton quotient(const TreeAutomaton& a, const std::vector<std::size_t>& block,
                       std::size_t num_blocks) {
  TreeAutomaton out(a.alphabet());
  std::vector<std::string> labels(num_blocks);
  std::vector<bool> acc(num_blocks, false);
  for (StateId q = 0; q < a.num_states(); ++q) {
    std::string& l = labels[block[q]];
    l += (l.empty() ? "" : "|") + (a.label(q).empty() ? "q" + std::to_string(q) : a.label(q));
    acc[block[q]] = acc[block[q]] || a.is_accepting(q);
  }
  for (std::size_t b = 0; b < num_blocks; ++b) {
    out.add_state(labels[b]);
    out.set_accepting(static_cast<StateId>(b), acc[b]);
  }
  for (const Rule& r : a.rules()) {
    std::vector<StateId> src;
    for (StateId s : r.sources) src.push_back(static_cast<StateId>(block[s]));
    out.add_rule(std::move(src), r.symbol, static_cast<StateId>(block[r.target]));
  }
  return out;
}

/// Refines `block` until every state's signature is block-invariant.
template <class Signature>
std::size_t refine(std::vector<std::size_t>& block, Signature signature) {
  std::size_t count = block.empty() ? 0 : *std::max_element(block.begin(), block.end()) + 1;
  for (;;) {
    using Sig = decltype(signature(StateId{0}));
    std::map<std::pair<std::size_t, Sig>, std::size_t> ids;
    std::vector<std::size_t> next(block.size());
    for (StateId q = 0; q < block.size(); ++q) {
      auto [it, fresh] = ids.try_emplace({block[q], signature(q)}, ids.size());
      next[q] = it->second;
    }
    block = std::move(next);
    if (ids.size() == count) return count;
    count = ids.size();
  }
}

}  // namespace

TreeAutomaton remove_useless(const TreeAutomaton& a) {
  std::vector<bool> reach(a.num_states(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (const Rule& r : a.rules()) {
      if (reach[r.target]) continue;
      if (std::all_of(r.sources.begin(), r.sources.end(), [&](StateId s) { return reach[s]; })) {
        reach[r.target] = true;
        changed = true;
      }
    }
  }
  std::vector<bool> useful(a.num_states(), false);
  for (StateId q = 0; q < a.num_states(); ++q) useful[q] = reach[q] && a.is_accepting(q);
  for (bool changed = true; changed;) {
    changed = false;
    for (const Rule& r : a.rules()) {
      if (!useful[r.target]) continue;
      if (!std::all_of(r.sources.begin(), r.sources.end(), [&](StateId s) { return reach[s]; }))
        continue;
      for (StateId s : r.sources)
        if (!useful[s]) {
          useful[s] = true;
          changed = true;
        }
    }
  }
  return restrict_to(a, useful);
}

TreeAutomaton minimize_naive(const TreeAutomaton& a, MinimizeStats* stats) {
  bool det = a.is_deterministic();
  TreeAutomaton t = remove_useless(det ? a : determinize(a));
  if (stats) {
    stats->determinized = !det;
    stats->states_before = a.num_states();
  }

  // Each context is a rule with one position left open; two states are
  // equivalent iff every context sends them to the same block.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> occurs(t.num_states());
  for (std::size_t i = 0; i < t.rules().size(); ++i)
    for (std::size_t pos = 0; pos < t.rules()[i].sources.size(); ++pos)
      occurs[t.rules()[i].sources[pos]].emplace_back(i, pos);

  std::vector<std::size_t> block(t.num_states());
  for (StateId q = 0; q < t.num_states(); ++q) block[q] = t.is_accepting(q) ? 1 : 0;
  if (std::all_of(block.begin(), block.end(), [&](std::size_t b) { return b == block[0]; }))
    std::fill(block.begin(), block.end(), 0);

  using Context = std::tuple<RankedSymbol, std::size_t, std::vector<StateId>, std::size_t>;
  std::size_t n = refine(block, [&](StateId q) {
    std::vector<Context> sig;
    for (auto [idx, pos] : occurs[q]) {
      const Rule& r = t.rules()[idx];
      std::vector<StateId> others = r.sources;
      others.erase(others.begin() + static_cast<std::ptrdiff_t>(pos));
      sig.emplace_back(r.symbol, pos, std::move(others), block[r.target]);
    }
    std::sort(sig.begin(), sig.end());
    return sig;
  });
  TreeAutomaton out = quotient(t, block, n);
  if (stats) stats->states_after = out.num_states();
  return out;
}

TreeAutomaton minimize_bisim(const TreeAutomaton& a, MinimizeStats* stats) {
  TreeAutomaton t = remove_useless(a);
  if (stats) {
    stats->determinized = false;
    stats->states_before = a.num_states();
  }
  std::vector<std::vector<std::size_t>> incoming(t.num_states());
  for (std::size_t i = 0; i < t.rules().size(); ++i) incoming[t.rules()[i].target].push_back(i);

  std::vector<std::size_t> block(t.num_states(), 0);
  using Entry = std::pair<RankedSymbol, std::vector<std::size_t>>;
  std::size_t n = refine(block, [&](StateId q) {
    std::set<Entry> sig;
    for (std::size_t idx : incoming[q]) {
      const Rule& r = t.rules()[idx];
      std::vector<std::size_t> src;
      for (StateId s : r.sources) src.push_back(block[s]);
      sig.emplace(r.symbol, std::move(src));
    }
    return sig;
  });
  TreeAutomaton out = quotient(t, block, n);
  if (stats) stats->states_after = out.num_states();
  return out;
}

}  // namespace chcta
