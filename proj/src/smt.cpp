#include "chcta/smt.hpp"

#include "chcta/errors.hpp"
#include "chcta/smt2_terms.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace chcta {

std::string to_string(const ModelValue& value) {
  if (auto b = std::get_if<bool>(&value)) return *b ? "true" : "false";
  if (auto r = std::get_if<Rational>(&value)) return r->str();
  return std::get<std::string>(value);
}

const char* to_string(SatResult result) {
  switch (result) {
    case SatResult::Sat:
      return "sat";
    case SatResult::Unsat:
      return "unsat";
    case SatResult::Unknown:
      return "unknown";
  }
  return "?";
}

const char* to_string(Validity v) {
  switch (v) {
    case Validity::Valid:
      return "valid";
    case Validity::Invalid:
      return "invalid";
    case Validity::Unknown:
      return "unknown";
  }
  return "?";
}

namespace {

struct Declarations {
  std::set<std::string> sorts;
  std::map<std::string, std::pair<std::vector<Sort>, Sort>> funs;

  void add_sort(const Sort& s) {
    if (s.is_opaque()) sorts.insert(s.name());
    for (const auto& p : s.params()) add_sort(p);
  }
  void add_fun(const std::string& name, std::vector<Sort> params, const Sort& range) {
    for (const auto& p : params) add_sort(p);
    add_sort(range);
    auto [it, fresh] = funs.try_emplace(name, params, range);
    if (!fresh && (it->second.first != params || it->second.second != range))
      throw SortError("symbol '" + name + "' used with two signatures");
  }
  void add(const TermPtr& t) {
    for (const auto& [n, s] : free_vars(t)) add_fun(n, {}, s);
    visit(t, [&](const TermPtr& s) {
      add_sort(s->sort());
      for (const auto& b : s->bound()) add_sort(b->sort());
      if (s->is_app() && !is_builtin_symbol(s->name())) {
        std::vector<Sort> params;
        for (const auto& a : s->args()) params.push_back(a->sort());
        add_fun(s->name(), std::move(params), s->sort());
      }
    });
  }
};

}  // namespace

std::string declarations(const std::vector<TermPtr>& terms) {
  Declarations d;
  for (const auto& t : terms) d.add(t);
  std::ostringstream os;
  for (const auto& s : d.sorts) os << "(declare-sort " << quote_symbol(s) << " 0)\n";
  for (const auto& [name, sig] : d.funs) {
    os << "(declare-fun " << quote_symbol(name) << " (";
    for (std::size_t i = 0; i < sig.first.size(); ++i) os << (i ? " " : "") << sig.first[i];
    os << ") " << sig.second << ")\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

SolverHandle::SolverHandle(SolverConfig config)
    : config_(std::move(config)), argv_(split_command(config_.command)) {
  ensure_process();
}

InterpolationDialect SolverHandle::dialect() const {
  if (config_.dialect != InterpolationDialect::Auto) return config_.dialect;
  return config_.command.find("smtinterpol") != std::string::npos ? InterpolationDialect::Tree
                                                                  : InterpolationDialect::Binary;
}

void SolverHandle::ensure_process() {
  if (process_ && process_->running()) return;
  if (process_) ++stats_.restarts;
  process_ = std::make_unique<Subprocess>(argv_);
}

SolverHandle::Response SolverHandle::isolated_exchange(const std::string& script) {
  if (dead_) throw BackendError("solver handle is unusable until reset", transcript_);
  process_ = std::make_unique<Subprocess>(argv_);
  Response r = exchange(script);
  process_.reset();
  return r;
}

void SolverHandle::reset() {
  if (process_) process_->kill();
  dead_ = false;
  ensure_process();
}

void SolverHandle::protocol_error(const std::string& message) {
  dead_ = true;
  if (process_) process_->kill();
  throw BackendError(message, transcript_);
}

std::string SolverHandle::preamble(const std::vector<TermPtr>& terms, bool interpolation) const {
  std::ostringstream os;
  os << "(reset)\n";
  os << "(set-option :produce-models true)\n";
  os << "(set-option :produce-unsat-cores true)\n";
  if (interpolation && dialect() == InterpolationDialect::Tree)
    os << "(set-option :produce-interpolants true)\n";
  if (config_.seed) os << "(set-option :random-seed " << *config_.seed << ")\n";
  os << "(set-logic " << config_.logic << ")\n";
  os << declarations(terms);
  return os.str();
}

SolverHandle::Response SolverHandle::exchange(const std::string& script) {
  if (dead_) throw BackendError("solver handle is unusable until reset", transcript_);
  ensure_process();
  std::string token = "ta-sync-" + std::to_string(++sync_);
  std::string full = script + "(echo \"" + token + "\")\n";
  transcript_ = full;

  auto deadline = Subprocess::Clock::now() + config_.timeout;
  Response r;
  if (deadline_) {
    if (Subprocess::Clock::now() >= *deadline_) {
      transcript_ += "; deadline passed before sending\n";
      ++stats_.timeouts;
      r.timed_out = true;
      return r;
    }
    deadline = std::min(deadline, *deadline_);
  }
  std::string buffer;
  std::size_t consumed = 0;
  try {
    process_->write(full);
  } catch (const BackendError& e) {
    protocol_error(std::string("solver process is gone: ") + e.what());
  }
  for (;;) {
    auto status = process_->read_some(buffer, deadline);
    if (status == Subprocess::ReadStatus::Timeout) {
      transcript_ += "; response\n" + buffer + "; timeout\n";
      process_->kill();
      ++stats_.timeouts;
      r.timed_out = true;
      return r;
    }
    if (status == Subprocess::ReadStatus::Eof) {
      transcript_ += "; response\n" + buffer;
      protocol_error("solver process exited unexpectedly");
    }
    SExprReader reader(std::string_view(buffer).substr(consumed), true);
    for (;;) {
      std::optional<SExpr> e;
      try {
        e = reader.next();
      } catch (const IncompleteInput&) {
        break;
      } catch (const ParseError& err) {
        transcript_ += "; response\n" + buffer;
        protocol_error(std::string("unreadable solver output: ") + err.what());
      }
      if (!e) break;
      consumed += reader.offset();
      reader = SExprReader(std::string_view(buffer).substr(consumed), true);
      if ((e->is_symbol() || e->kind == SExpr::Kind::String) && e->text == token) {
        transcript_ += "; response\n" + buffer.substr(0, consumed);
        return r;
      }
      r.data.push_back(std::move(*e));
    }
  }
}

namespace {

std::optional<ModelValue> model_value(const SExpr& e) {
  if (e.is_symbol("true")) return ModelValue{true};
  if (e.is_symbol("false")) return ModelValue{false};
  if (e.kind == SExpr::Kind::Numeral || e.kind == SExpr::Kind::Decimal)
    return ModelValue{parse_decimal(e.text)};
  if (e.is_call("-") && e.items.size() == 2) {
    auto v = model_value(e.items[1]);
    if (v && std::holds_alternative<Rational>(*v)) return ModelValue{Rational(-std::get<Rational>(*v))};
  }
  if (e.is_call("/") && e.items.size() == 3) {
    auto n = model_value(e.items[1]), d = model_value(e.items[2]);
    if (n && d && std::holds_alternative<Rational>(*n) && std::holds_alternative<Rational>(*d) &&
        std::get<Rational>(*d) != 0)
      return ModelValue{Rational(std::get<Rational>(*n) / std::get<Rational>(*d))};
  }
  return std::nullopt;
}

}  // namespace

SmtVerdict SolverHandle::finish_check(const Response& r, bool want_model, bool want_core) {
  SmtVerdict v;
  if (r.timed_out) {
    ++stats_.unknown;
    v.reason = "timeout";
    return v;
  }
  for (const auto& e : r.data)
    if (e.is_call("error")) protocol_error("solver error: " + e.to_string());
  if (r.data.size() != 1 || !r.data[0].is_symbol())
    protocol_error("unexpected answer to check-sat");
  const std::string& answer = r.data[0].text;
  if (answer == "sat") {
    v.result = SatResult::Sat;
    ++stats_.sat;
  } else if (answer == "unsat") {
    v.result = SatResult::Unsat;
    ++stats_.unsat;
  } else if (answer == "unknown") {
    ++stats_.unknown;
    v.reason = "solver returned unknown";
    return v;
  } else {
    protocol_error("unexpected answer to check-sat: " + answer);
  }

  if (v.is_sat() && want_model) {
    std::string check_transcript = transcript_;
    Response m = exchange("(get-model)\n");
    transcript_ = check_transcript + transcript_;
    if (m.timed_out) {
      v = SmtVerdict{};
      v.reason = "timeout";
      return v;
    }
    if (m.data.size() != 1 || !m.data[0].is_list() || m.data[0].is_call("error"))
      protocol_error("unexpected answer to get-model");
    for (const auto& d : m.data[0].items) {
      if (!d.is_call("define-fun") || d.items.size() != 5 || !d.items[1].is_symbol()) continue;
      if (!d.items[2].is_list() || !d.items[2].items.empty()) continue;
      auto value = model_value(d.items[4]);
      v.model[d.items[1].text] = value ? *value : ModelValue{d.items[4].to_string()};
    }
  }
  if (v.is_unsat() && want_core) {
    std::string check_transcript = transcript_;
    Response c = exchange("(get-unsat-core)\n");
    transcript_ = check_transcript + transcript_;
    if (c.timed_out) {
      v = SmtVerdict{};
      v.reason = "timeout";
      return v;
    }
    if (c.data.size() != 1 || !c.data[0].is_list() || c.data[0].is_call("error"))
      protocol_error("unexpected answer to get-unsat-core");
    for (const auto& n : c.data[0].items)
      if (n.is_symbol()) v.core.push_back(n.text);
  }
  return v;
}

std::string SolverHandle::render_check_sat(const std::vector<NamedTerm>& assertions) const {
  std::vector<TermPtr> terms;
  for (const auto& a : assertions) terms.push_back(a.term);
  std::string script = preamble(terms);
  for (const auto& a : assertions) {
    if (!a.term->sort().is_bool()) throw SortError("asserted term is not Bool: " + to_smtlib(a.term));
    script += "(assert (! " + to_smtlib(a.term) + " :named " + quote_symbol(a.name) + "))\n";
  }
  return script + "(check-sat)\n";
}

SmtVerdict SolverHandle::check_sat(const std::vector<NamedTerm>& assertions, bool want_model,
                                   bool want_core) {
  std::string script = render_check_sat(assertions);
  auto start = std::chrono::steady_clock::now();
  ++stats_.queries;
  struct Timer {
    SolverStats& s;
    std::chrono::steady_clock::time_point t;
    ~Timer() { s.wall += std::chrono::steady_clock::now() - t; }
  } timer{stats_, start};
  Response r = exchange(script);
  return finish_check(r, want_model, want_core);
}

SmtVerdict SolverHandle::check_sat(const std::vector<TermPtr>& assertions, bool want_model) {
  std::vector<NamedTerm> named;
  for (std::size_t i = 0; i < assertions.size(); ++i)
    named.push_back({"a" + std::to_string(i), assertions[i]});
  return check_sat(named, want_model, false);
}

Validity SolverHandle::check_validity(const std::vector<TermPtr>& premises,
                                      const TermPtr& conclusion) {
  std::vector<NamedTerm> named;
  for (std::size_t i = 0; i < premises.size(); ++i)
    named.push_back({"p" + std::to_string(i), premises[i]});
  named.push_back({"goal", mk_not(conclusion)});
  SmtVerdict v = check_sat(named);
  if (v.is_unsat()) return Validity::Valid;
  if (v.is_sat()) return Validity::Invalid;
  return Validity::Unknown;
}

TermPtr SolverHandle::read_term(const SExpr& e, const std::vector<TermPtr>& context) const {
  Signature sig;
  Scope scope;
  for (const auto& t : context) {
    for (const auto& [n, s] : free_vars(t)) scope.emplace(n, mk_var(n, s));
    visit(t, [&](const TermPtr& s) {
      auto note_sort = [&](const Sort& so) {
        if (so.is_opaque()) sig.sorts.emplace(so.name(), so);
      };
      note_sort(s->sort());
      if (s->is_app() && !is_builtin_symbol(s->name())) {
        std::vector<Sort> params;
        for (const auto& a : s->args()) params.push_back(a->sort());
        sig.functions.emplace(s->name(), FunctionSymbol{s->name(), params, s->sort()});
      }
    });
  }
  return sexpr_to_term(e, sig, scope);
}

std::optional<TermPtr> SolverHandle::eliminate_quantifiers(const TermPtr& formula) {
  if (!formula->sort().is_bool()) throw SortError("qe of a non-Bool term");
  std::string script = preamble({formula}) + "(assert " + to_smtlib(formula) + ")\n" +
                       "(apply (then qe simplify))\n";
  ++stats_.queries;
  Response r = exchange(script);
  if (r.timed_out) return std::nullopt;
  if (r.data.size() != 1) protocol_error("unexpected answer to apply");
  const SExpr& goals = r.data[0];
  if (goals.is_symbol("unsupported") || goals.is_call("error")) return std::nullopt;
  if (!goals.is_call("goals")) protocol_error("unexpected answer to apply: " + goals.to_string());
  std::vector<TermPtr> disjuncts;
  for (std::size_t g = 1; g < goals.items.size(); ++g) {
    const SExpr& goal = goals.items[g];
    if (!goal.is_call("goal")) protocol_error("malformed goal: " + goal.to_string());
    std::vector<TermPtr> conj;
    for (std::size_t i = 1; i < goal.items.size(); ++i) {
      if (goal.items[i].kind == SExpr::Kind::Keyword) {
        ++i;
        continue;
      }
      try {
        conj.push_back(read_term(goal.items[i], {formula}));
      } catch (const ParseError&) {
        return std::nullopt;
      }
    }
    disjuncts.push_back(mk_and(std::move(conj)));
  }
  TermPtr out = disjuncts.empty() ? mk_false() : mk_or(std::move(disjuncts));
  if (has_quantifier(out)) return std::nullopt;
  return out;
}

std::optional<TermPtr> SolverHandle::binary_interpolant(const TermPtr& a, const TermPtr& b) {
  std::string script = preamble({a, b}, true) + "(get-interpolant " + to_smtlib(a) + " " +
                       to_smtlib(b) + ")\n";
  ++stats_.queries;
  ++stats_.interpolation_queries;
  Response r = isolated_exchange(script);
  if (r.timed_out || r.data.size() != 1) return std::nullopt;
  const SExpr& e = r.data[0];
  if (e.is_symbol("unsupported") || e.is_call("error")) return std::nullopt;
  try {
    TermPtr t = read_term(e, {a, b});
    if (!t->sort().is_bool()) return std::nullopt;
    return t;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<std::vector<TermPtr>> SolverHandle::tree_interpolants_command(
    const std::vector<NamedTerm>& partitions, const std::string& pattern) {
  std::vector<TermPtr> terms;
  for (const auto& p : partitions) terms.push_back(p.term);
  std::string script = preamble(terms, true);
  for (const auto& p : partitions)
    script += "(assert (! " + to_smtlib(p.term) + " :named " + quote_symbol(p.name) + "))\n";
  script += "(check-sat)\n(get-interpolants " + pattern + ")\n";
  ++stats_.queries;
  ++stats_.interpolation_queries;
  Response r = exchange(script);
  if (r.timed_out || r.data.size() != 2 || !r.data[0].is_symbol("unsat")) return std::nullopt;
  const SExpr& e = r.data[1];
  if (e.is_symbol("unsupported") || e.is_call("error") || !e.is_list()) return std::nullopt;
  std::vector<TermPtr> out;
  try {
    for (const auto& item : e.items) out.push_back(read_term(item, terms));
  } catch (const Error&) {
    return std::nullopt;
  }
  return out;
}

}  // namespace chcta
