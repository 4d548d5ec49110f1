#ifndef CHCTA_SMT_HPP
#define CHCTA_SMT_HPP

#include "chcta/process.hpp"
#include "chcta/sexpr.hpp"
#include "chcta/term.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace chcta {

/// How the solver is asked for interpolants.
enum class InterpolationDialect {
  /// Tree dialect when the command mentions smtinterpol, binary otherwise.
  Auto,
  /// z3-style `(get-interpolant A B)`.
  Binary,
  /// SMTInterpol-style `(get-interpolants ...)` over named assertions.
  Tree,
  /// Never ask; always use the built-in fallback.
  None,
};

struct SolverConfig {
  std::string command = "z3 -in";
  std::chrono::milliseconds timeout{10000};
  std::optional<unsigned> seed;
  std::string logic = "ALL";
  InterpolationDialect dialect = InterpolationDialect::Auto;
};

using ModelValue = std::variant<bool, Rational, std::string>;
std::string to_string(const ModelValue& value);

enum class SatResult { Sat, Unsat, Unknown };
const char* to_string(SatResult result);

struct SmtVerdict {
  SatResult result = SatResult::Unknown;
  /// Only on Sat when a model was requested.
  std::map<std::string, ModelValue> model;
  /// Only on Unsat when a core was requested.
  std::vector<std::string> core;
  /// Only on Unknown.
  std::string reason;

  bool is_sat() const { return result == SatResult::Sat; }
  bool is_unsat() const { return result == SatResult::Unsat; }
  bool is_unknown() const { return result == SatResult::Unknown; }
};

enum class Validity { Valid, Invalid, Unknown };
const char* to_string(Validity v);

struct NamedTerm {
  std::string name;
  TermPtr term;
};

struct SolverStats {
  std::size_t queries = 0;
  std::size_t sat = 0;
  std::size_t unsat = 0;
  std::size_t unknown = 0;
  std::size_t timeouts = 0;
  std::size_t restarts = 0;
  std::size_t interpolation_queries = 0;
  std::chrono::nanoseconds wall{0};
};

/// One external solver process speaking SMT-LIB 2.6 on stdin/stdout. Each
/// query is a self-contained script starting with `(reset)`, so answers do
/// not depend on earlier queries.
///
/// A timeout kills the process and yields Unknown("timeout"); the next
/// query transparently starts a new process. Protocol errors (garbage,
/// process death, `(error ...)`) raise BackendError and leave the handle
/// dead until reset().
class SolverHandle {
 public:
  /// Starts the solver; throws BackendError when it cannot be spawned.
  explicit SolverHandle(SolverConfig config = {});

  SmtVerdict check_sat(const std::vector<NamedTerm>& assertions, bool want_model = false,
                       bool want_core = false);
  /// Names the assertions `a0, a1, ...`.
  SmtVerdict check_sat(const std::vector<TermPtr>& assertions, bool want_model = false);

  /// Valid iff the premises entail the conclusion.
  Validity check_validity(const std::vector<TermPtr>& premises, const TermPtr& conclusion);

  /// Quantifier-free equivalent of `formula` via the solver's `qe` tactic;
  /// nullopt when the solver cannot provide one.
  std::optional<TermPtr> eliminate_quantifiers(const TermPtr& formula);

  /// Craig interpolant of (a, b) with the binary dialect; nullopt when the
  /// solver reports the command as unsupported or fails on it.
  std::optional<TermPtr> binary_interpolant(const TermPtr& a, const TermPtr& b);

  /// Tree interpolants with the SMTInterpol dialect. `partitions` are named
  /// conjuncts in post-order; `pattern` is the argument text of the
  /// get-interpolants command. nullopt when unsupported.
  std::optional<std::vector<TermPtr>> tree_interpolants_command(
      const std::vector<NamedTerm>& partitions, const std::string& pattern);

  /// Kills the process and starts a new one with the same configuration.
  /// Statistics are preserved.
  void reset();

  /// Queries after this point in time return Unknown("timeout"); each
  /// query's own timeout is shortened so that it ends by then.
  void set_deadline(std::optional<Subprocess::Clock::time_point> deadline) { deadline_ = deadline; }

  bool alive() const { return !dead_; }
  const SolverConfig& config() const { return config_; }
  InterpolationDialect dialect() const;
  const SolverStats& stats() const { return stats_; }
  /// Script and raw response of the most recent exchange.
  const std::string& transcript() const { return transcript_; }
  /// The script the handle would send for these assertions (for tests of
  /// reproducibility).
  std::string render_check_sat(const std::vector<NamedTerm>& assertions) const;

 private:
  struct Response {
    std::vector<SExpr> data;
    bool timed_out = false;
  };

  void ensure_process();
  std::string preamble(const std::vector<TermPtr>& terms, bool interpolation = false) const;
  /// Sends `script` followed by a sync echo and reads all data before it.
  Response exchange(const std::string& script);
  /// As exchange(), in a process that has seen no other command. Used for
  /// interpolation: some solver builds crash when interpolation queries
  /// follow satisfiability queries in one process.
  Response isolated_exchange(const std::string& script);
  [[noreturn]] void protocol_error(const std::string& message);
  SmtVerdict finish_check(const Response& r, bool want_model, bool want_core);
  /// Converts a solver-printed term over the free variables of `context`.
  TermPtr read_term(const SExpr& e, const std::vector<TermPtr>& context) const;

  SolverConfig config_;
  std::vector<std::string> argv_;
  std::unique_ptr<Subprocess> process_;
  bool dead_ = false;
  std::optional<Subprocess::Clock::time_point> deadline_;
  std::uint64_t sync_ = 0;
  SolverStats stats_;
  std::string transcript_;
};

/// Declarations (`declare-sort`, `declare-fun`) for every opaque sort, free
/// variable and uninterpreted function occurring in `terms`, sorted by name.
/// Throws SortError when a name is used with two different signatures.
std::string declarations(const std::vector<TermPtr>& terms);

}  // namespace chcta

#endif  // CHCTA_SMT_HPP
