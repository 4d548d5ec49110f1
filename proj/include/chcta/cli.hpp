#ifndef CHCTA_CLI_HPP
#define CHCTA_CLI_HPP

#include "chcta/engine.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace chcta {

struct CliConfig {
  std::string input;
  EngineConfig engine;
  bool witness = false;
  bool stats = false;
  bool dump_automata = false;
};

/// Result of one file in a benchmark run.
struct BenchRow {
  std::string file;
  /// sat, unsat, unknown or error.
  std::string result;
  std::optional<std::string> expected;
  std::size_t iterations = 0;
  long long wall_ms = 0;
  std::size_t peak_states = 0;
  std::size_t smt_queries = 0;
};

/// Solves every `.smt2` file of `dir` (sorted by name) and returns one row
/// per file. Unreadable or unparsable files yield rows with result `error`.
std::vector<BenchRow> run_bench(const std::filesystem::path& dir, const EngineConfig& config);

/// Header plus one line per row.
std::string bench_csv(const std::vector<BenchRow>& rows);

/// Entry point of the `chc-ta` executable. Returns the process exit code:
/// 0 for sat/unsat, 2 for unknown, 1 for usage, input or solver errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace chcta

#endif  // CHCTA_CLI_HPP
