#include "chcta/cli.hpp"

#include "chcta/errors.hpp"
#include "chcta/parser.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace chcta {

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedInput("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw MalformedInput("cannot read " + path.string());
  return buffer.str();
}

struct FlagValues {
  std::string solver = "z3 -in";
  std::string interpolation = "external";
  std::string minimize = "bisim";
  bool no_on_demand = false;
  std::size_t max_iterations = 1000;
  double timeout = 60;
  bool witness = false;
  bool stats = false;
  std::optional<unsigned> seed;
  bool no_weaken = false;
  bool no_model = false;
  bool semantic_dedup = false;
  bool dump_automata = false;
};

void add_flags(CLI::App& app, FlagValues& v) {
  app.add_option("--solver", v.solver, "Solver command line (SMT-LIB 2 on stdin)")
      ->capture_default_str();
  app.add_option("--interpolation", v.interpolation, "Interpolation mode")
      ->check(CLI::IsMember({"external", "subtree"}))
      ->capture_default_str();
  app.add_option("--minimize", v.minimize, "Minimization after each subtraction")
      ->check(CLI::IsMember({"none", "naive", "bisim"}))
      ->capture_default_str();
  app.add_flag("--no-on-demand", v.no_on_demand,
               "Materialize interpolant automata instead of querying rules lazily");
  app.add_option("--max-iterations", v.max_iterations, "Refinement iteration budget")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--timeout", v.timeout, "Wall-clock budget in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--witness", v.witness, "Print the derivation or the model after the verdict");
  app.add_flag("--stats", v.stats, "Print statistics as key=value comments");
  app.add_option("--seed", v.seed, "Random seed passed to the solver");
  app.add_flag("--no-weaken", v.no_weaken, "Keep interpolants as the solver returns them");
  app.add_flag("--no-model", v.no_model, "Skip model extraction for sat answers");
  app.add_flag("--semantic-dedup", v.semantic_dedup,
               "Merge equivalent interpolant states using the solver");
  app.add_flag("--dump-automata", v.dump_automata,
               "Print the automaton after every iteration on stderr");
}

EngineConfig engine_config(const FlagValues& v) {
  EngineConfig c;
  c.solver.command = v.solver;
  c.solver.seed = v.seed;
  c.interpolation.mode =
      v.interpolation == "subtree" ? InterpolationMode::Subtree : InterpolationMode::External;
  c.interpolation.weaken = !v.no_weaken;
  c.minimize = v.minimize == "none"    ? MinimizeMode::None
               : v.minimize == "naive" ? MinimizeMode::Naive
                                       : MinimizeMode::Bisim;
  c.on_demand = !v.no_on_demand;
  c.max_iterations = v.max_iterations;
  c.timeout = std::chrono::milliseconds(static_cast<long long>(v.timeout * 1000));
  c.extract_model = !v.no_model;
  c.semantic_dedup = v.semantic_dedup;
  return c;
}

std::string format_value(const ModelValue& v) { return to_string(v); }

void print_witness(std::ostream& out, const ChcSystem& s, const UnsatWitness& w) {
  out << w.derivation.tree.to_string() << "\n";
  for (std::size_t n = 0; n < w.derivation.size(); ++n) {
    out << "node " << n << " clause " << w.derivation.clauses[n] << ":";
    const HornClause& c = s.clause(w.derivation.clauses[n]);
    for (const auto& [name, sort] : c.variables()) {
      const TermPtr& inst = w.derivation.instances[n].at(name);
      auto it = w.assignment.find(inst->name());
      if (it != w.assignment.end()) out << " " << name << "=" << format_value(it->second);
    }
    out << "\n";
  }
}

int solve_file(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  std::string text;
  ParseResult parsed;
  try {
    text = read_text(cfg.input);
  } catch (const Error& e) {
    err << "chc-ta: " << e.what() << "\n";
    return 1;
  }
  try {
    parsed = parse(text);
  } catch (const ParseError& e) {
    err << cfg.input << ":" << e.pos().line << ":" << e.pos().column << ": error: " << e.what()
        << "\n";
    return 1;
  } catch (const Error& e) {
    err << cfg.input << ": error: " << e.what() << "\n";
    return 1;
  }
  for (const auto& w : parsed.warnings) err << w.format(cfg.input) << "\n";

  Engine engine(cfg.engine);
  if (cfg.dump_automata) {
    engine.set_observer([&err](const IterationView& v) {
      err << "; iteration " << v.iteration << " witness " << v.witness.to_string() << "\n"
          << v.after.dump();
    });
  }
  SolveOutcome result;
  try {
    result = engine.solve(parsed.system);
  } catch (const BackendError& e) {
    err << "chc-ta: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    out << "unknown\n";
    err << "chc-ta: internal error: " << e.what() << "\n";
    return 2;
  }

  out << to_string(result.verdict) << "\n";
  if (!result.stats.interpolation_notice.empty())
    err << "chc-ta: " << result.stats.interpolation_notice << "\n";
  if (result.verdict == Verdict::Unknown) err << "chc-ta: " << result.reason << "\n";
  if (cfg.witness) {
    if (result.verdict == Verdict::Unsat && result.witness) {
      print_witness(out, parsed.system, *result.witness);
    } else if (result.verdict == Verdict::Sat) {
      if (result.model)
        out << format_model(parsed.system, *result.model);
      else
        out << "; no certificate\n";
    }
  }
  if (cfg.stats) {
    std::istringstream lines(result.stats.to_key_value());
    for (std::string line; std::getline(lines, line);) out << "; " << line << "\n";
  }
  return result.verdict == Verdict::Unknown ? 2 : 0;
}

}  // namespace

std::vector<BenchRow> run_bench(const std::filesystem::path& dir, const EngineConfig& config) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".smt2") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<BenchRow> rows;
  for (const auto& path : files) {
    BenchRow row;
    row.file = path.filename().string();
    auto start = std::chrono::steady_clock::now();
    try {
      ParseResult parsed = parse(read_text(path));
      row.expected = parsed.status;
      SolveOutcome result = Engine(config).solve(parsed.system);
      row.result = to_string(result.verdict);
      row.iterations = result.stats.iterations;
      row.peak_states = result.stats.peak_states;
      row.smt_queries = result.stats.smt_queries;
    } catch (const std::exception&) {
      row.result = "error";
    }
    row.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "file,result,iterations,wall_ms,automaton_peak_states,smt_queries\n";
  for (const auto& r : rows) {
    std::string file = r.file;
    if (file.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char ch : file) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      file = quoted + "\"";
    }
    os << file << "," << r.result << "," << r.iterations << "," << r.wall_ms << ","
       << r.peak_states << "," << r.smt_queries << "\n";
  }
  return os.str();
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constrained Horn clause solver based on tree automata", "chc-ta"};
  FlagValues flags;
  add_flags(app, flags);
  std::string input;
  app.add_option("FILE", input, "CHC problem in SMT-LIB HORN format");

  CLI::App* bench = app.add_subcommand("bench", "Solve every .smt2 file of a directory");
  FlagValues bench_flags;
  add_flags(*bench, bench_flags);
  std::string bench_dir;
  std::string csv_out;
  bench->add_option("DIR", bench_dir, "Directory of .smt2 files")->required();
  bench->add_option("--csv", csv_out, "Output CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  if (bench->parsed()) {
    if (!std::filesystem::is_directory(bench_dir)) {
      err << "chc-ta: not a directory: " << bench_dir << "\n";
      return 1;
    }
    std::vector<BenchRow> rows = run_bench(bench_dir, engine_config(bench_flags));
    std::ofstream csv(csv_out);
    if (!csv) {
      err << "chc-ta: cannot write " << csv_out << "\n";
      return 1;
    }
    csv << bench_csv(rows);
    std::map<std::string, std::size_t> counts;
    std::size_t mismatches = 0;
    for (const auto& r : rows) {
      ++counts[r.result];
      if (r.expected && (r.result == "sat" || r.result == "unsat") && *r.expected != r.result)
        ++mismatches;
    }
    out << "bench: " << rows.size() << " files, sat=" << counts["sat"]
        << " unsat=" << counts["unsat"] << " unknown=" << counts["unknown"]
        << " error=" << counts["error"] << " wrong=" << mismatches << "\n";
    return mismatches == 0 ? 0 : 1;
  }

  if (input.empty()) {
    err << "chc-ta: missing input FILE\n" << app.help();
    return 1;
  }
  CliConfig cfg;
  cfg.input = input;
  cfg.engine = engine_config(flags);
  cfg.witness = flags.witness;
  cfg.stats = flags.stats;
  cfg.dump_automata = flags.dump_automata;
  return solve_file(cfg, out, err);
}

}  // namespace chcta
