#include "shiwa/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "shiwa/benchmark.hpp"
#include "shiwa/selector.hpp"

namespace shiwa {

namespace {

namespace fs = std::filesystem;

struct UsageError : Error {
  using Error::Error;
};

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

fs::path default_output_dir() {
  if (const char* env = std::getenv("SHIWA_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return "shiwa-out";
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("failed writing " + path.string());
}

struct RunArgs {
  std::string benchmark;
  std::string optims = "shiwa,cma,de";
  std::size_t reps = 5;
  std::uint64_t seed = 0;
  std::string out;
  double timeout = 300.0;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::string manifest;
  std::vector<std::size_t> cells;
  bool quiet = false;
};

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  if (!args.manifest.empty()) {
    config = config_from_manifest(read_file(args.manifest));
  } else {
    if (args.benchmark.empty()) throw UsageError("run needs --benchmark or --manifest");
    config.benchmark = args.benchmark;
    std::stringstream list(args.optims);
    for (std::string name; std::getline(list, name, ',');) {
      if (!name.empty()) config.optimizers.push_back(name);
    }
    config.repetitions = args.reps;
    config.seed = args.seed;
    config.timeout_seconds = args.timeout;
    config.cell_filter = args.cells;
  }
  config.workers = args.workers;

  try {
    find_benchmark(config.benchmark);
  } catch (const UnknownName& e) {
    std::vector<std::string> names;
    for (const auto& b : benchmarks()) names.push_back(b.name);
    throw UsageError(std::string(e.what()) + "; valid benchmarks: " + join(names));
  }
  if (config.optimizers.empty()) throw UsageError("no optimizer given; valid optimizers: " + join(optimizer_names()));
  for (const auto& name : config.optimizers) {
    if (std::find(optimizer_names().begin(), optimizer_names().end(), name) == optimizer_names().end()) {
      throw UsageError("unknown optimizer '" + name + "'; valid optimizers: " + join(optimizer_names()));
    }
  }
  if (config.repetitions < 1) throw UsageError("--reps must be at least 1");
  if (!(config.timeout_seconds > 0.0)) throw UsageError("--timeout must be positive");

  const fs::path dir = args.out.empty() ? default_output_dir() : fs::path(args.out);
  fs::create_directories(dir);

  std::function<void(std::size_t, std::size_t)> progress;
  if (!args.quiet) {
    progress = [&err](std::size_t done, std::size_t total) {
      if (done == total || done % 50 == 0) err << "  " << done << "/" << total << " runs\n";
    };
  }
  const auto rows = run_experiment(config, progress);

  std::ostringstream csv;
  write_results_csv(csv, rows);
  write_file(dir / "results.csv", csv.str());
  write_file(dir / "manifest.json", manifest_json(config));

  std::size_t failures = 0;
  for (const auto& r : rows) failures += r.status != RunStatus::Ok;
  out << "wrote " << rows.size() << " rows (" << failures << " failed or timed out) to " << (dir / "results.csv").string()
      << "\n";
  return 0;
}

int cmd_score(const std::string& results, const std::string& out_dir, std::ostream& out) {
  std::ifstream in(results, std::ios::binary);
  if (!in) throw Error("cannot read " + results);
  const auto rows = read_results_csv(in);
  const ScoreMatrix m = score(rows);
  const fs::path dir = out_dir.empty() ? fs::path(results).parent_path() : fs::path(out_dir);
  if (!dir.empty()) fs::create_directories(dir);
  std::ostringstream csv, svg;
  write_score_csv(csv, m);
  write_score_svg(svg, m);
  write_file(dir / "scores.csv", csv.str());
  write_file(dir / "scores.svg", svg.str());
  int rank = 1;
  for (std::size_t i : m.ranking()) {
    out << std::setw(3) << rank++ << "  " << std::left << std::setw(18) << m.optimizers[i] << std::right
        << std::fixed << std::setprecision(4) << m.mean_score[i] << "\n";
  }
  out.unsetf(std::ios::fixed);
  return 0;
}

struct ExplainArgs {
  std::optional<std::size_t> dim;
  std::size_t budget = 0;
  std::size_t workers = 1;
  bool noisy = false;
  std::optional<std::size_t> discrete;
  int arity = 2;
};

int cmd_explain(const ExplainArgs& args, std::ostream& out) {
  ProblemDescriptor descriptor;
  if (args.discrete) {
    if (*args.discrete < 1) throw UsageError("--discrete needs at least one variable");
    if (args.arity < 2) throw UsageError("--arity must be at least 2");
    descriptor = ProblemDescriptor::for_domain(Domain::categorical(*args.discrete, args.arity), args.budget,
                                               args.workers, args.noisy);
    if (args.dim && *args.dim != descriptor.dimension) {
      throw UsageError("--dim " + std::to_string(*args.dim) + " does not match the encoded dimension " +
                       std::to_string(descriptor.dimension));
    }
  } else {
    if (!args.dim) throw UsageError("explain needs --dim (or --discrete)");
    descriptor = ProblemDescriptor::continuous(*args.dim, args.budget, args.workers, args.noisy);
  }
  try {
    out << select(descriptor).explain();
  } catch (const InvalidDescriptor& e) {
    throw UsageError(e.what());
  }
  return 0;
}

int cmd_list(std::ostream& out) {
  out << "benchmarks:\n";
  for (const auto& b : benchmarks()) out << "  " << b.name << " (" << grid_cells(b).size() << " cells)\n";
  out << "optimizers:\n";
  for (const auto& n : optimizer_names()) out << "  " << n << "\n";
  out << "functions:\n";
  for (const auto& n : function_names()) out << "  " << n << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Algorithm-selection black-box optimizer and benchmark harness", "shiwa"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a benchmark grid and write results.csv and manifest.json");
  run_cmd->add_option("--benchmark", run.benchmark, "Benchmark name (see `list`)");
  run_cmd->add_option("--optims", run.optims, "Comma-separated optimizer names")->capture_default_str();
  run_cmd->add_option("--reps", run.reps, "Repetitions per cell")->capture_default_str();
  run_cmd->add_option("--seed", run.seed, "Master seed")->capture_default_str();
  run_cmd->add_option("--out", run.out, "Output directory (default: $SHIWA_OUTPUT_DIR or ./shiwa-out)");
  run_cmd->add_option("--timeout", run.timeout, "Per-run wall-clock limit in seconds")->capture_default_str();
  run_cmd->add_option("--workers", run.workers, "Worker threads");
  run_cmd->add_option("--manifest", run.manifest, "Rerun the experiment described by a manifest");
  run_cmd->add_option("--cells", run.cells, "Restrict to these grid cell indices");
  run_cmd->add_flag("--quiet", run.quiet, "No progress output");

  std::string results;
  std::string score_out;
  auto* score_cmd = app.add_subcommand("score", "Score a results CSV; writes scores.csv and scores.svg");
  score_cmd->add_option("results", results, "Results CSV")->required();
  score_cmd->add_option("--out", score_out, "Output directory (default: next to the results)");

  ExplainArgs explain;
  auto* explain_cmd = app.add_subcommand("explain", "Show how a problem is routed");
  explain_cmd->add_option("--dim", explain.dim, "Dimension");
  explain_cmd->add_option("--budget", explain.budget, "Evaluation budget")->required();
  explain_cmd->add_option("--workers", explain.workers, "Parallel workers")->capture_default_str();
  explain_cmd->add_flag("--noisy", explain.noisy, "Noisy objective");
  explain_cmd->add_option("--discrete", explain.discrete, "Number of categorical variables");
  explain_cmd->add_option("--arity", explain.arity, "Categories per variable")->capture_default_str();

  auto* list_cmd = app.add_subcommand("list", "List benchmarks, optimizers and functions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return cmd_run(run, out, err);
    if (*score_cmd) return cmd_score(results, score_out, out);
    if (*explain_cmd) return cmd_explain(explain, out);
    if (*list_cmd) return cmd_list(out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace shiwa
