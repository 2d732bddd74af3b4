#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shiwa/core.hpp"

namespace shiwa {

class GridViolation : public Error {
 public:
  using Error::Error;
};
class NoOverlap : public Error {
 public:
  using Error::Error;
};
class UnknownName : public Error {
 public:
  using Error::Error;
};
// Malformed CSV input; `line` is 1-based.
class CsvError : public Error {
 public:
  CsvError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// ---------------------------------------------------------------------------
// Function catalog. Every function takes z = R (x - t) and has its minimum 0
// at z = 0. See docs/functions.md for the formulas.

using TestFunction = double (*)(const Vector& z);

const std::vector<std::string>& function_names();
// Throws UnknownName.
TestFunction find_function(std::string_view name);

// ---------------------------------------------------------------------------
// Benchmark grids

struct BenchmarkSpec {
  std::string name;
  std::vector<std::string> functions;
  // Number of variables that affect the objective.
  std::vector<std::size_t> critical;
  // Extra variables per critical variable that do not affect the objective.
  std::vector<std::size_t> useless_per_critical{0};
  std::vector<std::size_t> budgets;
  std::size_t parallelism = 1;
  std::vector<bool> rotations{false, true};
  bool noisy = false;
};

const std::vector<BenchmarkSpec>& benchmarks();
// Throws UnknownName.
const BenchmarkSpec& find_benchmark(std::string_view name);

struct Cell {
  std::string benchmark;
  std::string function;
  std::size_t dimension = 0;
  std::size_t critical = 0;
  std::size_t budget = 0;
  // Workers actually used: min(grid parallelism, budget).
  std::size_t parallelism = 1;
  bool rotated = false;
  bool noisy = false;
};

// Grid cells in a fixed order: dimension, budget, rotation, function.
std::vector<Cell> grid_cells(const BenchmarkSpec& spec);

// ---------------------------------------------------------------------------
// Instances

struct ProblemInstance {
  Cell cell;
  std::uint64_t seed = 0;
  TestFunction function = nullptr;
  // Over the critical variables.
  Vector translation;
  // Empty when unrotated.
  Matrix rotation;
  double noise_sigma = 1.0;

  // f(R (x - t)), plus N(0, noise_sigma^2) on noisy instances. Each noisy call
  // draws from a fresh sub-seed derived from the instance seed and a call
  // counter. Throws DimensionMismatch.
  double evaluate(const Vector& x) const;
  double evaluate_noise_free(const Vector& x) const;
  std::uint64_t calls() const { return calls_; }

 private:
  mutable std::uint64_t calls_ = 0;
};

// Throws GridViolation when a parameter is outside the named grid, UnknownName
// for unknown benchmark or function names.
ProblemInstance make_instance(std::string_view benchmark, std::string_view function, std::size_t d,
                              std::size_t budget, std::size_t parallelism, bool rotated, std::uint64_t seed);
ProblemInstance make_instance(const Cell& cell, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Named optimizers

const std::vector<std::string>& optimizer_names();
// Throws UnknownName.
OptimizerPtr make_named_optimizer(std::string_view name, const ProblemDescriptor& descriptor, std::uint64_t seed);

// FNV-1a, stable across platforms.
std::uint64_t stable_hash(std::string_view text);

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentConfig {
  std::string benchmark;
  std::vector<std::string> optimizers;
  std::size_t repetitions = 5;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  double timeout_seconds = 300.0;
  // Restricts the grid; empty means every cell.
  std::vector<std::size_t> cell_filter;
};

enum class RunStatus { Ok, Timeout, Failed };
std::string_view to_string(RunStatus status);

struct ResultRow {
  std::string benchmark;
  std::string function;
  std::size_t dimension = 0;
  std::size_t budget = 0;
  std::size_t parallelism = 1;
  bool rotated = false;
  bool noisy = false;
  std::string optimizer;
  std::uint64_t seed = 0;
  double loss = 0.0;
  RunStatus status = RunStatus::Ok;
};

// Seed of the instance for (cell, repetition); shared by all optimizers.
std::uint64_t instance_seed(std::uint64_t master, std::size_t cell_index, std::size_t repetition);
// Seed handed to an optimizer on an instance.
std::uint64_t optimizer_seed(std::uint64_t instance, std::string_view optimizer);

// Runs `optimizer` for the instance budget and returns the noise-free loss of
// its recommendation.
ResultRow run_single(const ProblemInstance& instance, const std::string& optimizer, double timeout_seconds);

// Rows ordered by (cell, repetition, optimizer). Throws UnknownName before
// running anything.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config,
                                      const std::function<void(std::size_t, std::size_t)>& progress = {});

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
// Throws CsvError.
std::vector<ResultRow> read_results_csv(std::istream& in);

// ---------------------------------------------------------------------------
// Scoring

struct ScoreMatrix {
  std::vector<std::string> optimizers;
  // wins[i][j]: frequency of optimizers[i] beating optimizers[j] on shared
  // problems, ties counted 1/2. NaN for pairs without a shared problem.
  std::vector<std::vector<double>> wins;
  std::vector<std::size_t> shared;  // row-major, optimizers.size()^2
  std::vector<double> mean_score;

  std::size_t size() const { return optimizers.size(); }
  // Indices by decreasing mean score, then name.
  std::vector<std::size_t> ranking() const;
};

// Only Ok rows take part. Throws NoOverlap with fewer than two optimizers or
// when no pair shares a problem.
ScoreMatrix score(const std::vector<ResultRow>& rows);

// Ranked order, columns in the same order as rows.
void write_score_csv(std::ostream& out, const ScoreMatrix& matrix);
ScoreMatrix read_score_csv(std::istream& in);
// Grey scale: 0 is black, 1 is white. Each cell carries data-row, data-col and
// data-value attributes.
void write_score_svg(std::ostream& out, const ScoreMatrix& matrix);

// Manifest holding everything needed to rerun an experiment.
std::string manifest_json(const ExperimentConfig& config);
ExperimentConfig config_from_manifest(const std::string& json);

}  // namespace shiwa
