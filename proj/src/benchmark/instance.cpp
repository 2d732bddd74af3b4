#include <algorithm>

#include <Eigen/QR>

#include "shiwa/benchmark.hpp"

namespace shiwa {

namespace {

std::vector<BenchmarkSpec> build_benchmarks() {
  const std::vector<std::size_t> yabbob_budgets{50, 200, 800, 3200, 12800};
  std::vector<BenchmarkSpec> out;

  BenchmarkSpec yabbob;
  yabbob.name = "yabbob";
  yabbob.functions = function_names();
  yabbob.critical = {2, 10, 50};
  yabbob.budgets = yabbob_budgets;
  out.push_back(yabbob);

  BenchmarkSpec big = yabbob;
  big.name = "yabigbbob";
  big.budgets = {40000, 80000};
  out.push_back(big);

  BenchmarkSpec hd = yabbob;
  hd.name = "yahdbbob";
  hd.critical = {100, 1000, 3000};
  out.push_back(hd);

  BenchmarkSpec noisy = yabbob;
  noisy.name = "yanoisybbob";
  noisy.noisy = true;
  out.push_back(noisy);

  BenchmarkSpec para = yabbob;
  para.name = "yaparabbob";
  para.parallelism = 100;
  out.push_back(para);

  BenchmarkSpec mini = yabbob;
  mini.name = "yabbob-mini";
  mini.critical = {2, 10};
  mini.budgets = {50, 200, 800};
  out.push_back(mini);

  BenchmarkSpec illcondi;
  illcondi.name = "illcondi";
  illcondi.functions = {"cigar", "ellipsoid"};
  illcondi.critical = {50};
  illcondi.budgets = {100, 1000, 10000};
  out.push_back(illcondi);

  BenchmarkSpec multimodal;
  multimodal.name = "multimodal";
  multimodal.functions = {"hm", "rastrigin", "griewank", "rosenbrock", "ackley", "lunacek", "deceptivemultimodal"};
  multimodal.critical = {3, 25};
  multimodal.useless_per_critical = {0, 5};
  multimodal.budgets = {3000, 10000, 30000, 100000};
  multimodal.rotations = {false};
  out.push_back(multimodal);

  return out;
}

template <typename T>
bool contains(const std::vector<T>& v, const T& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

const std::vector<BenchmarkSpec>& benchmarks() {
  static const std::vector<BenchmarkSpec> specs = build_benchmarks();
  return specs;
}

const BenchmarkSpec& find_benchmark(std::string_view name) {
  for (const BenchmarkSpec& s : benchmarks()) {
    if (s.name == name) return s;
  }
  throw UnknownName("unknown benchmark '" + std::string(name) + "'");
}

std::vector<Cell> grid_cells(const BenchmarkSpec& spec) {
  std::vector<Cell> cells;
  for (std::size_t c : spec.critical) {
    for (std::size_t u : spec.useless_per_critical) {
      for (std::size_t T : spec.budgets) {
        for (bool rotated : spec.rotations) {
          for (const std::string& f : spec.functions) {
            cells.push_back(Cell{spec.name, f, c * (1 + u), c, T, std::min(spec.parallelism, T), rotated, spec.noisy});
          }
        }
      }
    }
  }
  return cells;
}

double ProblemInstance::evaluate_noise_free(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != cell.dimension) {
    throw DimensionMismatch("point has dimension " + std::to_string(x.size()) + ", instance has " +
                            std::to_string(cell.dimension));
  }
  const auto c = static_cast<Eigen::Index>(cell.critical);
  Vector z = x.head(c) - translation;
  if (rotation.size() > 0) z = rotation * z;
  return function(z);
}

double ProblemInstance::evaluate(const Vector& x) const {
  const double f = evaluate_noise_free(x);
  if (!cell.noisy) return f;
  Rng rng(derive_seed(derive_seed(seed, 2), calls_++));
  return f + noise_sigma * std::normal_distribution<double>()(rng);
}

ProblemInstance make_instance(const Cell& cell, std::uint64_t seed) {
  ProblemInstance inst;
  inst.cell = cell;
  inst.seed = seed;
  inst.function = find_function(cell.function);
  const auto c = static_cast<Eigen::Index>(cell.critical);

  std::normal_distribution<double> normal;
  Rng shift_rng(derive_seed(seed, 0));
  inst.translation.resize(c);
  for (Eigen::Index i = 0; i < c; ++i) inst.translation[i] = normal(shift_rng);

  if (cell.rotated) {
    Rng rot_rng(derive_seed(seed, 1));
    Matrix a(c, c);
    for (Eigen::Index j = 0; j < c; ++j) {
      for (Eigen::Index i = 0; i < c; ++i) a(i, j) = normal(rot_rng);
    }
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = qr.householderQ();
    const Matrix& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < c; ++j) {
      if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }
    inst.rotation = std::move(q);
  }
  return inst;
}

ProblemInstance make_instance(std::string_view benchmark, std::string_view function, std::size_t d,
                              std::size_t budget, std::size_t parallelism, bool rotated, std::uint64_t seed) {
  const BenchmarkSpec& spec = find_benchmark(benchmark);
  find_function(function);
  const std::string fn(function);
  if (!contains(spec.functions, fn)) {
    throw GridViolation(fn + " is not part of " + spec.name);
  }
  std::optional<std::size_t> critical;
  for (std::size_t c : spec.critical) {
    for (std::size_t u : spec.useless_per_critical) {
      if (c * (1 + u) == d) critical = c;
    }
  }
  if (!critical) throw GridViolation("dimension " + std::to_string(d) + " is not on the " + spec.name + " grid");
  if (!contains(spec.budgets, budget)) {
    throw GridViolation("budget " + std::to_string(budget) + " is not on the " + spec.name + " grid");
  }
  const std::size_t workers = std::min(spec.parallelism, budget);
  if (parallelism != spec.parallelism && parallelism != workers) {
    throw GridViolation("parallelism " + std::to_string(parallelism) + " is not on the " + spec.name + " grid");
  }
  if (!contains(spec.rotations, rotated)) {
    throw GridViolation(std::string(rotated ? "rotated" : "unrotated") + " instances are not on the " + spec.name +
                        " grid");
  }
  return make_instance(Cell{spec.name, fn, d, *critical, budget, workers, rotated, spec.noisy}, seed);
}

}  // namespace shiwa
