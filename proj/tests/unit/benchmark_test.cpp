#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "helpers.hpp"
#include "shiwa/benchmark.hpp"

using namespace shiwa;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_SUITE("functions") {
  TEST_CASE("hand-computed values") {
    CHECK(find_function("sphere")(vec({1.0, 2.0})) == 5.0);
    CHECK(find_function("rastrigin")(vec({1.0, 0.0})) == doctest::Approx(1.0));
    CHECK(find_function("griewank")(vec({0.0, 0.0})) == 0.0);
    // Rosenbrock is shifted so that z = 0 maps onto (1, ..., 1); z = -1 is (0, ..., 0).
    CHECK(find_function("rosenbrock")(vec({-1.0, -1.0, -1.0})) == 2.0);
    CHECK(find_function("doublelinearslope")(vec({1.0, -3.0})) == 2.0);
    CHECK(find_function("stepdoublelinearslope")(vec({0.4, 0.4})) == 0.0);
    CHECK(find_function("ellipsoid")(vec({0.0, 1.0})) == doctest::Approx(1e6));
    CHECK(find_function("discus")(vec({1.0, 1.0, 1.0})) == doctest::Approx(1e6 + 2.0));
  }

  TEST_CASE("cigar conditioning") {
    const TestFunction cigar = find_function("cigar");
    Vector a = Vector::Zero(5), b = Vector::Zero(5);
    a[0] = 1.0;
    b[1] = 1.0;
    CHECK(cigar(b) / cigar(a) == 1e6);
  }

  TEST_CASE("property: every function is 0 at the origin and non-negative") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> normal(0.0, 2.0);
    for (const std::string& name : function_names()) {
      const TestFunction f = find_function(name);
      for (Eigen::Index d : {1, 2, 3, 10, 50}) {
        CHECK_MESSAGE(std::abs(f(Vector::Zero(d))) <= 1e-12, name);
        for (int trial = 0; trial < 50; ++trial) {
          Vector z(d);
          for (auto& v : z) v = normal(rng);
          const double value = f(z);
          CHECK_MESSAGE(std::isfinite(value), name);
          CHECK_MESSAGE(value >= 0.0, name);
        }
      }
    }
  }

  TEST_CASE("unknown names") {
    CHECK_THROWS_AS(find_function("Sphere"), UnknownName);
    CHECK_THROWS_AS(find_benchmark("bbob"), UnknownName);
  }
}

TEST_SUITE("instances") {
  TEST_CASE("rotations are orthogonal") {
    for (std::size_t d : {2u, 10u, 50u}) {
      const ProblemInstance inst = make_instance("yabbob", "sphere", d, 50, 1, true, 100 + d);
      const auto n = static_cast<Eigen::Index>(d);
      REQUIRE(inst.rotation.rows() == n);
      const double err = (inst.rotation.transpose() * inst.rotation - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
      CHECK(err < 1e-10);
    }
  }

  TEST_CASE("sphere optimum sits at the translation") {
    for (bool rotated : {false, true}) {
      const ProblemInstance inst = make_instance("yabbob", "sphere", 10, 200, 1, rotated, 5);
      CHECK(inst.evaluate(inst.translation) == 0.0);
      CHECK(inst.evaluate(Vector::Zero(10)) == doctest::Approx(inst.translation.squaredNorm()));
    }
  }

  TEST_CASE("same seed, same instance") {
    const ProblemInstance a = make_instance("yabbob", "ellipsoid", 10, 800, 1, true, 77);
    const ProblemInstance b = make_instance("yabbob", "ellipsoid", 10, 800, 1, true, 77);
    const ProblemInstance c = make_instance("yabbob", "ellipsoid", 10, 800, 1, true, 78);
    CHECK(a.translation == b.translation);
    CHECK(a.rotation == b.rotation);
    CHECK(a.translation != c.translation);
  }

  TEST_CASE("translations look standard normal") {
    double sum = 0.0, sq = 0.0;
    const int n = 400;
    for (int s = 0; s < n; ++s) {
      const ProblemInstance inst = make_instance("yabbob", "sphere", 50, 50, 1, false, static_cast<std::uint64_t>(s));
      sum += inst.translation.sum();
      sq += inst.translation.squaredNorm();
    }
    const double count = 50.0 * n;
    CHECK(std::abs(sum / count) < 4.0 / std::sqrt(count));
    CHECK(std::abs(sq / count - 1.0) < 0.05);
  }

  TEST_CASE("grid violations") {
    CHECK_THROWS_AS(make_instance("yahdbbob", "sphere", 50, 50, 1, false, 0), GridViolation);
    CHECK_THROWS_AS(make_instance("yabbob", "sphere", 3, 50, 1, false, 0), GridViolation);
    CHECK_THROWS_AS(make_instance("yabbob", "sphere", 2, 51, 1, false, 0), GridViolation);
    CHECK_THROWS_AS(make_instance("yabbob", "sphere", 2, 50, 4, false, 0), GridViolation);
    CHECK_THROWS_AS(make_instance("yabigbbob", "sphere", 2, 50, 1, false, 0), GridViolation);
    CHECK_THROWS_AS(make_instance("multimodal", "sphere", 3, 3000, 1, false, 0), GridViolation);
    CHECK_THROWS_AS(make_instance("multimodal", "rastrigin", 3, 3000, 1, true, 0), GridViolation);
    CHECK_NOTHROW(make_instance("yahdbbob", "sphere", 100, 50, 1, false, 0));
    CHECK_NOTHROW(make_instance("yaparabbob", "sphere", 2, 50, 50, false, 0));
    CHECK_NOTHROW(make_instance("yaparabbob", "sphere", 2, 800, 100, false, 0));
  }

  TEST_CASE("useless variables do not affect the value") {
    ProblemInstance inst = make_instance("multimodal", "rastrigin", 18, 3000, 1, false, 4);
    CHECK(inst.cell.critical == 3);
    Vector x = Vector::Zero(18);
    x.head(3) = inst.translation;
    CHECK(inst.evaluate(x) == 0.0);
    x.tail(15).setConstant(123.0);
    CHECK(inst.evaluate(x) == 0.0);
    CHECK_THROWS_AS(inst.evaluate(Vector::Zero(3)), DimensionMismatch);
  }

  TEST_CASE("noise has mean 0 and unit variance at the optimum") {
    const ProblemInstance inst = make_instance("yanoisybbob", "sphere", 2, 50, 1, false, 9);
    const int n = 10000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = inst.evaluate(inst.translation);
      sum += v;
      sq += v * v;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 3.0 / 100.0);
    CHECK(std::abs(var - 1.0) < 0.1);
    CHECK(inst.evaluate_noise_free(inst.translation) == 0.0);
    CHECK(inst.calls() == static_cast<std::uint64_t>(n));
  }

  TEST_CASE("grid sizes") {
    CHECK(grid_cells(find_benchmark("yabbob")).size() == 3 * 5 * 2 * 21);
    CHECK(grid_cells(find_benchmark("yabbob-mini")).size() == 252);
    CHECK(grid_cells(find_benchmark("multimodal")).size() == 2 * 2 * 4 * 7);
    for (const Cell& c : grid_cells(find_benchmark("yaparabbob"))) CHECK(c.parallelism == std::min<std::size_t>(100, c.budget));
  }
}

TEST_SUITE("experiments") {
  TEST_CASE("row count and order") {
    ExperimentConfig config;
    config.benchmark = "yabbob-mini";
    config.optimizers = {"cma", "de"};
    config.repetitions = 5;
    config.seed = 3;
    config.cell_filter = {0, 1, 2};
    const auto rows = run_experiment(config);
    REQUIRE(rows.size() == 30);
    const auto cells = grid_cells(find_benchmark("yabbob-mini"));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].optimizer == config.optimizers[i % 2]);
      CHECK(rows[i].function == cells[i / 10].function);
      CHECK(rows[i].seed == instance_seed(3, i / 10, (i / 2) % 5));
      CHECK(rows[i].status == RunStatus::Ok);
    }
  }

  TEST_CASE("reruns are bit-identical across worker counts") {
    ExperimentConfig config;
    config.benchmark = "yabbob-mini";
    config.optimizers = {"shiwa", "pso"};
    config.repetitions = 2;
    config.seed = 11;
    config.cell_filter = {5, 40, 100};
    const auto a = run_experiment(config);
    config.workers = 4;
    const auto b = run_experiment(config);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::memcmp(&a[i].loss, &b[i].loss, sizeof(double)) == 0);
    }
  }

  TEST_CASE("a timeout becomes a row, not a crash") {
    const ProblemInstance inst = make_instance("yahdbbob", "sphere", 3000, 50, 1, false, 0);
    const ResultRow row = run_single(inst, "cma", 1e-9);
    CHECK(row.status == RunStatus::Timeout);
    CHECK(std::isnan(row.loss));
    CHECK(row.dimension == 3000);
  }

  TEST_CASE("unknown optimizers are rejected before running") {
    ExperimentConfig config;
    config.benchmark = "yabbob-mini";
    config.optimizers = {"cma", "nope"};
    CHECK_THROWS_AS(run_experiment(config), UnknownName);
    config.optimizers = {"cma"};
    config.cell_filter = {252};
    CHECK_THROWS_AS(run_experiment(config), GridViolation);
  }

  TEST_CASE("seeds") {
    CHECK(stable_hash("") == 0xcbf29ce484222325ULL);
    CHECK(stable_hash("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(optimizer_seed(1, "cma") != optimizer_seed(1, "de"));
    CHECK(instance_seed(1, 0, 0) != instance_seed(1, 0, 1));
  }
}
