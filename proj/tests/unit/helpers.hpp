#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "shiwa/benchmark.hpp"
#include "shiwa/core.hpp"

namespace testing {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double sphere(const shiwa::Vector& x) { return x.squaredNorm(); }

// Runs to budget and returns the objective at the recommendation.
inline double run(shiwa::Optimizer& opt, const std::function<double(const shiwa::Vector&)>& f, std::size_t budget,
                  std::size_t parallelism = 1) {
  shiwa::minimize(opt, [&f](const shiwa::Candidate& c) { return f(c.point); }, budget, parallelism);
  return f(opt.recommend().point);
}

inline shiwa::Cell cell(const std::string& function, std::size_t d, std::size_t budget, bool rotated = false,
                        bool noisy = false, std::size_t parallelism = 1) {
  return shiwa::Cell{"custom", function, d, d, budget, parallelism, rotated, noisy};
}

// Noise-free loss of the recommendation after a full run on the instance.
inline double run_instance(shiwa::Optimizer& opt, const shiwa::ProblemInstance& prototype) {
  shiwa::ProblemInstance inst = prototype;
  shiwa::minimize(opt, [&inst](const shiwa::Candidate& c) { return inst.evaluate(c.point); }, inst.cell.budget,
                  inst.cell.parallelism);
  return inst.evaluate_noise_free(opt.recommend().point);
}

}  // namespace testing
