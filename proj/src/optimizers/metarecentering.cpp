#include <algorithm>
#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "shiwa/optimizers.hpp"

namespace shiwa {

namespace {

std::vector<int> first_primes(std::size_t count) {
  std::vector<int> primes;
  for (int candidate = 2; primes.size() < count; ++candidate) {
    bool prime = true;
    for (int p : primes) {
      if (p * p > candidate) break;
      if (candidate % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(candidate);
  }
  return primes;
}

}  // namespace

double MetaRecentering::rescaling(std::size_t budget, std::size_t d) {
  const double s = std::sqrt(std::log(static_cast<double>(budget)) / static_cast<double>(d));
  return std::clamp(s, 0.01, 100.0);
}

// Scrambling is a random affine digit permutation per (dimension, digit):
// digit -> (a * digit + c) mod base with a != 0.
MetaRecentering::MetaRecentering(std::size_t d, std::size_t budget, std::uint64_t seed)
    : Optimizer(d, budget), budget_(budget), scale_(rescaling(budget, d)) {
  if (budget < 1) throw InvalidDescriptor("MetaRecentering needs a positive budget");
  if (d > 1) bases_ = first_primes(d - 1);
  Rng rng(seed);
  perms_.resize(bases_.size());
  digits_.resize(bases_.size());
  for (std::size_t j = 0; j < bases_.size(); ++j) {
    const int b = bases_[j];
    int k = 0;
    for (std::size_t rest = budget - 1; rest > 0; rest /= static_cast<std::size_t>(b)) ++k;
    digits_[j] = std::max(1, k);
    std::uniform_int_distribution<int> mult(1, b - 1);
    std::uniform_int_distribution<int> shift(0, b - 1);
    for (int digit = 0; digit < digits_[j]; ++digit) perms_[j].push_back({mult(rng), shift(rng)});
  }
}

Candidate MetaRecentering::next_candidate() {
  static const boost::math::normal_distribution<double> standard;
  const std::size_t i = num_ask();
  Vector x(static_cast<Eigen::Index>(dimension()));
  x[0] = (static_cast<double>(i) + 0.5) / static_cast<double>(budget_);
  for (std::size_t j = 0; j < bases_.size(); ++j) {
    const auto b = static_cast<std::size_t>(bases_[j]);
    double u = 0.0;
    double weight = 1.0 / static_cast<double>(b);
    std::size_t rest = i;
    for (int k = 0; k < digits_[j]; ++k) {
      const auto digit = rest % b;
      rest /= b;
      const auto& ac = perms_[j][static_cast<std::size_t>(k)];
      const auto scrambled = (static_cast<std::size_t>(ac[0]) * digit + static_cast<std::size_t>(ac[1])) % b;
      u += static_cast<double>(scrambled) * weight;
      weight /= static_cast<double>(b);
    }
    u += 0.5 * weight * static_cast<double>(b);
    x[static_cast<Eigen::Index>(j + 1)] = u;
  }
  for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = scale_ * boost::math::quantile(standard, x[j]);
  return Candidate::continuous(std::move(x));
}

RandomSearch::RandomSearch(std::size_t d, std::uint64_t seed, OptimizerOptions options)
    : Optimizer(d, options.budget), rng_(seed), sigma_(options.sigma) {}

Candidate RandomSearch::next_candidate() {
  std::normal_distribution<double> normal;
  Vector x(static_cast<Eigen::Index>(dimension()));
  for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = sigma_ * normal(rng_);
  return Candidate::continuous(std::move(x));
}

std::unique_ptr<MetaRecentering> make_metarecentering(std::size_t d, std::size_t budget,
                                                      std::size_t parallelism, std::uint64_t seed) {
  if (parallelism < 1 || parallelism > budget) {
    throw InvalidDescriptor("MetaRecentering parallelism must lie in [1, budget]");
  }
  return std::make_unique<MetaRecentering>(d, budget, seed);
}

std::unique_ptr<RandomSearch> make_random_search(std::size_t d, std::uint64_t seed, OptimizerOptions options) {
  return std::make_unique<RandomSearch>(d, seed, std::move(options));
}

}  // namespace shiwa
