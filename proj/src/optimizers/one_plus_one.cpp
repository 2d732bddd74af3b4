#include <cmath>
#include <limits>

#include "shiwa/optimizers.hpp"

namespace shiwa {

OnePlusOneEs::OnePlusOneEs(std::size_t d, std::uint64_t seed, OptimizerOptions options)
    : Optimizer(d, options.budget),
      rng_(seed),
      parent_(options.start.value_or(Vector::Zero(static_cast<Eigen::Index>(d)))),
      parent_value_(std::numeric_limits<double>::infinity()),
      sigma_(options.sigma) {
  if (static_cast<std::size_t>(parent_.size()) != d) {
    throw DimensionMismatch("(1+1)-ES start point has the wrong dimension");
  }
  const double damping = std::sqrt(static_cast<double>(d) + 1.0);
  up_ = std::exp(1.0 / damping);
  down_ = std::exp(-0.25 / damping);
}

Candidate OnePlusOneEs::next_candidate() {
  if (!parent_asked_) {
    parent_asked_ = true;
    return Candidate::continuous(parent_);
  }
  std::normal_distribution<double> normal;
  Vector x(parent_.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = parent_[i] + sigma_ * normal(rng_);
  return Candidate::continuous(std::move(x));
}

void OnePlusOneEs::observe(const Candidate& c, double value, bool requested) {
  const bool is_parent = c.point == parent_;
  if (is_parent) {
    parent_value_ = std::min(parent_value_, value);
    return;
  }
  const bool improved = value < parent_value_;
  if (improved) {
    parent_ = c.point;
    parent_value_ = value;
  }
  if (!requested) return;
  sigma_ *= improved ? up_ : down_;
}

void OnePlusOneEs::reseat(const Candidate& parent, double value) {
  parent_ = parent.point;
  parent_value_ = value;
  parent_asked_ = true;
}

std::unique_ptr<OnePlusOneEs> make_one_plus_one_es(std::size_t d, std::uint64_t seed,
                                                   OptimizerOptions options) {
  return std::make_unique<OnePlusOneEs>(d, seed, std::move(options));
}

}  // namespace shiwa
