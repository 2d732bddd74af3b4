#include <limits>

#include "shiwa/optimizers.hpp"

namespace shiwa {

ParticleSwarm::ParticleSwarm(std::size_t d, std::uint64_t seed, Options options)
    : Optimizer(d, options.base.budget),
      options_(std::move(options)),
      rng_(seed),
      global_value_(std::numeric_limits<double>::infinity()) {
  const auto de = static_cast<Eigen::Index>(d);
  const Vector centre = options_.base.start.value_or(Vector::Zero(de));
  if (centre.size() != de) throw DimensionMismatch("PSO start point has the wrong dimension");
  const std::size_t n = options_.particles;
  if (n < 1) throw InvalidDescriptor("PSO needs at least one particle");
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < n; ++i) {
    Vector x(de), v(de);
    for (Eigen::Index j = 0; j < de; ++j) {
      x[j] = centre[j] + options_.base.sigma * normal(rng_);
      v[j] = 0.5 * options_.base.sigma * normal(rng_);
    }
    position_.push_back(x);
    best_point_.push_back(std::move(x));
    velocity_.push_back(std::move(v));
  }
  if (options_.base.start) {
    position_[0] = centre;
    best_point_[0] = centre;
  }
  best_value_.assign(n, std::numeric_limits<double>::infinity());
  global_point_ = position_[0];
}

ParticleSwarm::ParticleSwarm(std::size_t d, std::uint64_t seed, OptimizerOptions base)
    : ParticleSwarm(d, seed, Options{std::move(base)}) {}

Candidate ParticleSwarm::next_candidate() {
  const std::size_t n = options_.particles;
  const std::size_t i = next_index_ % n;
  ++next_index_;
  if (next_index_ > n) {
    std::uniform_real_distribution<double> unit;
    Vector& x = position_[i];
    Vector& v = velocity_[i];
    const bool has_global = global_value_ < std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double social = has_global ? global_point_[j] - x[j] : 0.0;
      v[j] = options_.inertia * v[j] + options_.cognitive * unit(rng_) * (best_point_[i][j] - x[j]) +
             options_.social * unit(rng_) * social;
      x[j] += v[j];
    }
  }
  pending_[PointKey(position_[i])].push_back(i);
  return Candidate::continuous(position_[i]);
}

void ParticleSwarm::observe(const Candidate& c, double value, bool requested) {
  if (requested) {
    if (auto it = pending_.find(PointKey(c.point)); it != pending_.end()) {
      const std::size_t i = it->second.front();
      it->second.pop_front();
      if (it->second.empty()) pending_.erase(it);
      if (value < best_value_[i]) {
        best_value_[i] = value;
        best_point_[i] = c.point;
      }
    }
  }
  if (value < global_value_) {
    global_value_ = value;
    global_point_ = c.point;
  }
}

std::unique_ptr<ParticleSwarm> make_pso(std::size_t d, std::uint64_t seed, OptimizerOptions options) {
  return std::make_unique<ParticleSwarm>(d, seed, std::move(options));
}

}  // namespace shiwa
