#include <cmath>
#include <limits>

#include "shiwa/optimizers.hpp"

namespace shiwa {

DifferentialEvolution::DifferentialEvolution(std::size_t d, std::uint64_t seed, Options options)
    : Optimizer(d, options.base.budget), options_(std::move(options)), rng_(seed) {
  if (options_.population < 4) throw InvalidDescriptor("DE needs a population of at least 4");
  const auto de = static_cast<Eigen::Index>(d);
  const Vector centre = options_.base.start.value_or(Vector::Zero(de));
  if (centre.size() != de) throw DimensionMismatch("DE start point has the wrong dimension");
  std::normal_distribution<double> normal;
  points_.reserve(options_.population);
  for (std::size_t i = 0; i < options_.population; ++i) {
    Vector x(de);
    for (Eigen::Index j = 0; j < de; ++j) x[j] = centre[j] + options_.base.sigma * normal(rng_);
    points_.push_back(std::move(x));
  }
  if (options_.base.start) points_[0] = centre;
  values_.assign(options_.population, std::numeric_limits<double>::infinity());
}

DifferentialEvolution::DifferentialEvolution(std::size_t d, std::uint64_t seed, OptimizerOptions base)
    : DifferentialEvolution(d, seed, Options{std::move(base)}) {}

std::size_t DifferentialEvolution::evaluated_individuals() const {
  std::size_t n = 0;
  for (double v : values_) n += std::isfinite(v);
  return n;
}

Candidate DifferentialEvolution::next_candidate() {
  const std::size_t np = options_.population;
  const std::size_t target = next_index_ % np;
  ++next_index_;

  Vector trial;
  if (next_index_ <= np) {
    trial = points_[target];
  } else {
    std::uniform_int_distribution<std::size_t> pick(0, np - 1);
    std::size_t a, b, c;
    do a = pick(rng_); while (a == target);
    do b = pick(rng_); while (b == target || b == a);
    do c = pick(rng_); while (c == target || c == a || c == b);

    const auto d = static_cast<Eigen::Index>(dimension());
    std::uniform_int_distribution<Eigen::Index> pick_dim(0, d - 1);
    std::uniform_real_distribution<double> unit;
    const Eigen::Index forced = pick_dim(rng_);
    trial = points_[target];
    for (Eigen::Index j = 0; j < d; ++j) {
      if (j == forced || unit(rng_) < options_.crossover) {
        trial[j] = points_[a][j] + options_.differential_weight * (points_[b][j] - points_[c][j]);
      }
    }
  }
  pending_[PointKey(trial)].push_back(target);
  return Candidate::continuous(std::move(trial));
}

void DifferentialEvolution::observe(const Candidate& c, double value, bool requested) {
  if (!requested) return;
  auto it = pending_.find(PointKey(c.point));
  if (it == pending_.end()) return;
  const std::size_t target = it->second.front();
  it->second.pop_front();
  if (it->second.empty()) pending_.erase(it);
  if (value <= values_[target]) {
    points_[target] = c.point;
    values_[target] = value;
  }
}

std::unique_ptr<DifferentialEvolution> make_de(std::size_t d, std::uint64_t seed, OptimizerOptions options) {
  return std::make_unique<DifferentialEvolution>(d, seed, std::move(options));
}

}  // namespace shiwa
