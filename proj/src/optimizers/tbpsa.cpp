#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "shiwa/optimizers.hpp"

namespace shiwa {

namespace {
constexpr double kProgressTolerance = 1e-12;
constexpr std::size_t kStagnationWindow = 5;  // in units of lambda tells
}  // namespace

Tbpsa::Tbpsa(std::size_t d, std::uint64_t seed, Options options)
    : Optimizer(d, options.base.budget),
      options_(std::move(options)),
      rng_(seed),
      dim_(d),
      lambda_(std::max<std::size_t>(4, 4 * d)),
      initial_lambda_(lambda_),
      sigma_(options_.base.sigma),
      tau_(1.0 / std::sqrt(2.0 * static_cast<double>(d))) {
  const auto de = static_cast<Eigen::Index>(d);
  mean_ = options_.base.start.value_or(Vector::Zero(de));
  if (mean_.size() != de) throw DimensionMismatch("TBPSA start point has the wrong dimension");
}

std::string Tbpsa::name() const {
  if (options_.recombine_with_best) return "TBPSA-recombination";
  return options_.noisy ? "TBPSA" : "NaiveTBPSA";
}

Candidate Tbpsa::next_candidate() {
  std::normal_distribution<double> normal;
  const double s = sigma_ * std::exp(tau_ * normal(rng_));
  Vector x(static_cast<Eigen::Index>(dim_));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = mean_[i] + s * normal(rng_);
  if (options_.recombine_with_best) {
    if (const Archive::Entry* best = archive().best()) {
      partner_ = best->candidate.point;
      x = 0.5 * (x + *partner_);
    }
  }
  issued_[PointKey(x)].push_back(s);
  return Candidate::continuous(std::move(x));
}

void Tbpsa::observe(const Candidate& c, double value, bool requested) {
  if (!requested) return;
  auto it = issued_.find(PointKey(c.point));
  if (it == issued_.end()) return;
  const double s = it->second.front();
  it->second.pop_front();
  if (it->second.empty()) issued_.erase(it);
  told_.push_back(Offspring{c.point, s, value});
  loss_record_.push_back(value);
  if (told_.size() < lambda_) return;

  std::vector<Offspring> gen(told_.begin(), told_.begin() + static_cast<std::ptrdiff_t>(lambda_));
  told_.erase(told_.begin(), told_.begin() + static_cast<std::ptrdiff_t>(lambda_));
  std::stable_sort(gen.begin(), gen.end(), [](const Offspring& a, const Offspring& b) { return a.value < b.value; });

  const std::size_t mu = std::max<std::size_t>(1, lambda_ / 4);
  Vector centre = Vector::Zero(mean_.size());
  double log_sigma = 0.0;
  for (std::size_t i = 0; i < mu; ++i) {
    centre += gen[i].point;
    log_sigma += std::log(gen[i].sigma);
  }
  const double inv = 1.0 / static_cast<double>(mu);
  mean_ = centre * inv;
  sigma_ = std::clamp(std::exp(log_sigma * inv), 1e-300, 1e300);
  ++generation_;

  // Compare the mean loss of the first and last lambda tells of the window.
  if (loss_record_.size() >= kStagnationWindow * lambda_) {
    const auto n = static_cast<std::ptrdiff_t>(lambda_);
    const double first = std::accumulate(loss_record_.begin(), loss_record_.begin() + n, 0.0) / static_cast<double>(n);
    const double last = std::accumulate(loss_record_.end() - n, loss_record_.end(), 0.0) / static_cast<double>(n);
    if (!(last < first - kProgressTolerance)) {
      lambda_ *= 2;
      ++growth_events_;
    }
    loss_record_.clear();
  }
}

Candidate Tbpsa::best_guess() const {
  if (options_.noisy && generation_ > 0) return Candidate::continuous(mean_);
  return Optimizer::best_guess();
}

std::unique_ptr<Tbpsa> make_tbpsa(std::size_t d, std::uint64_t seed, bool noisy, OptimizerOptions options) {
  return std::make_unique<Tbpsa>(d, seed, Tbpsa::Options{std::move(options), noisy, false});
}

std::unique_ptr<Tbpsa> make_tbpsa_recombination(std::size_t d, std::uint64_t seed, OptimizerOptions options) {
  return std::make_unique<Tbpsa>(d, seed, Tbpsa::Options{std::move(options), false, true});
}

}  // namespace shiwa
