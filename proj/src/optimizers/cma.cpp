#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "shiwa/optimizers.hpp"
#include "shiwa/transforms.hpp"

namespace shiwa {

Cma::Cma(std::size_t d, std::uint64_t seed, Options options)
    : Optimizer(d, options.base.budget),
      seed_(seed),
      rng_(seed),
      softmax_(std::move(options.softmax_domain)),
      dim_(d) {
  const double n = static_cast<double>(d);
  lambda_ = options.population_size.value_or(4 + static_cast<std::size_t>(std::floor(3.0 * std::log(n))));
  if (lambda_ < 2) throw InvalidDescriptor("CMA population size must be at least 2");
  mu_ = lambda_ / 2;

  weights_.resize(static_cast<Eigen::Index>(mu_));
  for (std::size_t i = 0; i < mu_; ++i) {
    weights_[static_cast<Eigen::Index>(i)] =
        std::log(static_cast<double>(mu_) + 0.5) - std::log(static_cast<double>(i + 1));
  }
  weights_ /= weights_.sum();
  mueff_ = 1.0 / weights_.squaredNorm();

  cc_ = (4.0 + mueff_ / n) / (n + 4.0 + 2.0 * mueff_ / n);
  cs_ = (mueff_ + 2.0) / (n + mueff_ + 5.0);
  c1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mueff_);
  cmu_ = std::min(1.0 - c1_, 2.0 * (mueff_ - 2.0 + 1.0 / mueff_) / ((n + 2.0) * (n + 2.0) + mueff_));
  damps_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff_ - 1.0) / (n + 1.0)) - 1.0) + cs_;
  chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
  eigen_interval_ = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(1.0 / (10.0 * n * (c1_ + cmu_)))));

  const auto de = static_cast<Eigen::Index>(d);
  mean_ = options.base.start.value_or(Vector::Zero(de));
  if (mean_.size() != de) throw DimensionMismatch("CMA start point has the wrong dimension");
  sigma_ = options.base.sigma;
  cov_ = Matrix::Identity(de, de);
  basis_ = Matrix::Identity(de, de);
  scales_ = Vector::Ones(de);
  path_c_ = Vector::Zero(de);
  path_s_ = Vector::Zero(de);
}

double Cma::step_scale() const { return sigma_ * scales_.maxCoeff(); }

Candidate Cma::next_candidate() {
  std::normal_distribution<double> normal;
  Vector z(static_cast<Eigen::Index>(dim_));
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng_);
  Vector x = mean_ + sigma_ * (basis_ * scales_.cwiseProduct(z));
  ++issued_[PointKey(x)];

  if (!softmax_) return Candidate::continuous(std::move(x));
  Rng decode_rng(derive_seed(seed_, num_ask()));
  std::vector<double> decoded = sample_decode(x, *softmax_, decode_rng);
  return Candidate{std::move(x), std::move(decoded)};
}

void Cma::observe(const Candidate& c, double value, bool requested) {
  if (!requested) return;
  auto it = issued_.find(PointKey(c.point));
  if (it == issued_.end()) return;
  if (--it->second == 0) issued_.erase(it);
  told_.emplace_back(c.point, value);
  if (told_.size() >= lambda_) {
    std::vector<std::pair<Vector, double>> batch(told_.begin(), told_.begin() + static_cast<std::ptrdiff_t>(lambda_));
    told_.erase(told_.begin(), told_.begin() + static_cast<std::ptrdiff_t>(lambda_));
    update(std::move(batch));
  }
}

void Cma::update(std::vector<std::pair<Vector, double>> gen) {
  std::stable_sort(gen.begin(), gen.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });

  const Vector old_mean = mean_;
  Vector new_mean = Vector::Zero(old_mean.size());
  for (std::size_t i = 0; i < mu_; ++i) new_mean += weights_[static_cast<Eigen::Index>(i)] * gen[i].first;
  const Vector step = (new_mean - old_mean) / sigma_;

  // C^{-1/2} * step
  const Vector whitened = basis_ * (basis_.transpose() * step).cwiseQuotient(scales_);
  path_s_ = (1.0 - cs_) * path_s_ + std::sqrt(cs_ * (2.0 - cs_) * mueff_) * whitened;
  const double n = static_cast<double>(dim_);
  const double ps_norm = path_s_.norm() /
                         std::sqrt(1.0 - std::pow(1.0 - cs_, 2.0 * static_cast<double>(generation_ + 1)));
  const bool hsig = ps_norm / chi_n_ < 1.4 + 2.0 / (n + 1.0);
  path_c_ = (1.0 - cc_) * path_c_ + (hsig ? std::sqrt(cc_ * (2.0 - cc_) * mueff_) : 0.0) * step;

  Matrix rank_mu = Matrix::Zero(cov_.rows(), cov_.cols());
  for (std::size_t i = 0; i < mu_; ++i) {
    const Vector dev = (gen[i].first - old_mean) / sigma_;
    rank_mu.noalias() += weights_[static_cast<Eigen::Index>(i)] * dev * dev.transpose();
  }
  const double correction = hsig ? 0.0 : cc_ * (2.0 - cc_);
  cov_ = (1.0 - c1_ - cmu_) * cov_ + c1_ * (path_c_ * path_c_.transpose() + correction * cov_) +
         cmu_ * rank_mu;
  cov_ = 0.5 * (cov_ + cov_.transpose()).eval();

  sigma_ *= std::exp((cs_ / damps_) * (path_s_.norm() / chi_n_ - 1.0));
  sigma_ = std::clamp(sigma_, 1e-300, 1e300);
  mean_ = new_mean;
  ++generation_;

  if (generation_ - last_eigen_ >= eigen_interval_) decompose();
}

void Cma::decompose() {
  last_eigen_ = generation_;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(cov_);
  Vector eig = solver.eigenvalues();
  const double top = std::max(eig.maxCoeff(), 1e-300);
  const double floor = 1e-12 * top;
  if (eig.minCoeff() < floor) {
    eig = eig.cwiseMax(floor);
    cov_ = solver.eigenvectors() * eig.asDiagonal() * solver.eigenvectors().transpose();
    cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
  }
  basis_ = solver.eigenvectors();
  scales_ = eig.cwiseSqrt();
}

std::unique_ptr<Cma> make_cma(std::size_t d, std::uint64_t seed,
                              std::optional<std::size_t> population_size, OptimizerOptions options) {
  return std::make_unique<Cma>(d, seed, Cma::Options{std::move(options), population_size, std::nullopt});
}

std::unique_ptr<Cma> make_cma_softmax(const Domain& domain, std::uint64_t seed,
                                      std::optional<std::size_t> budget) {
  if (domain.is_metrizable()) {
    throw DomainMismatch("CMA with softmax needs at least one categorical variable");
  }
  OptimizerOptions base;
  base.budget = budget;
  return std::make_unique<Cma>(encode_dimension(domain), seed,
                               Cma::Options{std::move(base), std::nullopt, domain});
}

}  // namespace shiwa
