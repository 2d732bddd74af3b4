#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "shiwa/core.hpp"

namespace shiwa {

// Optional construction parameters shared by the base optimizers.
struct OptimizerOptions {
  std::optional<std::size_t> budget;
  // First ask and search centre; zero vector when absent.
  std::optional<Vector> start;
  double sigma = 1.0;
};

// ---------------------------------------------------------------------------
// (1+1)-ES with the one-fifth success rule.
//
// On a strict improvement sigma is multiplied by exp(1/D), otherwise by
// exp(-1/(4D)), D = sqrt(d + 1); one success per five trials leaves sigma
// unchanged.
class OnePlusOneEs final : public Optimizer {
 public:
  OnePlusOneEs(std::size_t d, std::uint64_t seed, OptimizerOptions options = {});

  std::string name() const override { return "OnePlusOne"; }
  double step_scale() const override { return sigma_; }
  void reseat(const Candidate& parent, double value) override;

  double sigma() const { return sigma_; }
  double success_factor() const { return up_; }
  double failure_factor() const { return down_; }
  const Vector& parent() const { return parent_; }
  double parent_value() const { return parent_value_; }

 protected:
  Candidate next_candidate() override;
  void observe(const Candidate& c, double value, bool requested) override;

 private:
  Rng rng_;
  Vector parent_;
  double parent_value_;
  double sigma_;
  double up_;
  double down_;
  bool parent_asked_ = false;
};

// ---------------------------------------------------------------------------
// CMA-ES (rank-one + rank-mu covariance update, cumulative step-size
// adaptation). When constructed with a categorical domain it searches the
// softmax logits and decodes each ask by sampling.
class Cma final : public Optimizer {
 public:
  struct Options {
    OptimizerOptions base;
    std::optional<std::size_t> population_size;
    std::optional<Domain> softmax_domain;
  };

  Cma(std::size_t d, std::uint64_t seed, Options options = {});

  std::string name() const override { return softmax_ ? "CMA-softmax" : "CMA"; }
  double step_scale() const override;

  std::size_t population_size() const { return lambda_; }
  std::size_t parents() const { return mu_; }
  std::size_t generation() const { return generation_; }
  double sigma() const { return sigma_; }
  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return cov_; }
  std::size_t eigen_interval() const { return eigen_interval_; }
  const std::optional<Domain>& softmax_domain() const { return softmax_; }

 protected:
  Candidate next_candidate() override;
  void observe(const Candidate& c, double value, bool requested) override;

 private:
  void update(std::vector<std::pair<Vector, double>> generation);
  void decompose();

  std::uint64_t seed_;
  Rng rng_;
  std::optional<Domain> softmax_;
  std::size_t dim_;
  std::size_t lambda_;
  std::size_t mu_;
  Vector weights_;
  double mueff_, cc_, cs_, c1_, cmu_, damps_, chi_n_;
  Vector mean_;
  double sigma_;
  Matrix cov_;
  Matrix basis_;
  Vector scales_;
  Vector path_c_;
  Vector path_s_;
  std::size_t generation_ = 0;
  std::size_t eigen_interval_ = 1;
  std::size_t last_eigen_ = 0;
  std::unordered_map<PointKey, int, PointKeyHash> issued_;
  std::vector<std::pair<Vector, double>> told_;
};

// ---------------------------------------------------------------------------
// Differential evolution, rand/1/bin.
class DifferentialEvolution final : public Optimizer {
 public:
  struct Options {
    OptimizerOptions base;
    std::size_t population = 30;
    double differential_weight = 0.8;
    double crossover = 0.5;
  };

  DifferentialEvolution(std::size_t d, std::uint64_t seed, Options options);
  DifferentialEvolution(std::size_t d, std::uint64_t seed, OptimizerOptions base = {});

  std::string name() const override { return "DE"; }

  std::size_t population_size() const { return options_.population; }
  // Individuals that currently hold a told value.
  std::size_t evaluated_individuals() const;
  const std::vector<Vector>& population() const { return points_; }

 protected:
  Candidate next_candidate() override;
  void observe(const Candidate& c, double value, bool requested) override;

 private:
  Options options_;
  Rng rng_;
  std::vector<Vector> points_;
  std::vector<double> values_;
  std::size_t next_index_ = 0;
  std::unordered_map<PointKey, std::deque<std::size_t>, PointKeyHash> pending_;
};

// ---------------------------------------------------------------------------
// Global-best particle swarm.
class ParticleSwarm final : public Optimizer {
 public:
  struct Options {
    OptimizerOptions base;
    std::size_t particles = 40;
    double inertia = 0.72;
    double cognitive = 1.49;
    double social = 1.49;
  };

  ParticleSwarm(std::size_t d, std::uint64_t seed, Options options);
  ParticleSwarm(std::size_t d, std::uint64_t seed, OptimizerOptions base = {});

  std::string name() const override { return "PSO"; }

  const std::vector<Vector>& velocities() const { return velocity_; }
  const std::vector<double>& personal_best_values() const { return best_value_; }

 protected:
  Candidate next_candidate() override;
  void observe(const Candidate& c, double value, bool requested) override;

 private:
  Options options_;
  Rng rng_;
  std::vector<Vector> position_;
  std::vector<Vector> velocity_;
  std::vector<Vector> best_point_;
  std::vector<double> best_value_;
  Vector global_point_;
  double global_value_;
  std::size_t next_index_ = 0;
  std::unordered_map<PointKey, std::deque<std::size_t>, PointKeyHash> pending_;
};

// ---------------------------------------------------------------------------
// Population control: (mu/mu, lambda)-ES with self-adapted step sizes whose
// population doubles on stagnation. Every 5 * lambda tells the mean of the
// last lambda losses is compared with the mean of the first lambda; lambda
// doubles unless it dropped by more than 1e-12.
class Tbpsa final : public Optimizer {
 public:
  struct Options {
    OptimizerOptions base;
    bool noisy = true;
    // Each offspring is the midpoint between its mutation and the archive's
    // best point at ask time.
    bool recombine_with_best = false;
  };

  Tbpsa(std::size_t d, std::uint64_t seed, Options options);
  Tbpsa(std::size_t d, std::uint64_t seed) : Tbpsa(d, seed, Options{}) {}

  std::string name() const override;
  double step_scale() const override { return sigma_; }

  std::size_t population_size() const { return lambda_; }
  std::size_t initial_population_size() const { return initial_lambda_; }
  std::size_t growth_events() const { return growth_events_; }
  std::size_t generation() const { return generation_; }
  const Vector& mean() const { return mean_; }
  double sigma() const { return sigma_; }
  // Archive point mixed into the most recent recombined offspring.
  const std::optional<Vector>& last_recombination_partner() const { return partner_; }

 protected:
  Candidate next_candidate() override;
  void observe(const Candidate& c, double value, bool requested) override;
  Candidate best_guess() const override;

 private:
  struct Offspring {
    Vector point;
    double sigma;
    double value;
  };

  Options options_;
  Rng rng_;
  std::size_t dim_;
  std::size_t lambda_;
  std::size_t initial_lambda_;
  Vector mean_;
  double sigma_;
  double tau_;
  std::unordered_map<PointKey, std::deque<double>, PointKeyHash> issued_;
  std::vector<Offspring> told_;
  std::optional<Vector> partner_;
  std::vector<double> loss_record_;
  std::size_t growth_events_ = 0;
  std::size_t generation_ = 0;
};

// ---------------------------------------------------------------------------
// (1+1) evolutionary algorithms for categorical domains.
enum class MutationSchedule {
  // Mutation strength r in {1..n/2} with P(r) proportional to r^-beta.
  FastGa,
  // r uniform in {1..n/2}.
  UniformMix,
};

class DiscreteEa final : public Optimizer {
 public:
  struct Options {
    std::optional<std::size_t> budget;
    MutationSchedule schedule = MutationSchedule::FastGa;
    double beta = 1.5;
    // Uniform crossover of the parent with the archive's best mean point
    // before mutation.
    bool recombine_with_best = false;
  };

  DiscreteEa(Domain domain, std::uint64_t seed, Options options);
  DiscreteEa(Domain domain, std::uint64_t seed) : DiscreteEa(std::move(domain), seed, Options{}) {}

  std::string name() const override;
  void reseat(const Candidate& parent, double value) override;

  const Domain& domain() const { return domain_; }
  const std::vector<double>& parent() const { return parent_; }
  double parent_value() const { return parent_value_; }
  // Mutation strength used for the most recent ask.
  std::size_t last_strength() const { return last_strength_; }
  // Draws a mutation strength from the configured schedule.
  std::size_t draw_strength(Rng& rng) const;
  // Mutates `parent` with per-variable rate r / n; at least one variable changes.
  std::vector<double> mutate(const std::vector<double>& parent, std::size_t strength, Rng& rng) const;

 protected:
  Candidate next_candidate() override;
  void observe(const Candidate& c, double value, bool requested) override;

 private:
  Candidate make(std::vector<double> decoded) const;

  Domain domain_;
  Options options_;
  Rng rng_;
  std::vector<double> parent_;
  double parent_value_;
  bool parent_asked_ = false;
  std::size_t last_strength_ = 0;
  std::vector<double> strength_cdf_;
};

// ---------------------------------------------------------------------------
// One-shot optimizer: scrambled Hammersley points in [0,1]^d pushed through
// the standard normal quantile and scaled by sqrt(ln(T)/d), clamped to
// [0.01, 100]. Every candidate is available before the first tell.
class MetaRecentering final : public Optimizer {
 public:
  MetaRecentering(std::size_t d, std::size_t budget, std::uint64_t seed);

  std::string name() const override { return "MetaRecentering"; }

  double scale() const { return scale_; }
  static double rescaling(std::size_t budget, std::size_t d);

 protected:
  Candidate next_candidate() override;
  void observe(const Candidate&, double, bool) override {}

 private:
  std::size_t budget_;
  double scale_;
  // Affine digit scrambling (multiplier, shift) per (dimension, digit position).
  std::vector<std::vector<std::array<int, 2>>> perms_;
  std::vector<int> bases_;
  std::vector<int> digits_;
};

// i.i.d. standard normal sampling; used as a baseline.
class RandomSearch final : public Optimizer {
 public:
  RandomSearch(std::size_t d, std::uint64_t seed, OptimizerOptions options = {});
  std::string name() const override { return "RandomSearch"; }

 protected:
  Candidate next_candidate() override;
  void observe(const Candidate&, double, bool) override {}

 private:
  Rng rng_;
  double sigma_;
};

// ---------------------------------------------------------------------------
// Factories

std::unique_ptr<OnePlusOneEs> make_one_plus_one_es(std::size_t d, std::uint64_t seed,
                                                   OptimizerOptions options = {});
std::unique_ptr<Cma> make_cma(std::size_t d, std::uint64_t seed,
                              std::optional<std::size_t> population_size = std::nullopt,
                              OptimizerOptions options = {});
// Throws DomainMismatch on a fully continuous domain.
std::unique_ptr<Cma> make_cma_softmax(const Domain& domain, std::uint64_t seed,
                                      std::optional<std::size_t> budget = std::nullopt);
std::unique_ptr<DifferentialEvolution> make_de(std::size_t d, std::uint64_t seed,
                                               OptimizerOptions options = {});
std::unique_ptr<ParticleSwarm> make_pso(std::size_t d, std::uint64_t seed,
                                        OptimizerOptions options = {});
std::unique_ptr<Tbpsa> make_tbpsa(std::size_t d, std::uint64_t seed, bool noisy,
                                  OptimizerOptions options = {});
std::unique_ptr<Tbpsa> make_tbpsa_recombination(std::size_t d, std::uint64_t seed,
                                                OptimizerOptions options = {});
std::unique_ptr<DiscreteEa> make_fastga(const Domain& domain, std::uint64_t seed,
                                        std::optional<std::size_t> budget = std::nullopt);
std::unique_ptr<DiscreteEa> make_discrete_uniform_mix(const Domain& domain, std::uint64_t seed,
                                                      std::optional<std::size_t> budget = std::nullopt,
                                                      bool recombine_with_best = false);
std::unique_ptr<MetaRecentering> make_metarecentering(std::size_t d, std::size_t budget,
                                                      std::size_t parallelism, std::uint64_t seed);
std::unique_ptr<RandomSearch> make_random_search(std::size_t d, std::uint64_t seed,
                                                 OptimizerOptions options = {});

}  // namespace shiwa
