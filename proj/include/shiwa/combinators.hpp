#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "shiwa/core.hpp"
#include "shiwa/optimizers.hpp"

namespace shiwa {

// What a combinator hands to each child it builds.
struct StageContext {
  std::size_t dimension = 1;
  std::size_t budget = 1;
  std::uint64_t seed = 0;
  std::optional<WarmStart> warm;
};

using OptimizerFactory = std::function<OptimizerPtr(const StageContext&)>;

// Budget, start point and initial step taken from a stage context.
OptimizerOptions stage_options(const StageContext& context);
OptimizerFactory cma_stage(std::optional<std::size_t> population_size = std::nullopt);
OptimizerFactory powell_stage();

// ---------------------------------------------------------------------------
// Chaining

struct ChainStage {
  OptimizerFactory factory;
  double fraction = 1.0;
};

struct ChainSpec {
  std::vector<ChainStage> stages;
  // Each fraction in (0, 1], summing to 1 within 1e-12.
  void validate() const;
};

// Runs stages back to back. Stage i answers floor(fraction_i * T) asks (the
// last stage takes the remainder) and each later stage is built with the
// previous stage's recommendation as its start point. Stage 0 is seeded with
// the chain's seed, stage i > 0 with derive_seed(seed, i).
class Chain final : public Optimizer {
 public:
  Chain(ChainSpec spec, std::size_t dimension, std::size_t total_budget, std::uint64_t seed);

  std::string name() const override;
  double step_scale() const override;

  const std::vector<std::size_t>& stage_budgets() const { return budgets_; }
  std::size_t current_stage() const { return stage_; }
  // Null for stages not yet started.
  const Optimizer* stage(std::size_t i) const { return i < stages_.size() ? stages_[i].get() : nullptr; }

 protected:
  Candidate next_candidate() override;
  void observe(const Candidate& c, double value, bool requested) override;

 private:
  void start_stage(std::size_t i);

  ChainSpec spec_;
  std::uint64_t seed_;
  std::vector<std::size_t> budgets_;
  std::vector<OptimizerPtr> stages_;
  std::size_t stage_ = 0;
  std::size_t asks_in_stage_ = 0;
  std::unordered_map<PointKey, std::deque<std::size_t>, PointKeyHash> owner_;
};

OptimizerPtr chain(ChainSpec spec, std::size_t dimension, std::size_t total_budget, std::uint64_t seed);

// CMA for the first half of the budget, then Powell.
std::unique_ptr<Chain> memetic_chain(std::size_t d, std::size_t total_budget, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Active selection

struct CompeteSpec {
  std::vector<OptimizerFactory> competitors;
  // Share of the total budget spent round-robin before selection.
  double fraction = 0.1;
  // 0 < fraction < 1 and at least two competitors.
  void validate() const;
};

// The first floor(fraction * T) asks go round-robin to the competitors
// (competitor i seeded with derive_seed(seed, i)). After that the competitor
// with the lowest best observed value continues alone; ties go to the lowest
// index.
class Compete final : public Optimizer {
 public:
  Compete(CompeteSpec spec, std::size_t dimension, std::size_t total_budget, std::uint64_t seed,
          std::optional<std::size_t> selection_asks = std::nullopt,
          std::optional<WarmStart> warm = std::nullopt);

  std::string name() const override { return "Compete"; }
  double step_scale() const override;

  std::size_t selection_asks() const { return selection_asks_; }
  std::optional<std::size_t> winner() const { return winner_; }
  const Optimizer& competitor(std::size_t i) const { return *competitors_.at(i); }
  std::size_t num_competitors() const { return competitors_.size(); }
  // Index of the competitor that produced each ask, in ask order.
  const std::vector<std::uint8_t>& ask_owners() const { return owners_; }

 protected:
  Candidate next_candidate() override;
  void observe(const Candidate& c, double value, bool requested) override;

 private:
  // Competitor with the lowest best observed value; lowest index on ties.
  std::size_t leader() const;

  std::vector<OptimizerPtr> competitors_;
  std::size_t selection_asks_;
  std::optional<std::size_t> winner_;
  std::vector<std::uint8_t> owners_;
  std::unordered_map<PointKey, std::deque<std::size_t>, PointKeyHash> pending_;
};

OptimizerPtr compete(CompeteSpec spec, std::size_t dimension, std::size_t total_budget,
                     std::size_t parallelism, std::uint64_t seed);

// Active selection among three CMA copies for the first tenth of the budget,
// the winner up to T/2, then Powell for the last ceil(T/2) asks starting from
// the winner's recommendation. `cma` and `powell` override the stage
// factories (the accounting tests plug in cheap stand-ins).
struct BigBudgetFactories {
  OptimizerFactory cma;
  OptimizerFactory powell;
};
std::unique_ptr<Chain> big_budget_leaf(std::size_t d, std::size_t total_budget, std::uint64_t seed,
                                       BigBudgetFactories factories = {});

// ---------------------------------------------------------------------------
// Optimism under noise with progressive widening

// True iff floor(n^(1/3)) > floor((n-1)^(1/3)), i.e. n is a perfect cube.
bool progressive_widening(std::size_t n);
// Largest k with k^3 <= n.
std::size_t integer_cbrt(std::size_t n);

// When the widening predicate fails for the index of the upcoming ask, the
// wrapper re-asks the archive point with the lowest optimistic bound
// mean - width; otherwise the inner optimizer asks, after being reseated on
// the archive point with the lowest pessimistic bound mean + width. Every tell
// is forwarded to the inner optimizer. The recommendation is the pessimistic
// argmin. width = scale * sqrt(2 ln N / n_x).
class OptimisticNoisy final : public Optimizer {
 public:
  OptimisticNoisy(OptimizerPtr inner, std::optional<std::size_t> budget, double confidence_scale = 1.0);

  std::string name() const override;

  const Optimizer& inner() const { return *inner_; }
  std::size_t widenings() const { return widenings_; }
  bool last_ask_widened() const { return last_widened_; }

  const Archive::Entry* optimistic_best() const;
  const Archive::Entry* pessimistic_best() const;

 protected:
  Candidate next_candidate() override;
  void observe(const Candidate& c, double value, bool requested) override;
  Candidate best_guess() const override;

 private:
  OptimizerPtr inner_;
  double scale_;
  std::size_t widenings_ = 0;
  bool last_widened_ = false;
};

std::unique_ptr<OptimisticNoisy> optimistic_wrap(const OptimizerFactory& inner_factory, const StageContext& context,
                                                 double confidence_scale = 1.0);

// Optimistic wrapper around the uniform-mix discrete EA with best-so-far
// recombination. Throws DomainMismatch on a fully continuous domain.
std::unique_ptr<OptimisticNoisy> optimistic_discrete_leaf(const Domain& domain, std::size_t total_budget,
                                                          std::uint64_t seed);

}  // namespace shiwa
