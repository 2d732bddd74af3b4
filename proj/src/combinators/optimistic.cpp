#include <cmath>

#include "shiwa/combinators.hpp"

namespace shiwa {

std::size_t integer_cbrt(std::size_t n) {
  auto k = static_cast<std::size_t>(std::cbrt(static_cast<double>(n)));
  while (k > 0 && k * k * k > n) --k;
  while ((k + 1) * (k + 1) * (k + 1) <= n) ++k;
  return k;
}

bool progressive_widening(std::size_t n) {
  if (n == 0) return false;
  return integer_cbrt(n) > integer_cbrt(n - 1);
}

OptimisticNoisy::OptimisticNoisy(OptimizerPtr inner, std::optional<std::size_t> budget, double confidence_scale)
    : Optimizer(inner ? inner->dimension() : 0, budget), inner_(std::move(inner)), scale_(confidence_scale) {
  if (!inner_) throw InvalidDescriptor("optimistic wrapper needs an inner optimizer");
  if (!(scale_ >= 0.0)) throw InvalidDescriptor("confidence scale must be non-negative");
}

std::string OptimisticNoisy::name() const { return "Optimistic(" + inner_->name() + ")"; }

const Archive::Entry* OptimisticNoisy::optimistic_best() const {
  const Archive::Entry* best = nullptr;
  double best_bound = 0.0;
  for (const auto& e : archive().entries()) {
    const double bound = archive().lower_bound(e, scale_);
    if (best == nullptr || bound < best_bound) {
      best = &e;
      best_bound = bound;
    }
  }
  return best;
}

const Archive::Entry* OptimisticNoisy::pessimistic_best() const {
  const Archive::Entry* best = nullptr;
  double best_bound = 0.0;
  for (const auto& e : archive().entries()) {
    const double bound = archive().upper_bound(e, scale_);
    if (best == nullptr || bound < best_bound) {
      best = &e;
      best_bound = bound;
    }
  }
  return best;
}

Candidate OptimisticNoisy::next_candidate() {
  if (archive().empty() || progressive_widening(num_ask() + 1)) {
    if (const Archive::Entry* anchor = pessimistic_best()) inner_->reseat(anchor->candidate, anchor->mean());
    last_widened_ = true;
    ++widenings_;
    return inner_->ask();
  }
  last_widened_ = false;
  return optimistic_best()->candidate;
}

void OptimisticNoisy::observe(const Candidate& c, double value, bool) { inner_->tell(c, value); }

Candidate OptimisticNoisy::best_guess() const { return pessimistic_best()->candidate; }

std::unique_ptr<OptimisticNoisy> optimistic_wrap(const OptimizerFactory& inner_factory, const StageContext& context,
                                                 double confidence_scale) {
  return std::make_unique<OptimisticNoisy>(inner_factory(context), context.budget, confidence_scale);
}

std::unique_ptr<OptimisticNoisy> optimistic_discrete_leaf(const Domain& domain, std::size_t total_budget,
                                                          std::uint64_t seed) {
  if (domain.is_metrizable()) throw DomainMismatch("optimistic discrete leaf needs categorical variables");
  return std::make_unique<OptimisticNoisy>(make_discrete_uniform_mix(domain, seed, std::nullopt, true),
                                           total_budget);
}

}  // namespace shiwa
