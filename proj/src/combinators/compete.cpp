#include <cmath>
#include <limits>

#include "shiwa/combinators.hpp"

namespace shiwa {

void CompeteSpec::validate() const {
  if (competitors.size() < 2) throw InvalidDescriptor("compete needs at least two competitors");
  if (competitors.size() > 255) throw InvalidDescriptor("compete supports at most 255 competitors");
  for (const auto& f : competitors) {
    if (!f) throw InvalidDescriptor("compete competitor without a factory");
  }
  if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidDescriptor("compete fraction must lie in (0, 1)");
}

Compete::Compete(CompeteSpec spec, std::size_t dimension, std::size_t total_budget, std::uint64_t seed,
                 std::optional<std::size_t> selection_asks, std::optional<WarmStart> warm)
    : Optimizer(dimension, total_budget) {
  spec.validate();
  const std::size_t k = spec.competitors.size();
  selection_asks_ = selection_asks.value_or(
      static_cast<std::size_t>(std::floor(spec.fraction * static_cast<double>(total_budget))));
  if (selection_asks_ < k) throw InvalidDescriptor("compete needs at least one selection ask per competitor");
  if (selection_asks_ > total_budget) throw InvalidDescriptor("compete selection exceeds the budget");
  for (std::size_t i = 0; i < k; ++i) {
    StageContext ctx{dimension, total_budget, derive_seed(seed, i), warm};
    competitors_.push_back(spec.competitors[i](ctx));
    if (!competitors_.back() || competitors_.back()->dimension() != dimension) {
      throw DimensionMismatch("compete competitor has the wrong dimension");
    }
  }
  owners_.reserve(total_budget);
}

std::size_t Compete::leader() const {
  std::size_t lead = 0;
  double lead_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < competitors_.size(); ++i) {
    const auto* best = competitors_[i]->archive().best();
    if (best != nullptr && best->mean() < lead_value) {
      lead_value = best->mean();
      lead = i;
    }
  }
  return lead;
}

double Compete::step_scale() const { return competitors_[winner_.value_or(leader())]->step_scale(); }

Candidate Compete::next_candidate() {
  std::size_t who;
  if (num_ask() < selection_asks_) {
    who = num_ask() % competitors_.size();
  } else {
    if (!winner_) winner_ = leader();
    who = *winner_;
  }
  Candidate c = competitors_[who]->ask();
  owners_.push_back(static_cast<std::uint8_t>(who));
  pending_[PointKey(c.point)].push_back(who);
  return c;
}

void Compete::observe(const Candidate& c, double value, bool requested) {
  if (!requested) return;
  auto it = pending_.find(PointKey(c.point));
  if (it == pending_.end()) return;
  const std::size_t who = it->second.front();
  it->second.pop_front();
  if (it->second.empty()) pending_.erase(it);
  competitors_[who]->tell(c, value);
}

OptimizerPtr compete(CompeteSpec spec, std::size_t dimension, std::size_t total_budget,
                     std::size_t parallelism, std::uint64_t seed) {
  if (parallelism < 1) throw InvalidDescriptor("parallelism must be positive");
  return std::make_unique<Compete>(std::move(spec), dimension, total_budget, seed);
}

std::unique_ptr<Chain> big_budget_leaf(std::size_t d, std::size_t total_budget, std::uint64_t seed,
                                       BigBudgetFactories factories) {
  OptimizerFactory cma = factories.cma ? factories.cma : cma_stage();
  OptimizerFactory powell = factories.powell ? factories.powell : powell_stage();
  const std::size_t selection = total_budget / 10;
  OptimizerFactory portfolio = [cma, selection](const StageContext& ctx) -> OptimizerPtr {
    CompeteSpec spec{{cma, cma, cma}, 0.1};
    return std::make_unique<Compete>(std::move(spec), ctx.dimension, ctx.budget, ctx.seed, selection, ctx.warm);
  };
  ChainSpec spec{{{portfolio, 0.5}, {powell, 0.5}}};
  return std::make_unique<Chain>(std::move(spec), d, total_budget, seed);
}

}  // namespace shiwa
