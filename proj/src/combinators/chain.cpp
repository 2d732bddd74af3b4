#include <cmath>

#include "shiwa/combinators.hpp"
#include "shiwa/local_search.hpp"

namespace shiwa {

OptimizerOptions stage_options(const StageContext& context) {
  OptimizerOptions options;
  options.budget = context.budget;
  if (context.warm) {
    options.start = context.warm->start.point;
    options.sigma = context.warm->scale;
  }
  return options;
}

OptimizerFactory cma_stage(std::optional<std::size_t> population_size) {
  return [population_size](const StageContext& ctx) -> OptimizerPtr {
    return make_cma(ctx.dimension, ctx.seed, population_size, stage_options(ctx));
  };
}

OptimizerFactory powell_stage() {
  return [](const StageContext& ctx) -> OptimizerPtr {
    return make_powell(ctx.dimension, ctx.seed, std::nullopt, stage_options(ctx));
  };
}

void ChainSpec::validate() const {
  if (stages.empty()) throw InvalidDescriptor("a chain needs at least one stage");
  double total = 0.0;
  for (const ChainStage& s : stages) {
    if (!s.factory) throw InvalidDescriptor("chain stage without a factory");
    if (!(s.fraction > 0.0 && s.fraction <= 1.0)) throw InvalidDescriptor("chain fractions must lie in (0, 1]");
    total += s.fraction;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidDescriptor("chain fractions must sum to 1");
}

Chain::Chain(ChainSpec spec, std::size_t dimension, std::size_t total_budget, std::uint64_t seed)
    : Optimizer(dimension, total_budget), spec_(std::move(spec)), seed_(seed) {
  spec_.validate();
  std::size_t used = 0;
  for (std::size_t i = 0; i + 1 < spec_.stages.size(); ++i) {
    auto share = static_cast<std::size_t>(std::floor(spec_.stages[i].fraction * static_cast<double>(total_budget)));
    share = std::min(share, total_budget - used);
    budgets_.push_back(share);
    used += share;
  }
  budgets_.push_back(total_budget - used);
  stages_.resize(budgets_.size());
}

std::string Chain::name() const {
  std::string out = "Chain(";
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    if (i > 0) out += ",";
    out += stages_[i] ? stages_[i]->name() : "?";
  }
  return out + ")";
}

double Chain::step_scale() const {
  const Optimizer* current = stages_[stage_].get();
  return current ? current->step_scale() : 1.0;
}

void Chain::start_stage(std::size_t i) {
  StageContext ctx;
  ctx.dimension = dimension();
  ctx.budget = budgets_[i];
  ctx.seed = i == 0 ? seed_ : derive_seed(seed_, i);
  for (std::size_t j = i; j-- > 0;) {
    const Optimizer* previous = stages_[j].get();
    if (previous == nullptr || previous->archive().empty()) continue;
    double scale = previous->step_scale();
    if (!std::isfinite(scale) || !(scale > 0.0)) scale = 1.0;
    ctx.warm = WarmStart{previous->recommend(), scale};
    break;
  }
  stages_[i] = spec_.stages[i].factory(ctx);
  if (!stages_[i] || stages_[i]->dimension() != dimension()) {
    throw DimensionMismatch("chain stage has the wrong dimension");
  }
}

Candidate Chain::next_candidate() {
  while (asks_in_stage_ >= budgets_[stage_]) {
    if (stage_ + 1 >= budgets_.size()) throw BudgetExhausted("chain budget exhausted");
    ++stage_;
    asks_in_stage_ = 0;
  }
  if (!stages_[stage_]) start_stage(stage_);
  Candidate c = stages_[stage_]->ask();
  ++asks_in_stage_;
  owner_[PointKey(c.point)].push_back(stage_);
  return c;
}

void Chain::observe(const Candidate& c, double value, bool requested) {
  if (!requested) return;
  auto it = owner_.find(PointKey(c.point));
  if (it == owner_.end()) return;
  const std::size_t owner = it->second.front();
  it->second.pop_front();
  if (it->second.empty()) owner_.erase(it);
  stages_[owner]->tell(c, value);
}

OptimizerPtr chain(ChainSpec spec, std::size_t dimension, std::size_t total_budget, std::uint64_t seed) {
  return std::make_unique<Chain>(std::move(spec), dimension, total_budget, seed);
}

std::unique_ptr<Chain> memetic_chain(std::size_t d, std::size_t total_budget, std::uint64_t seed) {
  ChainSpec spec{{{cma_stage(), 0.5}, {powell_stage(), 0.5}}};
  return std::make_unique<Chain>(std::move(spec), d, total_budget, seed);
}

}  // namespace shiwa
