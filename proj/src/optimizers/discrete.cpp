#include <cmath>
#include <limits>

#include "shiwa/optimizers.hpp"
#include "shiwa/transforms.hpp"

namespace shiwa {

DiscreteEa::DiscreteEa(Domain domain, std::uint64_t seed, Options options)
    : Optimizer(encode_dimension(domain), options.budget),
      domain_(std::move(domain)),
      options_(options),
      rng_(seed),
      parent_value_(std::numeric_limits<double>::infinity()) {
  if (domain_.is_metrizable()) {
    throw DomainMismatch("discrete evolutionary algorithms need a categorical variable");
  }
  parent_.reserve(domain_.size());
  for (const VariableSpec& v : domain_.variables()) {
    if (const auto* c = std::get_if<Categorical>(&v)) {
      std::uniform_int_distribution<int> pick(0, c->cardinality - 1);
      parent_.push_back(static_cast<double>(pick(rng_)));
    } else {
      parent_.push_back(0.0);
    }
  }

  const std::size_t top = std::max<std::size_t>(1, domain_.size() / 2);
  double total = 0.0;
  for (std::size_t r = 1; r <= top; ++r) {
    total += options_.schedule == MutationSchedule::FastGa
                 ? std::pow(static_cast<double>(r), -options_.beta)
                 : 1.0;
    strength_cdf_.push_back(total);
  }
  for (double& p : strength_cdf_) p /= total;
}

std::string DiscreteEa::name() const {
  return options_.schedule == MutationSchedule::FastGa ? "FastGA" : "DiscreteUniformMix";
}

std::size_t DiscreteEa::draw_strength(Rng& rng) const {
  const double u = std::uniform_real_distribution<double>()(rng);
  const auto it = std::lower_bound(strength_cdf_.begin(), strength_cdf_.end(), u);
  const auto r = static_cast<std::size_t>(it - strength_cdf_.begin()) + 1;
  return std::min(r, strength_cdf_.size());
}

std::vector<double> DiscreteEa::mutate(const std::vector<double>& parent, std::size_t strength, Rng& rng) const {
  const std::size_t n = domain_.size();
  const double rate = static_cast<double>(strength) / static_cast<double>(n);
  std::uniform_real_distribution<double> unit;
  std::vector<bool> flip(n, false);
  bool any = false;
  while (!any) {
    for (std::size_t i = 0; i < n; ++i) {
      flip[i] = unit(rng) < rate;
      any = any || flip[i];
    }
  }
  std::vector<double> child = parent;
  std::normal_distribution<double> normal;
  for (std::size_t i = 0; i < n; ++i) {
    if (!flip[i]) continue;
    if (const auto* c = std::get_if<Categorical>(&domain_.variables()[i])) {
      // Uniform over the other categories.
      std::uniform_int_distribution<int> pick(0, c->cardinality - 2);
      const int current = static_cast<int>(parent[i]);
      int next = pick(rng);
      if (next >= current) ++next;
      child[i] = static_cast<double>(next);
    } else {
      child[i] = parent[i] + normal(rng);
    }
  }
  return child;
}

Candidate DiscreteEa::make(std::vector<double> decoded) const {
  Vector point = one_hot_encode(decoded, domain_);
  return Candidate{std::move(point), std::move(decoded)};
}

Candidate DiscreteEa::next_candidate() {
  if (!parent_asked_) {
    parent_asked_ = true;
    last_strength_ = 0;
    return make(parent_);
  }
  std::vector<double> base = parent_;
  if (options_.recombine_with_best) {
    if (const Archive::Entry* best = archive().best()) {
      std::bernoulli_distribution coin(0.5);
      for (std::size_t i = 0; i < base.size(); ++i) {
        if (coin(rng_)) base[i] = best->candidate.decoded[i];
      }
    }
  }
  last_strength_ = draw_strength(rng_);
  return make(mutate(base, last_strength_, rng_));
}

void DiscreteEa::observe(const Candidate& c, double value, bool requested) {
  if (c.decoded == parent_) {
    if (!requested || parent_value_ == std::numeric_limits<double>::infinity()) {
      parent_value_ = std::min(parent_value_, value);
    }
    return;
  }
  if (requested ? value <= parent_value_ : value < parent_value_) {
    parent_ = c.decoded;
    parent_value_ = value;
  }
}

void DiscreteEa::reseat(const Candidate& parent, double value) {
  parent_ = parent.decoded;
  parent_value_ = value;
  parent_asked_ = true;
}

std::unique_ptr<DiscreteEa> make_fastga(const Domain& domain, std::uint64_t seed,
                                        std::optional<std::size_t> budget) {
  DiscreteEa::Options options;
  options.budget = budget;
  options.schedule = MutationSchedule::FastGa;
  return std::make_unique<DiscreteEa>(domain, seed, options);
}

std::unique_ptr<DiscreteEa> make_discrete_uniform_mix(const Domain& domain, std::uint64_t seed,
                                                      std::optional<std::size_t> budget,
                                                      bool recombine_with_best) {
  DiscreteEa::Options options;
  options.budget = budget;
  options.schedule = MutationSchedule::UniformMix;
  options.recombine_with_best = recombine_with_best;
  return std::make_unique<DiscreteEa>(domain, seed, options);
}

}  // namespace shiwa
