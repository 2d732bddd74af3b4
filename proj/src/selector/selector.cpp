#include "shiwa/selector.hpp"

#include <sstream>

#include "shiwa/combinators.hpp"
#include "shiwa/local_search.hpp"
#include "shiwa/optimizers.hpp"

namespace shiwa {

std::string_view leaf_label(Leaf leaf) {
  switch (leaf) {
    case Leaf::OptimisticDiscrete:
      return "Optimistic ES: ES + uniform mutation rates + bandit algorithm + recombination";
    case Leaf::CmaSoftmax:
      return "CMA with softmax for discrete";
    case Leaf::PopulationControl:
      return "Pop. control";
    case Leaf::FastGa:
      return "FastGA";
    case Leaf::BigBudget:
      return "3 copies of CMA during 10% of the budget (active selection), then pick up the best; last half with Powell";
    case Leaf::MetaRecentering:
      return "metarecentering";
    case Leaf::PopulationControlRecombination:
      return "Pop. control + recom. = best so far";
    case Leaf::Memetic:
      return "chaining CMA + Powell (memetic)";
    case Leaf::Cobyla:
      return "Cobyla";
    case Leaf::OnePlusOne:
      return "(1+1)-ES with 1/5 rule";
    case Leaf::Cma:
      return "CMA";
    case Leaf::De:
      return "DE";
  }
  return "?";
}

std::string_view leaf_id(Leaf leaf) {
  switch (leaf) {
    case Leaf::OptimisticDiscrete: return "optimistic_discrete";
    case Leaf::CmaSoftmax: return "cma_softmax";
    case Leaf::PopulationControl: return "tbpsa";
    case Leaf::FastGa: return "fastga";
    case Leaf::BigBudget: return "big_budget";
    case Leaf::MetaRecentering: return "metarecentering";
    case Leaf::PopulationControlRecombination: return "tbpsa_recombination";
    case Leaf::Memetic: return "memetic";
    case Leaf::Cobyla: return "cobyla";
    case Leaf::OnePlusOne: return "one_plus_one";
    case Leaf::Cma: return "cma";
    case Leaf::De: return "de";
  }
  return "?";
}

RoutingDecision select(const ProblemDescriptor& descriptor) {
  descriptor.validate();
  const std::size_t d = descriptor.dimension;
  const std::size_t T = descriptor.budget;
  const std::size_t p = descriptor.parallelism;
  const bool noisy = descriptor.noisy;
  const bool metrizable = descriptor.domain.is_metrizable();
  const bool continuous = descriptor.is_continuous();
  const bool sequential = descriptor.is_sequential();

  RoutingDecision out{descriptor, Leaf::De, {}};
  auto test = [&out](const char* label, bool outcome) {
    out.trace.push_back({label, outcome});
    return outcome;
  };
  auto leaf = [&out](Leaf l) {
    out.leaf = l;
    return out;
  };

  if (test("Noisy and non-metrizable?", noisy && !metrizable)) return leaf(Leaf::OptimisticDiscrete);
  if (test("Non-metrizable and d>=60?", !metrizable && d >= 60)) return leaf(Leaf::CmaSoftmax);
  if (test("Noisy and continuous?", noisy && continuous)) return leaf(Leaf::PopulationControl);
  if (test("Non-metrizable?", !metrizable)) return leaf(Leaf::FastGa);
  if (test("Continuous and budget >30000?", continuous && T > 30000)) return leaf(Leaf::BigBudget);
  if (test("Parallelism > budget/2?", 2 * p > T)) return leaf(Leaf::MetaRecentering);
  if (test("Parallelism > budget/5?", 5 * p > T)) return leaf(Leaf::PopulationControlRecombination);
  if (test("Sequential and budget >6000 and d>7?", sequential && T > 6000 && d > 7)) return leaf(Leaf::Memetic);
  if (test("Sequential and budget <30d?", sequential && T < 30 * d)) {
    return test("d>30?", d > 30) ? leaf(Leaf::OnePlusOne) : leaf(Leaf::Cobyla);
  }
  return test("d<=2000?", d <= 2000) ? leaf(Leaf::Cma) : leaf(Leaf::De);
}

OptimizerPtr RoutingDecision::build(std::uint64_t seed) const {
  const std::size_t d = descriptor.dimension;
  const std::size_t T = descriptor.budget;
  OptimizerOptions options;
  options.budget = T;
  switch (leaf) {
    case Leaf::OptimisticDiscrete: return optimistic_discrete_leaf(descriptor.domain, T, seed);
    case Leaf::CmaSoftmax: return make_cma_softmax(descriptor.domain, seed, T);
    case Leaf::PopulationControl: return make_tbpsa(d, seed, true, options);
    case Leaf::FastGa: return make_fastga(descriptor.domain, seed, T);
    case Leaf::BigBudget: return big_budget_leaf(d, T, seed);
    case Leaf::MetaRecentering: return make_metarecentering(d, T, descriptor.parallelism, seed);
    case Leaf::PopulationControlRecombination: return make_tbpsa_recombination(d, seed, options);
    case Leaf::Memetic: return memetic_chain(d, T, seed);
    case Leaf::Cobyla: return make_cobyla_like(d, seed, std::nullopt, options);
    case Leaf::OnePlusOne: return make_one_plus_one_es(d, seed, options);
    case Leaf::Cma: return make_cma(d, seed, std::nullopt, options);
    case Leaf::De: return make_de(d, seed, options);
  }
  throw Error("unknown leaf");
}

std::string RoutingDecision::explain() const {
  std::ostringstream out;
  out << "descriptor: d=" << descriptor.dimension << " budget=" << descriptor.budget
      << " workers=" << descriptor.parallelism << " noisy=" << (descriptor.noisy ? "yes" : "no")
      << " metrizable=" << (descriptor.domain.is_metrizable() ? "yes" : "no") << "\n";
  for (const RoutingStep& step : trace) out << "  " << step.test << " " << (step.outcome ? "yes" : "no") << "\n";
  out << "leaf: " << leaf_label(leaf) << "\n";
  return out.str();
}

OptimizerPtr make_shiwa(const ProblemDescriptor& descriptor, std::uint64_t seed) {
  return select(descriptor).build(seed);
}

}  // namespace shiwa
