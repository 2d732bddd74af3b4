#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shiwa/core.hpp"

namespace shiwa {

enum class Leaf {
  OptimisticDiscrete,
  CmaSoftmax,
  PopulationControl,
  FastGa,
  BigBudget,
  MetaRecentering,
  PopulationControlRecombination,
  Memetic,
  Cobyla,
  OnePlusOne,
  Cma,
  De,
};

inline constexpr std::size_t kNumLeaves = 12;

std::string_view leaf_label(Leaf leaf);
// Short identifier, e.g. "memetic".
std::string_view leaf_id(Leaf leaf);

struct RoutingStep {
  std::string test;
  bool outcome;
};

struct RoutingDecision {
  ProblemDescriptor descriptor;
  Leaf leaf;
  std::vector<RoutingStep> trace;

  // Builds the leaf optimizer, configured for the descriptor.
  OptimizerPtr build(std::uint64_t seed) const;
  // Human-readable trace, one test per line, then the leaf.
  std::string explain() const;
};

// Walks the decision tree top-down. Performs no objective evaluation.
// Throws InvalidDescriptor on an invalid descriptor.
RoutingDecision select(const ProblemDescriptor& descriptor);

OptimizerPtr make_shiwa(const ProblemDescriptor& descriptor, std::uint64_t seed);

}  // namespace shiwa
