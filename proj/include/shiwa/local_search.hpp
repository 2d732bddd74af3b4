#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shiwa/core.hpp"
#include "shiwa/optimizers.hpp"
#include "shiwa/probe_sequence.hpp"

namespace shiwa {

// Base for strictly sequential searches written as coroutines: at most one
// ask may be outstanding, and its tell resumes the search.
class SequentialSearch : public Optimizer {
 public:
  SequentialSearch(std::size_t d, OptimizerOptions options);

 protected:
  Candidate next_candidate() override;
  void observe(const Candidate& c, double value, bool requested) override;
  // Starts the coroutine; called on the first ask.
  virtual ProbeSequence search() = 0;

  const Vector& start() const { return start_; }
  double initial_step() const { return initial_step_; }

 private:
  Vector start_;
  double initial_step_;
  ProbeSequence search_;
  bool started_ = false;
  std::optional<Vector> pending_;
  bool answered_ = true;
};

// Powell's conjugate-direction method. Line searches bracket the minimum by
// golden-ratio expansion and then run Brent's parabolic/golden-section
// search to a relative tolerance of 1.5e-8 (about sqrt of machine epsilon).
class Powell final : public SequentialSearch {
 public:
  Powell(std::size_t d, std::uint64_t seed, OptimizerOptions options = {});

  std::string name() const override { return "Powell"; }

  const std::vector<Vector>& directions() const { return directions_; }
  std::size_t direction_resets() const { return resets_; }
  std::size_t iterations() const { return iterations_; }

  static constexpr double kLineTolerance = 1.5e-8;

 protected:
  ProbeSequence search() override;

 private:
  struct LineResult {
    Vector point;
    double value = 0.0;
    double alpha = 0.0;
  };
  ProbeSequence line_search(Vector origin, double value, Vector direction, double scale, LineResult& out);
  bool degenerate() const;

  std::vector<Vector> directions_;
  std::vector<double> scales_;
  std::size_t resets_ = 0;
  std::size_t iterations_ = 0;
};

// Derivative-free trust-region method with linear interpolation models on a
// simplex of d + 1 points. A successful step with a good model doubles the
// radius; a failed step either repairs the simplex geometry or halves it.
class CobylaLike final : public SequentialSearch {
 public:
  CobylaLike(std::size_t d, std::uint64_t seed, OptimizerOptions options = {});

  std::string name() const override { return "Cobyla"; }

  double radius() const { return rho_; }
  double initial_radius() const { return initial_step(); }
  std::size_t expansions() const { return expansions_; }
  // (predicted, actual) decrease of every accepted model step.
  const std::vector<std::pair<double, double>>& accepted_steps() const { return accepted_; }

 protected:
  ProbeSequence search() override;

 private:
  double rho_ = 1.0;
  std::size_t expansions_ = 0;
  std::vector<std::pair<double, double>> accepted_;
};

std::unique_ptr<Powell> make_powell(std::size_t d, std::uint64_t seed,
                                    std::optional<Vector> start_point = std::nullopt,
                                    OptimizerOptions options = {});
std::unique_ptr<CobylaLike> make_cobyla_like(std::size_t d, std::uint64_t seed,
                                             std::optional<Vector> start_point = std::nullopt,
                                             OptimizerOptions options = {});

}  // namespace shiwa
