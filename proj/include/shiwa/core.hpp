#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace shiwa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Errors. Every failure raised by the library derives from Error so callers
// can catch the whole family at once.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BudgetExhausted : public Error {
 public:
  using Error::Error;
};
class NonFiniteValue : public Error {
 public:
  using Error::Error;
};
class NothingObserved : public Error {
 public:
  using Error::Error;
};
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};
class DomainMismatch : public Error {
 public:
  using Error::Error;
};
class InvalidDescriptor : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Domain

struct Continuous {};

struct Categorical {
  int cardinality = 2;
};

using VariableSpec = std::variant<Continuous, Categorical>;

class Domain {
 public:
  explicit Domain(std::vector<VariableSpec> variables);

  static Domain continuous(std::size_t n);
  static Domain categorical(std::size_t n, int cardinality);

  std::span<const VariableSpec> variables() const { return variables_; }
  std::size_t size() const { return variables_.size(); }

  // No categorical variable present.
  bool is_metrizable() const;
  std::size_t num_categorical() const;

  bool operator==(const Domain&) const;

 private:
  std::vector<VariableSpec> variables_;
};

struct ProblemDescriptor {
  std::size_t dimension = 1;
  std::size_t budget = 1;
  std::size_t parallelism = 1;
  bool noisy = false;
  Domain domain = Domain::continuous(1);

  bool is_sequential() const { return parallelism == 1; }
  bool is_continuous() const { return domain.is_metrizable(); }

  // Throws InvalidDescriptor when an invariant does not hold.
  void validate() const;

  // Descriptor for a purely continuous problem of dimension d.
  static ProblemDescriptor continuous(std::size_t d, std::size_t budget,
                                      std::size_t parallelism = 1, bool noisy = false);
  // Descriptor whose dimension is the softmax-encoded size of the domain.
  static ProblemDescriptor for_domain(Domain domain, std::size_t budget,
                                      std::size_t parallelism = 1, bool noisy = false);
};

// A point in encoded space together with its decoded assignment. For
// continuous variables the decoded slot holds the real value; for a
// categorical variable it holds the category index as an exact integer.
struct Candidate {
  Vector point;
  std::vector<double> decoded;

  static Candidate continuous(Vector point);
  int category(std::size_t variable) const { return static_cast<int>(decoded.at(variable)); }
};

// ---------------------------------------------------------------------------
// Randomness contract

using Rng = std::mt19937_64;

// splitmix64 finalizer over (seed, index); used for every child seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// ---------------------------------------------------------------------------
// Archive

// Bit-exact key of an encoded point.
struct PointKey {
  std::vector<std::uint64_t> bits;
  explicit PointKey(const Vector& point);
  bool operator==(const PointKey&) const = default;
};

struct PointKeyHash {
  std::size_t operator()(const PointKey& key) const noexcept;
};

class Archive {
 public:
  struct Entry {
    Candidate candidate;
    std::vector<double> values;
    double sum = 0.0;

    std::size_t count() const { return values.size(); }
    double mean() const { return sum / static_cast<double>(values.size()); }
  };

  void add(const Candidate& candidate, double value);

  const Entry* find(const Vector& point) const;
  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t total_observations() const { return total_; }

  // Entry with minimal mean; ties go to the earliest inserted point.
  const Entry* best() const;

  // mean -/+ scale * sqrt(2 ln(total observations) / count)
  double confidence_width(const Entry& entry, double scale = 1.0) const;
  double lower_bound(const Entry& entry, double scale = 1.0) const;
  double upper_bound(const Entry& entry, double scale = 1.0) const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<PointKey, std::size_t, PointKeyHash> index_;
  std::size_t total_ = 0;
  mutable std::optional<std::size_t> best_;
  mutable bool best_stale_ = false;
};

// ---------------------------------------------------------------------------
// Optimizer contract

// Hand-over state from one chained stage to the next.
struct WarmStart {
  Candidate start;
  double scale = 1.0;
};

class Optimizer {
 public:
  Optimizer(std::size_t dimension, std::optional<std::size_t> budget);
  virtual ~Optimizer() = default;
  Optimizer(const Optimizer&) = delete;
  Optimizer& operator=(const Optimizer&) = delete;

  Candidate ask();
  void tell(const Candidate& candidate, double value);
  Candidate recommend() const;

  std::size_t dimension() const { return dimension_; }
  std::optional<std::size_t> budget() const { return budget_; }
  std::size_t num_ask() const { return num_ask_; }
  std::size_t num_tell() const { return num_tell_; }
  std::size_t num_outstanding() const;
  const Archive& archive() const { return archive_; }

  virtual std::string name() const = 0;

  // Characteristic step length of the current search state, handed to the
  // next stage of a chain.
  virtual double step_scale() const { return 1.0; }

  // Replace the incumbent with `parent`, valued at `value`. Used by wrappers
  // that keep their own view of the archive; no-op for most optimizers.
  virtual void reseat(const Candidate& parent, double value);

 protected:
  virtual Candidate next_candidate() = 0;
  // Called after the archive has recorded the observation. `requested` is
  // false for points this optimizer never asked (warm starts, re-evaluations
  // driven by a wrapper).
  virtual void observe(const Candidate& candidate, double value, bool requested) = 0;
  // Defaults to the archive entry with minimal mean.
  virtual Candidate best_guess() const;

 private:
  std::size_t dimension_;
  std::optional<std::size_t> budget_;
  std::size_t num_ask_ = 0;
  std::size_t num_tell_ = 0;
  Archive archive_;
  std::unordered_map<PointKey, std::size_t, PointKeyHash> outstanding_;
};

using OptimizerPtr = std::unique_ptr<Optimizer>;

// Runs `optimizer` to exhaustion of `budget` evaluations, asking up to
// `parallelism` candidates before telling them back in ask order.
template <typename Objective>
void minimize(Optimizer& optimizer, Objective&& objective, std::size_t budget,
              std::size_t parallelism = 1) {
  std::vector<Candidate> batch;
  std::size_t done = 0;
  while (done < budget) {
    const std::size_t n = std::min(parallelism, budget - done);
    batch.clear();
    for (std::size_t i = 0; i < n; ++i) batch.push_back(optimizer.ask());
    for (const Candidate& c : batch) optimizer.tell(c, objective(c));
    done += n;
  }
}

}  // namespace shiwa
