#include "shiwa/core.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "shiwa/transforms.hpp"

namespace shiwa {

// ---------------------------------------------------------------------------
// Domain

Domain::Domain(std::vector<VariableSpec> variables) : variables_(std::move(variables)) {
  if (variables_.empty()) throw InvalidDescriptor("domain needs at least one variable");
  for (const VariableSpec& v : variables_) {
    if (const auto* c = std::get_if<Categorical>(&v); c && c->cardinality < 2) {
      throw InvalidDescriptor("categorical cardinality must be >= 2");
    }
  }
}

Domain Domain::continuous(std::size_t n) {
  return Domain(std::vector<VariableSpec>(n, Continuous{}));
}

Domain Domain::categorical(std::size_t n, int cardinality) {
  return Domain(std::vector<VariableSpec>(n, Categorical{cardinality}));
}

std::size_t Domain::num_categorical() const {
  std::size_t n = 0;
  for (const VariableSpec& v : variables_) n += std::holds_alternative<Categorical>(v);
  return n;
}

bool Domain::is_metrizable() const { return num_categorical() == 0; }

bool Domain::operator==(const Domain& other) const {
  if (variables_.size() != other.variables_.size()) return false;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const VariableSpec& a = variables_[i];
    const VariableSpec& b = other.variables_[i];
    if (a.index() != b.index()) return false;
    if (const auto* c = std::get_if<Categorical>(&a);
        c && c->cardinality != std::get<Categorical>(b).cardinality) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// ProblemDescriptor

void ProblemDescriptor::validate() const {
  if (dimension < 1) throw InvalidDescriptor("dimension must be positive");
  if (budget < 1) throw InvalidDescriptor("budget must be positive");
  if (parallelism < 1) throw InvalidDescriptor("parallelism must be positive");
  if (parallelism > budget) {
    throw InvalidDescriptor("parallelism (" + std::to_string(parallelism) +
                            ") exceeds budget (" + std::to_string(budget) + ")");
  }
  if (encode_dimension(domain) != dimension) {
    throw InvalidDescriptor("dimension does not match the encoded size of the domain");
  }
}

ProblemDescriptor ProblemDescriptor::continuous(std::size_t d, std::size_t budget,
                                                std::size_t parallelism, bool noisy) {
  return ProblemDescriptor{d, budget, parallelism, noisy, Domain::continuous(d)};
}

ProblemDescriptor ProblemDescriptor::for_domain(Domain domain, std::size_t budget,
                                                std::size_t parallelism, bool noisy) {
  const std::size_t d = encode_dimension(domain);
  return ProblemDescriptor{d, budget, parallelism, noisy, std::move(domain)};
}

Candidate Candidate::continuous(Vector point) {
  std::vector<double> decoded(point.data(), point.data() + point.size());
  return Candidate{std::move(point), std::move(decoded)};
}

// ---------------------------------------------------------------------------
// Seeds

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Archive

PointKey::PointKey(const Vector& point) : bits(static_cast<std::size_t>(point.size())) {
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    bits[static_cast<std::size_t>(i)] = std::bit_cast<std::uint64_t>(point[i]);
  }
}

std::size_t PointKeyHash::operator()(const PointKey& key) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint64_t b : key.bits) {
    h ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

void Archive::add(const Candidate& candidate, double value) {
  PointKey key(candidate.point);
  auto [it, inserted] = index_.try_emplace(std::move(key), entries_.size());
  if (inserted) entries_.push_back(Entry{candidate, {}, 0.0});
  const std::size_t idx = it->second;
  Entry& e = entries_[idx];
  e.values.push_back(value);
  e.sum += value;
  ++total_;

  if (best_stale_) return;
  if (!best_) {
    best_ = idx;
  } else if (*best_ == idx) {
    // The incumbent's mean went up; some other entry may now be better.
    const double previous = (e.sum - value) / static_cast<double>(e.values.size() - 1);
    if (value > previous) best_stale_ = true;
  } else {
    const double m = e.mean();
    const double b = entries_[*best_].mean();
    if (m < b || (m == b && idx < *best_)) best_ = idx;
  }
}

const Archive::Entry* Archive::find(const Vector& point) const {
  auto it = index_.find(PointKey(point));
  return it == index_.end() ? nullptr : &entries_[it->second];
}

const Archive::Entry* Archive::best() const {
  if (entries_.empty()) return nullptr;
  if (best_stale_ || !best_) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < entries_.size(); ++i) {
      if (entries_[i].mean() < entries_[arg].mean()) arg = i;
    }
    best_ = arg;
    best_stale_ = false;
  }
  return &entries_[*best_];
}

double Archive::confidence_width(const Entry& entry, double scale) const {
  if (scale == 0.0) return 0.0;
  const double n = static_cast<double>(std::max<std::size_t>(total_, 1));
  return scale * std::sqrt(2.0 * std::log(n) / static_cast<double>(entry.count()));
}

double Archive::lower_bound(const Entry& entry, double scale) const {
  return entry.mean() - confidence_width(entry, scale);
}

double Archive::upper_bound(const Entry& entry, double scale) const {
  return entry.mean() + confidence_width(entry, scale);
}

// ---------------------------------------------------------------------------
// Optimizer

Optimizer::Optimizer(std::size_t dimension, std::optional<std::size_t> budget)
    : dimension_(dimension), budget_(budget) {
  if (dimension_ < 1) throw InvalidDescriptor("optimizer dimension must be positive");
}

Candidate Optimizer::ask() {
  if (budget_ && num_ask_ >= *budget_) {
    throw BudgetExhausted(name() + ": budget of " + std::to_string(*budget_) + " asks consumed");
  }
  Candidate c = next_candidate();
  if (static_cast<std::size_t>(c.point.size()) != dimension_) {
    throw DimensionMismatch(name() + " produced a candidate of the wrong dimension");
  }
  ++num_ask_;
  ++outstanding_[PointKey(c.point)];
  return c;
}

void Optimizer::tell(const Candidate& candidate, double value) {
  if (!std::isfinite(value)) throw NonFiniteValue(name() + ": told a non-finite value");
  if (static_cast<std::size_t>(candidate.point.size()) != dimension_) {
    throw DimensionMismatch(name() + ": told a point of the wrong dimension");
  }
  bool requested = false;
  if (auto it = outstanding_.find(PointKey(candidate.point)); it != outstanding_.end()) {
    requested = true;
    if (--it->second == 0) outstanding_.erase(it);
  }
  archive_.add(candidate, value);
  ++num_tell_;
  observe(candidate, value, requested);
}

std::size_t Optimizer::num_outstanding() const {
  std::size_t n = 0;
  for (const auto& [key, count] : outstanding_) n += count;
  return n;
}

Candidate Optimizer::recommend() const {
  if (num_tell_ == 0) throw NothingObserved(name() + ": recommend() before any tell");
  return best_guess();
}

Candidate Optimizer::best_guess() const { return archive_.best()->candidate; }

void Optimizer::reseat(const Candidate&, double) {}

}  // namespace shiwa
