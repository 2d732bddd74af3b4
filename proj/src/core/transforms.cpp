#include "shiwa/transforms.hpp"

#include <algorithm>
#include <cmath>

namespace shiwa {

namespace {

std::size_t slots(const VariableSpec& v) {
  if (const auto* c = std::get_if<Categorical>(&v)) return static_cast<std::size_t>(c->cardinality);
  return 1;
}

void check_length(const Vector& logits, const Domain& domain) {
  if (static_cast<std::size_t>(logits.size()) != encode_dimension(domain)) {
    throw DimensionMismatch("encoded vector has " + std::to_string(logits.size()) +
                            " slots, domain needs " + std::to_string(encode_dimension(domain)));
  }
}

}  // namespace

std::size_t encode_dimension(const Domain& domain) {
  std::size_t d = 0;
  for (const VariableSpec& v : domain.variables()) d += slots(v);
  return d;
}

std::vector<std::size_t> encoded_offsets(const Domain& domain) {
  std::vector<std::size_t> offsets;
  offsets.reserve(domain.size());
  std::size_t at = 0;
  for (const VariableSpec& v : domain.variables()) {
    offsets.push_back(at);
    at += slots(v);
  }
  return offsets;
}

std::vector<double> softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - top);
    total += p[i];
  }
  for (double& x : p) x /= total;
  return p;
}

std::vector<double> sample_decode(const Vector& logits, const Domain& domain, Rng& rng) {
  check_length(logits, domain);
  std::vector<double> decoded;
  decoded.reserve(domain.size());
  std::size_t at = 0;
  for (const VariableSpec& v : domain.variables()) {
    if (const auto* c = std::get_if<Categorical>(&v)) {
      const auto k = static_cast<std::size_t>(c->cardinality);
      const std::vector<double> p = softmax({logits.data() + at, k});
      std::discrete_distribution<int> pick(p.begin(), p.end());
      decoded.push_back(static_cast<double>(pick(rng)));
      at += k;
    } else {
      decoded.push_back(logits[static_cast<Eigen::Index>(at)]);
      ++at;
    }
  }
  return decoded;
}

std::vector<double> argmax_decode(const Vector& logits, const Domain& domain) {
  check_length(logits, domain);
  std::vector<double> decoded;
  decoded.reserve(domain.size());
  std::size_t at = 0;
  for (const VariableSpec& v : domain.variables()) {
    if (const auto* c = std::get_if<Categorical>(&v)) {
      const auto k = static_cast<std::size_t>(c->cardinality);
      const double* block = logits.data() + at;
      decoded.push_back(static_cast<double>(std::max_element(block, block + k) - block));
      at += k;
    } else {
      decoded.push_back(logits[static_cast<Eigen::Index>(at)]);
      ++at;
    }
  }
  return decoded;
}

Vector one_hot_encode(std::span<const double> decoded, const Domain& domain) {
  if (decoded.size() != domain.size()) {
    throw DimensionMismatch("assignment length does not match the domain");
  }
  Vector out = Vector::Zero(static_cast<Eigen::Index>(encode_dimension(domain)));
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    if (const auto* c = std::get_if<Categorical>(&domain.variables()[i])) {
      out[at + static_cast<Eigen::Index>(decoded[i])] = 1.0;
      at += c->cardinality;
    } else {
      out[at++] = decoded[i];
    }
  }
  return out;
}

}  // namespace shiwa
