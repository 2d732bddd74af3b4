#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "shiwa/core.hpp"

namespace shiwa {

// Softmax encoding: every categorical variable of cardinality k occupies a
// block of k logits; continuous variables occupy one slot each.
std::size_t encode_dimension(const Domain& domain);

// Offset of each variable's first slot in the encoded vector.
std::vector<std::size_t> encoded_offsets(const Domain& domain);

// exp(v_i) / sum_j exp(v_j), computed after subtracting the largest logit.
std::vector<double> softmax(std::span<const double> logits);

// Samples each categorical block from its softmax distribution and copies
// continuous slots verbatim.
std::vector<double> sample_decode(const Vector& logits, const Domain& domain, Rng& rng);

// Most probable category per block (lowest index on ties).
std::vector<double> argmax_decode(const Vector& logits, const Domain& domain);

// One-hot logits for a decoded assignment: 1 on the chosen category, 0
// elsewhere; continuous values copied.
Vector one_hot_encode(std::span<const double> decoded, const Domain& domain);

}  // namespace shiwa
