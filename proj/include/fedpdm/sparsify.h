// Copyright 2026 The FedPDM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FEDPDM_SPARSIFY_H_
#define FEDPDM_SPARSIFY_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fedpdm/model.h"
#include "fedpdm/rng.h"

namespace fedpdm {

// k index-value pairs of a d-dim vector. Indices are unique and ascending.
struct SparsePayload {
  std::uint32_t dim = 0;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t k() const { return indices.size(); }
  // Throws CorruptData on out-of-range, unsorted or duplicated indices.
  void Validate() const;

  friend bool operator==(const SparsePayload&, const SparsePayload&) = default;
};

enum class Sparsifier { kTopK, kRandK };

// k entries of largest magnitude; equal magnitudes prefer the lower index.
SparsePayload TopK(std::span<const double> y, std::size_t k);

// k indices drawn uniformly without replacement.
SparsePayload RandK(std::span<const double> y, std::size_t k, Engine& engine);

// Zero-padded d-dim vector.
ModelVector Densify(const SparsePayload& payload);

// w_j = number of payloads containing j, floored at 1.
std::vector<double> AggregationWeights(std::span<const SparsePayload> payloads,
                                       std::size_t dim);

// (sum_i densify(p_i)) / w, element-wise.
ModelVector SparseAggregate(std::span<const SparsePayload> payloads,
                            std::size_t dim);

// k for a compression ratio alpha = k / d; at least 1, at most d.
std::size_t KeepCount(double alpha, std::size_t dim);

// Wire layout, little-endian:
//   [d: u32][k: u32][indices: k x u32][values: k x f32]
// Values are narrowed to binary32 on encode.
std::vector<std::uint8_t> EncodePayload(const SparsePayload& payload);
SparsePayload DecodePayload(std::span<const std::uint8_t> bytes);

}  // namespace fedpdm

#endif  // FEDPDM_SPARSIFY_H_
