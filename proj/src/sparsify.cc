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

#include "fedpdm/sparsify.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "fedpdm/errors.h"

namespace fedpdm {
namespace {

void CheckK(std::size_t k, std::size_t dim) {
  if (k < 1 || k > dim) {
    throw InvalidInput(fmt::format("k={} outside [1, {}]", k, dim));
  }
  if (dim > UINT32_MAX) throw InvalidInput("dimension exceeds u32 range");
}

SparsePayload Gather(std::span<const double> y,
                     std::vector<std::uint32_t> indices) {
  std::sort(indices.begin(), indices.end());
  SparsePayload p;
  p.dim = static_cast<std::uint32_t>(y.size());
  p.values.reserve(indices.size());
  for (std::uint32_t i : indices) p.values.push_back(y[i]);
  p.indices = std::move(indices);
  return p;
}

void PutU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint32_t GetU32(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(in[at + b]) << (8 * b);
  return v;
}

}  // namespace

void SparsePayload::Validate() const {
  if (indices.size() != values.size()) {
    throw CorruptData(fmt::format("payload has {} indices but {} values",
                                  indices.size(), values.size()));
  }
  if (indices.size() > dim) throw CorruptData("payload k exceeds d");
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= dim) {
      throw CorruptData(fmt::format("index {} >= d={}", indices[j], dim));
    }
    if (j > 0 && indices[j] <= indices[j - 1]) {
      throw CorruptData("payload indices not strictly ascending");
    }
  }
}

SparsePayload TopK(std::span<const double> y, std::size_t k) {
  CheckK(k, y.size());
  std::vector<std::uint32_t> order(y.size());
  std::iota(order.begin(), order.end(), 0u);
  auto larger = [&](std::uint32_t a, std::uint32_t b) {
    const double ma = std::abs(y[a]);
    const double mb = std::abs(y[b]);
    return ma > mb || (ma == mb && a < b);
  };
  if (k < y.size()) {
    std::nth_element(order.begin(), order.begin() + static_cast<long>(k),
                     order.end(), larger);
    order.resize(k);
  }
  return Gather(y, std::move(order));
}

SparsePayload RandK(std::span<const double> y, std::size_t k, Engine& engine) {
  CheckK(k, y.size());
  std::vector<std::uint32_t> all(y.size());
  std::iota(all.begin(), all.end(), 0u);
  std::vector<std::uint32_t> picked;
  picked.reserve(k);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), k, engine);
  return Gather(y, std::move(picked));
}

ModelVector Densify(const SparsePayload& payload) {
  payload.Validate();
  ModelVector out(payload.dim, 0.0);
  for (std::size_t j = 0; j < payload.k(); ++j) {
    out[payload.indices[j]] = payload.values[j];
  }
  return out;
}

std::vector<double> AggregationWeights(std::span<const SparsePayload> payloads,
                                       std::size_t dim) {
  std::vector<double> count(dim, 0.0);
  for (const auto& p : payloads) {
    if (p.dim != dim) throw InvalidInput("payload dimension mismatch");
    for (std::uint32_t i : p.indices) count[i] += 1.0;
  }
  for (double& c : count) c = std::max(c, 1.0);
  return count;
}

ModelVector SparseAggregate(std::span<const SparsePayload> payloads,
                            std::size_t dim) {
  const auto weights = AggregationWeights(payloads, dim);
  ModelVector sum(dim, 0.0);
  for (const auto& p : payloads) {
    p.Validate();
    for (std::size_t j = 0; j < p.k(); ++j) sum[p.indices[j]] += p.values[j];
  }
  for (std::size_t i = 0; i < dim; ++i) sum[i] /= weights[i];
  return sum;
}

std::size_t KeepCount(double alpha, std::size_t dim) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw InvalidInput(fmt::format("compression ratio {} not in (0,1]", alpha));
  }
  const auto k = static_cast<std::size_t>(std::llround(alpha * static_cast<double>(dim)));
  return std::clamp<std::size_t>(k, 1, dim);
}

std::vector<std::uint8_t> EncodePayload(const SparsePayload& payload) {
  payload.Validate();
  std::vector<std::uint8_t> out;
  out.reserve(8 + 8 * payload.k());
  PutU32(out, payload.dim);
  PutU32(out, static_cast<std::uint32_t>(payload.k()));
  for (std::uint32_t i : payload.indices) PutU32(out, i);
  for (double v : payload.values) {
    PutU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

SparsePayload DecodePayload(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw CorruptData("payload shorter than header");
  SparsePayload p;
  p.dim = GetU32(bytes, 0);
  const std::uint32_t k = GetU32(bytes, 4);
  if (bytes.size() != 8 + 8 * static_cast<std::size_t>(k)) {
    throw CorruptData(fmt::format("payload of {} bytes does not hold k={}",
                                  bytes.size(), k));
  }
  p.indices.resize(k);
  p.values.resize(k);
  for (std::uint32_t j = 0; j < k; ++j) p.indices[j] = GetU32(bytes, 8 + 4 * j);
  const std::size_t values_at = 8 + 4 * static_cast<std::size_t>(k);
  for (std::uint32_t j = 0; j < k; ++j) {
    p.values[j] = std::bit_cast<float>(GetU32(bytes, values_at + 4 * j));
  }
  p.Validate();
  return p;
}

}  // namespace fedpdm
