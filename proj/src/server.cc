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

#include "fedpdm/server.h"

#include <algorithm>
#include <iterator>
#include <numeric>

#include <fmt/format.h>

#include "fedpdm/errors.h"

namespace fedpdm {

std::vector<int> SampleClients(int n_total, int k_sel, Engine& engine) {
  if (k_sel < 1 || k_sel > n_total) {
    throw ConfigError(
        fmt::format("cannot select K={} of N={} clients", k_sel, n_total));
  }
  std::vector<int> all(static_cast<std::size_t>(n_total));
  std::iota(all.begin(), all.end(), 0);
  std::vector<int> picked;
  picked.reserve(static_cast<std::size_t>(k_sel));
  std::sample(all.begin(), all.end(), std::back_inserter(picked), k_sel,
              engine);
  return picked;
}

ModelVector DenseGlobalUpdate(std::span<const ModelVector> uploads,
                              double gamma, double rho) {
  if (uploads.empty()) throw InvalidInput("no uploads to aggregate");
  const std::size_t d = uploads.front().size();
  ModelVector mean(d, 0.0);
  for (const auto& u : uploads) {
    if (u.size() != d) throw InvalidInput("upload length mismatch");
    for (std::size_t i = 0; i < d; ++i) mean[i] += u[i];
  }
  // Divide rather than multiply by 1/K: the sparse path divides by the
  // coverage count, and full coverage must reproduce this bit for bit.
  const auto count = static_cast<double>(uploads.size());
  for (double& v : mean) v /= count;
  return ProxL1(mean, gamma, rho);
}

ModelVector SparseGlobalUpdate(std::span<const SparsePayload> payloads,
                               double gamma, double rho) {
  if (payloads.empty()) throw InvalidInput("no payloads to aggregate");
  const std::size_t d = payloads.front().dim;
  return ProxL1(SparseAggregate(payloads, d), gamma, rho);
}

}  // namespace fedpdm
