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

#include "fedpdm/client.h"

#include <algorithm>
#include <iterator>
#include <random>

#include <fmt/format.h>

#include "fedpdm/errors.h"

namespace fedpdm {

ClientState InitialClientState(int id, std::size_t dim) {
  return {id, ModelVector(dim, 0.0), ModelVector(dim, 0.0)};
}

void LocalRunConfig::Validate() const {
  if (!(rho > 0.0) || !(eta > 0.0) || !(nu > 0.0) || !(clip_bound > 0.0)) {
    throw ConfigError("rho, eta, nu and the clip bound must be positive");
  }
  if (q_max < 1) throw ConfigError("q_max must be >= 1");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
}

LocalRoundResult LocalRound(ClientState& state, std::span<const double> x0,
                            const LocalRunConfig& cfg,
                            const WorkloadParams& workload,
                            const Dataset& train, const Shard& shard,
                            std::uint64_t seed, int round) {
  cfg.Validate();
  const std::size_t d = workload.dim();
  if (x0.size() != d || state.x.size() != d || state.lambda.size() != d) {
    throw InvalidInput("client state or global model has the wrong length");
  }
  if (shard.rows.size() < cfg.batch_size) {
    throw ConfigError(fmt::format("client {} holds {} samples, fewer than b={}",
                                  state.id, shard.rows.size(), cfg.batch_size));
  }

  ModelVector x(x0.begin(), x0.end());
  ModelVector step(d);
  std::vector<std::size_t> batch;
  batch.reserve(cfg.batch_size);

  LocalRoundResult result;
  for (int r = 0; r < cfg.q_max; ++r) {
    Engine engine = MakeEngine(seed, Stream::kBatch,
                               static_cast<std::uint64_t>(state.id),
                               static_cast<std::uint64_t>(round),
                               static_cast<std::uint64_t>(r));
    batch.clear();
    std::sample(shard.rows.begin(), shard.rows.end(),
                std::back_inserter(batch), cfg.batch_size, engine);

    const ModelVector grad =
        LocalGradient(x, train, batch, workload, cfg.clip_bound);
    double residual = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      step[i] = grad[i] - state.lambda[i] + cfg.rho * (x[i] - x0[i]);
      residual += step[i] * step[i];
    }
    for (std::size_t i = 0; i < d; ++i) x[i] -= cfg.eta * step[i];
    result.q_used = r + 1;
    if (residual <= cfg.nu) break;
    if (result.q_used == cfg.q_max) result.hit_cap = true;
  }

  state.x = std::move(x);
  result.y.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    state.lambda[i] += cfg.rho * (x0[i] - state.x[i]);
    result.y[i] = state.x[i] - state.lambda[i] / cfg.rho;
  }
  return result;
}

void PerturbInPlace(std::span<double> v, double sigma, Engine& engine) {
  if (!(sigma >= 0.0)) throw InvalidInput("noise sigma must be non-negative");
  if (sigma == 0.0) return;
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& x : v) x += noise(engine);
}

ModelVector PerturbUpload(std::span<const double> y, double sigma,
                          Engine& engine) {
  ModelVector out(y.begin(), y.end());
  PerturbInPlace(out, sigma, engine);
  return out;
}

}  // namespace fedpdm
