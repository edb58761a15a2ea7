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

#ifndef FEDPDM_CLIENT_H_
#define FEDPDM_CLIENT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fedpdm/dataset.h"
#include "fedpdm/model.h"
#include "fedpdm/rng.h"

namespace fedpdm {

// A client's local data: row indices into a shared training table.
struct Shard {
  int owner = 0;
  std::vector<std::size_t> rows;
  std::vector<int> label_set;  // ascending
};

struct ClientState {
  int id = 0;
  ModelVector x;       // primal
  ModelVector lambda;  // dual
};

ClientState InitialClientState(int id, std::size_t dim);

struct LocalRunConfig {
  double rho = 10.0;
  double eta = 0.04;
  double nu = 1e-2;
  int q_max = 50;
  std::size_t batch_size = 10;
  double clip_bound = 1.0;

  void Validate() const;
};

struct LocalRoundResult {
  ModelVector y;       // combined model x - lambda / rho
  int q_used = 0;      // local iterations actually run
  bool hit_cap = false;
};

// Runs one round of local primal-dual updates for `state` starting from the
// broadcast model `x0`. Batches come from the stream keyed by
// (seed, client id, round, iteration), so the result does not depend on
// which thread runs the client.
LocalRoundResult LocalRound(ClientState& state, std::span<const double> x0,
                            const LocalRunConfig& cfg,
                            const WorkloadParams& workload,
                            const Dataset& train, const Shard& shard,
                            std::uint64_t seed, int round);

// Adds N(0, sigma^2) to each entry. sigma == 0 leaves `v` untouched and
// draws nothing.
void PerturbInPlace(std::span<double> v, double sigma, Engine& engine);

ModelVector PerturbUpload(std::span<const double> y, double sigma,
                          Engine& engine);

}  // namespace fedpdm

#endif  // FEDPDM_CLIENT_H_
