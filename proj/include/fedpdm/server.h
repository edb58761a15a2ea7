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

#ifndef FEDPDM_SERVER_H_
#define FEDPDM_SERVER_H_

#include <cstddef>
#include <span>
#include <vector>

#include "fedpdm/model.h"
#include "fedpdm/rng.h"
#include "fedpdm/sparsify.h"

namespace fedpdm {

struct ServerState {
  ModelVector x0;
  int round = 0;
  std::vector<int> selected;  // ascending client ids
};

// Uniform k-subset of [0, n), returned in ascending order.
std::vector<int> SampleClients(int n_total, int k_sel, Engine& engine);

// prox of the arithmetic mean of the uploads.
ModelVector DenseGlobalUpdate(std::span<const ModelVector> uploads,
                              double gamma, double rho);

// prox of the coverage-weighted aggregate of sparse uploads.
ModelVector SparseGlobalUpdate(std::span<const SparsePayload> payloads,
                               double gamma, double rho);

inline SparsePayload DownlinkSparsify(std::span<const double> x0,
                                      std::size_t k_prime) {
  return TopK(x0, k_prime);
}

}  // namespace fedpdm

#endif  // FEDPDM_SERVER_H_
