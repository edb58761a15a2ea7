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

#ifndef FEDPDM_METRICS_H_
#define FEDPDM_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fedpdm/model.h"

namespace fedpdm {

// Stationarity gap of the augmented Lagrangian, given each client's full
// gradient of f_j at x_j:
//   sum_j ||g_j - lambda_j + rho (x_j - x0)||^2 + ||x0 - x_j||^2
//   + rho^2 ||x0 - prox(mean_j(x_j - lambda_j / rho))||^2
// The last term stands in for the non-smooth x0 block.
double StationarityP(std::span<const ModelVector> xs,
                     std::span<const double> x0,
                     std::span<const ModelVector> lambdas,
                     std::span<const ModelVector> full_gradients, double gamma,
                     double rho);

// Uplink/downlink bit counter: 32 bits per transmitted real, per client, per
// round. With `count_indices` each entry also pays 32 bits for its index.
class CommMeter {
 public:
  explicit CommMeter(bool count_indices = false)
      : bits_per_entry_(count_indices ? 64 : 32) {}

  std::uint64_t AddUplink(std::uint64_t k, std::uint64_t clients) {
    return uplink_ += bits_per_entry_ * k * clients;
  }
  std::uint64_t AddDownlink(std::uint64_t k_prime, std::uint64_t clients) {
    return downlink_ += bits_per_entry_ * k_prime * clients;
  }

  std::uint64_t uplink_bits() const { return uplink_; }
  std::uint64_t downlink_bits() const { return downlink_; }

 private:
  std::uint64_t bits_per_entry_;
  std::uint64_t uplink_ = 0;
  std::uint64_t downlink_ = 0;
};

// One evaluated round. `round` counts completed rounds (0 = initial state).
struct RoundRecord {
  int round = 0;
  double accuracy = 0.0;
  double p_measure = 0.0;
  std::uint64_t uplink_bits = 0;    // cumulative
  std::uint64_t downlink_bits = 0;  // cumulative
  double eps_cum_max = 0.0;
  double q_mean = 0.0;      // over the clients selected in this round
  double sigma_mean = 0.0;  // over the clients selected in this round
  std::vector<double> eps_cum;  // per client
};

std::string CsvHeader();
std::string CsvRow(const RoundRecord& record);

}  // namespace fedpdm

#endif  // FEDPDM_METRICS_H_
