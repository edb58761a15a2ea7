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

#ifndef FEDPDM_PRIVACY_H_
#define FEDPDM_PRIVACY_H_

#include <cstddef>
#include <vector>

namespace fedpdm {

// Parameters of the Gaussian mechanism and of the T-round composition.
struct PrivacySpec {
  double epsilon_round = 0.0;  // per-round epsilon
  double delta = 1e-4;
  double total_budget = 0.0;   // target total loss over T rounds
  double c0 = 1.0;             // accountant constant; rescales budget <-> eps
  double p = 1.0;              // participation fraction K / N
  double q = 0.0;              // data fraction Q * b / |D_i|

  void Validate() const;
};

struct SensitivityParams {
  double rho = 0.0;
  double eta = 0.0;
  int q_iters = 1;  // local iterations Q
  double clip_bound = 1.0;  // G
};

// l2 sensitivity of the uploaded combined model after Q clipped local steps:
// 4 eta G (1 - a^Q) / (1 - a) with a = |1 - rho eta|, and 4 eta Q G when a
// is within 1e-12 of 1.
double Sensitivity(const SensitivityParams& params);

// sigma = s * sqrt(2 ln(1.25 / delta)) / epsilon.
double NoiseSigma(double sensitivity, double epsilon, double delta);

// Total loss c0 q^2 eps sqrt(p T / (1 - q)). `spec.epsilon_round` is not
// read; the explicit argument wins.
double TotalLoss(double epsilon_round, const PrivacySpec& spec, long rounds);

// Per-round epsilon whose T-round total equals `total_budget`.
double EpsilonForBudget(double total_budget, const PrivacySpec& spec,
                        long rounds);

// Data fraction q = Q * b / |D_i|.
double DataFraction(int q_iters, std::size_t batch_size,
                    std::size_t shard_size);

// Inputs of the budget -> per-round noise calibration. Q is planned at
// q_max, the worst case, since sensitivity is non-decreasing in Q.
struct CalibrationInput {
  double budget = 1.0;
  double delta = 1e-4;
  double c0 = 1.0;
  int clients = 100;
  int clients_per_round = 30;
  long rounds = 200;
  std::size_t batch_size = 10;
  std::size_t shard_size = 600;
  int q_max = 50;
  double rho = 10.0;
  double eta0 = 0.04;
  double clip_bound = 1.0;
};

struct CalibrationRow {
  long round = 0;
  double eta = 0.0;
  double sensitivity = 0.0;
  double sigma = 0.0;
};

struct CalibrationReport {
  PrivacySpec spec;          // p, q and the solved epsilon_round
  double round_trip = 0.0;   // TotalLoss(epsilon_round) over all rounds
  std::vector<CalibrationRow> rows;  // t = 0, T/2, T-1
};

// eta_t = eta0 / sqrt(1 + t).
CalibrationReport Calibrate(const CalibrationInput& in);

// Per-client realized loss. Each client's running loss uses the largest Q it
// has actually run so far and the number of elapsed rounds; clients that
// never ran are at zero. Updated once per round at the barrier.
class PrivacyAccountant {
 public:
  PrivacyAccountant(std::size_t num_clients, double epsilon_round,
                    PrivacySpec spec, std::size_t batch_size,
                    std::size_t shard_size);

  // `q_used[j]` is the local iteration count of client `selected[j]`.
  void EndRound(const std::vector<int>& selected,
                const std::vector<int>& q_used);

  long rounds() const { return rounds_; }
  const std::vector<double>& cumulative() const { return cumulative_; }
  double max_cumulative() const;

 private:
  double epsilon_round_;
  PrivacySpec spec_;
  std::size_t batch_size_;
  std::size_t shard_size_;
  long rounds_ = 0;
  std::vector<int> max_q_;
  std::vector<double> cumulative_;
};

}  // namespace fedpdm

#endif  // FEDPDM_PRIVACY_H_
