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

#include "fedpdm/privacy.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "fedpdm/errors.h"

namespace fedpdm {
namespace {

constexpr double kDegenerateTolerance = 1e-12;

void CheckComposition(const PrivacySpec& spec) {
  if (!(spec.c0 > 0.0)) throw InvalidInput("c0 must be positive");
  if (!(spec.p > 0.0 && spec.p <= 1.0)) {
    throw InvalidInput(fmt::format("participation fraction p={} not in (0,1]",
                                   spec.p));
  }
  if (!(spec.q > 0.0 && spec.q < 1.0)) {
    throw InvalidInput(
        fmt::format("data fraction q={} not in (0,1)", spec.q));
  }
}

}  // namespace

void PrivacySpec::Validate() const {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidInput(fmt::format("delta={} not in (0,1)", delta));
  }
  if (!(total_budget >= 0.0)) throw InvalidInput("negative privacy budget");
  CheckComposition(*this);
}

double Sensitivity(const SensitivityParams& params) {
  if (!(params.rho > 0.0) || !(params.eta > 0.0) || params.q_iters < 1 ||
      !(params.clip_bound > 0.0)) {
    throw InvalidInput("sensitivity needs rho, eta, G > 0 and Q >= 1");
  }
  const double a = std::abs(1.0 - params.rho * params.eta);
  const double step = 4.0 * params.eta * params.clip_bound;
  if (std::abs(1.0 - a) <= kDegenerateTolerance) {
    return step * params.q_iters;
  }
  return (1.0 - std::pow(a, params.q_iters)) / (1.0 - a) * step;
}

double NoiseSigma(double sensitivity, double epsilon, double delta) {
  if (!(sensitivity >= 0.0)) throw InvalidInput("negative sensitivity");
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidInput(fmt::format("delta={} not in (0,1)", delta));
  }
  return sensitivity * std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

double TotalLoss(double epsilon_round, const PrivacySpec& spec, long rounds) {
  if (rounds < 0) throw InvalidInput("negative round count");
  if (spec.q >= 1.0) {
    throw InvalidInput(fmt::format("data fraction q={} must be < 1", spec.q));
  }
  if (rounds == 0) return 0.0;
  return spec.c0 * spec.q * spec.q * epsilon_round *
         std::sqrt(spec.p * static_cast<double>(rounds) / (1.0 - spec.q));
}

double EpsilonForBudget(double total_budget, const PrivacySpec& spec,
                        long rounds) {
  if (!(total_budget > 0.0)) {
    throw InvalidInput("privacy budget must be positive");
  }
  if (rounds < 1) throw InvalidInput("need at least one round");
  CheckComposition(spec);
  return total_budget /
         (spec.c0 * spec.q * spec.q *
          std::sqrt(spec.p * static_cast<double>(rounds) / (1.0 - spec.q)));
}

double DataFraction(int q_iters, std::size_t batch_size,
                    std::size_t shard_size) {
  if (shard_size == 0) throw InvalidInput("empty shard");
  return static_cast<double>(q_iters) * static_cast<double>(batch_size) /
         static_cast<double>(shard_size);
}

CalibrationReport Calibrate(const CalibrationInput& in) {
  if (in.clients < 1 || in.clients_per_round < 1 ||
      in.clients_per_round > in.clients) {
    throw InvalidInput("need 1 <= K <= N");
  }
  CalibrationReport report;
  PrivacySpec& spec = report.spec;
  spec.delta = in.delta;
  spec.total_budget = in.budget;
  spec.c0 = in.c0;
  spec.p = static_cast<double>(in.clients_per_round) / in.clients;
  spec.q = DataFraction(in.q_max, in.batch_size, in.shard_size);
  spec.epsilon_round = EpsilonForBudget(in.budget, spec, in.rounds);
  spec.Validate();
  report.round_trip = TotalLoss(spec.epsilon_round, spec, in.rounds);

  std::vector<long> rounds = {0, in.rounds / 2, in.rounds - 1};
  rounds.erase(std::unique(rounds.begin(), rounds.end()), rounds.end());
  for (long t : rounds) {
    CalibrationRow row;
    row.round = t;
    row.eta = in.eta0 / std::sqrt(1.0 + static_cast<double>(t));
    row.sensitivity = Sensitivity({in.rho, row.eta, in.q_max, in.clip_bound});
    row.sigma = NoiseSigma(row.sensitivity, spec.epsilon_round, in.delta);
    report.rows.push_back(row);
  }
  return report;
}

PrivacyAccountant::PrivacyAccountant(std::size_t num_clients,
                                     double epsilon_round, PrivacySpec spec,
                                     std::size_t batch_size,
                                     std::size_t shard_size)
    : epsilon_round_(epsilon_round),
      spec_(spec),
      batch_size_(batch_size),
      shard_size_(shard_size),
      max_q_(num_clients, 0),
      cumulative_(num_clients, 0.0) {}

void PrivacyAccountant::EndRound(const std::vector<int>& selected,
                                 const std::vector<int>& q_used) {
  ++rounds_;
  for (std::size_t j = 0; j < selected.size(); ++j) {
    auto& q = max_q_[static_cast<std::size_t>(selected[j])];
    q = std::max(q, q_used[j]);
  }
  for (std::size_t i = 0; i < max_q_.size(); ++i) {
    if (max_q_[i] == 0) continue;
    PrivacySpec realized = spec_;
    realized.q = DataFraction(max_q_[i], batch_size_, shard_size_);
    cumulative_[i] = TotalLoss(epsilon_round_, realized, rounds_);
  }
}

double PrivacyAccountant::max_cumulative() const {
  return cumulative_.empty()
             ? 0.0
             : *std::max_element(cumulative_.begin(), cumulative_.end());
}

}  // namespace fedpdm
