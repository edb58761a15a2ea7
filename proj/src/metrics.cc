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

#include "fedpdm/metrics.h"

#include <fmt/format.h>

#include "fedpdm/errors.h"

namespace fedpdm {

double StationarityP(std::span<const ModelVector> xs,
                     std::span<const double> x0,
                     std::span<const ModelVector> lambdas,
                     std::span<const ModelVector> full_gradients, double gamma,
                     double rho) {
  const std::size_t n = xs.size();
  const std::size_t d = x0.size();
  if (n == 0 || lambdas.size() != n || full_gradients.size() != n) {
    throw InvalidInput("P needs matching non-empty client lists");
  }
  if (!(rho > 0.0)) throw InvalidInput("rho must be positive");

  double total = 0.0;
  ModelVector average(d, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& x = xs[j];
    const auto& lambda = lambdas[j];
    const auto& g = full_gradients[j];
    if (x.size() != d || lambda.size() != d || g.size() != d) {
      throw InvalidInput("P inputs have mismatched lengths");
    }
    double primal = 0.0;
    double dual = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double r = g[i] - lambda[i] + rho * (x[i] - x0[i]);
      primal += r * r;
      const double c = x0[i] - x[i];
      dual += c * c;
      average[i] += x[i] - lambda[i] / rho;
    }
    total += primal + dual;
  }
  for (double& v : average) v /= static_cast<double>(n);
  const ModelVector fixed = ProxL1(average, gamma, rho);
  double global = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double r = x0[i] - fixed[i];
    global += r * r;
  }
  return total + rho * rho * global;
}

std::string CsvHeader() {
  return "round,accuracy,p_measure,uplink_bits,downlink_bits,eps_cum_max,"
         "q_mean,sigma_mean";
}

std::string CsvRow(const RoundRecord& r) {
  return fmt::format("{},{:.6f},{:.9e},{},{},{:.9e},{:.4f},{:.9e}", r.round,
                     r.accuracy, r.p_measure, r.uplink_bits, r.downlink_bits,
                     r.eps_cum_max, r.q_mean, r.sigma_mean);
}

}  // namespace fedpdm
