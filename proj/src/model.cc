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

#include "fedpdm/model.h"

#include <cmath>

#include <fmt/format.h>

#include "fedpdm/errors.h"

namespace fedpdm {
namespace {

// ln(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

// 1 / (1 + exp(-z)).
double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void CheckShapes(std::span<const double> model, const Dataset& data,
                 std::span<const std::size_t> batch,
                 const WorkloadParams& params) {
  if (model.size() != params.dim()) {
    throw InvalidInput(fmt::format("model length {} != m*n = {}", model.size(),
                                   params.dim()));
  }
  if (data.num_features() != params.num_features) {
    throw InvalidInput(fmt::format("data has {} features, workload expects {}",
                                   data.num_features(), params.num_features));
  }
  if (batch.empty()) throw InvalidInput("empty batch");
  for (std::size_t r : batch) {
    if (r >= data.size()) {
      throw InvalidInput(fmt::format("batch row {} out of range", r));
    }
    if (static_cast<std::size_t>(data.label(r)) >= params.num_classes) {
      throw InvalidInput(fmt::format("label {} >= m", data.label(r)));
    }
  }
}

}  // namespace

void WorkloadParams::Validate() const {
  if (num_classes == 0 || num_features == 0) {
    throw InvalidInput("workload needs m >= 1 and n >= 1");
  }
  if (!(beta >= 0.0) || !(gamma >= 0.0)) {
    throw InvalidInput("beta and gamma must be non-negative");
  }
}

double SquaredNorm(std::span<const double> v) { return Dot(v, v); }

void ClipToNorm(std::span<double> v, double bound) {
  if (std::isinf(bound)) return;
  const double norm = std::sqrt(SquaredNorm(v));
  if (norm > bound) {
    const double scale = bound / norm;
    for (double& x : v) x *= scale;
  }
}

double LocalLoss(std::span<const double> model, const Dataset& data,
                 std::span<const std::size_t> batch,
                 const WorkloadParams& params) {
  CheckShapes(model, data, batch, params);
  const std::size_t n = params.num_features;
  double data_term = 0.0;
  for (std::size_t r : batch) {
    const auto label = static_cast<std::size_t>(data.label(r));
    const double score = Dot(model.subspan(label * n, n), data.row(r));
    data_term += Softplus(-score);
  }
  data_term /= static_cast<double>(batch.size());

  double reg = 0.0;
  if (params.beta != 0.0) {
    for (double x : model) reg += x * x / (1.0 + x * x);
  }
  return data_term + params.beta * reg;
}

ModelVector LocalGradient(std::span<const double> model, const Dataset& data,
                          std::span<const std::size_t> batch,
                          const WorkloadParams& params, double clip_bound) {
  CheckShapes(model, data, batch, params);
  if (!(clip_bound > 0.0)) throw InvalidInput("clip bound must be positive");
  const std::size_t n = params.num_features;
  ModelVector grad(model.size(), 0.0);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  for (std::size_t r : batch) {
    const auto label = static_cast<std::size_t>(data.label(r));
    const auto features = data.row(r);
    const double score = Dot(model.subspan(label * n, n), features);
    // d/ds ln(1 + e^{-s}) = -sigmoid(-s)
    const double coeff = -Sigmoid(-score) * inv_b;
    double* g = grad.data() + label * n;
    for (std::size_t k = 0; k < n; ++k) g[k] += coeff * features[k];
  }
  if (params.beta != 0.0) {
    for (std::size_t i = 0; i < model.size(); ++i) {
      const double x = model[i];
      const double denom = 1.0 + x * x;
      grad[i] += 2.0 * params.beta * x / (denom * denom);
    }
  }
  ClipToNorm(grad, clip_bound);
  return grad;
}

ModelVector ProxL1(std::span<const double> u, double gamma, double rho) {
  if (!(rho > 0.0)) throw InvalidInput("rho must be positive");
  if (!(gamma >= 0.0)) throw InvalidInput("gamma must be non-negative");
  const double tau = gamma / rho;
  ModelVector out(u.begin(), u.end());
  if (tau == 0.0) return out;
  for (double& x : out) {
    const double mag = std::abs(x) - tau;
    x = mag > 0.0 ? std::copysign(mag, x) : 0.0;
  }
  return out;
}

int PredictClass(std::span<const double> model,
                 std::span<const double> features, std::size_t num_classes) {
  const std::size_t n = features.size();
  int best = 0;
  double best_score = Dot(model.subspan(0, n), features);
  for (std::size_t k = 1; k < num_classes; ++k) {
    const double s = Dot(model.subspan(k * n, n), features);
    if (s > best_score) {
      best_score = s;
      best = static_cast<int>(k);
    }
  }
  return best;
}

double PredictAccuracy(std::span<const double> model, const Dataset& test) {
  if (test.empty()) throw InvalidInput("empty test set");
  const std::size_t m = test.num_classes();
  if (model.size() != m * test.num_features()) {
    throw InvalidInput(fmt::format("model length {} != m*n = {}", model.size(),
                                   m * test.num_features()));
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (PredictClass(model, test.row(i), m) == test.label(i)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace fedpdm
