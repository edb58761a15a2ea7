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

#ifndef FEDPDM_MODEL_H_
#define FEDPDM_MODEL_H_

// The regularized multi-class logistic workload. A model is the row-major
// flattening of an m x n matrix whose row k scores class k.

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "fedpdm/dataset.h"

namespace fedpdm {

using ModelVector = std::vector<double>;

struct WorkloadParams {
  std::size_t num_classes = 0;   // m
  std::size_t num_features = 0;  // n, bias included
  double beta = 0.0;             // weight of the smooth non-convex term
  double gamma = 0.0;            // l1 weight, applied only through ProxL1

  std::size_t dim() const { return num_classes * num_features; }
  void Validate() const;
};

inline constexpr double kNoClip = std::numeric_limits<double>::infinity();

// Mean logistic loss of the labelled rows over `batch` plus
// beta * sum x^2 / (1 + x^2).
double LocalLoss(std::span<const double> model, const Dataset& data,
                 std::span<const std::size_t> batch,
                 const WorkloadParams& params);

// Analytic gradient of LocalLoss, rescaled to norm `clip_bound` when larger.
// Pass kNoClip for the raw gradient.
ModelVector LocalGradient(std::span<const double> model, const Dataset& data,
                          std::span<const std::size_t> batch,
                          const WorkloadParams& params,
                          double clip_bound = kNoClip);

// Soft threshold at gamma / rho.
ModelVector ProxL1(std::span<const double> u, double gamma, double rho);

// Highest-scoring class for one feature vector; ties go to the lowest index.
int PredictClass(std::span<const double> model, std::span<const double> features,
                 std::size_t num_classes);

// Fraction of rows of `test` whose predicted class equals the label.
double PredictAccuracy(std::span<const double> model, const Dataset& test);

// Rescales `v` in place to norm `bound` when its norm exceeds it.
void ClipToNorm(std::span<double> v, double bound);

double SquaredNorm(std::span<const double> v);

}  // namespace fedpdm

#endif  // FEDPDM_MODEL_H_
