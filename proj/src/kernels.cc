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

#include "fedpdm/kernels.h"

#include <omp.h>

#include <fmt/format.h>

#include "fedpdm/errors.h"

namespace fedpdm {

Execution ParseExecution(const std::string& name) {
  if (name == "serial") return Execution::kSerial;
  if (name == "openmp") return Execution::kOpenMP;
  throw ConfigError(fmt::format("unknown execution mode '{}'", name));
}

std::size_t CountCorrect(Execution exec, std::span<const double> model,
                         const Dataset& test) {
  const std::size_t m = test.num_classes();
  if (model.size() != m * test.num_features()) {
    throw InvalidInput("model does not match the test set shape");
  }
  const auto rows = static_cast<long>(test.size());
  std::size_t correct = 0;
  if (exec == Execution::kSerial) {
    for (long i = 0; i < rows; ++i) {
      const auto r = static_cast<std::size_t>(i);
      correct += PredictClass(model, test.row(r), m) == test.label(r);
    }
    return correct;
  }
  // Integer reduction: order-independent.
#pragma omp parallel for reduction(+ : correct) schedule(static)
  for (long i = 0; i < rows; ++i) {
    const auto r = static_cast<std::size_t>(i);
    correct += PredictClass(model, test.row(r), m) == test.label(r);
  }
  return correct;
}

std::vector<ModelVector> FullBatchGradients(Execution exec,
                                            std::span<const ModelVector> xs,
                                            const Dataset& train,
                                            std::span<const Shard> shards,
                                            const WorkloadParams& workload) {
  if (xs.size() != shards.size()) {
    throw InvalidInput("one model per shard required");
  }
  std::vector<ModelVector> grads(xs.size());
  ForEachIndex(exec, xs.size(), [&](std::size_t j) {
    grads[j] = LocalGradient(xs[j], train, shards[j].rows, workload, kNoClip);
  });
  return grads;
}

int MaxThreads() { return omp_get_max_threads(); }

void SetThreads(int n) {
  if (n >= 1) omp_set_num_threads(n);
}

}  // namespace fedpdm
