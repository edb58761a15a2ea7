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

#ifndef FEDPDM_KERNELS_H_
#define FEDPDM_KERNELS_H_

// Data-parallel kernels. Each kernel has an OpenMP path and a serial
// reference path. Work is split only across independent units (clients,
// test rows) and every unit is computed serially, so both paths return
// bit-identical results for any thread count.

#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "fedpdm/client.h"
#include "fedpdm/dataset.h"
#include "fedpdm/model.h"

namespace fedpdm {

enum class Execution { kSerial, kOpenMP };

Execution ParseExecution(const std::string& name);

// Calls fn(i) for every i in [0, n). The first exception thrown by any
// iteration is rethrown on the calling thread after the loop.
template <class Fn>
void ForEachIndex(Execution exec, std::size_t n, Fn&& fn) {
  if (exec == Execution::kSerial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mu;
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

// Number of test rows classified correctly.
std::size_t CountCorrect(Execution exec, std::span<const double> model,
                         const Dataset& test);

// Unclipped full-shard gradient for every client model.
std::vector<ModelVector> FullBatchGradients(Execution exec,
                                            std::span<const ModelVector> xs,
                                            const Dataset& train,
                                            std::span<const Shard> shards,
                                            const WorkloadParams& workload);

int MaxThreads();
// Caps the OpenMP team size for later parallel regions; n < 1 is ignored.
void SetThreads(int n);

}  // namespace fedpdm

#endif  // FEDPDM_KERNELS_H_
