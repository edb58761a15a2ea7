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

#ifndef FEDPDM_RNG_H_
#define FEDPDM_RNG_H_

#include <cstdint>
#include <random>

namespace fedpdm {

using Engine = std::mt19937_64;

// Purposes that get their own independent random stream. Adding noise never
// shifts the batch or sampling streams because each purpose is keyed apart.
enum class Stream : std::uint64_t {
  kClientSampling = 1,
  kBatch = 2,
  kNoise = 3,
  kRandK = 4,
  kPartition = 5,
  kSynthetic = 6,
};

// Counter-based derivation: the result is a pure function of its arguments.
std::uint64_t DeriveSeed(std::uint64_t master, Stream stream,
                         std::uint64_t a = 0, std::uint64_t b = 0,
                         std::uint64_t c = 0);

inline Engine MakeEngine(std::uint64_t master, Stream stream,
                         std::uint64_t a = 0, std::uint64_t b = 0,
                         std::uint64_t c = 0) {
  return Engine(DeriveSeed(master, stream, a, b, c));
}

}  // namespace fedpdm

#endif  // FEDPDM_RNG_H_
