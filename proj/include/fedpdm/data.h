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

#ifndef FEDPDM_DATA_H_
#define FEDPDM_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fedpdm/client.h"
#include "fedpdm/dataset.h"

namespace fedpdm {

// ---------------------------------------------------------------------------
// MNIST (idx format)
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

// One idx image/label file pair. Pixels are scaled to [0, 1] and a trailing
// bias feature of 1 is appended, so 28x28 images give n = 785.
Dataset LoadMnistPair(const std::filesystem::path& images,
                      const std::filesystem::path& labels);

// Reads train-{images,labels}-idx*-ubyte and t10k-* from `dir`.
TrainTest LoadMnist(const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// UCI Adult
// ---------------------------------------------------------------------------

enum class MissingPolicy {
  kDrop,      // discard rows with a '?' field
  kZeroFill,  // keep the row; the missing categorical block is all zeros
};

// Encoded layout: 6 min-max scaled continuous columns (age, fnlwgt,
// education-num, capital-gain, capital-loss, hours-per-week), one-hot
// workclass(8) education(16) marital-status(7) occupation(14)
// relationship(6) race(5) sex(2) native-country(16: 15 most frequent
// countries + other), and a bias. 6 + 74 + 1 = 81.
inline constexpr std::size_t kAdultFeatures = 81;

struct AdultLoadReport {
  std::size_t raw_train_rows = 0;
  std::size_t raw_test_rows = 0;
  std::size_t missing_train_rows = 0;  // rows with at least one '?'
  std::size_t missing_test_rows = 0;
  std::size_t malformed_rows = 0;      // skipped: wrong arity or bad value
};

struct AdultData {
  TrainTest sets;
  AdultLoadReport report;
};

// Reads `dir`/adult.data and `dir`/adult.test. Min-max ranges are fit on the
// kept training rows and applied (clamped) to the test rows.
AdultData LoadAdult(const std::filesystem::path& dir,
                    MissingPolicy missing = MissingPolicy::kDrop);

// ---------------------------------------------------------------------------
// Synthetic Gaussian clusters
// ---------------------------------------------------------------------------

struct SyntheticSpec {
  std::size_t num_classes = 2;    // m >= 2
  std::size_t num_features = 21;  // n, bias included
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double separation = 4.0;        // mean distance between class means
  std::uint64_t seed = 0;
  std::size_t informative = 0;    // dims carrying class signal; 0 = all
  double scale = 1.0;             // multiplies every non-bias feature
  std::size_t zero_features = 0;  // trailing non-bias features fixed at 0
};

// Class k draws features from N(mu_k, I) in n - 1 dimensions, then appends
// the bias. Each mean is a random +-1 sign pattern on the first
// `informative` dimensions (antipodal for m = 2), centred and scaled so the
// mean pairwise distance is `separation`. The last `zero_features` non-bias
// dimensions are always 0 (like the blank border pixels of MNIST); the rest
// are noise.
// Non-bias features are then multiplied by `scale`, which sets gradient
// magnitudes without changing how separable the classes are.
// Labels are balanced (counts differ by at most one) and shuffled.
TrainTest GenerateSynthetic(const SyntheticSpec& spec);

// Test size defaults to a fifth of the training size.
TrainTest GenerateSynthetic(std::size_t m, std::size_t n,
                            std::size_t n_samples, double separation,
                            std::uint64_t seed);

// label,f0,f1,... one row per sample.
void WriteDatasetCsv(const Dataset& data, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Partitioning
// ---------------------------------------------------------------------------

enum class PartitionScheme { kLabelsPerClient, kOneClass, kIid };

struct PartitionSpec {
  PartitionScheme scheme = PartitionScheme::kIid;
  std::size_t labels_per_client = 4;  // used by kLabelsPerClient
  std::size_t n_clients = 100;
  std::size_t per_client_size = 600;
  std::uint64_t seed = 0;
};

std::vector<Shard> Partition(const Dataset& train, const PartitionSpec& spec);

PartitionScheme ParsePartitionScheme(const std::string& name);
std::string PartitionSchemeName(PartitionScheme scheme);

}  // namespace fedpdm

#endif  // FEDPDM_DATA_H_
