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

#ifndef FEDPDM_CONFIG_H_
#define FEDPDM_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fedpdm/data.h"
#include "fedpdm/kernels.h"
#include "fedpdm/sparsify.h"

namespace fedpdm {

enum class Algorithm { kDpFedPdm, kBsdpFedPdm };
enum class DatasetKind { kMnist, kAdult, kSynthetic };

// Every field has a dotted key (see ConfigKeys()) used identically by TOML
// files, `--set key=value` overrides and the JSON config echo.
struct RunConfig {
  Algorithm algorithm = Algorithm::kDpFedPdm;
  DatasetKind dataset = DatasetKind::kSynthetic;
  std::uint64_t seed = 1;
  int rounds = 200;               // T
  int clients = 100;              // N
  int clients_per_round = 30;     // K
  std::size_t batch_size = 10;    // b
  double rho = 10.0;
  double nu = 1e-2;
  double beta = 0.5;
  double gamma = 0.5;
  int q_max = 50;
  double clip_bound = 1.0;        // G
  double eta0 = 0.04;             // eta_t = eta0 / sqrt(1 + t)
  int eval_every = 5;
  Execution execution = Execution::kOpenMP;
  std::string output_dir = "out";

  double alpha_up = 1.0;
  double alpha_down = 1.0;
  Sparsifier sparsifier = Sparsifier::kTopK;
  bool count_index_bits = false;

  bool privacy = false;
  double budget = 1.0;            // total loss over T rounds
  double delta = 1e-4;
  double c0 = 1.0;

  std::string data_dir = "data";
  PartitionScheme partition = PartitionScheme::kOneClass;
  std::size_t labels_per_client = 4;
  std::size_t per_client_size = 600;
  MissingPolicy adult_missing = MissingPolicy::kZeroFill;

  std::size_t synth_classes = 2;
  std::size_t synth_features = 21;
  std::size_t synth_train_size = 60000;
  std::size_t synth_test_size = 10000;
  double synth_separation = 4.0;
  std::uint64_t synth_seed = 7;
  std::size_t synth_informative = 0;  // 0 = every feature carries signal
  double synth_scale = 1.0;
  std::size_t synth_zero_features = 0;

  double Eta(int round) const;
  // Throws ConfigError on any inconsistency.
  void Validate() const;
};

// Defaults for one dataset: the shared parameter setting plus the
// dataset-specific step size, partition and shard size.
RunConfig DefaultConfig(DatasetKind dataset);

const std::vector<std::string>& ConfigKeys();

// Sets one field from its textual value. Throws ConfigError on unknown keys
// or unparsable values.
void SetField(RunConfig& cfg, const std::string& key, const std::string& value);
std::string GetField(const RunConfig& cfg, const std::string& key);

using Overrides = std::vector<std::pair<std::string, std::string>>;

// Parses "key=value".
std::pair<std::string, std::string> ParseOverride(const std::string& text);

// Flattens a TOML document into dotted key/value pairs.
Overrides ReadTomlOverrides(const std::filesystem::path& path);
Overrides ParseTomlOverrides(const std::string& text);

// Reads the "config" object of a run summary written by WriteRunSummary.
Overrides ReadSummaryOverrides(const std::filesystem::path& path);

// Defaults for the dataset named in `layers` (last one wins), then every
// layer in order. Validates the result.
RunConfig BuildConfig(const std::vector<Overrides>& layers);

std::string AlgorithmName(Algorithm a);
std::string DatasetName(DatasetKind d);
DatasetKind ParseDataset(const std::string& name);

}  // namespace fedpdm

#endif  // FEDPDM_CONFIG_H_
