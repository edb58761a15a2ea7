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

#ifndef FEDPDM_SIMULATION_H_
#define FEDPDM_SIMULATION_H_

#include <atomic>
#include <filesystem>
#include <functional>
#include <vector>

#include "fedpdm/client.h"
#include "fedpdm/config.h"
#include "fedpdm/dataset.h"
#include "fedpdm/metrics.h"
#include "fedpdm/model.h"

namespace fedpdm {

// Loaded data plus the client partition; read-only during a run.
struct Environment {
  TrainTest data;
  std::vector<Shard> shards;
  WorkloadParams workload;
};

// Loads (or generates) the configured dataset and partitions it. Real data
// is read from cfg.data_dir, or from $FEDPDM_DATA_DIR when that is set.
Environment PrepareEnvironment(const RunConfig& cfg);

// Per-round details that do not fit the CSV.
struct RoundLog {
  int round = 0;  // 0-based index of the executed round
  double eta = 0.0;
  std::vector<int> selected;
  std::vector<int> q_used;
  std::vector<double> sigma;
  int cap_hits = 0;
};

struct RunResult {
  std::vector<RoundRecord> records;
  std::vector<RoundLog> log;
  ModelVector final_model;
  double epsilon_round = 0.0;  // 0 when privacy is off
  std::size_t uplink_k = 0;
  std::size_t downlink_k = 0;
  bool interrupted = false;
};

using RecordSink = std::function<void(const RoundRecord&)>;

// Runs DP-FedPDM, or BSDP-FedPDM when cfg.algorithm says so. Every evaluated
// record is passed to `sink` as soon as it exists. When `stop` becomes true
// the run ends after the current round.
RunResult RunSimulation(const RunConfig& cfg, const Environment& env,
                        const RecordSink& sink = {},
                        const std::atomic<bool>* stop = nullptr);

// Stationarity gap of the current state over all clients.
double EvaluateP(const std::vector<ClientState>& clients,
                 std::span<const double> x0, const Environment& env,
                 double gamma, double rho, Execution exec);

// Writes summary.json: config echo (replayable), final metrics and the
// per-round log.
void WriteRunSummary(const std::filesystem::path& path, const RunConfig& cfg,
                     const RunResult& result);

// m rows of n comma-separated weights.
void WriteModelCsv(const std::filesystem::path& path,
                   std::span<const double> model, std::size_t num_features);

}  // namespace fedpdm

#endif  // FEDPDM_SIMULATION_H_
