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

#include "fedpdm/simulation.h"

#include <cstdlib>
#include <fstream>
#include <numeric>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "fedpdm/errors.h"
#include "fedpdm/kernels.h"
#include "fedpdm/privacy.h"
#include "fedpdm/rng.h"
#include "fedpdm/server.h"
#include "fedpdm/sparsify.h"

namespace fedpdm {
namespace {

std::filesystem::path DataDir(const RunConfig& cfg) {
  if (const char* env = std::getenv("FEDPDM_DATA_DIR"); env && *env) {
    return env;
  }
  return cfg.data_dir;
}

struct Upload {
  ModelVector dense;
  SparsePayload sparse;
  int q_used = 0;
  bool hit_cap = false;
};

}  // namespace

Environment PrepareEnvironment(const RunConfig& cfg) {
  Environment env;
  switch (cfg.dataset) {
    case DatasetKind::kMnist:
      env.data = LoadMnist(DataDir(cfg) / "mnist");
      break;
    case DatasetKind::kAdult:
      env.data = LoadAdult(DataDir(cfg) / "adult", cfg.adult_missing).sets;
      break;
    case DatasetKind::kSynthetic:
      env.data = GenerateSynthetic(
          SyntheticSpec{cfg.synth_classes, cfg.synth_features,
                        cfg.synth_train_size, cfg.synth_test_size,
                        cfg.synth_separation, cfg.synth_seed,
                        cfg.synth_informative, cfg.synth_scale,
                        cfg.synth_zero_features});
      break;
  }
  if (env.data.test.empty()) throw ConfigError("dataset has no test samples");
  env.workload = {env.data.train.num_classes(), env.data.train.num_features(),
                  0.0, 0.0};
  env.shards = Partition(
      env.data.train,
      PartitionSpec{cfg.partition, cfg.labels_per_client,
                    static_cast<std::size_t>(cfg.clients), cfg.per_client_size,
                    cfg.seed});
  return env;
}

double EvaluateP(const std::vector<ClientState>& clients,
                 std::span<const double> x0, const Environment& env,
                 double gamma, double rho, Execution exec,
                 const WorkloadParams& workload) {
  std::vector<ModelVector> xs;
  std::vector<ModelVector> lambdas;
  xs.reserve(clients.size());
  lambdas.reserve(clients.size());
  for (const auto& c : clients) {
    xs.push_back(c.x);
    lambdas.push_back(c.lambda);
  }
  const auto grads =
      FullBatchGradients(exec, xs, env.data.train, env.shards, workload);
  return StationarityP(xs, x0, lambdas, grads, gamma, rho);
}

double EvaluateP(const std::vector<ClientState>& clients,
                 std::span<const double> x0, const Environment& env,
                 double gamma, double rho, Execution exec) {
  return EvaluateP(clients, x0, env, gamma, rho, exec, env.workload);
}

RunResult RunSimulation(const RunConfig& cfg, const Environment& env,
                        const RecordSink& sink, const std::atomic<bool>* stop) {
  cfg.Validate();
  if (env.shards.size() != static_cast<std::size_t>(cfg.clients)) {
    throw ConfigError("environment was partitioned for a different N");
  }
  WorkloadParams workload = env.workload;
  workload.beta = cfg.beta;
  workload.gamma = cfg.gamma;
  workload.Validate();
  const std::size_t d = workload.dim();
  const bool sparse = cfg.algorithm == Algorithm::kBsdpFedPdm;
  const auto K = static_cast<std::uint64_t>(cfg.clients_per_round);

  RunResult result;
  result.uplink_k = sparse ? KeepCount(cfg.alpha_up, d) : d;
  result.downlink_k = sparse ? KeepCount(cfg.alpha_down, d) : d;

  PrivacySpec privacy;
  if (cfg.privacy) {
    privacy.delta = cfg.delta;
    privacy.total_budget = cfg.budget;
    privacy.c0 = cfg.c0;
    privacy.p = static_cast<double>(cfg.clients_per_round) / cfg.clients;
    privacy.q = DataFraction(cfg.q_max, cfg.batch_size, cfg.per_client_size);
    privacy.epsilon_round = EpsilonForBudget(cfg.budget, privacy, cfg.rounds);
    privacy.Validate();
    result.epsilon_round = privacy.epsilon_round;
  }
  PrivacyAccountant accountant(static_cast<std::size_t>(cfg.clients),
                               privacy.epsilon_round, privacy, cfg.batch_size,
                               cfg.per_client_size);

  std::vector<ClientState> clients;
  clients.reserve(static_cast<std::size_t>(cfg.clients));
  for (int i = 0; i < cfg.clients; ++i) clients.push_back(InitialClientState(i, d));
  ServerState server{ModelVector(d, 0.0), 0, {}};
  CommMeter meter(cfg.count_index_bits);

  auto evaluate = [&](int completed, const RoundLog* log) {
    RoundRecord rec;
    rec.round = completed;
    rec.accuracy =
        static_cast<double>(CountCorrect(cfg.execution, server.x0, env.data.test)) /
        static_cast<double>(env.data.test.size());
    rec.p_measure = EvaluateP(clients, server.x0, env, cfg.gamma, cfg.rho,
                              cfg.execution, workload);
    rec.uplink_bits = meter.uplink_bits();
    rec.downlink_bits = meter.downlink_bits();
    rec.eps_cum = accountant.cumulative();
    rec.eps_cum_max = accountant.max_cumulative();
    if (log != nullptr && !log->selected.empty()) {
      rec.q_mean = std::accumulate(log->q_used.begin(), log->q_used.end(), 0.0) /
                   static_cast<double>(log->q_used.size());
      rec.sigma_mean = std::accumulate(log->sigma.begin(), log->sigma.end(), 0.0) /
                       static_cast<double>(log->sigma.size());
    }
    if (sink) sink(rec);
    result.records.push_back(std::move(rec));
  };

  evaluate(0, nullptr);

  for (int t = 0; t < cfg.rounds; ++t) {
    server.round = t;
    Engine sampling = MakeEngine(cfg.seed, Stream::kClientSampling,
                                 static_cast<std::uint64_t>(t));
    server.selected = SampleClients(cfg.clients, cfg.clients_per_round, sampling);

    // Downlink.
    ModelVector broadcast;
    if (sparse) {
      broadcast = Densify(DownlinkSparsify(server.x0, result.downlink_k));
    } else {
      broadcast = server.x0;
    }
    meter.AddDownlink(result.downlink_k, K);

    LocalRunConfig local;
    local.rho = cfg.rho;
    local.eta = cfg.Eta(t);
    local.nu = cfg.nu;
    local.q_max = cfg.q_max;
    local.batch_size = cfg.batch_size;
    local.clip_bound = cfg.clip_bound;

    double sigma = 0.0;
    if (cfg.privacy) {
      const double s = Sensitivity({cfg.rho, local.eta, cfg.q_max, cfg.clip_bound});
      sigma = NoiseSigma(s, privacy.epsilon_round, privacy.delta);
    }

    std::vector<Upload> uploads(server.selected.size());
    ForEachIndex(cfg.execution, server.selected.size(), [&](std::size_t j) {
      const int id = server.selected[j];
      auto& state = clients[static_cast<std::size_t>(id)];
      LocalRoundResult local_result =
          LocalRound(state, broadcast, local, workload, env.data.train,
                     env.shards[static_cast<std::size_t>(id)], cfg.seed, t);
      Upload& up = uploads[j];
      up.q_used = local_result.q_used;
      up.hit_cap = local_result.hit_cap;
      Engine noise = MakeEngine(cfg.seed, Stream::kNoise,
                                static_cast<std::uint64_t>(id),
                                static_cast<std::uint64_t>(t));
      if (sparse) {
        if (cfg.sparsifier == Sparsifier::kTopK) {
          up.sparse = TopK(local_result.y, result.uplink_k);
        } else {
          Engine pick = MakeEngine(cfg.seed, Stream::kRandK,
                                   static_cast<std::uint64_t>(id),
                                   static_cast<std::uint64_t>(t));
          up.sparse = RandK(local_result.y, result.uplink_k, pick);
        }
        PerturbInPlace(up.sparse.values, sigma, noise);
      } else {
        up.dense = std::move(local_result.y);
        PerturbInPlace(up.dense, sigma, noise);
      }
    });
    meter.AddUplink(result.uplink_k, K);

    // Barrier: aggregate in selection order.
    if (sparse) {
      std::vector<SparsePayload> payloads;
      payloads.reserve(uploads.size());
      for (auto& u : uploads) payloads.push_back(std::move(u.sparse));
      server.x0 = SparseGlobalUpdate(payloads, cfg.gamma, cfg.rho);
    } else {
      std::vector<ModelVector> dense;
      dense.reserve(uploads.size());
      for (auto& u : uploads) dense.push_back(std::move(u.dense));
      server.x0 = DenseGlobalUpdate(dense, cfg.gamma, cfg.rho);
    }

    RoundLog log;
    log.round = t;
    log.eta = local.eta;
    log.selected = server.selected;
    for (const auto& u : uploads) {
      log.q_used.push_back(u.q_used);
      log.sigma.push_back(sigma);
      log.cap_hits += u.hit_cap;
    }
    if (log.cap_hits > 0) {
      spdlog::debug("round {}: {} of {} clients hit q_max={}", t, log.cap_hits,
                    log.selected.size(), cfg.q_max);
    }
    if (cfg.privacy) accountant.EndRound(log.selected, log.q_used);

    const int completed = t + 1;
    if (completed % cfg.eval_every == 0 || completed == cfg.rounds) {
      evaluate(completed, &log);
    }
    result.log.push_back(std::move(log));

    if (stop != nullptr && stop->load()) {
      result.interrupted = completed < cfg.rounds;
      if (result.interrupted && result.records.back().round != completed) {
        evaluate(completed, &result.log.back());
      }
      break;
    }
  }
  result.final_model = server.x0;
  return result;
}

void WriteRunSummary(const std::filesystem::path& path, const RunConfig& cfg,
                     const RunResult& result) {
  nlohmann::json config = nlohmann::json::object();
  for (const auto& key : ConfigKeys()) {
    const std::string value = GetField(cfg, key);
    // Numbers and booleans go out typed, everything else as strings.
    nlohmann::json typed = nlohmann::json::parse(value, nullptr, false);
    if (!typed.is_discarded() && (typed.is_number() || typed.is_boolean())) {
      config[key] = std::move(typed);
    } else {
      config[key] = value;
    }
  }

  nlohmann::json doc;
  doc["config"] = config;
  const auto& last = result.records.back();
  std::size_t zeros = 0;
  for (double v : result.final_model) zeros += v == 0.0;
  doc["final"] = {
      {"round", last.round},
      {"accuracy", last.accuracy},
      {"p_measure", last.p_measure},
      {"uplink_bits", last.uplink_bits},
      {"downlink_bits", last.downlink_bits},
      {"eps_cum_max", last.eps_cum_max},
      {"zero_fraction", result.final_model.empty()
                            ? 0.0
                            : static_cast<double>(zeros) /
                                  static_cast<double>(result.final_model.size())},
  };
  doc["epsilon_round"] = result.epsilon_round;
  doc["uplink_k"] = result.uplink_k;
  doc["downlink_k"] = result.downlink_k;
  doc["interrupted"] = result.interrupted;
  doc["eps_cum_per_client"] = last.eps_cum;

  nlohmann::json rounds = nlohmann::json::array();
  for (const auto& log : result.log) {
    rounds.push_back({{"round", log.round},
                      {"eta", log.eta},
                      {"selected", log.selected},
                      {"q_used", log.q_used},
                      {"sigma", log.sigma},
                      {"cap_hits", log.cap_hits}});
  }
  doc["rounds"] = std::move(rounds);

  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << doc.dump(2) << '\n';
}

void WriteModelCsv(const std::filesystem::path& path,
                   std::span<const double> model, std::size_t num_features) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  for (std::size_t i = 0; i < model.size(); ++i) {
    out << fmt::format("{:.17g}", model[i])
        << ((i + 1) % num_features == 0 ? '\n' : ',');
  }
}

}  // namespace fedpdm
