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

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "fedpdm/kernels.h"
#include "fedpdm/metrics.h"
#include "fedpdm/privacy.h"
#include "fedpdm/sparsify.h"
#include "test_util.h"

namespace fedpdm {
namespace {

using testing::KindOf;
using testing::SmallSyntheticConfig;

std::vector<std::string> Rows(const RunResult& r) {
  std::vector<std::string> rows;
  for (const auto& rec : r.records) rows.push_back(CsvRow(rec));
  return rows;
}

TEST(SimulationTest, SameSeedSameOutputs) {
  RunConfig cfg = SmallSyntheticConfig();
  cfg.privacy = true;
  const Environment env = PrepareEnvironment(cfg);
  const RunResult a = RunSimulation(cfg, env);
  const RunResult b = RunSimulation(cfg, env);
  EXPECT_EQ(Rows(a), Rows(b));
  EXPECT_EQ(a.final_model, b.final_model);
  cfg.seed = 2;
  EXPECT_NE(RunSimulation(cfg, env).final_model, a.final_model);
}

TEST(SimulationTest, SerialAndOpenMPBitIdentical) {
  for (auto alg : {Algorithm::kDpFedPdm, Algorithm::kBsdpFedPdm}) {
    RunConfig cfg = SmallSyntheticConfig();
    cfg.algorithm = alg;
    cfg.privacy = true;
    cfg.alpha_up = 0.4;
    cfg.alpha_down = 0.6;
    cfg.sparsifier = Sparsifier::kRandK;
    const Environment env = PrepareEnvironment(cfg);
    cfg.execution = Execution::kSerial;
    const RunResult serial = RunSimulation(cfg, env);
    cfg.execution = Execution::kOpenMP;
    for (int threads : {1, 3, MaxThreads()}) {
      SetThreads(threads);
      const RunResult parallel = RunSimulation(cfg, env);
      EXPECT_EQ(Rows(parallel), Rows(serial)) << threads;
      EXPECT_EQ(parallel.final_model, serial.final_model) << threads;
      for (std::size_t t = 0; t < serial.log.size(); ++t) {
        EXPECT_EQ(parallel.log[t].q_used, serial.log[t].q_used);
      }
    }
  }
}

TEST(SimulationTest, FullRatioSparsePathEqualsDensePath) {
  RunConfig cfg = SmallSyntheticConfig();
  cfg.privacy = true;
  cfg.eval_every = 1;
  const Environment env = PrepareEnvironment(cfg);
  const RunResult dense = RunSimulation(cfg, env);
  cfg.algorithm = Algorithm::kBsdpFedPdm;
  cfg.alpha_up = 1.0;
  cfg.alpha_down = 1.0;
  const RunResult sparse = RunSimulation(cfg, env);
  EXPECT_EQ(Rows(sparse), Rows(dense));
  EXPECT_EQ(sparse.final_model, dense.final_model);
}

TEST(SimulationTest, EvaluationSchedule) {
  RunConfig cfg = SmallSyntheticConfig();
  cfg.rounds = 10;
  cfg.eval_every = 3;
  const RunResult r = RunSimulation(cfg, PrepareEnvironment(cfg));
  std::vector<int> rounds;
  for (const auto& rec : r.records) rounds.push_back(rec.round);
  EXPECT_EQ(rounds, (std::vector<int>{0, 3, 6, 9, 10}));
  EXPECT_EQ(r.log.size(), 10u);
}

TEST(SimulationTest, MeterFollowsEntryCount) {
  RunConfig cfg = SmallSyntheticConfig();
  cfg.algorithm = Algorithm::kBsdpFedPdm;
  cfg.alpha_up = 0.25;
  cfg.alpha_down = 0.5;
  const Environment env = PrepareEnvironment(cfg);
  const RunResult r = RunSimulation(cfg, env);
  const std::size_t d = env.workload.dim();
  EXPECT_EQ(r.uplink_k, KeepCount(0.25, d));
  EXPECT_EQ(r.downlink_k, KeepCount(0.5, d));
  const auto k = static_cast<std::uint64_t>(cfg.clients_per_round);
  for (const auto& rec : r.records) {
    const auto t = static_cast<std::uint64_t>(rec.round);
    EXPECT_EQ(rec.uplink_bits, 32 * r.uplink_k * k * t);
    EXPECT_EQ(rec.downlink_bits, 32 * r.downlink_k * k * t);
  }

  cfg.algorithm = Algorithm::kDpFedPdm;
  const RunResult dense = RunSimulation(cfg, env);
  EXPECT_EQ(dense.records.back().uplink_bits,
            32 * d * k * static_cast<std::uint64_t>(cfg.rounds));
}

TEST(SimulationTest, NoiseDoesNotChangeClientSampling) {
  RunConfig cfg = SmallSyntheticConfig();
  const Environment env = PrepareEnvironment(cfg);
  const RunResult quiet = RunSimulation(cfg, env);
  cfg.privacy = true;
  const RunResult noisy = RunSimulation(cfg, env);
  ASSERT_EQ(quiet.log.size(), noisy.log.size());
  for (std::size_t t = 0; t < quiet.log.size(); ++t) {
    EXPECT_EQ(quiet.log[t].selected, noisy.log[t].selected);
  }
  EXPECT_NE(quiet.final_model, noisy.final_model);
}

TEST(SimulationTest, NoiseScaleCalibratedAtIterationCap) {
  RunConfig cfg = SmallSyntheticConfig();
  cfg.privacy = true;
  cfg.budget = 0.5;
  const RunResult r = RunSimulation(cfg, PrepareEnvironment(cfg));
  PrivacySpec spec;
  spec.delta = cfg.delta;
  spec.c0 = cfg.c0;
  spec.p = static_cast<double>(cfg.clients_per_round) / cfg.clients;
  spec.q = DataFraction(cfg.q_max, cfg.batch_size, cfg.per_client_size);
  const double eps = EpsilonForBudget(cfg.budget, spec, cfg.rounds);
  EXPECT_DOUBLE_EQ(r.epsilon_round, eps);
  for (const auto& log : r.log) {
    const double s = Sensitivity({cfg.rho, cfg.Eta(log.round), cfg.q_max, cfg.clip_bound});
    ASSERT_EQ(log.sigma.size(), log.selected.size());
    for (std::size_t j = 0; j < log.selected.size(); ++j) {
      EXPECT_EQ(log.sigma[j], NoiseSigma(s, eps, cfg.delta));
      EXPECT_GE(log.q_used[j], 1);
      EXPECT_LE(log.q_used[j], cfg.q_max);
    }
  }
  double last = 0.0;
  for (const auto& rec : r.records) {
    EXPECT_GE(rec.eps_cum_max, last);
    last = rec.eps_cum_max;
  }
  EXPECT_GT(last, 0.0);
  EXPECT_LE(last, cfg.budget * (1 + 1e-12));
}

TEST(SimulationTest, PrivacyOffMeansNoNoise) {
  RunConfig cfg = SmallSyntheticConfig();
  const RunResult r = RunSimulation(cfg, PrepareEnvironment(cfg));
  EXPECT_EQ(r.epsilon_round, 0.0);
  for (const auto& log : r.log) {
    for (double s : log.sigma) EXPECT_EQ(s, 0.0);
  }
  EXPECT_EQ(r.records.back().eps_cum_max, 0.0);
}

// One client holding one sample a = (1, 2) with a single class. With a huge
// tolerance every local round is one step, and with gamma = 0 the server
// takes the upload as is.
TEST(SimulationTest, TwoDimensionalHandTrace) {
  Environment env;
  const std::vector<double> a{1.0, 2.0};
  env.data.train = Dataset(2, 1);
  env.data.train.Add(a, 0);
  env.data.test = env.data.train;
  env.shards = {Shard{0, {0}, {0}}};
  env.workload = WorkloadParams{1, 2, 0.0, 0.0};

  RunConfig cfg = DefaultConfig(DatasetKind::kSynthetic);
  cfg.clients = 1;
  cfg.clients_per_round = 1;
  cfg.batch_size = 1;
  cfg.per_client_size = 1;
  cfg.rounds = 2;
  cfg.eval_every = 1;
  cfg.nu = 1e9;
  cfg.gamma = 0.0;
  cfg.beta = 0.0;
  cfg.clip_bound = 100.0;
  cfg.eta0 = 0.1;
  cfg.rho = 10.0;

  cfg.rounds = 1;
  const RunResult one = RunSimulation(cfg, env);
  // Round 0: g = -a/2, x = 0.05 a, lambda = -0.5 a, y = x - lambda/rho = 0.1 a.
  EXPECT_DOUBLE_EQ(one.final_model[0], 0.1);
  EXPECT_DOUBLE_EQ(one.final_model[1], 0.2);
  EXPECT_EQ(one.log[0].q_used, std::vector<int>{1});

  cfg.rounds = 2;
  const RunResult two = RunSimulation(cfg, env);
  // Round 1 starts from x0 = 0.1 a with lambda = -0.5 a. One step from x0:
  // step = -sigmoid(-x0.a) a - lambda, and y = x0 - lambda/rho - 2 eta step.
  const double score = 0.1 * 1.0 + 0.2 * 2.0;
  const double sig = 1.0 / (1.0 + std::exp(score));
  const double eta = 0.1 / std::sqrt(2.0);
  for (std::size_t i = 0; i < 2; ++i) {
    const double x0 = 0.1 * a[i];
    const double lambda = -0.5 * a[i];
    const double step = -sig * a[i] - lambda;
    EXPECT_NEAR(two.final_model[i], x0 - lambda / 10.0 - 2 * eta * step, 1e-15);
  }
}

TEST(SimulationTest, EasyDataLearnsQuickly) {
  RunConfig cfg = DefaultConfig(DatasetKind::kSynthetic);
  cfg.synth_features = 5;
  cfg.synth_separation = 10.0;
  cfg.synth_informative = 0;
  cfg.synth_zero_features = 0;
  cfg.synth_scale = 1.0;
  cfg.rounds = 20;
  const Environment env = PrepareEnvironment(cfg);
  EXPECT_DOUBLE_EQ(RunSimulation(cfg, env).records.front().accuracy, 0.5);
  EXPECT_GT(RunSimulation(cfg, env).records.back().accuracy, 0.95);
  cfg.rounds = 50;
  EXPECT_GT(RunSimulation(cfg, env).records.back().accuracy, 0.9);
}

TEST(SimulationTest, LargeGammaKeepsModelAtZero) {
  RunConfig cfg = SmallSyntheticConfig();
  cfg.gamma = 1e6;
  const RunResult r = RunSimulation(cfg, PrepareEnvironment(cfg));
  for (double v : r.final_model) EXPECT_EQ(v, 0.0);
}

TEST(SimulationTest, StopFlagInterruptsWithFinalRow) {
  RunConfig cfg = SmallSyntheticConfig();
  std::atomic<bool> stop{true};
  std::vector<int> streamed;
  const RunResult r = RunSimulation(
      cfg, PrepareEnvironment(cfg),
      [&](const RoundRecord& rec) { streamed.push_back(rec.round); }, &stop);
  EXPECT_TRUE(r.interrupted);
  ASSERT_FALSE(r.records.empty());
  EXPECT_LT(r.records.back().round, cfg.rounds);
  EXPECT_EQ(static_cast<std::size_t>(r.records.back().round), r.log.size());
  EXPECT_EQ(streamed.size(), r.records.size());
}

TEST(SimulationTest, SinkSeesEveryRecord) {
  RunConfig cfg = SmallSyntheticConfig();
  std::vector<std::string> streamed;
  const RunResult r = RunSimulation(cfg, PrepareEnvironment(cfg),
                                    [&](const RoundRecord& rec) {
                                      streamed.push_back(CsvRow(rec));
                                    });
  EXPECT_FALSE(r.interrupted);
  EXPECT_EQ(streamed, Rows(r));
}

TEST(SimulationTest, StationarityUsesFullBatchGradientsOfEveryClient) {
  RunConfig cfg = SmallSyntheticConfig();
  Environment env = PrepareEnvironment(cfg);
  env.workload.beta = cfg.beta;
  env.workload.gamma = cfg.gamma;
  Engine engine(3);
  std::vector<ClientState> clients;
  for (int i = 0; i < cfg.clients; ++i) {
    ClientState c = InitialClientState(i, env.workload.dim());
    c.x = testing::RandomVector(env.workload.dim(), 0.3, engine);
    c.lambda = testing::RandomVector(env.workload.dim(), 0.3, engine);
    clients.push_back(c);
  }
  const ModelVector x0 = testing::RandomVector(env.workload.dim(), 0.3, engine);
  const double p = EvaluateP(clients, x0, env, cfg.gamma, cfg.rho, Execution::kOpenMP);
  EXPECT_EQ(p, EvaluateP(clients, x0, env, cfg.gamma, cfg.rho, Execution::kSerial));

  std::vector<ModelVector> xs, lambdas, grads;
  for (const auto& c : clients) {
    xs.push_back(c.x);
    lambdas.push_back(c.lambda);
    grads.push_back(LocalGradient(c.x, env.data.train,
                                  env.shards[static_cast<std::size_t>(c.id)].rows,
                                  env.workload, kNoClip));
  }
  EXPECT_EQ(p, StationarityP(xs, x0, lambdas, grads, cfg.gamma, cfg.rho));
}

TEST(SimulationTest, RunningAveragePShrinksWithHorizon) {
  RunConfig cfg = DefaultConfig(DatasetKind::kSynthetic);
  const Environment env = PrepareEnvironment(cfg);
  double last = std::numeric_limits<double>::infinity();
  for (int rounds : {50, 100, 200}) {
    cfg.rounds = rounds;
    const RunResult r = RunSimulation(cfg, env);
    double sum = 0.0;
    for (const auto& rec : r.records) sum += rec.p_measure;
    const double avg = sum / static_cast<double>(r.records.size());
    EXPECT_LT(avg, last) << rounds;
    last = avg;
  }
}

TEST(SimulationTest, ShardCountMustMatchClients) {
  RunConfig cfg = SmallSyntheticConfig();
  Environment env = PrepareEnvironment(cfg);
  env.shards.pop_back();
  EXPECT_ANY_THROW(RunSimulation(cfg, env));
}

TEST(SimulationTest, MissingDatasetIsIoError) {
  RunConfig cfg = DefaultConfig(DatasetKind::kMnist);
  cfg.data_dir = "/nonexistent/fedpdm";
  if (std::getenv("FEDPDM_DATA_DIR") != nullptr) GTEST_SKIP();
  EXPECT_EQ(KindOf([&] { PrepareEnvironment(cfg); }), ErrorKind::kIo);
}

}  // namespace
}  // namespace fedpdm
