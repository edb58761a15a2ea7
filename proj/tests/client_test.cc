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


#include "fedpdm/client.h"

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"

namespace fedpdm {
namespace {

using testing::KindOf;
using testing::RandomDataset;
using testing::RandomVector;

Shard WholeShard(const Dataset& data, int owner = 0) {
  Shard s;
  s.owner = owner;
  s.rows.resize(data.size());
  std::iota(s.rows.begin(), s.rows.end(), 0);
  return s;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(LocalRoundTest, InfiniteToleranceStopsAfterOneStep) {
  Engine engine(1);
  const Dataset data = RandomDataset(2, 3, 5, engine);
  const WorkloadParams w{2, 3, 0.5, 0.0};
  LocalRunConfig cfg;
  cfg.nu = kInf;
  cfg.batch_size = 5;  // whole shard: the batch is every row, in order
  cfg.rho = 3.0;
  cfg.eta = 0.1;
  cfg.clip_bound = 100.0;
  ClientState state = InitialClientState(0, w.dim());
  state.lambda = RandomVector(w.dim(), 0.3, engine);
  const ModelVector x0 = RandomVector(w.dim(), 1.0, engine);
  const Shard shard = WholeShard(data);

  const ModelVector g = LocalGradient(x0, data, shard.rows, w, cfg.clip_bound);
  ClientState before = state;
  const LocalRoundResult r = LocalRound(state, x0, cfg, w, data, shard, 7, 0);
  EXPECT_EQ(r.q_used, 1);
  EXPECT_FALSE(r.hit_cap);
  for (std::size_t i = 0; i < w.dim(); ++i) {
    // x starts at x0, so the proximity term vanishes on the first step.
    EXPECT_EQ(state.x[i], x0[i] - cfg.eta * (g[i] - before.lambda[i]));
  }
}

TEST(LocalRoundTest, OneStepFromZeroDoublesPrimal) {
  Engine engine(2);
  const Dataset data = RandomDataset(3, 4, 10, engine);
  const WorkloadParams w{3, 4, 0.0, 0.0};
  LocalRunConfig cfg;
  cfg.rho = 1.0;
  cfg.nu = kInf;
  ClientState state = InitialClientState(3, w.dim());
  const ModelVector x0(w.dim(), 0.0);
  const LocalRoundResult r =
      LocalRound(state, x0, cfg, w, data, WholeShard(data, 3), 1, 4);
  for (std::size_t i = 0; i < w.dim(); ++i) {
    EXPECT_DOUBLE_EQ(r.y[i], 2.0 * state.x[i]);
  }
}

TEST(LocalRoundTest, DualAndUploadIdentitiesHoldExactly) {
  Engine engine(3);
  const Dataset data = RandomDataset(2, 5, 40, engine);
  const WorkloadParams w{2, 5, 0.5, 0.5};
  LocalRunConfig cfg;
  cfg.q_max = 7;
  ClientState state = InitialClientState(1, w.dim());
  const Shard shard = WholeShard(data, 1);
  for (int round = 0; round < 5; ++round) {
    const ModelVector x0 = RandomVector(w.dim(), 0.5, engine);
    const ModelVector lambda_old = state.lambda;
    const LocalRoundResult r = LocalRound(state, x0, cfg, w, data, shard, 9, round);
    for (std::size_t i = 0; i < w.dim(); ++i) {
      EXPECT_EQ(state.lambda[i], lambda_old[i] + cfg.rho * (x0[i] - state.x[i]));
      EXPECT_EQ(r.y[i], state.x[i] - state.lambda[i] / cfg.rho);
    }
  }
}

TEST(LocalRoundTest, IterationCountCappedAndDeterministic) {
  Engine engine(4);
  const Dataset data = RandomDataset(2, 4, 30, engine);
  const WorkloadParams w{2, 4, 0.5, 0.5};
  LocalRunConfig cfg;
  cfg.q_max = 6;
  cfg.nu = 1e-12;  // never met: every round runs to the cap
  const Shard shard = WholeShard(data);
  const ModelVector x0 = RandomVector(w.dim(), 0.5, engine);

  ClientState a = InitialClientState(0, w.dim());
  ClientState b = InitialClientState(0, w.dim());
  const LocalRoundResult ra = LocalRound(a, x0, cfg, w, data, shard, 5, 2);
  const LocalRoundResult rb = LocalRound(b, x0, cfg, w, data, shard, 5, 2);
  EXPECT_EQ(ra.q_used, 6);
  EXPECT_TRUE(ra.hit_cap);
  EXPECT_EQ(ra.y, rb.y);
  EXPECT_EQ(a.x, b.x);

  // A different round draws different batches.
  ClientState c = InitialClientState(0, w.dim());
  EXPECT_NE(LocalRound(c, x0, cfg, w, data, shard, 5, 3).y, ra.y);

  Engine sizes(5);
  std::uniform_real_distribution<double> nu(1e-4, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    cfg.nu = nu(sizes);
    ClientState s = InitialClientState(0, w.dim());
    const LocalRoundResult r = LocalRound(s, x0, cfg, w, data, shard, 5, trial);
    EXPECT_GE(r.q_used, 1);
    EXPECT_LE(r.q_used, cfg.q_max);
  }
}

TEST(LocalRoundTest, ShardSmallerThanBatchIsConfigError) {
  Engine engine(6);
  const Dataset data = RandomDataset(2, 3, 4, engine);
  const WorkloadParams w{2, 3, 0.0, 0.0};
  LocalRunConfig cfg;
  cfg.batch_size = 5;
  ClientState state = InitialClientState(0, w.dim());
  EXPECT_EQ(KindOf([&] {
              LocalRound(state, ModelVector(6), cfg, w, data, WholeShard(data),
                         1, 0);
            }),
            ErrorKind::kConfig);
}

TEST(LocalRoundTest, WrongLengthsRejected) {
  Engine engine(7);
  const Dataset data = RandomDataset(2, 3, 20, engine);
  const WorkloadParams w{2, 3, 0.0, 0.0};
  LocalRunConfig cfg;
  ClientState state = InitialClientState(0, w.dim());
  EXPECT_EQ(KindOf([&] {
              LocalRound(state, ModelVector(5), cfg, w, data, WholeShard(data),
                         1, 0);
            }),
            ErrorKind::kInvalidInput);
}

TEST(LocalRunConfigTest, ValidateRejectsNonPositive) {
  LocalRunConfig cfg;
  cfg.q_max = 0;
  EXPECT_EQ(KindOf([&] { cfg.Validate(); }), ErrorKind::kConfig);
  cfg = LocalRunConfig{};
  cfg.eta = 0.0;
  EXPECT_EQ(KindOf([&] { cfg.Validate(); }), ErrorKind::kConfig);
}

TEST(PerturbUploadTest, ZeroSigmaIsBitIdentical) {
  Engine engine(8);
  const ModelVector y = RandomVector(100, 1.0, engine);
  Engine noise(9);
  EXPECT_EQ(PerturbUpload(y, 0.0, noise), y);
}

TEST(PerturbUploadTest, FixedSeedReproduces) {
  Engine engine(10);
  const ModelVector y = RandomVector(64, 1.0, engine);
  Engine n1 = MakeEngine(42, Stream::kNoise, 3, 7);
  Engine n2 = MakeEngine(42, Stream::kNoise, 3, 7);
  const ModelVector a = PerturbUpload(y, 0.8, n1);
  EXPECT_EQ(a, PerturbUpload(y, 0.8, n2));
  EXPECT_NE(a, y);
}

TEST(PerturbUploadTest, NegativeSigmaRejected) {
  Engine noise(1);
  EXPECT_EQ(KindOf([&] { PerturbUpload(ModelVector(3), -1.0, noise); }),
            ErrorKind::kInvalidInput);
}

TEST(PerturbUploadTest, EmpiricalMomentsMatch) {
  const double sigma = 0.37;
  const ModelVector y(200000, 1.5);
  Engine noise(11);
  const ModelVector out = PerturbUpload(y, sigma, noise);
  double mean = 0.0;
  for (double v : out) mean += v - 1.5;
  mean /= static_cast<double>(out.size());
  double var = 0.0;
  for (double v : out) var += (v - 1.5 - mean) * (v - 1.5 - mean);
  var /= static_cast<double>(out.size() - 1);
  EXPECT_NEAR(mean, 0.0, 5 * sigma / std::sqrt(200000.0));
  EXPECT_NEAR(std::sqrt(var), sigma, 0.01 * sigma);
}

}  // namespace
}  // namespace fedpdm
