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


#include "fedpdm/sparsify.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.h"

namespace fedpdm {
namespace {

using testing::KindOf;
using testing::RandomVector;

SparsePayload Payload(std::uint32_t dim, std::vector<std::uint32_t> idx,
                      std::vector<double> vals) {
  SparsePayload p;
  p.dim = dim;
  p.indices = std::move(idx);
  p.values = std::move(vals);
  return p;
}

TEST(TopKTest, HandExample) {
  const std::vector<double> y{0.1, -3.0, 2.0, 0.5};
  const SparsePayload p = TopK(y, 2);
  EXPECT_EQ(p.dim, 4u);
  EXPECT_EQ(p.indices, (std::vector<std::uint32_t>{1, 2}));
  EXPECT_EQ(p.values, (std::vector<double>{-3.0, 2.0}));
}

TEST(TopKTest, FullSelectionKeepsEverything) {
  Engine engine(1);
  const ModelVector y = RandomVector(13, 1.0, engine);
  EXPECT_EQ(Densify(TopK(y, 13)), y);
}

TEST(TopKTest, TiesBreakToLowestIndex) {
  const std::vector<double> y{1.0, -1.0, 1.0, -1.0, 1.0};
  EXPECT_EQ(TopK(y, 2).indices, (std::vector<std::uint32_t>{0, 1}));
  const std::vector<double> partial{0.5, 2.0, -2.0, 2.0};
  EXPECT_EQ(TopK(partial, 2).indices, (std::vector<std::uint32_t>{1, 2}));
}

TEST(TopKTest, KOutOfRangeRejected) {
  const std::vector<double> y{1.0, 2.0};
  EXPECT_EQ(KindOf([&] { TopK(y, 0); }), ErrorKind::kInvalidInput);
  EXPECT_EQ(KindOf([&] { TopK(y, 3); }), ErrorKind::kInvalidInput);
}

double ResidualNorm(const ModelVector& y, const std::vector<std::uint32_t>& support) {
  double r = 0.0;
  std::vector<bool> kept(y.size(), false);
  for (auto i : support) kept[i] = true;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!kept[i]) r += y[i] * y[i];
  }
  return r;
}

// Every k-subset of [0, d) is tried; top-k must leave the smallest residual.
TEST(TopKTest, OptimalAgainstEverySupport) {
  Engine engine(2);
  for (std::size_t d = 1; d <= 8; ++d) {
    for (int trial = 0; trial < 5; ++trial) {
      const ModelVector y = RandomVector(d, 1.0, engine);
      for (std::size_t k = 1; k <= d; ++k) {
        const double best = ResidualNorm(y, TopK(y, k).indices);
        for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
          if (static_cast<std::size_t>(std::popcount(mask)) != k) continue;
          std::vector<std::uint32_t> support;
          for (std::uint32_t i = 0; i < d; ++i) {
            if (mask & (1u << i)) support.push_back(i);
          }
          EXPECT_LE(best, ResidualNorm(y, support));
        }
      }
    }
  }
}

TEST(RandKTest, FullSelectionKeepsEverything) {
  Engine engine(3);
  const ModelVector y = RandomVector(9, 1.0, engine);
  Engine pick(4);
  const SparsePayload p = RandK(y, 9, pick);
  EXPECT_EQ(p.values, y);
}

TEST(RandKTest, FixedSeedReproduces) {
  Engine engine(5);
  const ModelVector y = RandomVector(50, 1.0, engine);
  Engine a = MakeEngine(9, Stream::kRandK, 1, 2);
  Engine b = MakeEngine(9, Stream::kRandK, 1, 2);
  EXPECT_EQ(RandK(y, 7, a), RandK(y, 7, b));
}

TEST(RandKTest, IndicesUniform) {
  const std::size_t d = 10;
  const std::size_t k = 3;
  const ModelVector y(d, 1.0);
  Engine pick(6);
  std::vector<int> hits(d, 0);
  const int draws = 60000;
  for (int i = 0; i < draws; ++i) {
    const SparsePayload p = RandK(y, k, pick);
    ASSERT_EQ(p.k(), k);
    ASSERT_TRUE(std::is_sorted(p.indices.begin(), p.indices.end()));
    for (auto j : p.indices) ++hits[j];
  }
  for (std::size_t j = 0; j < d; ++j) {
    EXPECT_NEAR(hits[j] / static_cast<double>(draws), 0.3, 0.01) << j;
  }
}

TEST(DensifyTest, HandExample) {
  EXPECT_EQ(Densify(Payload(4, {0, 2}, {5.0, -1.0})),
            (ModelVector{5.0, 0.0, -1.0, 0.0}));
}

TEST(DensifyTest, CorruptPayloadsRejected) {
  EXPECT_EQ(KindOf([] { Densify(Payload(4, {0, 4}, {1.0, 2.0})); }),
            ErrorKind::kCorruptData);
  EXPECT_EQ(KindOf([] { Densify(Payload(4, {2, 1}, {1.0, 2.0})); }),
            ErrorKind::kCorruptData);
  EXPECT_EQ(KindOf([] { Densify(Payload(4, {1, 1}, {1.0, 2.0})); }),
            ErrorKind::kCorruptData);
  EXPECT_EQ(KindOf([] { Densify(Payload(4, {1}, {1.0, 2.0})); }),
            ErrorKind::kCorruptData);
}

TEST(AggregationWeightsTest, HandExample) {
  const std::vector<SparsePayload> ps{Payload(3, {0, 2}, {1, 1}),
                                      Payload(3, {0}, {1})};
  EXPECT_EQ(AggregationWeights(ps, 3), (std::vector<double>{2, 1, 1}));
}

TEST(AggregationWeightsTest, FullPayloadsGiveCount) {
  Engine engine(7);
  std::vector<SparsePayload> ps;
  for (int c = 0; c < 5; ++c) ps.push_back(TopK(RandomVector(6, 1.0, engine), 6));
  EXPECT_EQ(AggregationWeights(ps, 6), std::vector<double>(6, 5.0));
}

TEST(AggregationWeightsTest, NoPayloadsGiveOnes) {
  EXPECT_EQ(AggregationWeights({}, 4), std::vector<double>(4, 1.0));
}

TEST(AggregationWeightsTest, BoundedByOneAndCount) {
  Engine engine(8);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<SparsePayload> ps;
    const int count = 1 + trial % 7;
    for (int c = 0; c < count; ++c) {
      Engine pick(static_cast<std::uint64_t>(trial * 100 + c));
      ps.push_back(RandK(RandomVector(20, 1.0, engine), 1 + (trial + c) % 20, pick));
    }
    for (double w : AggregationWeights(ps, 20)) {
      EXPECT_GE(w, 1.0);
      EXPECT_LE(w, count);
    }
  }
}

TEST(SparseAggregateTest, AveragesOverContributors) {
  const std::vector<SparsePayload> ps{Payload(3, {0, 1}, {4.0, 9.0}),
                                      Payload(3, {0}, {2.0})};
  EXPECT_EQ(SparseAggregate(ps, 3), (ModelVector{3.0, 9.0, 0.0}));
}

TEST(SparseAggregateTest, SinglePayloadIsItsDensification) {
  Engine engine(9);
  const SparsePayload p = TopK(RandomVector(12, 1.0, engine), 5);
  const std::vector<SparsePayload> ps{p};
  EXPECT_EQ(SparseAggregate(ps, 12), Densify(p));
}

TEST(SparseAggregateTest, FullPayloadsEqualDenseMean) {
  Engine engine(10);
  std::uniform_int_distribution<int> size(1, 40);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto d = static_cast<std::size_t>(size(engine));
    const int count = size(engine);
    std::vector<SparsePayload> ps;
    std::vector<ModelVector> dense;
    for (int c = 0; c < count; ++c) {
      dense.push_back(RandomVector(d, 2.0, engine));
      ps.push_back(TopK(dense.back(), d));
    }
    const ModelVector agg = SparseAggregate(ps, d);
    for (std::size_t i = 0; i < d; ++i) {
      double mean = 0.0;
      for (const auto& v : dense) mean += v[i];
      mean /= count;
      EXPECT_NEAR(agg[i], mean, 1e-12 * std::max(1.0, std::abs(mean)));
    }
  }
}

TEST(KeepCountTest, RoundsAndClamps) {
  EXPECT_EQ(KeepCount(1.0, 7850), 7850u);
  EXPECT_EQ(KeepCount(0.1, 7850), 785u);
  EXPECT_EQ(KeepCount(0.5, 42), 21u);
  EXPECT_EQ(KeepCount(1e-6, 10), 1u);
  EXPECT_EQ(KindOf([] { KeepCount(0.0, 10); }), ErrorKind::kInvalidInput);
  EXPECT_EQ(KindOf([] { KeepCount(1.5, 10); }), ErrorKind::kInvalidInput);
}

TEST(PayloadCodecTest, RoundTripIsBitExactForWireValues) {
  Engine engine(11);
  for (int trial = 0; trial < 200; ++trial) {
    ModelVector y = RandomVector(30, 3.0, engine);
    // The wire carries 32-bit values; start from values it can hold.
    for (double& v : y) v = static_cast<float>(v);
    const SparsePayload p = TopK(y, 1 + trial % 30);
    const auto bytes = EncodePayload(p);
    EXPECT_EQ(bytes.size(), 8 + 8 * p.k());
    const SparsePayload back = DecodePayload(bytes);
    EXPECT_EQ(back, p);
    const ModelVector a = Densify(back);
    const ModelVector b = Densify(p);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(std::bit_cast<std::uint64_t>(a[i]), std::bit_cast<std::uint64_t>(b[i]));
    }
  }
}

TEST(PayloadCodecTest, EncodingIsCanonical) {
  const SparsePayload p = Payload(5, {1, 3}, {0.5, -2.0});
  EXPECT_EQ(EncodePayload(p), EncodePayload(DecodePayload(EncodePayload(p))));
}

TEST(PayloadCodecTest, TruncatedOrCorruptBytesRejected) {
  auto bytes = EncodePayload(Payload(5, {1, 3}, {0.5, -2.0}));
  const auto full = bytes;
  bytes.pop_back();
  EXPECT_EQ(KindOf([&] { DecodePayload(bytes); }), ErrorKind::kCorruptData);
  EXPECT_EQ(KindOf([&] { DecodePayload(std::vector<std::uint8_t>(3)); }),
            ErrorKind::kCorruptData);
  bytes = full;
  bytes[8] = 9;  // first index becomes 9 >= d
  EXPECT_EQ(KindOf([&] { DecodePayload(bytes); }), ErrorKind::kCorruptData);
}

}  // namespace
}  // namespace fedpdm
