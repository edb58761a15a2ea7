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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "fedpdm/data.h"
#include "fedpdm/errors.h"
#include "fedpdm/rng.h"

namespace fedpdm {
namespace {

Dataset DrawSplit(const std::vector<std::vector<double>>& means,
                  std::size_t count, std::size_t n, double scale,
                  std::size_t zero_features, Engine& engine) {
  const std::size_t m = means.size();
  Dataset out(n, m);
  out.Reserve(count);
  std::vector<int> labels(count);
  for (std::size_t i = 0; i < count; ++i) labels[i] = static_cast<int>(i % m);
  std::shuffle(labels.begin(), labels.end(), engine);

  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<double> features(n, 1.0);
  for (int label : labels) {
    const auto& mu = means[static_cast<std::size_t>(label)];
    const std::size_t drawn = n - 1 - zero_features;
    for (std::size_t f = 0; f < drawn; ++f) {
      features[f] = scale * (mu[f] + unit(engine));
    }
    for (std::size_t f = drawn; f + 1 < n; ++f) features[f] = 0.0;
    out.Add(features, label);
  }
  return out;
}

}  // namespace

TrainTest GenerateSynthetic(const SyntheticSpec& spec) {
  if (spec.num_classes < 2) throw InvalidInput("synthetic data needs m >= 2");
  if (spec.num_features < 2) {
    throw InvalidInput("synthetic data needs n >= 2 (one feature plus bias)");
  }
  const std::size_t m = spec.num_classes;
  const std::size_t dims = spec.num_features - 1;
  if (spec.informative + spec.zero_features > dims) {
    throw InvalidInput("informative plus zero features exceed the feature count");
  }
  const std::size_t live =
      spec.informative == 0 ? dims - spec.zero_features : spec.informative;
  if (live == 0) throw InvalidInput("synthetic data needs a non-zero feature");

  // Means are +-1 sign patterns on the informative dimensions, so every
  // informative feature is equally useful. Two classes get antipodal
  // patterns; more classes get independent ones. The patterns are centred
  // and scaled so the mean pairwise distance equals `separation`.
  Engine means_engine = MakeEngine(spec.seed, Stream::kSynthetic, 0);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::vector<double>> means(m, std::vector<double>(dims, 0.0));
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t f = 0; f < live; ++f) {
      means[k][f] = (m == 2 && k == 1) ? -means[0][f]
                                       : (coin(means_engine) ? 1.0 : -1.0);
    }
  }
  for (std::size_t f = 0; f < live; ++f) {
    double centre = 0.0;
    for (const auto& mu : means) centre += mu[f];
    centre /= static_cast<double>(m);
    for (auto& mu : means) mu[f] -= centre;
  }
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = j + 1; k < m; ++k) {
      double d2 = 0.0;
      for (std::size_t f = 0; f < live; ++f) {
        d2 += (means[j][f] - means[k][f]) * (means[j][f] - means[k][f]);
      }
      total += std::sqrt(d2);
    }
  }
  const double mean_distance = total / static_cast<double>(m * (m - 1) / 2);
  if (mean_distance == 0.0) {
    throw InvalidInput("synthetic class means coincide; add informative dims");
  }
  for (auto& mu : means) {
    for (double& v : mu) v *= spec.separation / mean_distance;
  }

  Engine train_engine = MakeEngine(spec.seed, Stream::kSynthetic, 1);
  Engine test_engine = MakeEngine(spec.seed, Stream::kSynthetic, 2);
  return {DrawSplit(means, spec.train_size, spec.num_features, spec.scale,
                    spec.zero_features, train_engine),
          DrawSplit(means, spec.test_size, spec.num_features, spec.scale,
                    spec.zero_features, test_engine)};
}

TrainTest GenerateSynthetic(std::size_t m, std::size_t n,
                            std::size_t n_samples, double separation,
                            std::uint64_t seed) {
  return GenerateSynthetic(
      SyntheticSpec{m, n, n_samples, n_samples / 5, separation, seed});
}

void WriteDatasetCsv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << "label";
  for (std::size_t f = 0; f < data.num_features(); ++f) out << ",f" << f;
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.label(i);
    for (double v : data.row(i)) out << ',' << fmt::format("{:.17g}", v);
    out << '\n';
  }
}

}  // namespace fedpdm
