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

#ifndef FEDPDM_DATASET_H_
#define FEDPDM_DATASET_H_

#include <cstddef>
#include <span>
#include <vector>

namespace fedpdm {

// Non-owning view of one labelled example.
struct Sample {
  std::span<const double> features;
  int label = 0;
};

// Row-major feature table. The last feature is the constant-1 bias for every
// loader in this project.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t num_features, std::size_t num_classes)
      : num_features_(num_features), num_classes_(num_classes) {}

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }
  std::size_t num_features() const { return num_features_; }
  std::size_t num_classes() const { return num_classes_; }

  Sample operator[](std::size_t i) const {
    return {row(i), labels_[i]};
  }
  std::span<const double> row(std::size_t i) const {
    return {features_.data() + i * num_features_, num_features_};
  }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<double>& features() const { return features_; }

  // Throws InvalidInput when the row length or label is out of shape.
  void Add(std::span<const double> features, int label);
  void Reserve(std::size_t rows);

  // Empirical frequency of each class; empty dataset gives all zeros.
  std::vector<double> ClassFrequencies() const;

 private:
  std::size_t num_features_ = 0;
  std::size_t num_classes_ = 0;
  std::vector<double> features_;
  std::vector<int> labels_;
};

struct TrainTest {
  Dataset train;
  Dataset test;
};

}  // namespace fedpdm

#endif  // FEDPDM_DATASET_H_
