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

#include "fedpdm/dataset.h"

#include <fmt/format.h>

#include "fedpdm/errors.h"

namespace fedpdm {

void Dataset::Add(std::span<const double> features, int label) {
  if (features.size() != num_features_) {
    throw InvalidInput(fmt::format("sample has {} features, dataset expects {}",
                                   features.size(), num_features_));
  }
  if (label < 0 || static_cast<std::size_t>(label) >= num_classes_) {
    throw InvalidInput(fmt::format("label {} outside [0, {})", label,
                                   num_classes_));
  }
  features_.insert(features_.end(), features.begin(), features.end());
  labels_.push_back(label);
}

void Dataset::Reserve(std::size_t rows) {
  features_.reserve(rows * num_features_);
  labels_.reserve(rows);
}

std::vector<double> Dataset::ClassFrequencies() const {
  std::vector<double> freq(num_classes_, 0.0);
  if (labels_.empty()) return freq;
  for (int l : labels_) freq[static_cast<std::size_t>(l)] += 1.0;
  for (double& f : freq) f /= static_cast<double>(labels_.size());
  return freq;
}

}  // namespace fedpdm
