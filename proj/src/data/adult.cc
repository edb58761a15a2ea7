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
#include <array>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fedpdm/data.h"
#include "fedpdm/errors.h"

namespace fedpdm {
namespace {

struct CategoricalColumn {
  std::size_t column;  // position in the raw CSV row
  std::vector<std::string_view> values;
  bool has_other = false;  // unlisted values map to the last slot
};

// Encoding table, version 1. Column order follows the UCI file.
const std::vector<CategoricalColumn>& CategoricalTable() {
  static const std::vector<CategoricalColumn> table = {
      {1,
       {"Private", "Self-emp-not-inc", "Self-emp-inc", "Federal-gov",
        "Local-gov", "State-gov", "Without-pay", "Never-worked"}},
      {3,
       {"Bachelors", "Some-college", "11th", "HS-grad", "Prof-school",
        "Assoc-acdm", "Assoc-voc", "9th", "7th-8th", "12th", "Masters",
        "1st-4th", "10th", "Doctorate", "5th-6th", "Preschool"}},
      {5,
       {"Married-civ-spouse", "Divorced", "Never-married", "Separated",
        "Widowed", "Married-spouse-absent", "Married-AF-spouse"}},
      {6,
       {"Tech-support", "Craft-repair", "Other-service", "Sales",
        "Exec-managerial", "Prof-specialty", "Handlers-cleaners",
        "Machine-op-inspct", "Adm-clerical", "Farming-fishing",
        "Transport-moving", "Priv-house-serv", "Protective-serv",
        "Armed-Forces"}},
      {7,
       {"Wife", "Own-child", "Husband", "Not-in-family", "Other-relative",
        "Unmarried"}},
      {8,
       {"White", "Asian-Pac-Islander", "Amer-Indian-Eskimo", "Other",
        "Black"}},
      {9, {"Female", "Male"}},
      {13,
       {"United-States", "Mexico", "Philippines", "Germany", "Canada",
        "Puerto-Rico", "El-Salvador", "India", "Cuba", "England", "Jamaica",
        "South", "China", "Italy", "Dominican-Republic", "other"},
       true},
  };
  return table;
}

constexpr std::array<std::size_t, 6> kContinuousColumns = {0, 2, 4, 10, 11,
                                                           12};
constexpr std::size_t kRawColumns = 15;

struct RawRow {
  std::array<double, 6> continuous{};
  std::vector<double> one_hot;
  int label = 0;
};

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitCsv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> ParseDouble(std::string_view s) {
  try {
    std::size_t used = 0;
    const std::string str(s);
    const double v = std::stod(str, &used);
    if (used != str.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

enum class RowStatus { kOk, kMissing, kMalformed, kSkip };

RowStatus ParseRow(std::string_view line, MissingPolicy missing, RawRow& row) {
  line = Trim(line);
  if (line.empty() || line.front() == '|') return RowStatus::kSkip;
  const auto fields = SplitCsv(line);
  if (fields.size() != kRawColumns) return RowStatus::kMalformed;

  bool has_missing = false;
  for (auto f : fields) has_missing |= (f == "?");
  if (has_missing && missing == MissingPolicy::kDrop) return RowStatus::kMissing;

  for (std::size_t c = 0; c < kContinuousColumns.size(); ++c) {
    const auto v = ParseDouble(fields[kContinuousColumns[c]]);
    if (!v) return RowStatus::kMalformed;
    row.continuous[c] = *v;
  }

  row.one_hot.clear();
  for (const auto& col : CategoricalTable()) {
    const std::size_t base = row.one_hot.size();
    row.one_hot.resize(base + col.values.size(), 0.0);
    const auto value = fields[col.column];
    if (value == "?") continue;  // zero-filled block
    auto it = std::find(col.values.begin(), col.values.end(), value);
    if (it == col.values.end()) {
      if (!col.has_other) return RowStatus::kMalformed;
      it = col.values.end() - 1;
    }
    row.one_hot[base + static_cast<std::size_t>(it - col.values.begin())] = 1.0;
  }

  std::string_view income = fields[14];
  if (!income.empty() && income.back() == '.') income.remove_suffix(1);
  if (income == ">50K") {
    row.label = 1;
  } else if (income == "<=50K") {
    row.label = 0;
  } else {
    return RowStatus::kMalformed;
  }
  return has_missing ? RowStatus::kMissing : RowStatus::kOk;
}

struct FileRows {
  std::vector<RawRow> rows;
  std::size_t raw = 0;
  std::size_t missing = 0;
  std::size_t malformed = 0;
};

FileRows ReadAdultFile(const std::filesystem::path& path,
                       MissingPolicy missing) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  FileRows out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    RawRow row;
    const RowStatus status = ParseRow(line, missing, row);
    if (status == RowStatus::kSkip) continue;
    ++out.raw;
    switch (status) {
      case RowStatus::kMalformed:
        ++out.malformed;
        spdlog::warn("{}:{}: malformed row skipped", path.string(), line_no);
        break;
      case RowStatus::kMissing:
        ++out.missing;
        if (missing == MissingPolicy::kZeroFill) out.rows.push_back(std::move(row));
        break;
      default:
        out.rows.push_back(std::move(row));
    }
  }
  return out;
}

Dataset Encode(const std::vector<RawRow>& rows, const std::array<double, 6>& lo,
               const std::array<double, 6>& hi) {
  Dataset out(kAdultFeatures, 2);
  out.Reserve(rows.size());
  std::vector<double> features(kAdultFeatures);
  for (const auto& r : rows) {
    std::size_t f = 0;
    for (std::size_t c = 0; c < 6; ++c) {
      const double span = hi[c] - lo[c];
      const double v = span > 0.0 ? (r.continuous[c] - lo[c]) / span : 0.0;
      features[f++] = std::clamp(v, 0.0, 1.0);
    }
    for (double v : r.one_hot) features[f++] = v;
    features[f++] = 1.0;
    if (f != kAdultFeatures) throw CorruptData("adult encoding width mismatch");
    out.Add(features, r.label);
  }
  return out;
}

}  // namespace

AdultData LoadAdult(const std::filesystem::path& dir, MissingPolicy missing) {
  const auto train = ReadAdultFile(dir / "adult.data", missing);
  const auto test = ReadAdultFile(dir / "adult.test", missing);
  if (train.rows.empty()) throw CorruptData("adult.data has no usable rows");

  std::array<double, 6> lo{}, hi{};
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  for (const auto& r : train.rows) {
    for (std::size_t c = 0; c < 6; ++c) {
      lo[c] = std::min(lo[c], r.continuous[c]);
      hi[c] = std::max(hi[c], r.continuous[c]);
    }
  }

  AdultData out;
  out.sets.train = Encode(train.rows, lo, hi);
  out.sets.test = Encode(test.rows, lo, hi);
  out.report = {train.raw, test.raw, train.missing, test.missing,
                train.malformed + test.malformed};
  spdlog::info(
      "adult: {} train rows ({} with missing values, {}), {} test rows ({} "
      "with missing values), {} malformed skipped",
      train.raw, train.missing,
      missing == MissingPolicy::kDrop ? "dropped" : "zero-filled", test.raw,
      test.missing, out.report.malformed_rows);
  return out;
}

}  // namespace fedpdm
