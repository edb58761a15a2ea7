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

#include "fedpdm/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <toml.hpp>

#include "fedpdm/errors.h"
#include "fedpdm/privacy.h"

namespace fedpdm {
namespace {

template <class T>
T ParseNumber(const std::string& key, const std::string& text) {
  T value{};
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(fmt::format("{}: cannot parse '{}'", key, text));
  }
  return value;
}

double ParseReal(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("{}: cannot parse '{}' as a number", key, text));
}

bool ParseBool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  throw ConfigError(fmt::format("{}: expected true/false, got '{}'", key, text));
}

std::string Real(double v) { return fmt::format("{}", v); }

enum class Kind { kNumber, kString, kBool };

struct Field {
  std::string key;
  Kind kind;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define FEDPDM_REAL(KEY, MEMBER)                                            \
  Field {                                                                   \
    KEY, Kind::kNumber,                                                     \
        [](RunConfig& c, const std::string& v) { c.MEMBER = ParseReal(KEY, v); }, \
        [](const RunConfig& c) { return Real(c.MEMBER); }                   \
  }
#define FEDPDM_INT(KEY, MEMBER)                                             \
  Field {                                                                   \
    KEY, Kind::kNumber,                                                     \
        [](RunConfig& c, const std::string& v) {                            \
          c.MEMBER = ParseNumber<decltype(c.MEMBER)>(KEY, v);               \
        },                                                                  \
        [](const RunConfig& c) { return std::to_string(c.MEMBER); }         \
  }
#define FEDPDM_BOOL(KEY, MEMBER)                                            \
  Field {                                                                   \
    KEY, Kind::kBool,                                                       \
        [](RunConfig& c, const std::string& v) { c.MEMBER = ParseBool(KEY, v); }, \
        [](const RunConfig& c) { return std::string(c.MEMBER ? "true" : "false"); } \
  }

Sparsifier ParseSparsifier(const std::string& v) {
  if (v == "top") return Sparsifier::kTopK;
  if (v == "rand") return Sparsifier::kRandK;
  throw ConfigError(fmt::format("unknown sparsifier '{}' (top|rand)", v));
}

Algorithm ParseAlgorithm(const std::string& v) {
  if (v == "dp-fedpdm") return Algorithm::kDpFedPdm;
  if (v == "bsdp-fedpdm") return Algorithm::kBsdpFedPdm;
  throw ConfigError(
      fmt::format("unknown algorithm '{}' (dp-fedpdm|bsdp-fedpdm)", v));
}

MissingPolicy ParseMissing(const std::string& v) {
  if (v == "drop") return MissingPolicy::kDrop;
  if (v == "zero-fill") return MissingPolicy::kZeroFill;
  throw ConfigError(fmt::format("unknown missing-value policy '{}'", v));
}

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      {"algorithm", Kind::kString,
       [](RunConfig& c, const std::string& v) { c.algorithm = ParseAlgorithm(v); },
       [](const RunConfig& c) { return AlgorithmName(c.algorithm); }},
      {"dataset", Kind::kString,
       [](RunConfig& c, const std::string& v) { c.dataset = ParseDataset(v); },
       [](const RunConfig& c) { return DatasetName(c.dataset); }},
      FEDPDM_INT("seed", seed),
      FEDPDM_INT("rounds", rounds),
      FEDPDM_INT("clients", clients),
      FEDPDM_INT("clients_per_round", clients_per_round),
      FEDPDM_INT("batch_size", batch_size),
      FEDPDM_REAL("rho", rho),
      FEDPDM_REAL("nu", nu),
      FEDPDM_REAL("beta", beta),
      FEDPDM_REAL("gamma", gamma),
      FEDPDM_INT("q_max", q_max),
      FEDPDM_REAL("clip_bound", clip_bound),
      FEDPDM_REAL("eta0", eta0),
      FEDPDM_INT("eval_every", eval_every),
      {"execution", Kind::kString,
       [](RunConfig& c, const std::string& v) { c.execution = ParseExecution(v); },
       [](const RunConfig& c) {
         return std::string(c.execution == Execution::kSerial ? "serial" : "openmp");
       }},
      {"output_dir", Kind::kString,
       [](RunConfig& c, const std::string& v) { c.output_dir = v; },
       [](const RunConfig& c) { return c.output_dir; }},
      FEDPDM_REAL("sparsify.alpha_up", alpha_up),
      FEDPDM_REAL("sparsify.alpha_down", alpha_down),
      {"sparsify.method", Kind::kString,
       [](RunConfig& c, const std::string& v) { c.sparsifier = ParseSparsifier(v); },
       [](const RunConfig& c) {
         return std::string(c.sparsifier == Sparsifier::kTopK ? "top" : "rand");
       }},
      FEDPDM_BOOL("sparsify.count_index_bits", count_index_bits),
      FEDPDM_BOOL("privacy.enabled", privacy),
      FEDPDM_REAL("privacy.budget", budget),
      FEDPDM_REAL("privacy.delta", delta),
      FEDPDM_REAL("privacy.c0", c0),
      {"data.dir", Kind::kString,
       [](RunConfig& c, const std::string& v) { c.data_dir = v; },
       [](const RunConfig& c) { return c.data_dir; }},
      {"data.partition", Kind::kString,
       [](RunConfig& c, const std::string& v) { c.partition = ParsePartitionScheme(v); },
       [](const RunConfig& c) { return PartitionSchemeName(c.partition); }},
      FEDPDM_INT("data.labels_per_client", labels_per_client),
      FEDPDM_INT("data.per_client_size", per_client_size),
      {"data.adult_missing", Kind::kString,
       [](RunConfig& c, const std::string& v) { c.adult_missing = ParseMissing(v); },
       [](const RunConfig& c) {
         return std::string(c.adult_missing == MissingPolicy::kDrop ? "drop"
                                                                    : "zero-fill");
       }},
      FEDPDM_INT("synthetic.classes", synth_classes),
      FEDPDM_INT("synthetic.features", synth_features),
      FEDPDM_INT("synthetic.train_size", synth_train_size),
      FEDPDM_INT("synthetic.test_size", synth_test_size),
      FEDPDM_REAL("synthetic.separation", synth_separation),
      FEDPDM_INT("synthetic.seed", synth_seed),
      FEDPDM_INT("synthetic.informative", synth_informative),
      FEDPDM_REAL("synthetic.scale", synth_scale),
      FEDPDM_INT("synthetic.zero_features", synth_zero_features),
  };
  return fields;
}

#undef FEDPDM_REAL
#undef FEDPDM_INT
#undef FEDPDM_BOOL

const Field& FindField(const std::string& key) {
  for (const auto& f : Fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError(fmt::format("unknown config key '{}'", key));
}

void Flatten(const toml::table& table, const std::string& prefix,
             Overrides& out) {
  for (const auto& [k, node] : table) {
    const std::string key =
        prefix.empty() ? std::string(k.str()) : prefix + "." + std::string(k.str());
    if (const auto* sub = node.as_table()) {
      Flatten(*sub, key, out);
    } else if (const auto* s = node.as_string()) {
      out.emplace_back(key, s->get());
    } else if (const auto* i = node.as_integer()) {
      out.emplace_back(key, std::to_string(i->get()));
    } else if (const auto* f = node.as_floating_point()) {
      out.emplace_back(key, Real(f->get()));
    } else if (const auto* b = node.as_boolean()) {
      out.emplace_back(key, b->get() ? "true" : "false");
    } else {
      throw ConfigError(fmt::format("{}: unsupported TOML value type", key));
    }
  }
}

}  // namespace

double RunConfig::Eta(int round) const {
  return eta0 / std::sqrt(1.0 + static_cast<double>(round));
}

void RunConfig::Validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(rounds >= 1, "rounds must be >= 1");
  require(clients >= 1, "clients must be >= 1");
  require(clients_per_round >= 1 && clients_per_round <= clients,
          fmt::format("clients_per_round={} must lie in [1, clients={}]",
                      clients_per_round, clients));
  require(batch_size >= 1, "batch_size must be >= 1");
  require(rho > 0.0, "rho must be positive");
  require(nu > 0.0, "nu must be positive");
  require(beta >= 0.0 && gamma >= 0.0, "beta and gamma must be non-negative");
  require(q_max >= 1, "q_max must be >= 1");
  require(clip_bound > 0.0, "clip_bound must be positive");
  require(eta0 > 0.0, "eta0 must be positive");
  require(eval_every >= 1, "eval_every must be >= 1");
  require(alpha_up > 0.0 && alpha_up <= 1.0, "alpha_up must lie in (0, 1]");
  require(alpha_down > 0.0 && alpha_down <= 1.0,
          "alpha_down must lie in (0, 1]");
  require(per_client_size >= batch_size,
          "per_client_size must be at least batch_size");
  if (dataset == DatasetKind::kSynthetic) {
    require(synth_classes >= 2, "synthetic.classes must be >= 2");
    require(synth_features >= 2, "synthetic.features must be >= 2");
    require(synth_informative + synth_zero_features < synth_features,
            "synthetic.informative + synthetic.zero_features must be below "
            "synthetic.features");
  }
  if (privacy) {
    require(budget > 0.0, "privacy.budget must be positive");
    require(delta > 0.0 && delta < 1.0, "privacy.delta must lie in (0, 1)");
    require(c0 > 0.0, "privacy.c0 must be positive");
    const double q = DataFraction(q_max, batch_size, per_client_size);
    require(q < 1.0,
            fmt::format("data fraction q = q_max*b/|D_i| = {}*{}/{} = {} must "
                        "be < 1 for budget accounting",
                        q_max, batch_size, per_client_size, q));
  }
}

RunConfig DefaultConfig(DatasetKind dataset) {
  RunConfig c;
  c.dataset = dataset;
  switch (dataset) {
    case DatasetKind::kMnist:
      c.eta0 = 0.04;
      c.partition = PartitionScheme::kLabelsPerClient;
      c.labels_per_client = 4;
      c.per_client_size = 600;
      c.q_max = 50;
      break;
    case DatasetKind::kAdult:
      c.eta0 = 0.01;
      c.partition = PartitionScheme::kOneClass;
      c.per_client_size = 325;
      c.q_max = 30;
      c.adult_missing = MissingPolicy::kZeroFill;
      break;
    case DatasetKind::kSynthetic:
      // Two informative coordinates in a 20-dim space with 12 dead ones and
      // large feature scale: the zero model is not stationary at gamma = 0.5,
      // and the DP noise is large enough to separate the privacy levels.
      c.eta0 = 0.04;
      c.partition = PartitionScheme::kOneClass;
      c.per_client_size = 600;
      c.q_max = 8;
      c.clip_bound = 3.0;
      c.synth_separation = 2.5;
      c.synth_informative = 2;
      c.synth_zero_features = 12;
      c.synth_scale = 4.0;
      break;
  }
  return c;
}

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : Fields()) k.push_back(f.key);
    return k;
  }();
  return keys;
}

void SetField(RunConfig& cfg, const std::string& key, const std::string& value) {
  FindField(key).set(cfg, value);
}

std::string GetField(const RunConfig& cfg, const std::string& key) {
  return FindField(key).get(cfg);
}

std::pair<std::string, std::string> ParseOverride(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(fmt::format("override '{}' is not key=value", text));
  }
  return {text.substr(0, eq), text.substr(eq + 1)};
}

Overrides ParseTomlOverrides(const std::string& text) {
  Overrides out;
  try {
    Flatten(toml::parse(text), "", out);
  } catch (const toml::parse_error& e) {
    throw ConfigError(fmt::format("TOML: {}", e.description()));
  }
  return out;
}

Overrides ReadTomlOverrides(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseTomlOverrides(buffer.str());
}

Overrides ReadSummaryOverrides(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read {}", path.string()));
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  if (!doc.contains("config") || !doc["config"].is_object()) {
    throw ConfigError(fmt::format("{} has no config object", path.string()));
  }
  Overrides out;
  for (const auto& [key, value] : doc["config"].items()) {
    out.emplace_back(key, value.is_string() ? value.get<std::string>()
                                            : value.dump());
  }
  return out;
}

RunConfig BuildConfig(const std::vector<Overrides>& layers) {
  DatasetKind dataset = DatasetKind::kSynthetic;
  for (const auto& layer : layers) {
    for (const auto& [k, v] : layer) {
      if (k == "dataset") dataset = ParseDataset(v);
    }
  }
  RunConfig cfg = DefaultConfig(dataset);
  for (const auto& layer : layers) {
    for (const auto& [k, v] : layer) SetField(cfg, k, v);
  }
  cfg.Validate();
  return cfg;
}

std::string AlgorithmName(Algorithm a) {
  return a == Algorithm::kDpFedPdm ? "dp-fedpdm" : "bsdp-fedpdm";
}

std::string DatasetName(DatasetKind d) {
  switch (d) {
    case DatasetKind::kMnist:
      return "mnist";
    case DatasetKind::kAdult:
      return "adult";
    case DatasetKind::kSynthetic:
      return "synthetic";
  }
  return "synthetic";
}

DatasetKind ParseDataset(const std::string& name) {
  if (name == "mnist") return DatasetKind::kMnist;
  if (name == "adult") return DatasetKind::kAdult;
  if (name == "synthetic") return DatasetKind::kSynthetic;
  throw ConfigError(
      fmt::format("unknown dataset '{}' (mnist|adult|synthetic)", name));
}

}  // namespace fedpdm
