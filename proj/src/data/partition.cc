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
#include <limits>
#include <numeric>
#include <queue>

#include <fmt/format.h>

#include "fedpdm/data.h"
#include "fedpdm/errors.h"
#include "fedpdm/rng.h"

namespace fedpdm {
namespace {

// Edmonds-Karp on an adjacency list. The graphs here have N + m + 2 nodes.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : adj_(nodes) {}

  std::size_t AddEdge(std::size_t from, std::size_t to, long cap) {
    adj_[from].push_back(edges_.size());
    edges_.push_back({to, cap});
    adj_[to].push_back(edges_.size());
    edges_.push_back({from, 0});
    return edges_.size() - 2;
  }

  long Run(std::size_t source, std::size_t sink) {
    long total = 0;
    while (true) {
      std::vector<std::size_t> via(adj_.size(), kNone);
      std::queue<std::size_t> frontier;
      frontier.push(source);
      while (!frontier.empty() && via[sink] == kNone) {
        const std::size_t u = frontier.front();
        frontier.pop();
        for (std::size_t e : adj_[u]) {
          const std::size_t v = edges_[e].to;
          if (edges_[e].cap > 0 && via[v] == kNone && v != source) {
            via[v] = e;
            frontier.push(v);
          }
        }
      }
      if (via[sink] == kNone) return total;
      long push = std::numeric_limits<long>::max();
      for (std::size_t v = sink; v != source; v = edges_[via[v] ^ 1].to) {
        push = std::min(push, edges_[via[v]].cap);
      }
      for (std::size_t v = sink; v != source; v = edges_[via[v] ^ 1].to) {
        edges_[via[v]].cap -= push;
        edges_[via[v] ^ 1].cap += push;
      }
      total += push;
    }
  }

  // Flow pushed through a forward edge returned by AddEdge.
  long Flow(std::size_t edge) const { return edges_[edge ^ 1].cap; }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  struct Edge {
    std::size_t to;
    long cap;
  };
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Edge> edges_;
};

std::vector<std::vector<std::size_t>> RowsByLabel(const Dataset& train,
                                                  Engine& engine) {
  std::vector<std::vector<std::size_t>> by_label(train.num_classes());
  for (std::size_t i = 0; i < train.size(); ++i) {
    by_label[static_cast<std::size_t>(train.label(i))].push_back(i);
  }
  for (auto& rows : by_label) std::shuffle(rows.begin(), rows.end(), engine);
  return by_label;
}

void Finalize(const Dataset& train, std::vector<Shard>& shards) {
  for (auto& s : shards) {
    std::sort(s.rows.begin(), s.rows.end());
    s.label_set.clear();
    for (std::size_t r : s.rows) s.label_set.push_back(train.label(r));
    std::sort(s.label_set.begin(), s.label_set.end());
    s.label_set.erase(std::unique(s.label_set.begin(), s.label_set.end()),
                      s.label_set.end());
  }
}

// amounts[i][k] samples of label k go to client i, dealt from each label's
// shuffled row list in client order.
std::vector<Shard> Deal(const std::vector<std::vector<std::size_t>>& by_label,
                        const std::vector<std::vector<long>>& amounts) {
  std::vector<Shard> shards(amounts.size());
  std::vector<std::size_t> cursor(by_label.size(), 0);
  for (std::size_t i = 0; i < amounts.size(); ++i) {
    shards[i].owner = static_cast<int>(i);
    for (std::size_t k = 0; k < by_label.size(); ++k) {
      for (long a = 0; a < amounts[i][k]; ++a) {
        shards[i].rows.push_back(by_label[k][cursor[k]++]);
      }
    }
  }
  return shards;
}

// Each client gets labels {(i L + j) mod m}. Amounts solve a transportation
// problem: every (client, label) piece holds at least `floor` samples, each
// client holds exactly S, and no label is over-drawn. Returns empty on
// infeasibility.
std::vector<std::vector<long>> SolveLabelAmounts(
    const std::vector<std::vector<std::size_t>>& by_label,
    const PartitionSpec& spec, long floor) {
  const std::size_t n = spec.n_clients;
  const std::size_t m = by_label.size();
  const std::size_t L = spec.labels_per_client;
  const auto size = static_cast<long>(spec.per_client_size);

  std::vector<long> spare(m);
  for (std::size_t k = 0; k < m; ++k) spare[k] = static_cast<long>(by_label[k].size());
  std::vector<std::vector<long>> amounts(n, std::vector<long>(m, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < L; ++j) {
      const std::size_t k = (i * L + j) % m;
      amounts[i][k] = floor;
      spare[k] -= floor;
    }
  }
  if (std::any_of(spare.begin(), spare.end(), [](long s) { return s < 0; })) {
    return {};
  }

  const std::size_t source = n + m;
  const std::size_t sink = n + m + 1;
  MaxFlow flow(n + m + 2);
  std::vector<std::vector<std::size_t>> edge_of(n, std::vector<std::size_t>(m));
  const long extra = size - floor * static_cast<long>(L);
  for (std::size_t i = 0; i < n; ++i) {
    flow.AddEdge(source, i, extra);
    for (std::size_t j = 0; j < L; ++j) {
      const std::size_t k = (i * L + j) % m;
      edge_of[i][k] = flow.AddEdge(i, n + k, extra);
    }
  }
  for (std::size_t k = 0; k < m; ++k) flow.AddEdge(n + k, sink, spare[k]);
  if (flow.Run(source, sink) != extra * static_cast<long>(n)) return {};

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < L; ++j) {
      const std::size_t k = (i * L + j) % m;
      amounts[i][k] += flow.Flow(edge_of[i][k]);
    }
  }
  return amounts;
}

std::vector<Shard> PartitionLabelsPerClient(const Dataset& train,
                                            const PartitionSpec& spec,
                                            Engine& engine) {
  const std::size_t m = train.num_classes();
  const std::size_t L = spec.labels_per_client;
  if (L < 1 || L > m) {
    throw ConfigError(fmt::format("labels per client {} not in [1, {}]", L, m));
  }
  if (spec.per_client_size < L) {
    throw ConfigError("per-client size smaller than labels per client");
  }
  const auto by_label = RowsByLabel(train, engine);
  auto floor = static_cast<long>(3 * spec.per_client_size / (4 * L));
  while (floor >= 1) {
    auto amounts = SolveLabelAmounts(by_label, spec, floor);
    if (!amounts.empty()) return Deal(by_label, amounts);
    floor /= 2;
  }
  throw ConfigError(fmt::format(
      "cannot give {} clients {} samples from exactly {} labels each",
      spec.n_clients, spec.per_client_size, L));
}

std::vector<Shard> PartitionOneClass(const Dataset& train,
                                     const PartitionSpec& spec,
                                     Engine& engine) {
  const std::size_t m = train.num_classes();
  const auto by_label = RowsByLabel(train, engine);
  const auto n = static_cast<long>(spec.n_clients);
  const auto size = static_cast<long>(spec.per_client_size);

  // Clients per class by largest remainder on the class counts.
  std::vector<long> quota(m, 0);
  std::vector<std::pair<double, std::size_t>> remainder;
  long assigned = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const double share = static_cast<double>(n) *
                         static_cast<double>(by_label[k].size()) /
                         static_cast<double>(train.size());
    quota[k] = static_cast<long>(share);
    assigned += quota[k];
    remainder.push_back({share - static_cast<double>(quota[k]), k});
  }
  std::sort(remainder.begin(), remainder.end(),
            [](const auto& a, const auto& b) {
              return a.first > b.first || (a.first == b.first && a.second < b.second);
            });
  for (std::size_t j = 0; assigned < n; ++j, ++assigned) {
    ++quota[remainder[j % m].second];
  }
  // Move clients off classes that cannot fill them.
  for (std::size_t k = 0; k < m; ++k) {
    while (quota[k] * size > static_cast<long>(by_label[k].size())) {
      std::size_t best = m;
      for (std::size_t o = 0; o < m; ++o) {
        if ((quota[o] + 1) * size <= static_cast<long>(by_label[o].size()) &&
            (best == m || by_label[o].size() > by_label[best].size())) {
          best = o;
        }
      }
      if (best == m) {
        throw ConfigError(fmt::format(
            "cannot give {} clients {} single-class samples", n, size));
      }
      --quota[k];
      ++quota[best];
    }
  }

  std::vector<std::size_t> client_label;
  for (std::size_t k = 0; k < m; ++k) {
    client_label.insert(client_label.end(), static_cast<std::size_t>(quota[k]), k);
  }
  std::shuffle(client_label.begin(), client_label.end(), engine);
  std::vector<std::vector<long>> amounts(spec.n_clients, std::vector<long>(m, 0));
  for (std::size_t i = 0; i < spec.n_clients; ++i) amounts[i][client_label[i]] = size;
  return Deal(by_label, amounts);
}

std::vector<Shard> PartitionIid(const Dataset& train, const PartitionSpec& spec,
                                Engine& engine) {
  std::vector<std::size_t> rows(train.size());
  std::iota(rows.begin(), rows.end(), 0);
  std::shuffle(rows.begin(), rows.end(), engine);
  std::vector<Shard> shards(spec.n_clients);
  for (std::size_t i = 0; i < spec.n_clients; ++i) {
    shards[i].owner = static_cast<int>(i);
    const auto begin = rows.begin() + static_cast<long>(i * spec.per_client_size);
    shards[i].rows.assign(begin, begin + static_cast<long>(spec.per_client_size));
  }
  return shards;
}

}  // namespace

std::vector<Shard> Partition(const Dataset& train, const PartitionSpec& spec) {
  if (spec.n_clients == 0 || spec.per_client_size == 0) {
    throw ConfigError("partition needs at least one client and sample");
  }
  if (spec.n_clients * spec.per_client_size > train.size()) {
    throw ConfigError(fmt::format(
        "{} clients x {} samples exceeds the {} training samples",
        spec.n_clients, spec.per_client_size, train.size()));
  }
  Engine engine = MakeEngine(spec.seed, Stream::kPartition);
  std::vector<Shard> shards;
  switch (spec.scheme) {
    case PartitionScheme::kLabelsPerClient:
      shards = PartitionLabelsPerClient(train, spec, engine);
      break;
    case PartitionScheme::kOneClass:
      shards = PartitionOneClass(train, spec, engine);
      break;
    case PartitionScheme::kIid:
      shards = PartitionIid(train, spec, engine);
      break;
  }
  Finalize(train, shards);
  return shards;
}

PartitionScheme ParsePartitionScheme(const std::string& name) {
  if (name == "labels-per-client") return PartitionScheme::kLabelsPerClient;
  if (name == "one-class") return PartitionScheme::kOneClass;
  if (name == "iid") return PartitionScheme::kIid;
  throw ConfigError(fmt::format("unknown partition scheme '{}'", name));
}

std::string PartitionSchemeName(PartitionScheme scheme) {
  switch (scheme) {
    case PartitionScheme::kLabelsPerClient:
      return "labels-per-client";
    case PartitionScheme::kOneClass:
      return "one-class";
    case PartitionScheme::kIid:
      return "iid";
  }
  return "iid";
}

}  // namespace fedpdm
