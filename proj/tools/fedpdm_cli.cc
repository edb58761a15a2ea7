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

// fedpdm: command-line front end.
//
//   fedpdm run --dataset adult --set privacy.enabled=true --set privacy.budget=0.5
//   fedpdm calibrate --dataset mnist --set privacy.budget=20
//   fedpdm prep-data --dataset synthetic --dump synth.csv
//   fedpdm sweep --algorithm bsdp-fedpdm --alpha-up 0.1,0.5,1 --budget off,1
//
// Exit status: 0 ok, 1 configuration error, 2 any other failure.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fedpdm/config.h"
#include "fedpdm/data.h"
#include "fedpdm/errors.h"
#include "fedpdm/kernels.h"
#include "fedpdm/metrics.h"
#include "fedpdm/privacy.h"
#include "fedpdm/simulation.h"

namespace fs = std::filesystem;
using namespace fedpdm;

namespace {

std::atomic<bool> g_stop{false};

extern "C" void OnSigint(int) { g_stop.store(true); }

// Options shared by every subcommand; all of them end up as config layers.
struct CommonOptions {
  std::string config_file;
  std::string replay_file;
  std::vector<std::string> sets;
  std::string dataset;
  std::string algorithm;
  std::string output_dir;
  std::string data_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> rounds;
  int threads = 0;
  bool verbose = false;
  bool quiet = false;
};

void AddCommon(CLI::App* app, CommonOptions& o) {
  app->add_option("-c,--config", o.config_file, "TOML config file")
      ->check(CLI::ExistingFile);
  app->add_option("--replay", o.replay_file,
                  "Reuse the config echoed in a summary.json")
      ->check(CLI::ExistingFile);
  app->add_option("-s,--set", o.sets, "Override one key, e.g. privacy.budget=0.5")
      ->take_all();
  app->add_option("--dataset", o.dataset, "mnist | adult | synthetic");
  app->add_option("--algorithm", o.algorithm, "dp-fedpdm | bsdp-fedpdm");
  app->add_option("--seed", o.seed, "Master seed");
  app->add_option("--rounds", o.rounds, "Communication rounds T");
  app->add_option("-o,--output-dir", o.output_dir, "Where outputs go");
  app->add_option("--data-dir", o.data_dir,
                  "Dataset root (FEDPDM_DATA_DIR takes precedence)");
  app->add_option("--threads", o.threads, "OpenMP threads (default: all)");
  app->add_flag("-v,--verbose", o.verbose, "Per-round debug logging");
  app->add_flag("-q,--quiet", o.quiet, "Warnings and errors only");
}

// Layers, lowest precedence first: replayed summary, TOML file, named flags,
// then --set in command-line order.
RunConfig ResolveConfig(const CommonOptions& o) {
  std::vector<Overrides> layers;
  if (!o.replay_file.empty()) layers.push_back(ReadSummaryOverrides(o.replay_file));
  if (!o.config_file.empty()) layers.push_back(ReadTomlOverrides(o.config_file));
  Overrides flags;
  if (!o.dataset.empty()) flags.emplace_back("dataset", o.dataset);
  if (!o.algorithm.empty()) flags.emplace_back("algorithm", o.algorithm);
  if (o.seed) flags.emplace_back("seed", std::to_string(*o.seed));
  if (o.rounds) flags.emplace_back("rounds", std::to_string(*o.rounds));
  if (!o.output_dir.empty()) flags.emplace_back("output_dir", o.output_dir);
  if (!o.data_dir.empty()) flags.emplace_back("data.dir", o.data_dir);
  layers.push_back(std::move(flags));
  Overrides sets;
  for (const auto& s : o.sets) sets.push_back(ParseOverride(s));
  layers.push_back(std::move(sets));
  return BuildConfig(layers);
}

void ApplyRuntime(const CommonOptions& o) {
  if (o.verbose) {
    spdlog::set_level(spdlog::level::debug);
  } else if (o.quiet) {
    spdlog::set_level(spdlog::level::warn);
  }
  SetThreads(o.threads);
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string::npos ? text.size() : comma;
    if (end > start) out.push_back(text.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::ofstream OpenOut(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  return out;
}

// One full run with CSV rows flushed as they appear, so an interrupted run
// still leaves a usable partial file.
RunResult RunToFiles(const RunConfig& cfg, const Environment& env,
                     const fs::path& csv_path) {
  std::ofstream csv = OpenOut(csv_path);
  csv << CsvHeader() << '\n' << std::flush;
  auto sink = [&csv](const RoundRecord& rec) {
    csv << CsvRow(rec) << '\n' << std::flush;
    spdlog::info("round {:>4}  acc {:.4f}  P {:.4e}  eps {:.4g}", rec.round,
                 rec.accuracy, rec.p_measure, rec.eps_cum_max);
  };
  return RunSimulation(cfg, env, sink, &g_stop);
}

int CmdRun(const CommonOptions& o) {
  const RunConfig cfg = ResolveConfig(o);
  ApplyRuntime(o);
  const fs::path dir = cfg.output_dir;
  fs::create_directories(dir);
  spdlog::info("{} on {}, T={}, N={}, K={}, seed={}", AlgorithmName(cfg.algorithm),
               DatasetName(cfg.dataset), cfg.rounds, cfg.clients,
               cfg.clients_per_round, cfg.seed);
  const Environment env = PrepareEnvironment(cfg);
  const RunResult result = RunToFiles(cfg, env, dir / "metrics.csv");
  WriteRunSummary(dir / "summary.json", cfg, result);
  WriteModelCsv(dir / "model.csv", result.final_model,
                env.workload.num_features);
  if (result.interrupted) {
    spdlog::warn("interrupted after round {}; partial outputs in {}",
                 result.records.back().round, dir.string());
    return 2;
  }
  spdlog::info("final accuracy {:.4f}; outputs in {}",
               result.records.back().accuracy, dir.string());
  return 0;
}

int CmdCalibrate(const CommonOptions& o) {
  RunConfig cfg = ResolveConfig(o);
  ApplyRuntime(o);
  if (!(cfg.budget > 0.0)) throw ConfigError("privacy.budget must be positive");
  CalibrationInput in;
  in.budget = cfg.budget;
  in.delta = cfg.delta;
  in.c0 = cfg.c0;
  in.clients = cfg.clients;
  in.clients_per_round = cfg.clients_per_round;
  in.rounds = cfg.rounds;
  in.batch_size = cfg.batch_size;
  in.shard_size = cfg.per_client_size;
  in.q_max = cfg.q_max;
  in.rho = cfg.rho;
  in.eta0 = cfg.eta0;
  in.clip_bound = cfg.clip_bound;
  const CalibrationReport rep = Calibrate(in);
  std::cout << fmt::format(
      "budget {:.6g}  delta {:.3g}  c0 {:.6g}  p {:.6g}  q {:.6g}  T {}\n",
      in.budget, in.delta, in.c0, rep.spec.p, rep.spec.q, in.rounds);
  std::cout << fmt::format("epsilon per round {:.9g}\n", rep.spec.epsilon_round);
  std::cout << fmt::format("round trip total loss {:.12g}\n", rep.round_trip);
  std::cout << fmt::format("{:>6} {:>12} {:>14} {:>14}\n", "t", "eta", "sensitivity",
                           "sigma");
  for (const auto& row : rep.rows) {
    std::cout << fmt::format("{:>6} {:>12.6g} {:>14.6g} {:>14.6g}\n", row.round,
                             row.eta, row.sensitivity, row.sigma);
  }
  return 0;
}

int CmdPrepData(const CommonOptions& o, const std::string& dump) {
  const RunConfig cfg = ResolveConfig(o);
  ApplyRuntime(o);
  const Environment env = PrepareEnvironment(cfg);
  const auto& train = env.data.train;
  std::cout << fmt::format("dataset {}: train {} test {}  (m, n) = ({}, {})\n",
                           DatasetName(cfg.dataset), train.size(),
                           env.data.test.size(), train.num_classes(),
                           train.num_features());
  const auto freq = train.ClassFrequencies();
  for (std::size_t c = 0; c < freq.size(); ++c) {
    std::cout << fmt::format("  class {:>2}: {:.4f}\n", c, freq[c]);
  }
  std::size_t min_labels = train.num_classes(), max_labels = 0;
  for (const auto& s : env.shards) {
    min_labels = std::min(min_labels, s.label_set.size());
    max_labels = std::max(max_labels, s.label_set.size());
  }
  std::cout << fmt::format(
      "partition {}: {} shards of {} rows, {}-{} labels per shard\n",
      PartitionSchemeName(cfg.partition), env.shards.size(), cfg.per_client_size,
      min_labels, max_labels);
  if (!dump.empty()) {
    WriteDatasetCsv(train, dump);
    std::cout << "wrote " << dump << '\n';
  }
  return 0;
}

struct SweepOptions {
  std::string alpha_up = "";
  std::string alpha_down = "";
  std::string budgets = "";
};

int CmdSweep(const CommonOptions& o, const SweepOptions& s) {
  const RunConfig base = ResolveConfig(o);
  ApplyRuntime(o);
  auto values = [](const std::string& list, const std::string& fallback) {
    auto v = SplitList(list);
    if (v.empty()) v.push_back(fallback);
    return v;
  };
  const auto ups = values(s.alpha_up, GetField(base, "sparsify.alpha_up"));
  const auto downs = values(s.alpha_down, GetField(base, "sparsify.alpha_down"));
  const auto budgets = values(
      s.budgets, base.privacy ? GetField(base, "privacy.budget") : "off");

  const fs::path dir = base.output_dir;
  fs::create_directories(dir);
  const Environment env = PrepareEnvironment(base);
  std::ofstream index = OpenOut(dir / "sweep.csv");
  index << "alpha_up,alpha_down,budget,file,accuracy,p_measure,uplink_bits,"
           "downlink_bits,eps_cum_max\n";
  for (const auto& up : ups) {
    for (const auto& down : downs) {
      for (const auto& budget : budgets) {
        RunConfig cfg = base;
        SetField(cfg, "sparsify.alpha_up", up);
        SetField(cfg, "sparsify.alpha_down", down);
        if (budget == "off") {
          cfg.privacy = false;
        } else {
          cfg.privacy = true;
          SetField(cfg, "privacy.budget", budget);
        }
        cfg.Validate();
        const std::string name =
            fmt::format("aU{}_aD{}_eps{}.csv", up, down, budget);
        spdlog::info("cell {}", name);
        const RunResult r = RunToFiles(cfg, env, dir / name);
        const auto& last = r.records.back();
        index << fmt::format("{},{},{},{},{:.6f},{:.9e},{},{},{:.9e}\n", up, down,
                             budget, name, last.accuracy, last.p_measure,
                             last.uplink_bits, last.downlink_bits,
                             last.eps_cum_max)
              << std::flush;
        if (r.interrupted) {
          spdlog::warn("sweep interrupted in cell {}", name);
          return 2;
        }
      }
    }
  }
  spdlog::info("sweep index in {}", (dir / "sweep.csv").string());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated primal-dual learning simulator with differential "
               "privacy and bidirectional sparsification"};
  app.require_subcommand(1);

  CommonOptions run_opts, cal_opts, prep_opts, sweep_opts;
  std::string dump;
  SweepOptions sweep;

  auto* run = app.add_subcommand("run", "Run one simulation");
  AddCommon(run, run_opts);
  auto* cal = app.add_subcommand(
      "calibrate", "Per-round epsilon and noise scale for a privacy budget");
  AddCommon(cal, cal_opts);
  cal->add_option_function<double>(
      "--budget",
      [&](double v) { cal_opts.sets.push_back(fmt::format("privacy.budget={:.17g}", v)); },
      "Total privacy budget");
  auto* prep = app.add_subcommand("prep-data", "Load, validate and partition a dataset");
  AddCommon(prep, prep_opts);
  prep->add_option("--dump", dump, "Write the training set as CSV");
  auto* sw = app.add_subcommand("sweep", "Grid over compression ratios and budgets");
  AddCommon(sw, sweep_opts);
  sw->add_option("--alpha-up", sweep.alpha_up, "Comma-separated uplink ratios");
  sw->add_option("--alpha-down", sweep.alpha_down, "Comma-separated downlink ratios");
  sw->add_option("--budget", sweep.budgets,
                 "Comma-separated budgets; 'off' disables privacy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::signal(SIGINT, OnSigint);
  try {
    if (*run) return CmdRun(run_opts);
    if (*cal) return CmdCalibrate(cal_opts);
    if (*prep) return CmdPrepData(prep_opts, dump);
    if (*sw) return CmdSweep(sweep_opts, sweep);
  } catch (const Error& e) {
    spdlog::error("{}: {}", ErrorKindName(e.kind()), e.what());
    return e.kind() == ErrorKind::kConfig ? 1 : 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 0;
}
