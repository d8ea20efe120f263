// Copyright 2026 The klbudget Authors
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

// Command-line driver: single runs, delta sweeps, strategy comparisons,
// reward-surface dumps and the oracle self-test.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "klbudget/error.hpp"
#include "klbudget/experiment_io.hpp"
#include "klbudget/trainer.hpp"
#include "oracles/oracles.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitSelftest = 3;

constexpr std::array kAllStrategies = {klb::Strategy::kUniform, klb::Strategy::kGreedy,
                                       klb::Strategy::kWaterfill};

struct ConfigArgs {
  std::string path;
  std::string env = "matrix";
};

klb::RunConfig load(const ConfigArgs& args) {
  const auto env = klb::parse_config("env.name = " + args.env).env;
  if (args.path.empty()) return klb::default_config(env);
  return klb::load_config_file(args.path, env);
}

// Reward treated as the optimum when counting steps to 99%.
double reference_max(const klb::RunConfig& c) {
  if (c.env == klb::EnvKind::kMatrix) return klb::kMatrixMaxReward;
  return klb::differential_reward({5.0, 5.0}, c.differential);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !(v > 0.0)) {
      klb::fail(klb::ErrorKind::kParse, "bad delta '" + item + "' in --deltas");
    }
    out.push_back(v);
  }
  if (out.empty()) klb::fail(klb::ErrorKind::kParse, "--deltas is empty");
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) klb::fail(klb::ErrorKind::kExport, "failed writing " + path.string());
}

std::string steps_cell(const klb::RunHistory& h) {
  const auto steps = klb::steps_to_threshold(h, 0.99, reference_max(h.config));
  return steps ? std::to_string(*steps) : "NA";
}

void print_summary(const klb::RunHistory& h) {
  const auto& last = h.records.back();
  std::printf("iterations %d  final eval reward %s  steps to 99%% %s\n", last.iteration,
              klb::format_double(last.eval_reward).c_str(), steps_cell(h).c_str());
  std::printf("final policy:");
  for (const auto& p : last.policy_snapshot) {
    std::printf(" %s", klb::format_double(klb::primary_parameter(p)).c_str());
  }
  std::printf("\n");
}

int cmd_run(const ConfigArgs& cfg, std::optional<std::uint64_t> seed, const std::string& out) {
  auto config = load(cfg);
  if (seed) config.seed = *seed;
  const auto history = klb::train(config);
  klb::export_run_csv(history, out);
  print_summary(history);
  std::printf("wrote %s\n", out.c_str());
  return kExitOk;
}

std::string run_dir_name(klb::Strategy s, double delta, int seed_index) {
  return std::string(klb::to_string(s)) + "/delta_" + klb::format_double(delta) + "/seed_" +
         std::to_string(seed_index);
}

int cmd_sweep(const ConfigArgs& cfg, const std::string& deltas, int seeds,
              const std::string& out) {
  const auto base = load(cfg);
  const auto grid = parse_list(deltas);
  if (seeds < 1) klb::fail(klb::ErrorKind::kParse, "--seeds must be at least 1");

  std::vector<klb::RunConfig> configs;
  for (auto s : kAllStrategies) {
    for (double d : grid) {
      for (int k = 0; k < seeds; ++k) {
        auto c = base;
        c.strategy = s;
        c.delta_total = d;
        c.seed = base.seed + static_cast<std::uint64_t>(k);
        configs.push_back(c);
      }
    }
  }
  const auto runs = klb::train_many(configs);

  std::ostringstream table;
  table << "strategy,delta_total,seed,steps_to_99pct\n";
  for (const auto& h : runs) {
    const int k = static_cast<int>(h.config.seed - base.seed);
    klb::export_run_csv(h, fs::path(out) / run_dir_name(h.config.strategy, h.config.delta_total, k));
    table << klb::to_string(h.config.strategy) << ',' << klb::format_double(h.config.delta_total)
          << ',' << h.config.seed << ',' << steps_cell(h) << '\n';
  }
  write_text(fs::path(out) / "steps_vs_delta.csv", table.str());
  std::printf("%zu runs, summary in %s\n", runs.size(),
              (fs::path(out) / "steps_vs_delta.csv").string().c_str());
  return kExitOk;
}

int cmd_compare(const ConfigArgs& cfg, int seeds, const std::string& out) {
  const auto base = load(cfg);
  if (seeds < 1) klb::fail(klb::ErrorKind::kParse, "--seeds must be at least 1");
  std::vector<klb::RunConfig> configs;
  for (auto s : kAllStrategies) {
    for (int k = 0; k < seeds; ++k) {
      auto c = base;
      c.strategy = s;
      c.seed = base.seed + static_cast<std::uint64_t>(k);
      configs.push_back(c);
    }
  }
  const auto runs = klb::train_many(configs);
  const int m = base.agents();

  std::ostringstream table;
  table << "strategy,seed,final_eval_reward,steps_to_99pct";
  for (int i = 1; i <= m; ++i) table << ",final_param_" << i;
  table << '\n';
  std::map<klb::Strategy, std::vector<double>> finals;
  for (const auto& h : runs) {
    const auto& last = h.records.back();
    finals[h.config.strategy].push_back(last.eval_reward);
    table << klb::to_string(h.config.strategy) << ',' << h.config.seed << ','
          << klb::format_double(last.eval_reward) << ',' << steps_cell(h);
    for (const auto& p : last.policy_snapshot) {
      table << ',' << klb::format_double(klb::primary_parameter(p));
    }
    table << '\n';
    const int k = static_cast<int>(h.config.seed - base.seed);
    klb::export_run_csv(h, fs::path(out) / klb::to_string(h.config.strategy) /
                               ("seed_" + std::to_string(k)));
  }
  write_text(fs::path(out) / "final_rewards.csv", table.str());

  std::ostringstream med;
  med << "strategy,median_final_eval_reward\n";
  for (auto s : kAllStrategies) {
    const double v = median(finals[s]);
    med << klb::to_string(s) << ',' << klb::format_double(v) << '\n';
    std::printf("%-10s median final eval reward %s\n", std::string(klb::to_string(s)).c_str(),
                klb::format_double(v).c_str());
  }
  write_text(fs::path(out) / "medians.csv", med.str());
  return kExitOk;
}

int cmd_surface(const std::string& out, int resolution) {
  std::ostringstream text;
  klb::write_reward_surface_csv(text, klb::DifferentialGameSpec::standard(), resolution);
  write_text(out, text.str());
  std::printf("wrote %s\n", out.c_str());
  return kExitOk;
}

int cmd_selftest() {
  bool ok = true;
  for (const auto& r : klb::oracles::run_selftest()) {
    std::printf("%s %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitSelftest;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KL-budget allocation for sequential multi-agent trust-region updates"};
  app.require_subcommand(1);

  ConfigArgs cfg;
  auto add_config = [&cfg](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--config", cfg.path, "Config file (key = value or JSON)");
    if (required) opt->required()->check(CLI::ExistingFile);
    else opt->check(CLI::ExistingFile);
    sub->add_option("--env", cfg.env, "Environment used when the config omits env.name")
        ->check(CLI::IsMember({"matrix", "differential"}));
  };

  std::optional<std::uint64_t> seed;
  std::string out = "run_out";
  auto* run = app.add_subcommand("run", "Train one configuration and export CSV logs");
  add_config(run, false);
  run->add_option("--seed", seed, "Override train.seed");
  run->add_option("--out", out, "Output directory");

  std::string deltas = "1e-4,3e-4,1e-3,3e-3,1e-2";
  int seeds = 10;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Steps-to-99% over a delta grid for every strategy");
  add_config(sweep, true);
  sweep->add_option("--deltas", deltas, "Comma-separated delta_total values");
  sweep->add_option("--seeds", seeds, "Seeds per grid point");
  sweep->add_option("--out", sweep_out, "Output directory")->required();

  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "Run all strategies on identical seeds");
  add_config(compare, true);
  compare->add_option("--seeds", seeds, "Number of seeds");
  compare->add_option("--out", compare_out, "Output directory")->required();

  std::string surface_out;
  int resolution = 141;
  auto* surface = app.add_subcommand("surface", "Dump the differential-game reward grid");
  surface->add_option("--out", surface_out, "Output CSV file")->required();
  surface->add_option("--resolution", resolution, "Grid points per axis")
      ->check(CLI::Range(2, 100000));

  auto* selftest = app.add_subcommand("selftest", "Check solvers against reference oracles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(cfg, seed, out);
    if (*sweep) return cmd_sweep(cfg, deltas, seeds, sweep_out);
    if (*compare) return cmd_compare(cfg, seeds, compare_out);
    if (*surface) return cmd_surface(surface_out, resolution);
    if (*selftest) return cmd_selftest();
  } catch (const klb::Error& e) {
    std::cerr << "error (" << klb::to_string(e.kind()) << "): " << e.what() << '\n';
    return e.kind() == klb::ErrorKind::kParse ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
