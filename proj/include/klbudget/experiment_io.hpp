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

#ifndef KLBUDGET_EXPERIMENT_IO_HPP
#define KLBUDGET_EXPERIMENT_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "klbudget/trainer.hpp"

namespace klb {

/// 17 significant digits: parses back to the same double.
std::string format_double(double v);

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Accepts flat `section.key = value` lines ('#' starts a comment) or a JSON
/// object, either flat ({"alloc.delta_total": 0.01}) or nested by section.
/// Unspecified keys take the defaults of the selected environment
/// (`env.name`, falling back to `default_env`). Unknown keys, bad values and
/// violated constraints raise kParse with the offending line.
RunConfig parse_config(std::string_view text, EnvKind default_env = EnvKind::kMatrix);

RunConfig load_config_file(const std::filesystem::path& path,
                           EnvKind default_env = EnvKind::kMatrix);

/// Nested JSON echo of every field; parse_config reads it back losslessly.
std::string config_to_json(const RunConfig& config);

std::string_view to_string(EnvKind env);
std::string_view to_string(Strategy strategy);
std::string_view to_string(UtilityMode mode);
std::string_view to_string(RewardVariant variant);
std::string_view to_string(LambdaSolver solver);
std::string_view to_string(LambdaInit init);

Strategy parse_strategy(std::string_view s);

// ---------------------------------------------------------------------------
// Derived metrics
// ---------------------------------------------------------------------------

/// Iteration number of the first record with eval_reward >= fraction *
/// max_reward, or nullopt if never reached.
std::optional<int> steps_to_threshold(const RunHistory& history,
                                      double fraction = 0.99,
                                      double max_reward = kMatrixMaxReward);

/// Same scan over a bare reward series, numbering entries from 1.
std::optional<int> steps_to_threshold(std::span<const double> eval_rewards,
                                      double fraction = 0.99,
                                      double max_reward = kMatrixMaxReward);

enum class MetricKind { kRewardCurve, kKlHeatmap, kAdvKlPairs, kTrajectory, kStepsVsDelta };

struct MetricTable {
  MetricKind kind;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Throws kInputShape when the row width does not match the columns.
  void add_row(std::vector<double> row);
};

/// iteration, eval_reward, critic_value
MetricTable reward_curve(const RunHistory& history);
/// iteration, kl_1..kl_m (realized)
MetricTable kl_heatmap(const RunHistory& history);
/// iteration, param_1..param_m (p1 or mu)
MetricTable trajectory(const RunHistory& history);
/// One row per (iteration, agent): utility divided by the iteration's largest
/// |utility| (0 when all utilities are 0), paired with the realized KL.
MetricTable adv_kl_pairs(const RunHistory& history);

void write_csv(std::ostream& out, const MetricTable& table);

// ---------------------------------------------------------------------------
// Run directories
// ---------------------------------------------------------------------------

/// Writes rewards.csv, kl.csv, policy.csv and config.json into `directory`
/// (created if missing).
void export_run_csv(const RunHistory& history, const std::filesystem::path& directory);

/// Reads a directory written by export_run_csv. Allocation orders and
/// surrogate gains are not part of the export; the loaded order lists the
/// agents with a positive delta in index order and gains are zero.
RunHistory load_run_csv(const std::filesystem::path& directory);

}  // namespace klb

#endif  // KLBUDGET_EXPERIMENT_IO_HPP
