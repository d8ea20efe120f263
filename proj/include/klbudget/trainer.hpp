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

#ifndef KLBUDGET_TRAINER_HPP
#define KLBUDGET_TRAINER_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "klbudget/advantage.hpp"
#include "klbudget/allocation.hpp"
#include "klbudget/game_envs.hpp"
#include "klbudget/policy.hpp"

namespace klb {

enum class EnvKind { kMatrix, kDifferential };

struct RunConfig {
  EnvKind env = EnvKind::kMatrix;
  MatrixGameSpec matrix;
  DifferentialGameSpec differential = DifferentialGameSpec::standard();

  Strategy strategy = Strategy::kWaterfill;
  double delta_total = 4e-3;
  UtilityMode utility_mode = UtilityMode::kPositiveMean;
  /// Zero the utility of agents whose full-budget trust step cannot move
  /// (pinned at a parameter bound in their improving direction).
  bool mask_blocked_utility = true;
  double greedy_epsilon = kDefaultGreedyEpsilon;
  WaterfillOptions waterfill;
  /// Give every agent the whole budget instead of delta_total / m (uniform only).
  bool uniform_per_agent = false;

  int iterations = 1000;
  int batch_size = 20;
  int eval_episodes = 100;
  std::uint64_t seed = 0;
  double critic_lr = 0.2;
  double critic_init = 0.0;
  /// Matrix game: evaluate the exact expectation instead of sampling episodes.
  bool exact_eval = true;
  /// Carried for completeness; both games are single-step, so returns equal rewards.
  double gamma = 1.0;

  double init_p1 = 0.01;
  std::array<double, 2> init_mean = {1.0, 1.0};
  double sigma = 1.15;

  GameSpec game() const;
  int agents() const;
  JointPolicy initial_policy() const;
  /// Throws kInvalidParameter on any violated constraint.
  void validate() const;
};

/// Per-environment defaults for every field.
RunConfig default_config(EnvKind env);

struct IterationRecord {
  int iteration = 0;  // 1-based: the number of updates performed so far
  KLAllocation allocation;
  std::vector<double> realized_kl;
  std::vector<double> utilities;
  std::vector<double> surrogate_gains;
  JointPolicy policy_snapshot;
  double eval_reward = 0.0;
  double critic_value = 0.0;
};

struct RunHistory {
  RunConfig config;
  std::vector<IterationRecord> records;
};

struct TrainerState {
  JointPolicy joint;
  CriticBaseline critic;
};

TrainerState initial_state(const RunConfig& config);

/// One pass of estimate -> allocate -> sequential trust steps -> critic
/// update -> evaluation. Random streams are derived from (seed, iteration).
IterationRecord run_iteration(TrainerState& state, const RunConfig& config,
                              int iteration);

RunHistory train(const RunConfig& config);

/// Independent runs, executed in parallel. Output order matches input order.
std::vector<RunHistory> train_many(const std::vector<RunConfig>& configs);

/// Mean reward over sampled joint actions, or the exact expectation for the
/// matrix game when `exact` is set.
double evaluate(const GameSpec& game, const JointPolicy& joint, int episodes,
                Rng& rng, bool exact);

}  // namespace klb

#endif  // KLBUDGET_TRAINER_HPP
