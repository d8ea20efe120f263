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

#include "klbudget/trainer.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "klbudget/error.hpp"
#include "klbudget/trust_step.hpp"

namespace klb {
namespace {

// Stream purposes; see make_stream.
enum Purpose : std::uint64_t {
  kEstimateStream = 1,
  kSequentialStream = 2,
  kGreedyStream = 3,
  kEvalStream = 4,
};

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::kInvalidParameter, what);
}

// Draws or computes one agent's advantage estimate and tracks the rewards
// drawn for the end-of-iteration critic update.
class Estimator {
 public:
  Estimator(const RunConfig& config, const GameSpec& game, const JointPolicy& joint,
            const CriticBaseline& critic, int iteration)
      : config_(config), game_(game), joint_(joint), critic_(critic),
        iteration_(iteration) {}

  AdvantageEstimate operator()(int agent, const UpdatedPrefix& prefix,
                               Purpose purpose, std::uint64_t round = 0) {
    if (config_.env == EnvKind::kMatrix) {
      return exact_advantage_estimate(game_, joint_, prefix, agent);
    }
    Rng rng = make_stream(config_.seed, {static_cast<std::uint64_t>(iteration_),
                                         purpose, static_cast<std::uint64_t>(agent),
                                         round});
    auto est = mc_advantage(game_, joint_, prefix, agent,
                            static_cast<std::size_t>(config_.batch_size), critic_, rng);
    reward_sum_ += est.reward_sum;
    reward_count_ += est.reward_count;
    return est;
  }

  /// Pooled mean of every reward drawn this iteration; for exact estimates the
  /// exact value of the pre-update joint policy.
  double pooled_mean_reward() const {
    if (reward_count_ == 0) return exact_state_value(game_, joint_);
    return reward_sum_ / static_cast<double>(reward_count_);
  }

 private:
  const RunConfig& config_;
  const GameSpec& game_;
  const JointPolicy& joint_;
  const CriticBaseline& critic_;
  int iteration_;
  double reward_sum_ = 0.0;
  std::size_t reward_count_ = 0;
};

}  // namespace

GameSpec RunConfig::game() const {
  if (env == EnvKind::kMatrix) return matrix;
  return differential;
}

int RunConfig::agents() const {
  return env == EnvKind::kMatrix ? matrix.n_agents : 2;
}

JointPolicy RunConfig::initial_policy() const {
  JointPolicy joint;
  if (env == EnvKind::kMatrix) {
    joint.assign(static_cast<std::size_t>(matrix.n_agents), Bernoulli{init_p1});
  } else {
    joint = {Gaussian1D{init_mean[0], sigma}, Gaussian1D{init_mean[1], sigma}};
  }
  return joint;
}

void RunConfig::validate() const {
  if (env == EnvKind::kMatrix) {
    matrix.validate();
    require(init_p1 >= kProbFloor && init_p1 <= kProbCeil,
            "env.init_p1 must lie in [1e-6, 1 - 1e-6]");
  } else {
    differential.validate();
    require(sigma > 0.0, "env.sigma must be positive");
    for (double m : init_mean) {
      require(differential.bounds.contains(m), "env.init_mean must lie inside the action bounds");
    }
  }
  require(std::isfinite(delta_total) && delta_total >= 0.0,
          "alloc.delta_total must be nonnegative");
  require(iterations >= 1, "train.iterations must be at least 1");
  require(batch_size >= 1, "train.batch_size must be at least 1");
  require(eval_episodes >= 1, "train.eval_episodes must be at least 1");
  require(critic_lr > 0.0 && critic_lr <= 1.0, "train.critic_lr must lie in (0, 1]");
  require(greedy_epsilon > 0.0, "alloc.greedy_epsilon must be positive");
  require(waterfill.tol > 0.0, "alloc.waterfill_tol must be positive");
  require(gamma >= 0.0 && gamma <= 1.0, "train.gamma must lie in [0, 1]");
}

RunConfig default_config(EnvKind env) {
  RunConfig c;
  c.env = env;
  if (env == EnvKind::kMatrix) {
    c.iterations = 1000;
    c.eval_episodes = 100;
    c.delta_total = 4e-3;
    c.exact_eval = true;
  } else {
    c.iterations = 4000;
    c.eval_episodes = 1000;
    c.delta_total = 0.12;
    c.exact_eval = false;
  }
  return c;
}

TrainerState initial_state(const RunConfig& config) {
  return TrainerState{config.initial_policy(),
                      CriticBaseline{config.critic_init, config.critic_lr}};
}

IterationRecord run_iteration(TrainerState& state, const RunConfig& config,
                              int iteration) {
  const GameSpec game = config.game();
  const int m = config.agents();
  const JointPolicy& joint = state.joint;
  if (static_cast<int>(joint.size()) != m) {
    fail(ErrorKind::kInputShape, "trainer state does not match the configured game");
  }
  const ActionBounds bounds = config.env == EnvKind::kDifferential
                                  ? config.differential.bounds
                                  : ActionBounds{};
  Estimator estimate(config, game, joint, state.critic, iteration);

  // Estimates and utilities under the current joint policy.
  std::vector<AdvantageEstimate> estimates;
  std::vector<double> utilities(static_cast<std::size_t>(m));
  estimates.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    auto est = estimate(i, {}, kEstimateStream);
    const StepResult full = trust_step(joint[i], est, config.delta_total, bounds);
    est.surrogate_value = full.surrogate_gain;
    est.utility = config.mask_blocked_utility && full.realized_kl == 0.0
                      ? 0.0
                      : utility(est, config.utility_mode);
    utilities[i] = est.utility;
    estimates.push_back(std::move(est));
  }

  // Allocation.
  KLAllocation allocation;
  std::vector<std::optional<StepResult>> greedy_steps;
  switch (config.strategy) {
    case Strategy::kUniform:
      allocation = allocate_uniform(static_cast<std::size_t>(m), config.delta_total);
      if (config.uniform_per_agent) {
        allocation.deltas.assign(static_cast<std::size_t>(m), config.delta_total);
        allocation.total_budget = config.delta_total * m;
      }
      break;
    case Strategy::kWaterfill:
      allocation = allocate_waterfill(utilities, config.delta_total, config.waterfill);
      break;
    case Strategy::kGreedy: {
      auto evaluator = [&](int agent, double cap, const UpdatedPrefix& committed) {
        const AdvantageEstimate est =
            committed.empty()
                ? estimates[agent]
                : estimate(agent, committed, kGreedyStream, committed.size());
        return trust_step(joint[agent], est, cap, bounds);
      };
      auto result = allocate_greedy(evaluator, static_cast<std::size_t>(m),
                                    config.delta_total, config.greedy_epsilon);
      allocation = std::move(result.allocation);
      greedy_steps = std::move(result.steps);
      break;
    }
  }

  // Sequential updates in allocation order, each conditioned on the
  // predecessors' new policies.
  IterationRecord rec;
  rec.iteration = iteration;
  rec.realized_kl.assign(static_cast<std::size_t>(m), 0.0);
  rec.surrogate_gains.assign(static_cast<std::size_t>(m), 0.0);
  JointPolicy updated = joint;
  UpdatedPrefix prefix;
  for (int agent : allocation.order) {
    StepResult step{joint[agent], 0.0, 0.0};
    if (config.strategy == Strategy::kGreedy) {
      step = *greedy_steps[agent];
    } else if (allocation.deltas[agent] > 0.0) {
      const AdvantageEstimate est =
          prefix.empty() ? estimates[agent] : estimate(agent, prefix, kSequentialStream);
      step = trust_step(joint[agent], est, allocation.deltas[agent], bounds);
    }
    updated[agent] = step.new_params;
    rec.realized_kl[agent] = step.realized_kl;
    rec.surrogate_gains[agent] = step.surrogate_gain;
    prefix.push_back({agent, step.new_params});
  }

  state.critic = update_critic(state.critic, estimate.pooled_mean_reward());
  state.joint = std::move(updated);

  Rng eval_rng = make_stream(config.seed, {static_cast<std::uint64_t>(iteration),
                                           kEvalStream});
  rec.eval_reward = evaluate(game, state.joint, config.eval_episodes, eval_rng,
                             config.env == EnvKind::kMatrix && config.exact_eval);
  rec.allocation = std::move(allocation);
  rec.utilities = std::move(utilities);
  rec.policy_snapshot = state.joint;
  rec.critic_value = state.critic.value;
  return rec;
}

RunHistory train(const RunConfig& config) {
  config.validate();
  RunHistory history{config, {}};
  history.records.reserve(static_cast<std::size_t>(config.iterations));
  TrainerState state = initial_state(config);
  for (int k = 1; k <= config.iterations; ++k) {
    history.records.push_back(run_iteration(state, config, k));
  }
  return history;
}

std::vector<RunHistory> train_many(const std::vector<RunConfig>& configs) {
  std::vector<RunHistory> out(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  const auto n = static_cast<std::int64_t>(configs.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[i] = train(configs[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

double evaluate(const GameSpec& game, const JointPolicy& joint, int episodes,
                Rng& rng, bool exact) {
  if (exact && std::holds_alternative<MatrixGameSpec>(game)) {
    return exact_state_value(game, joint);
  }
  if (episodes < 1) fail(ErrorKind::kInvalidParameter, "need at least one episode");
  const int n = agent_count(game);
  if (static_cast<int>(joint.size()) != n) {
    fail(ErrorKind::kInputShape, "joint policy size does not match the game");
  }
  const auto* matrix = std::get_if<MatrixGameSpec>(&game);
  const auto* diff = std::get_if<DifferentialGameSpec>(&game);
  const ActionBounds bounds = diff != nullptr ? diff->bounds : ActionBounds{};

  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (int e = 0; e < episodes; ++e) {
    if (matrix != nullptr) {
      for (int j = 0; j < n; ++j) bits[j] = sample_action(joint[j], rng) > 0.5 ? 1 : 0;
      sum += matrix_reward(bits, *matrix);
    } else {
      const double a1 = sample_action(joint[0], rng, bounds);
      const double a2 = sample_action(joint[1], rng, bounds);
      sum += differential_reward_unchecked({a1, a2}, *diff);
    }
  }
  return sum / episodes;
}

}  // namespace klb
