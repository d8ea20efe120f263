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

#ifndef KLBUDGET_ADVANTAGE_HPP
#define KLBUDGET_ADVANTAGE_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "klbudget/game_envs.hpp"
#include "klbudget/policy.hpp"

namespace klb {

/// Running estimate of the expected reward, used as the Monte-Carlo baseline.
struct CriticBaseline {
  double value = 0.0;
  double lr = 0.2;
};

/// value <- value + lr * (batch_mean_reward - value)
CriticBaseline update_critic(CriticBaseline critic, double batch_mean_reward);

/// A new policy already committed by an agent earlier in the update order.
struct UpdatedPolicy {
  int agent;
  PolicyParams params;
};
using UpdatedPrefix = std::vector<UpdatedPolicy>;

/// `joint` with every prefix entry substituted in.
JointPolicy with_prefix(const JointPolicy& joint, const UpdatedPrefix& prefix);

/// Exact per-action advantages of one Bernoulli agent. `p1` is the agent's
/// current probability of action 1, the weight used for centering.
struct ExactAdvantage {
  double a0;
  double a1;
  double p1;
};

struct AdvantageSample {
  double action;
  double advantage;
};

struct AdvantageEstimate {
  int agent = 0;
  std::optional<ExactAdvantage> per_action;
  std::optional<std::vector<AdvantageSample>> samples;
  /// Score-function estimate of d(surrogate)/d(parameter) for sampled agents.
  double grad_estimate = 0.0;
  /// Gain of the best trust step inside the full budget; filled by the trainer.
  double surrogate_value = 0.0;
  double utility = 0.0;
  /// Sampled rewards, pooled into the end-of-iteration critic update.
  double reward_sum = 0.0;
  std::size_t reward_count = 0;
};

enum class UtilityMode { kMean, kPositiveMean, kAbsMean, kSurrogate };

/// V = sum over profiles of prod_i pi_i(a_i) * R(a). Matrix game only.
double exact_state_value(const GameSpec& game, const JointPolicy& joint);

/// A(a) = Q(a) - V for agent `agent`, where Q marginalizes the other agents
/// (prefix agents under their new policies, the rest under `joint`) and V is
/// the pi-weighted mean of Q under the agent's current policy.
ExactAdvantage exact_agent_advantage(const GameSpec& game, const JointPolicy& joint,
                                     const UpdatedPrefix& prefix, int agent);

AdvantageEstimate exact_advantage_estimate(const GameSpec& game,
                                           const JointPolicy& joint,
                                           const UpdatedPrefix& prefix, int agent);

/// Draws `batch` joint actions and records (own action, r - critic) pairs.
/// The critic is read, never written.
AdvantageEstimate mc_advantage(const GameSpec& game, const JointPolicy& joint,
                               const UpdatedPrefix& prefix, int agent,
                               std::size_t batch, const CriticBaseline& critic,
                               Rng& rng);

/// Direction signal for the trust step: A(1) - A(0) for exact estimates,
/// grad_estimate for sampled ones.
double advantage_signal(const AdvantageEstimate& est);

double utility(const AdvantageEstimate& est, UtilityMode mode);

}  // namespace klb

#endif  // KLBUDGET_ADVANTAGE_HPP
