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

#include "klbudget/advantage.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "klbudget/error.hpp"
#include "klbudget/kernels.hpp"

namespace klb {
namespace {

void check_agent(const JointPolicy& joint, int agent) {
  if (agent < 0 || agent >= static_cast<int>(joint.size())) {
    fail(ErrorKind::kIndex, "agent index " + std::to_string(agent) +
                                " out of range for " +
                                std::to_string(joint.size()) + " agents");
  }
}

const MatrixGameSpec& require_matrix(const GameSpec& game) {
  const auto* m = std::get_if<MatrixGameSpec>(&game);
  if (m == nullptr) {
    fail(ErrorKind::kUnsupportedEnvironment,
         "exact enumeration is only available for the matrix game");
  }
  return *m;
}

std::vector<double> probabilities(const JointPolicy& joint) {
  std::vector<double> p;
  p.reserve(joint.size());
  for (const auto& pol : joint) {
    const auto* b = std::get_if<Bernoulli>(&pol);
    if (b == nullptr) {
      fail(ErrorKind::kUnsupportedFamily, "matrix game needs Bernoulli policies");
    }
    p.push_back(b->p1);
  }
  return p;
}

void check_shape(const MatrixGameSpec& spec, const JointPolicy& joint) {
  if (static_cast<int>(joint.size()) != spec.n_agents) {
    fail(ErrorKind::kInputShape, "joint policy has " + std::to_string(joint.size()) +
                                     " agents, game has " +
                                     std::to_string(spec.n_agents));
  }
}

// d/dp log pi(a) for a Bernoulli agent.
double bernoulli_score(double p1, double action) {
  return (action - p1) / (p1 * (1.0 - p1));
}

}  // namespace

CriticBaseline update_critic(CriticBaseline critic, double batch_mean_reward) {
  critic.value += critic.lr * (batch_mean_reward - critic.value);
  return critic;
}

JointPolicy with_prefix(const JointPolicy& joint, const UpdatedPrefix& prefix) {
  JointPolicy out = joint;
  for (const auto& u : prefix) {
    check_agent(joint, u.agent);
    if (u.params.index() != joint[u.agent].index()) {
      fail(ErrorKind::kInvalidPair, "prefix policy family differs from the joint policy");
    }
    out[u.agent] = u.params;
  }
  return out;
}

double exact_state_value(const GameSpec& game, const JointPolicy& joint) {
  const auto& spec = require_matrix(game);
  check_shape(spec, joint);
  const auto p = probabilities(joint);
  return kernels::conditional_reward(spec, p, kernels::kNoFixedAgent, 0);
}

ExactAdvantage exact_agent_advantage(const GameSpec& game, const JointPolicy& joint,
                                     const UpdatedPrefix& prefix, int agent) {
  const auto& spec = require_matrix(game);
  check_shape(spec, joint);
  check_agent(joint, agent);
  for (const auto& u : prefix) {
    if (u.agent == agent) {
      fail(ErrorKind::kIndex, "agent " + std::to_string(agent) +
                                  " cannot appear in its own prefix");
    }
  }
  const auto p = probabilities(with_prefix(joint, prefix));
  const double q1 = kernels::conditional_reward(spec, p, agent, 1);
  const double q0 = kernels::conditional_reward(spec, p, agent, 0);
  const double p1 = std::get<Bernoulli>(joint[agent]).p1;
  const double v = p1 * q1 + (1.0 - p1) * q0;
  return ExactAdvantage{q0 - v, q1 - v, p1};
}

AdvantageEstimate exact_advantage_estimate(const GameSpec& game,
                                           const JointPolicy& joint,
                                           const UpdatedPrefix& prefix, int agent) {
  AdvantageEstimate est;
  est.agent = agent;
  est.per_action = exact_agent_advantage(game, joint, prefix, agent);
  return est;
}

AdvantageEstimate mc_advantage(const GameSpec& game, const JointPolicy& joint,
                               const UpdatedPrefix& prefix, int agent,
                               std::size_t batch, const CriticBaseline& critic,
                               Rng& rng) {
  if (batch == 0) fail(ErrorKind::kInvalidBatch, "batch size must be at least 1");
  check_agent(joint, agent);
  const int n = agent_count(game);
  if (static_cast<int>(joint.size()) != n) {
    fail(ErrorKind::kInputShape, "joint policy size does not match the game");
  }
  const JointPolicy effective = with_prefix(joint, prefix);

  AdvantageEstimate est;
  est.agent = agent;
  std::vector<AdvantageSample> samples;
  samples.reserve(batch);

  const auto* matrix = std::get_if<MatrixGameSpec>(&game);
  const auto* diff = std::get_if<DifferentialGameSpec>(&game);
  const ActionBounds bounds = diff != nullptr ? diff->bounds : ActionBounds{};

  std::vector<double> actions(static_cast<std::size_t>(n));
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
  double score_sum = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    for (int j = 0; j < n; ++j) actions[j] = sample_action(effective[j], rng, bounds);
    double r;
    if (matrix != nullptr) {
      for (int j = 0; j < n; ++j) bits[j] = actions[j] > 0.5 ? 1 : 0;
      r = matrix_reward(bits, *matrix);
    } else {
      r = differential_reward({actions[0], actions[1]}, *diff);
    }
    const double adv = r - critic.value;
    samples.push_back({actions[agent], adv});
    est.reward_sum += r;

    // The score is taken w.r.t. the agent's own current policy, which is what
    // the trust step perturbs.
    const auto& own = joint[agent];
    if (const auto* g = std::get_if<Gaussian1D>(&own)) {
      score_sum += adv * (actions[agent] - g->mu) / (g->sigma * g->sigma);
    } else {
      score_sum += adv * bernoulli_score(std::get<Bernoulli>(own).p1, actions[agent]);
    }
  }
  est.reward_count = batch;
  est.grad_estimate = score_sum / static_cast<double>(batch);
  est.samples = std::move(samples);
  return est;
}

double advantage_signal(const AdvantageEstimate& est) {
  if (est.per_action) return est.per_action->a1 - est.per_action->a0;
  return est.grad_estimate;
}

double utility(const AdvantageEstimate& est, UtilityMode mode) {
  if (mode == UtilityMode::kSurrogate) return est.surrogate_value;
  auto transform = [mode](double a) {
    switch (mode) {
      case UtilityMode::kPositiveMean: return std::max(a, 0.0);
      case UtilityMode::kAbsMean: return std::abs(a);
      default: return a;
    }
  };
  if (est.per_action) {
    const auto& e = *est.per_action;
    return e.p1 * transform(e.a1) + (1.0 - e.p1) * transform(e.a0);
  }
  if (!est.samples || est.samples->empty()) {
    fail(ErrorKind::kInsufficientData, "utility needs at least one advantage sample");
  }
  double s = 0.0;
  for (const auto& smp : *est.samples) s += transform(smp.advantage);
  return s / static_cast<double>(est.samples->size());
}

}  // namespace klb
