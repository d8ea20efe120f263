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

#include <algorithm>
#include <cmath>
#include <limits>

#include "klbudget/error.hpp"
#include "oracles/oracles.hpp"

namespace klb::oracles {
namespace {

double probability_of(const PolicyParams& policy, int action) {
  const double p1 = std::get<Bernoulli>(policy).p1;
  return action == 1 ? p1 : 1.0 - p1;
}

void check_matrix_joint(const MatrixGameSpec& spec, const JointPolicy& joint) {
  spec.validate();
  if (joint.size() != static_cast<std::size_t>(spec.n_agents)) {
    fail(ErrorKind::kInputShape, "joint policy size does not match the game");
  }
  if (!is_bernoulli(joint)) fail(ErrorKind::kUnsupportedFamily, "matrix game needs Bernoulli");
}

}  // namespace

double brute_force_q(const MatrixGameSpec& spec, const JointPolicy& joint,
                     const UpdatedPrefix& prefix, int agent, int action) {
  check_matrix_joint(spec, joint);
  if (agent < 0 || agent >= spec.n_agents) fail(ErrorKind::kIndex, "agent out of range");
  const JointPolicy mixed = with_prefix(joint, prefix);
  double q = 0.0;
  for (const auto& profile : enumerate_profiles(spec.n_agents)) {
    if (profile[agent] != action) continue;
    double weight = 1.0;
    for (int j = 0; j < spec.n_agents; ++j) {
      if (j != agent) weight *= probability_of(mixed[j], profile[j]);
    }
    q += weight * matrix_reward(profile, spec);
  }
  return q;
}

ExactAdvantage brute_force_advantage(const MatrixGameSpec& spec,
                                     const JointPolicy& joint,
                                     const UpdatedPrefix& prefix, int agent) {
  const double q0 = brute_force_q(spec, joint, prefix, agent, 0);
  const double q1 = brute_force_q(spec, joint, prefix, agent, 1);
  const double p1 = std::get<Bernoulli>(joint[agent]).p1;
  const double v = p1 * q1 + (1.0 - p1) * q0;
  return {q0 - v, q1 - v, p1};
}

double brute_force_value(const MatrixGameSpec& spec, const JointPolicy& joint) {
  check_matrix_joint(spec, joint);
  double v = 0.0;
  for (const auto& profile : enumerate_profiles(spec.n_agents)) {
    double weight = 1.0;
    for (int j = 0; j < spec.n_agents; ++j) weight *= probability_of(joint[j], profile[j]);
    v += weight * matrix_reward(profile, spec);
  }
  return v;
}

double advantage_z_score(const AdvantageEstimate& sampled, const ExactAdvantage& exact,
                         double rounding_floor) {
  if (!sampled.samples) fail(ErrorKind::kInsufficientData, "estimate has no samples");
  double worst = 0.0;
  for (int a = 0; a < 2; ++a) {
    // Work with deviations from the exact value so deterministic samples
    // cancel exactly instead of accumulating summation error.
    const double target = a == 1 ? exact.a1 : exact.a0;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& s : *sampled.samples) {
      if (static_cast<int>(s.action) == a) {
        sum += s.advantage - target;
        ++n;
      }
    }
    if (n == 0) continue;
    const double diff = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& s : *sampled.samples) {
      if (static_cast<int>(s.action) == a) {
        const double d = s.advantage - target - diff;
        ss += d * d;
      }
    }
    const double se =
        n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    const double excess = std::max(0.0, std::abs(diff) - rounding_floor);
    if (excess == 0.0) continue;
    worst = std::max(worst, se > 0.0 ? excess / se : std::numeric_limits<double>::infinity());
  }
  return worst;
}

}  // namespace klb::oracles
