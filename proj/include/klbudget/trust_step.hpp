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

#ifndef KLBUDGET_TRUST_STEP_HPP
#define KLBUDGET_TRUST_STEP_HPP

#include "klbudget/advantage.hpp"
#include "klbudget/game_envs.hpp"
#include "klbudget/policy.hpp"

namespace klb {

/// Maximizer of the linearized surrogate over the KL ball of one agent.
struct StepResult {
  PolicyParams new_params;
  double realized_kl = 0.0;
  /// signal * (new parameter - old parameter)
  double surrogate_gain = 0.0;
};

struct ProbabilityInterval {
  double lo;
  double hi;
};

/// Bisection tolerance on |KL - delta| at the interval endpoints.
inline constexpr double kKlBisectionTol = 1e-10;

/// Largest [lo, hi] containing p with KL(p || q) <= delta for all q inside.
/// Endpoints are clamped to [kProbFloor, kProbCeil].
ProbabilityInterval bernoulli_kl_interval(double p, double delta);

StepResult bernoulli_step(double p, double advantage_gap, double delta);

/// Equal-sigma Gaussians: the KL ball is |mu' - mu| <= sigma * sqrt(2 delta).
StepResult gaussian_step(double mu, double sigma, double grad_estimate,
                         double delta, ActionBounds bounds = {});

/// Dispatches on the policy family with the estimate's direction signal.
StepResult trust_step(const PolicyParams& policy, const AdvantageEstimate& est,
                      double delta, ActionBounds bounds = {});

}  // namespace klb

#endif  // KLBUDGET_TRUST_STEP_HPP
