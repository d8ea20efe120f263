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

#ifndef KLBUDGET_POLICY_HPP
#define KLBUDGET_POLICY_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <variant>
#include <vector>

#include "klbudget/game_envs.hpp"

namespace klb {

inline constexpr double kProbFloor = 1e-6;
inline constexpr double kProbCeil = 1.0 - 1e-6;

/// Probability of playing action 1.
struct Bernoulli {
  double p1;

  bool operator==(const Bernoulli&) const = default;
};

/// Fixed-variance Gaussian over a scalar action; only the mean is trained.
struct Gaussian1D {
  double mu;
  double sigma;

  bool operator==(const Gaussian1D&) const = default;
};

using PolicyParams = std::variant<Bernoulli, Gaussian1D>;
using JointPolicy = std::vector<PolicyParams>;

using Rng = std::mt19937_64;

/// Independent stream for a position in the run (iteration, purpose, agent,
/// ...). Streams depend only on the seed and the path, never on the order in
/// which other streams were consumed.
Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

double clip_probability(double p) noexcept;

double bernoulli_kl(double p, double q);
double gaussian_kl(double mu_old, double mu_new, double sigma);

/// KL(old || updated). Both must be the same family; Gaussians must share sigma.
double kl_divergence(const PolicyParams& old, const PolicyParams& updated);

/// Bernoulli draws return 0.0 or 1.0. Gaussian draws are clipped to `bounds`.
double sample_action(const PolicyParams& policy, Rng& rng,
                     ActionBounds bounds = {});

/// Score function d/dmu log N(action; mu, sigma^2). Gaussian only.
double grad_log_prob(const PolicyParams& policy, double action);

/// pi(action) for Bernoulli policies.
double action_probability(const Bernoulli& policy, int action) noexcept;

/// The scalar that the trust step moves: p1 or mu.
double primary_parameter(const PolicyParams& policy) noexcept;

bool is_bernoulli(const JointPolicy& joint) noexcept;

}  // namespace klb

#endif  // KLBUDGET_POLICY_HPP
