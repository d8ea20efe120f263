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

// Independent reference implementations used by tests, the self-test command
// and the benchmarks. Nothing here is on the training path.

#ifndef KLBUDGET_ORACLES_ORACLES_HPP
#define KLBUDGET_ORACLES_ORACLES_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "klbudget/advantage.hpp"
#include "klbudget/game_envs.hpp"

namespace klb::oracles {

inline constexpr std::size_t kDefaultGridPoints = 1'000'000;
inline constexpr double kGridLambdaMin = 1e-9;

struct GridResult {
  double lambda = 0.0;
  std::vector<double> deltas;
  double total = 0.0;
};

// Log-spaced search over lambda in [1e-9, max U] for the point whose total
// allocation is closest to delta_total. Ties go to the smaller grid index.
GridResult lambda_grid_search(std::span<const double> utilities, double delta_total,
                              std::size_t points = kDefaultGridPoints);
GridResult lambda_grid_search_serial(std::span<const double> utilities,
                                     double delta_total,
                                     std::size_t points = kDefaultGridPoints);

// Q(action) for one agent by walking every profile, with prefix agents
// substituted by their updated policies.
double brute_force_q(const MatrixGameSpec& spec, const JointPolicy& joint,
                     const UpdatedPrefix& prefix, int agent, int action);

ExactAdvantage brute_force_advantage(const MatrixGameSpec& spec,
                                     const JointPolicy& joint,
                                     const UpdatedPrefix& prefix, int agent);

// Largest per-action |sample mean - exact| in standard errors. Differences
// under `rounding_floor` count as agreement, which covers actions whose
// sampled advantage is deterministic.
double advantage_z_score(const AdvantageEstimate& sampled, const ExactAdvantage& exact,
                         double rounding_floor = 1e-12);

double brute_force_value(const MatrixGameSpec& spec, const JointPolicy& joint);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckResult> run_selftest(std::uint64_t seed = 7);

}  // namespace klb::oracles

#endif  // KLBUDGET_ORACLES_ORACLES_HPP
