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
#include <cstdio>
#include <random>

#include "klbudget/allocation.hpp"
#include "klbudget/kernels.hpp"
#include "oracles/oracles.hpp"

namespace klb::oracles {
namespace {

std::string fmt(const char* pattern, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

CheckResult waterfill_vs_grid(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(2, 16);
  std::uniform_real_distribution<double> util(-1.0, 5.0);
  std::uniform_real_distribution<double> budget(0.1, 10.0);
  double worst = 0.0;
  int checked = 0;
  for (int k = 0; k < 20; ++k) {
    std::vector<double> u(static_cast<std::size_t>(size(rng)));
    for (auto& x : u) x = util(rng);
    const double total = budget(rng);
    if (*std::max_element(u.begin(), u.end()) <= 0.0) continue;
    const auto solved = solve_lambda_bisection(u, total);
    const auto alloc = delta_of_lambda(u, solved.lambda);
    const auto grid = lambda_grid_search(u, total);
    for (std::size_t i = 0; i < u.size(); ++i) {
      worst = std::max(worst, std::abs(alloc.deltas[i] - grid.deltas[i]));
    }
    ++checked;
  }
  return {"waterfill_vs_grid_oracle", worst <= 1e-3,
          fmt("max |delta diff| %.3g over %.0f instances", worst, checked)};
}

CheckResult mc_vs_exact(std::uint64_t seed) {
  const MatrixGameSpec spec{4, RewardVariant::kLiteralSuffix};
  const JointPolicy joint = {Bernoulli{0.3}, Bernoulli{0.6}, Bernoulli{0.5}, Bernoulli{0.7}};
  const CriticBaseline critic{brute_force_value(spec, joint), 0.2};
  double worst_z = 0.0;
  for (int agent = 0; agent < spec.n_agents; ++agent) {
    Rng rng = make_stream(seed, {0, 9, static_cast<std::uint64_t>(agent), 0});
    const auto est = mc_advantage(spec, joint, {}, agent, 100000, critic, rng);
    const auto exact = brute_force_advantage(spec, joint, {}, agent);
    worst_z = std::max(worst_z, advantage_z_score(est, exact));
  }
  return {"mc_advantage_vs_enumeration", worst_z <= 3.0,
          fmt("max deviation %.3g standard errors (limit %.0f)", worst_z, 3.0)};
}

CheckResult kernels_vs_enumeration() {
  double worst = 0.0;
  for (auto variant : {RewardVariant::kLiteralSuffix, RewardVariant::kPrefixOnes}) {
    const MatrixGameSpec spec{6, variant};
    std::vector<double> p1 = {0.1, 0.9, 0.35, 0.5, 0.72, 0.01};
    JointPolicy joint;
    for (double p : p1) joint.push_back(Bernoulli{p});
    for (int agent = 0; agent < spec.n_agents; ++agent) {
      for (int a = 0; a < 2; ++a) {
        const double fast = kernels::conditional_reward_serial(spec, p1, agent, a);
        const double par = kernels::conditional_reward_parallel(spec, p1, agent, a);
        const double slow = brute_force_q(spec, joint, {}, agent, a);
        worst = std::max({worst, std::abs(fast - slow), std::abs(par - slow)});
      }
    }
  }
  return {"kernels_vs_enumeration", worst <= 1e-12,
          fmt("max |Q diff| %.3g (limit %.0e)", worst, 1e-12)};
}

}  // namespace

std::vector<CheckResult> run_selftest(std::uint64_t seed) {
  return {waterfill_vs_grid(seed), mc_vs_exact(seed), kernels_vs_enumeration()};
}

}  // namespace klb::oracles
