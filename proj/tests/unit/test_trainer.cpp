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

#include <cmath>

#include "klbudget/trainer.hpp"
#include "oracles/oracles.hpp"
#include "test_util.hpp"

using namespace klb;

namespace {

RunConfig matrix_config(Strategy s, double delta, int iterations) {
  RunConfig c = default_config(EnvKind::kMatrix);
  c.strategy = s;
  c.delta_total = delta;
  c.iterations = iterations;
  return c;
}

double p1_of(const JointPolicy& j, int i) { return std::get<Bernoulli>(j[i]).p1; }

}  // namespace

TEST_CASE("environment defaults") {
  const auto m = default_config(EnvKind::kMatrix);
  CHECK(m.iterations == 1000);
  CHECK(m.batch_size == 20);
  CHECK(m.init_p1 == 0.01);
  CHECK(m.matrix.n_agents == 4);
  CHECK(m.strategy == Strategy::kWaterfill);
  CHECK(m.utility_mode == UtilityMode::kPositiveMean);
  CHECK(m.waterfill.tol == 0.01);
  CHECK(m.greedy_epsilon == 1e-4);
  const auto d = default_config(EnvKind::kDifferential);
  CHECK(d.iterations == 4000);
  CHECK(d.sigma == 1.15);
  CHECK(d.init_mean == std::array<double, 2>{1.0, 1.0});
  CHECK(d.critic_lr == 0.2);
  CHECK(d.agents() == 2);
}

TEST_CASE("config validation") {
  auto c = default_config(EnvKind::kMatrix);
  c.iterations = 0;
  CHECK_ERROR_KIND(c.validate(), ErrorKind::kInvalidParameter);
  c = default_config(EnvKind::kMatrix);
  c.delta_total = -1;
  CHECK_ERROR_KIND(c.validate(), ErrorKind::kInvalidParameter);
  c = default_config(EnvKind::kDifferential);
  c.sigma = 0;
  CHECK_ERROR_KIND(c.validate(), ErrorKind::kInvalidParameter);
}

TEST_CASE("uniform iteration respects per-agent budgets") {
  const auto c = matrix_config(Strategy::kUniform, 4e-3, 1);
  auto state = initial_state(c);
  const auto rec = run_iteration(state, c, 1);
  CHECK(rec.iteration == 1);
  for (double kl : rec.realized_kl) CHECK(kl <= 1e-3 + 1e-9);
}

TEST_CASE("zero budget leaves the policy unchanged") {
  auto c = matrix_config(Strategy::kUniform, 0.0, 1);
  auto state = initial_state(c);
  const auto before = state.joint;
  const auto rec = run_iteration(state, c, 1);
  CHECK(state.joint == before);
  for (double kl : rec.realized_kl) CHECK(kl == 0.0);
}

TEST_CASE("two-agent update follows the enumerated advantage signs") {
  auto c = matrix_config(Strategy::kUniform, 0.04, 1);
  c.matrix.n_agents = 2;
  c.init_p1 = 0.5;
  auto state = initial_state(c);
  const auto rec = run_iteration(state, c, 1);
  // Agent 1: A(1) = +0.375 moves p1 up to the edge of a 0.02 ball.
  CHECK(p1_of(state.joint, 0) == doctest::Approx(0.5990082835520302).epsilon(1e-8));
  // Agent 2 sees the updated agent 1: Q(1) = 1.5 q < 1 = Q(0), so p1 goes down.
  CHECK(p1_of(state.joint, 1) == doctest::Approx(0.4009917164479698).epsilon(1e-8));
  CHECK(rec.realized_kl[0] <= 0.02 + 1e-9);
  CHECK(rec.realized_kl[1] <= 0.02 + 1e-9);
}

TEST_CASE("prefix conditioning changes the advantage") {
  const MatrixGameSpec spec{3, RewardVariant::kLiteralSuffix};
  const JointPolicy joint{Bernoulli{0.2}, Bernoulli{0.7}, Bernoulli{0.4}};
  const auto alone = exact_agent_advantage(spec, joint, {}, 2);
  const auto after = exact_agent_advantage(spec, joint, {{0, Bernoulli{0.8}}}, 2);
  CHECK(alone.a1 != doctest::Approx(after.a1));
}

TEST_CASE("every strategy keeps the hard constraints") {
  for (auto s : {Strategy::kUniform, Strategy::kGreedy, Strategy::kWaterfill}) {
    const auto h = train(matrix_config(s, 4e-3, 200));
    REQUIRE(h.records.size() == 200);
    for (const auto& r : h.records) {
      double total = 0.0;
      for (std::size_t i = 0; i < r.realized_kl.size(); ++i) {
        CHECK(r.realized_kl[i] <= r.allocation.deltas[i] + 1e-9);
        total += r.realized_kl[i];
      }
      CHECK(total <= 4e-3 + 0.01);
    }
  }
}

TEST_CASE("differential runs keep the hard constraints") {
  auto c = default_config(EnvKind::kDifferential);
  c.iterations = 100;
  c.eval_episodes = 50;
  for (auto s : {Strategy::kUniform, Strategy::kGreedy, Strategy::kWaterfill}) {
    c.strategy = s;
    const auto h = train(c);
    for (const auto& r : h.records) {
      for (std::size_t i = 0; i < 2; ++i) CHECK(r.realized_kl[i] <= r.allocation.deltas[i] + 1e-9);
    }
  }
}

TEST_CASE("training is deterministic") {
  auto c = default_config(EnvKind::kDifferential);
  c.iterations = 50;
  c.eval_episodes = 20;
  c.seed = 5;
  const auto a = train(c), b = train(c);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    CHECK(a.records[k].policy_snapshot == b.records[k].policy_snapshot);
    CHECK(a.records[k].eval_reward == b.records[k].eval_reward);
    CHECK(a.records[k].realized_kl == b.records[k].realized_kl);
  }
  c.seed = 6;
  const auto other = train(c);
  CHECK(other.records.back().eval_reward != a.records.back().eval_reward);
}

TEST_CASE("parallel batch equals individual runs") {
  std::vector<RunConfig> configs;
  for (std::uint64_t s = 0; s < 3; ++s) {
    auto c = default_config(EnvKind::kDifferential);
    c.iterations = 30;
    c.eval_episodes = 10;
    c.seed = s;
    configs.push_back(c);
  }
  const auto batch = train_many(configs);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto single = train(configs[i]);
    CHECK(batch[i].records.back().policy_snapshot == single.records.back().policy_snapshot);
    CHECK(batch[i].records.back().eval_reward == single.records.back().eval_reward);
  }
}

TEST_CASE("history lengths") {
  CHECK(train(default_config(EnvKind::kMatrix)).records.size() == 1000);
  auto d = default_config(EnvKind::kDifferential);
  d.eval_episodes = 1;
  CHECK(train(d).records.size() == 4000);
}

TEST_CASE("evaluation") {
  Rng rng = make_stream(0, {4});
  const MatrixGameSpec spec{4, RewardVariant::kLiteralSuffix};
  const JointPolicy high(4, Bernoulli{kProbCeil}), low(4, Bernoulli{kProbFloor});
  CHECK(evaluate(spec, high, 1, rng, true) == doctest::Approx(1.5).epsilon(1e-5));
  CHECK(evaluate(spec, low, 1, rng, true) == doctest::Approx(1.0).epsilon(1e-5));
  const JointPolicy peak{Gaussian1D{5, 1.15}, Gaussian1D{5, 1.15}};
  const double v = evaluate(DifferentialGameSpec::standard(), peak, 100000, rng, false);
  // Quadrature of the clipped sampling distribution gives 6.67865.
  CHECK(std::abs(v - 6.678652) < 0.06);
}

TEST_CASE("small uniform steps rarely decrease the exact reward") {
  auto c = matrix_config(Strategy::kUniform, 4e-3, 400);
  const auto h = train(c);
  int decreases = 0;
  for (std::size_t k = 1; k < h.records.size(); ++k) {
    decreases += h.records[k].eval_reward < h.records[k - 1].eval_reward;
  }
  CHECK(decreases <= 1);
}
