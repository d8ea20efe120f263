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
#include <random>

#include "klbudget/trust_step.hpp"
#include "test_util.hpp"

using namespace klb;

TEST_CASE("Bernoulli KL interval") {
  const auto zero = bernoulli_kl_interval(0.5, 0.0);
  CHECK(zero.lo == 0.5);
  CHECK(zero.hi == 0.5);
  const auto ball = bernoulli_kl_interval(0.5, 0.02);
  CHECK(ball.lo == doctest::Approx(0.4009917164479698).epsilon(1e-8));
  CHECK(ball.hi == doctest::Approx(0.5990082835520302).epsilon(1e-8));
  // KL(0.99 || ceil) = 0.082 clamps; KL(0.99 || floor) = 13.6 does not.
  const auto wide = bernoulli_kl_interval(0.99, 10.0);
  CHECK(wide.lo == doctest::Approx(3.8781124343771574e-05).epsilon(1e-6));
  CHECK(wide.hi == kProbCeil);
  const auto box = bernoulli_kl_interval(0.5, 20.0);
  CHECK(box.lo == kProbFloor);
  CHECK(box.hi == kProbCeil);
  CHECK_ERROR_KIND(bernoulli_kl_interval(0.0, 0.1), ErrorKind::kInvalidParameter);
}

TEST_CASE("Bernoulli step examples") {
  const auto up = bernoulli_step(0.5, 0.75, 0.02);
  CHECK(std::get<Bernoulli>(up.new_params).p1 == doctest::Approx(0.5990082835520302).epsilon(1e-8));
  CHECK(up.surrogate_gain == doctest::Approx(0.07425621266402262).epsilon(1e-7));
  CHECK(up.realized_kl <= 0.02 + 1e-9);

  const auto flat = bernoulli_step(0.5, 0.0, 0.3);
  CHECK(std::get<Bernoulli>(flat.new_params).p1 == 0.5);
  CHECK(flat.realized_kl == 0.0);

  const auto frozen = bernoulli_step(0.01, 1.0, 0.0);
  CHECK(std::get<Bernoulli>(frozen.new_params).p1 == 0.01);
}

TEST_CASE("Gaussian step examples") {
  const auto s = gaussian_step(1.0, 1.15, 2.3, 5e-4);
  CHECK(std::get<Gaussian1D>(s.new_params).mu == doctest::Approx(1.0363661930919363).epsilon(1e-12));
  CHECK(std::abs(s.realized_kl - 5e-4) < 1e-12);

  const auto still = gaussian_step(1.0, 1.15, 0.0, 0.7);
  CHECK(std::get<Gaussian1D>(still.new_params).mu == 1.0);
  CHECK(still.realized_kl == 0.0);

  const auto clipped = gaussian_step(6.99, 1.15, 10.0, 0.1);
  CHECK(std::get<Gaussian1D>(clipped.new_params).mu == 7.0);
  CHECK(clipped.realized_kl == doctest::Approx(3.780718336483933e-05).epsilon(1e-6));
  CHECK(clipped.realized_kl < 0.1);
}

TEST_CASE("trust steps respect the constraint and saturate") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> prob(kProbFloor, kProbCeil), gap(-2, 2),
      delta(0, 0.5), mu(0, 7);
  for (int k = 0; k < 3000; ++k) {
    const double p = prob(rng), g = gap(rng), d = delta(rng);
    const auto b = bernoulli_step(p, g, d);
    CHECK(b.realized_kl <= d + 1e-9);
    CHECK(b.surrogate_gain >= 0.0);
    const double q = std::get<Bernoulli>(b.new_params).p1;
    const bool at_bound = q == kProbFloor || q == kProbCeil;
    if (!at_bound && g != 0.0) CHECK(std::abs(b.realized_kl - d) <= 1e-9);

    const double m = mu(rng);
    const auto s = gaussian_step(m, 1.15, g, d);
    CHECK(s.realized_kl <= d + 1e-9);
    CHECK(s.surrogate_gain >= 0.0);
    const double m2 = std::get<Gaussian1D>(s.new_params).mu;
    if (m2 > 0.0 && m2 < 7.0 && g != 0.0) CHECK(std::abs(s.realized_kl - d) <= 1e-9);

    // Reversing the signal reflects an unclipped step.
    const auto r = gaussian_step(m, 1.15, -g, d);
    const double m3 = std::get<Gaussian1D>(r.new_params).mu;
    if (m2 > 0.0 && m2 < 7.0 && m3 > 0.0 && m3 < 7.0) {
      CHECK(m3 - m == doctest::Approx(m - m2).epsilon(1e-12));
    }
  }
}

TEST_CASE("surrogate gain is monotone in delta") {
  for (double p : {0.01, 0.3, 0.5, 0.97}) {
    for (double g : {-1.0, 0.4}) {
      double prev_b = 0.0, prev_g = 0.0;
      for (int k = 0; k <= 200; ++k) {
        const double d = 1e-4 * k * k;
        const double gb = bernoulli_step(p, g, d).surrogate_gain;
        const double gg = gaussian_step(7.0 * p, 1.15, g, d).surrogate_gain;
        CHECK(gb >= prev_b - 1e-12);
        CHECK(gg >= prev_g - 1e-12);
        prev_b = gb;
        prev_g = gg;
      }
    }
  }
}

TEST_CASE("trust_step dispatches on the family") {
  AdvantageEstimate exact;
  exact.per_action = ExactAdvantage{-0.375, 0.375, 0.5};
  const auto b = trust_step(Bernoulli{0.5}, exact, 0.02);
  CHECK(std::get<Bernoulli>(b.new_params).p1 > 0.5);

  AdvantageEstimate sampled;
  sampled.grad_estimate = -1.0;
  const auto g = trust_step(Gaussian1D{3.0, 1.15}, sampled, 0.02);
  CHECK(std::get<Gaussian1D>(g.new_params).mu < 3.0);
}
