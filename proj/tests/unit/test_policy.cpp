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

#include "klbudget/policy.hpp"
#include "test_util.hpp"

using namespace klb;

TEST_CASE("closed-form KL values") {
  CHECK(kl_divergence(Bernoulli{0.5}, Bernoulli{0.5}) == 0.0);
  CHECK(kl_divergence(Gaussian1D{1, 1.15}, Gaussian1D{2, 1.15}) ==
        doctest::Approx(0.37807183364839325).epsilon(1e-12));
  CHECK(kl_divergence(Bernoulli{0.99}, Bernoulli{0.5}) ==
        doctest::Approx(0.637145646205098).epsilon(1e-12));
}

TEST_CASE("KL rejects mismatched pairs") {
  CHECK_ERROR_KIND(kl_divergence(Bernoulli{0.5}, Gaussian1D{1, 1}), ErrorKind::kInvalidPair);
  CHECK_ERROR_KIND(kl_divergence(Gaussian1D{1, 1}, Gaussian1D{1, 2}), ErrorKind::kInvalidPair);
}

TEST_CASE("KL is nonnegative and zero on the diagonal") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> prob(kProbFloor, kProbCeil), mu(-5, 10);
  for (int k = 0; k < 2000; ++k) {
    const double p = prob(rng), q = prob(rng);
    CHECK(kl_divergence(Bernoulli{p}, Bernoulli{q}) >= 0.0);
    CHECK(kl_divergence(Bernoulli{p}, Bernoulli{p}) == doctest::Approx(0.0).epsilon(1e-15));
    const double a = mu(rng), b = mu(rng);
    CHECK(kl_divergence(Gaussian1D{a, 1.15}, Gaussian1D{b, 1.15}) >= 0.0);
    CHECK(kl_divergence(Gaussian1D{a, 1.15}, Gaussian1D{b, 1.15}) ==
          kl_divergence(Gaussian1D{b, 1.15}, Gaussian1D{a, 1.15}));
  }
  CHECK(bernoulli_kl(0.9, 0.5) != doctest::Approx(bernoulli_kl(0.5, 0.9)));
}

TEST_CASE("Gaussian KL grows with distance") {
  double prev = 0.0;
  for (int k = 1; k < 50; ++k) {
    const double kl = gaussian_kl(1.0, 1.0 + 0.1 * k, 1.15);
    CHECK(kl > prev);
    prev = kl;
  }
}

TEST_CASE("Bernoulli sampling") {
  Rng rng = make_stream(1, {0});
  int ones = 0;
  for (int k = 0; k < 10000; ++k) ones += sample_action(Bernoulli{kProbCeil}, rng) == 1.0;
  CHECK(ones >= 9990);
  int rare = 0;
  for (int k = 0; k < 10000; ++k) rare += sample_action(Bernoulli{kProbFloor}, rng) == 1.0;
  CHECK(rare <= 1);
}

TEST_CASE("Gaussian sampling mean and clipping") {
  Rng rng = make_stream(2, {0});
  double sum = 0.0;
  for (int k = 0; k < 100000; ++k) sum += sample_action(Gaussian1D{3.5, 1.15}, rng);
  CHECK(std::abs(sum / 1e5 - 3.5) < 0.02);
  for (int k = 0; k < 1000; ++k) {
    const double a = sample_action(Gaussian1D{0.0, 1.15}, rng);
    CHECK((a >= 0.0 && a <= 7.0));
  }
}

TEST_CASE("score function") {
  CHECK(grad_log_prob(Gaussian1D{2, 1}, 2) == 0.0);
  CHECK(grad_log_prob(Gaussian1D{2, 1.15}, 3) == doctest::Approx(0.7561436672967864).epsilon(1e-12));
  CHECK(grad_log_prob(Gaussian1D{2, 1.15}, 1) == doctest::Approx(-0.7561436672967864).epsilon(1e-12));
  CHECK_ERROR_KIND(grad_log_prob(Bernoulli{0.5}, 1), ErrorKind::kUnsupportedFamily);

  // Unclipped draws: the score has mean zero.
  Rng rng = make_stream(5, {0});
  std::normal_distribution<double> normal(3.5, 1.15);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const double g = grad_log_prob(Gaussian1D{3.5, 1.15}, normal(rng));
    sum += g;
    sq += g * g;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(mean) < 5 * se);
}

TEST_CASE("streams are deterministic and distinct") {
  Rng a = make_stream(9, {1, 2, 3}), b = make_stream(9, {1, 2, 3}), c = make_stream(9, {1, 2, 4});
  const auto x = a(), y = b(), z = c();
  CHECK(x == y);
  CHECK(x != z);
  CHECK(clip_probability(0.0) == kProbFloor);
  CHECK(clip_probability(1.0) == kProbCeil);
}
