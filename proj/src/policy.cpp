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

#include "klbudget/policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "klbudget/error.hpp"

namespace klb {

Rng make_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 1));
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto v : path) push(v);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

double clip_probability(double p) noexcept {
  return std::clamp(p, kProbFloor, kProbCeil);
}

double bernoulli_kl(double p, double q) {
  if (!(p > 0.0 && p < 1.0 && q > 0.0 && q < 1.0)) {
    fail(ErrorKind::kInvalidParameter,
         "Bernoulli KL needs probabilities strictly inside (0, 1)");
  }
  if (p == q) return 0.0;
  const double kl = p * std::log(p / q) + (1.0 - p) * std::log1p(-p) -
                    (1.0 - p) * std::log1p(-q);
  return std::max(kl, 0.0);
}

double gaussian_kl(double mu_old, double mu_new, double sigma) {
  const double d = mu_old - mu_new;
  return d * d / (2.0 * sigma * sigma);
}

namespace {

struct KlVisitor {
  double operator()(const Bernoulli& a, const Bernoulli& b) const {
    return bernoulli_kl(a.p1, b.p1);
  }
  double operator()(const Gaussian1D& a, const Gaussian1D& b) const {
    if (a.sigma != b.sigma) {
      fail(ErrorKind::kInvalidPair, "Gaussian KL requires equal sigmas");
    }
    if (!(a.sigma > 0.0)) fail(ErrorKind::kInvalidParameter, "sigma must be positive");
    return gaussian_kl(a.mu, b.mu, a.sigma);
  }
  template <class A, class B>
  double operator()(const A&, const B&) const {
    fail(ErrorKind::kInvalidPair, "KL between different policy families");
  }
};

}  // namespace

double kl_divergence(const PolicyParams& old, const PolicyParams& updated) {
  return std::visit(KlVisitor{}, old, updated);
}

double sample_action(const PolicyParams& policy, Rng& rng, ActionBounds bounds) {
  if (const auto* b = std::get_if<Bernoulli>(&policy)) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return u(rng) < b->p1 ? 1.0 : 0.0;
  }
  const auto& g = std::get<Gaussian1D>(policy);
  std::normal_distribution<double> n(g.mu, g.sigma);
  return bounds.clamp(n(rng));
}

double grad_log_prob(const PolicyParams& policy, double action) {
  const auto* g = std::get_if<Gaussian1D>(&policy);
  if (g == nullptr) {
    fail(ErrorKind::kUnsupportedFamily,
         "score function is only defined for Gaussian policies");
  }
  return (action - g->mu) / (g->sigma * g->sigma);
}

double action_probability(const Bernoulli& policy, int action) noexcept {
  return action == 1 ? policy.p1 : 1.0 - policy.p1;
}

double primary_parameter(const PolicyParams& policy) noexcept {
  if (const auto* b = std::get_if<Bernoulli>(&policy)) return b->p1;
  return std::get<Gaussian1D>(policy).mu;
}

bool is_bernoulli(const JointPolicy& joint) noexcept {
  return !joint.empty() && std::holds_alternative<Bernoulli>(joint.front());
}

}  // namespace klb
