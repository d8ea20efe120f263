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

#include "klbudget/trust_step.hpp"

#include <cmath>
#include <string>

#include "klbudget/error.hpp"

namespace klb {
namespace {

// KL(p || q) is increasing in |q - p| on each side of p. Walks from `inner`
// (feasible, q = p) towards `outer` (infeasible) and returns the feasible
// point within kKlBisectionTol of the boundary.
double bisect_boundary(double p, double delta, double inner, double outer) {
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (inner + outer);
    if (mid == inner || mid == outer) break;
    const double kl = bernoulli_kl(p, mid);
    if (kl <= delta) {
      inner = mid;
      if (delta - kl <= kKlBisectionTol) break;
    } else {
      outer = mid;
    }
  }
  return inner;
}

void check_delta(double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    fail(ErrorKind::kInvalidParameter, "KL threshold must be finite and nonnegative");
  }
}

}  // namespace

ProbabilityInterval bernoulli_kl_interval(double p, double delta) {
  if (!(p >= kProbFloor && p <= kProbCeil)) {
    fail(ErrorKind::kInvalidParameter,
         "probability " + std::to_string(p) + " outside the clip range");
  }
  check_delta(delta);
  if (delta == 0.0) return {p, p};

  ProbabilityInterval out{p, p};
  out.hi = bernoulli_kl(p, kProbCeil) <= delta
               ? kProbCeil
               : bisect_boundary(p, delta, p, kProbCeil);
  out.lo = bernoulli_kl(p, kProbFloor) <= delta
               ? kProbFloor
               : bisect_boundary(p, delta, p, kProbFloor);
  return out;
}

StepResult bernoulli_step(double p, double advantage_gap, double delta) {
  const auto ball = bernoulli_kl_interval(p, delta);
  double q = p;
  if (advantage_gap > 0.0) {
    q = ball.hi;
  } else if (advantage_gap < 0.0) {
    q = ball.lo;
  }
  StepResult r{Bernoulli{q}, 0.0, 0.0};
  if (q != p) {
    r.realized_kl = bernoulli_kl(p, q);
    r.surrogate_gain = advantage_gap * (q - p);
  }
  return r;
}

StepResult gaussian_step(double mu, double sigma, double grad_estimate,
                         double delta, ActionBounds bounds) {
  if (!(sigma > 0.0)) fail(ErrorKind::kInvalidParameter, "sigma must be positive");
  check_delta(delta);
  double mu_new = mu;
  if (grad_estimate != 0.0 && delta > 0.0) {
    const double radius = sigma * std::sqrt(2.0 * delta);
    mu_new = bounds.clamp(grad_estimate > 0.0 ? mu + radius : mu - radius);
  }
  StepResult r{Gaussian1D{mu_new, sigma}, 0.0, 0.0};
  if (mu_new != mu) {
    r.realized_kl = gaussian_kl(mu, mu_new, sigma);
    // An unclipped step realizes exactly delta; clamp the rounding in
    // (sigma * sqrt(2 delta))^2 / (2 sigma^2) so the hard constraint holds.
    if (r.realized_kl > delta) r.realized_kl = delta;
    r.surrogate_gain = grad_estimate * (mu_new - mu);
  }
  return r;
}

StepResult trust_step(const PolicyParams& policy, const AdvantageEstimate& est,
                      double delta, ActionBounds bounds) {
  const double signal = advantage_signal(est);
  if (const auto* b = std::get_if<Bernoulli>(&policy)) {
    return bernoulli_step(b->p1, signal, delta);
  }
  const auto& g = std::get<Gaussian1D>(policy);
  return gaussian_step(g.mu, g.sigma, signal, delta, bounds);
}

}  // namespace klb
