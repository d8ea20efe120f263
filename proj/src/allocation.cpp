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

#include "klbudget/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "klbudget/error.hpp"

namespace klb {
namespace {

double max_utility(std::span<const double> utilities) {
  if (utilities.empty()) fail(ErrorKind::kEmptySystem, "no agents to allocate to");
  return *std::max_element(utilities.begin(), utilities.end());
}

void check_budget(double delta_total) {
  if (!(delta_total >= 0.0) || !std::isfinite(delta_total)) {
    fail(ErrorKind::kInvalidParameter, "KL budget must be finite and nonnegative");
  }
}

double total_at(std::span<const double> utilities, double lambda) {
  double total = 0.0;
  for (double u : utilities) total += std::max(0.0, u / lambda - 1.0);
  return total;
}

}  // namespace

KLAllocation allocate_uniform(std::size_t m, double delta_total) {
  if (m == 0) fail(ErrorKind::kEmptySystem, "no agents to allocate to");
  check_budget(delta_total);
  KLAllocation a;
  a.order.resize(m);
  std::iota(a.order.begin(), a.order.end(), 0);
  a.deltas.assign(m, delta_total / static_cast<double>(m));
  a.total_budget = delta_total;
  a.strategy = Strategy::kUniform;
  return a;
}

LambdaAllocation delta_of_lambda(std::span<const double> utilities, double lambda) {
  if (!(lambda > 0.0)) {
    fail(ErrorKind::kInvalidMultiplier, "lambda must be positive");
  }
  LambdaAllocation out;
  out.deltas.reserve(utilities.size());
  for (double u : utilities) {
    const double d = std::max(0.0, u / lambda - 1.0);
    out.deltas.push_back(d);
    out.total += d;
  }
  return out;
}

LambdaSolve solve_lambda_bisection(std::span<const double> utilities,
                                   double delta_total, double tol) {
  const double u_max = max_utility(utilities);
  if (!(u_max > 0.0)) {
    fail(ErrorKind::kNoPositiveUtility, "water-filling needs a positive utility");
  }
  if (!(delta_total > 0.0)) {
    fail(ErrorKind::kInvalidParameter, "water-filling needs a positive budget");
  }

  LambdaSolve s;
  // total(hi) = 0 < delta_total; shrink lo until total(lo) >= delta_total.
  double hi = u_max;
  double lo = 0.5 * u_max;
  while (total_at(utilities, lo) < delta_total) {
    hi = lo;
    lo *= 0.5;
    if (++s.iterations >= kLambdaMaxIterations || lo == 0.0) {
      fail(ErrorKind::kSolverFailure, "could not bracket lambda");
    }
  }
  while (s.iterations < kLambdaMaxIterations) {
    ++s.iterations;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double t = total_at(utilities, mid);
    if (t == delta_total) {
      lo = hi = mid;
      break;
    }
    (t > delta_total ? lo : hi) = mid;
  }
  const double t_lo = total_at(utilities, lo);
  const double t_hi = total_at(utilities, hi);
  // Prefer the side that does not overshoot the budget when both are tight.
  if (std::abs(t_hi - delta_total) <= std::abs(t_lo - delta_total)) {
    s.lambda = hi;
    s.achieved_total = t_hi;
  } else {
    s.lambda = lo;
    s.achieved_total = t_lo;
  }
  s.converged = std::abs(s.achieved_total - delta_total) < tol;
  if (!s.converged) {
    fail(ErrorKind::kSolverFailure, "lambda bisection did not reach the tolerance");
  }
  return s;
}

LambdaSolve solve_lambda_multiplicative(std::span<const double> utilities,
                                        double delta_total, double tol,
                                        double lambda0, int max_iter) {
  const double u_max = max_utility(utilities);
  if (!(u_max > 0.0)) {
    fail(ErrorKind::kNoPositiveUtility, "water-filling needs a positive utility");
  }
  if (!(lambda0 > 0.0)) fail(ErrorKind::kInvalidMultiplier, "lambda0 must be positive");
  if (!(delta_total > 0.0)) {
    fail(ErrorKind::kInvalidParameter, "water-filling needs a positive budget");
  }

  LambdaSolve s;
  double lambda = lambda0;
  for (s.iterations = 0; s.iterations < max_iter; ++s.iterations) {
    const double total = total_at(utilities, lambda);
    s.lambda = lambda;
    s.achieved_total = total;
    if (std::abs(total - delta_total) < tol) {
      s.converged = true;
      return s;
    }
    if (total == 0.0) {
      lambda *= 0.5;
    } else {
      lambda *= total / delta_total;
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) break;
  }
  s.converged = false;
  return s;
}

double initial_lambda(std::span<const double> utilities, LambdaInit init) {
  const double u_max = max_utility(utilities);
  return init == LambdaInit::kLarge ? 10.0 * u_max : 1e-3 * u_max;
}

KLAllocation allocate_waterfill(std::span<const double> utilities,
                                double delta_total,
                                const WaterfillOptions& options) {
  const std::size_t m = utilities.size();
  if (m == 0) fail(ErrorKind::kEmptySystem, "no agents to allocate to");
  check_budget(delta_total);

  const bool any_positive =
      std::any_of(utilities.begin(), utilities.end(), [](double u) { return u > 0.0; });
  if (!any_positive || delta_total == 0.0) {
    if (!options.fallback && delta_total > 0.0) {
      fail(ErrorKind::kNoPositiveUtility, "no agent has positive utility");
    }
    KLAllocation a = allocate_uniform(m, delta_total);
    a.strategy = Strategy::kWaterfill;
    a.fallback_uniform = !any_positive;
    return a;
  }

  double lambda;
  if (options.solver == LambdaSolver::kMultiplicative) {
    const auto s = solve_lambda_multiplicative(utilities, delta_total, options.tol,
                                               initial_lambda(utilities, options.init),
                                               options.max_iter);
    if (s.converged) {
      lambda = s.lambda;
    } else if (options.fallback) {
      lambda = solve_lambda_bisection(utilities, delta_total, options.tol).lambda;
    } else {
      fail(ErrorKind::kSolverFailure, "multiplicative lambda update did not converge");
    }
  } else {
    lambda = solve_lambda_bisection(utilities, delta_total, options.tol).lambda;
  }

  KLAllocation a;
  a.deltas = delta_of_lambda(utilities, lambda).deltas;
  a.order.resize(m);
  std::iota(a.order.begin(), a.order.end(), 0);
  std::stable_sort(a.order.begin(), a.order.end(),
                   [&](int x, int y) { return utilities[x] > utilities[y]; });
  a.total_budget = delta_total;
  a.strategy = Strategy::kWaterfill;
  return a;
}

double greedy_score(const StepResult& step, double epsilon) {
  return step.surrogate_gain / (step.realized_kl + epsilon);
}

GreedyResult allocate_greedy(const CandidateEvaluator& evaluate, std::size_t m,
                             double delta_total, double epsilon) {
  if (m == 0) fail(ErrorKind::kEmptySystem, "no agents to allocate to");
  check_budget(delta_total);
  if (!(epsilon > 0.0)) fail(ErrorKind::kInvalidParameter, "epsilon must be positive");

  GreedyResult out;
  out.allocation.deltas.assign(m, 0.0);
  out.allocation.total_budget = delta_total;
  out.allocation.strategy = Strategy::kGreedy;
  out.steps.assign(m, std::nullopt);

  std::vector<int> remaining(m);
  std::iota(remaining.begin(), remaining.end(), 0);
  UpdatedPrefix committed;
  double budget = delta_total;

  while (!remaining.empty() && budget > 0.0) {
    std::size_t best_pos = 0;
    double best_score = 0.0;
    std::optional<StepResult> best_step;
    for (std::size_t k = 0; k < remaining.size(); ++k) {
      StepResult step = evaluate(remaining[k], budget, committed);
      const double score = greedy_score(step, epsilon);
      // `remaining` stays sorted, so a strict comparison keeps the lowest index.
      if (!best_step || score > best_score) {
        best_pos = k;
        best_score = score;
        best_step = std::move(step);
      }
    }
    const int agent = remaining[best_pos];
    out.allocation.order.push_back(agent);
    out.allocation.deltas[agent] = best_step->realized_kl;
    committed.push_back({agent, best_step->new_params});
    budget = std::max(0.0, budget - best_step->realized_kl);
    out.steps[agent] = std::move(best_step);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));
  }
  return out;
}

}  // namespace klb
