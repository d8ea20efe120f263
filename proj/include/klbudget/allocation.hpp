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

#ifndef KLBUDGET_ALLOCATION_HPP
#define KLBUDGET_ALLOCATION_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "klbudget/advantage.hpp"
#include "klbudget/trust_step.hpp"

namespace klb {

enum class Strategy { kUniform, kGreedy, kWaterfill };

/// Update order plus per-agent KL thresholds for one iteration.
/// Agents missing from `order` have delta 0.
struct KLAllocation {
  std::vector<int> order;
  std::vector<double> deltas;
  double total_budget = 0.0;
  Strategy strategy = Strategy::kUniform;
  /// Water-filling found no positive utility and fell back to uniform.
  bool fallback_uniform = false;
};

KLAllocation allocate_uniform(std::size_t m, double delta_total);

struct LambdaAllocation {
  std::vector<double> deltas;
  double total = 0.0;
};

/// delta_i = max(0, U_i / lambda - 1).
LambdaAllocation delta_of_lambda(std::span<const double> utilities, double lambda);

struct LambdaSolve {
  double lambda = 0.0;
  double achieved_total = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline constexpr int kLambdaMaxIterations = 10000;

/// Bisection on lambda in (lo, max U]. The bracket is refined to machine
/// precision; `tol` is the acceptance test on |total - delta_total|.
LambdaSolve solve_lambda_bisection(std::span<const double> utilities,
                                   double delta_total, double tol = 0.01);

/// Fixed-point rule lambda <- lambda * total / delta_total. An iterate with
/// total 0 halves lambda instead.
LambdaSolve solve_lambda_multiplicative(std::span<const double> utilities,
                                        double delta_total, double tol,
                                        double lambda0,
                                        int max_iter = kLambdaMaxIterations);

enum class LambdaSolver { kBisection, kMultiplicative };
enum class LambdaInit { kLarge, kSmall };

struct WaterfillOptions {
  double tol = 0.01;
  LambdaSolver solver = LambdaSolver::kBisection;
  LambdaInit init = LambdaInit::kLarge;
  int max_iter = kLambdaMaxIterations;
  /// Use uniform allocation when no utility is positive (and bisection when the
  /// multiplicative rule fails to converge) instead of throwing.
  bool fallback = true;
};

double initial_lambda(std::span<const double> utilities, LambdaInit init);

KLAllocation allocate_waterfill(std::span<const double> utilities,
                                double delta_total,
                                const WaterfillOptions& options = {});

/// Best step of `agent` within `cap`, given the policies already committed
/// this round.
using CandidateEvaluator =
    std::function<StepResult(int agent, double cap, const UpdatedPrefix& committed)>;

struct GreedyResult {
  KLAllocation allocation;
  /// The committed step for every selected agent, indexed by agent.
  std::vector<std::optional<StepResult>> steps;
};

inline constexpr double kDefaultGreedyEpsilon = 1e-4;

/// Repeatedly scores every remaining agent as gain / (KL + epsilon) with the
/// remaining budget as cap, commits the best (lowest index on ties) and
/// charges its realized KL against the budget.
/// gain / (realized KL + epsilon)
double greedy_score(const StepResult& step, double epsilon = kDefaultGreedyEpsilon);

GreedyResult allocate_greedy(const CandidateEvaluator& evaluate, std::size_t m,
                             double delta_total,
                             double epsilon = kDefaultGreedyEpsilon);

}  // namespace klb

#endif  // KLBUDGET_ALLOCATION_HPP
