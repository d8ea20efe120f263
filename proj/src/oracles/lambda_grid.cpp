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
#include <limits>

#include "klbudget/allocation.hpp"
#include "klbudget/error.hpp"
#include "oracles/oracles.hpp"

namespace klb::oracles {
namespace {

constexpr std::size_t kChunk = 4096;

struct Best {
  std::size_t index = 0;
  double gap = std::numeric_limits<double>::infinity();
};

double max_utility(std::span<const double> u) {
  if (u.empty()) fail(ErrorKind::kEmptySystem, "no utilities");
  const double hi = *std::max_element(u.begin(), u.end());
  if (!(hi > 0.0)) fail(ErrorKind::kNoPositiveUtility, "no positive utility");
  return hi;
}

double grid_lambda(double log_lo, double log_step, std::size_t i) {
  return std::exp(log_lo + log_step * static_cast<double>(i));
}

double total_at(std::span<const double> u, double lambda) {
  double total = 0.0;
  for (double ui : u) total += std::max(0.0, ui / lambda - 1.0);
  return total;
}

Best scan(std::span<const double> u, double target, double log_lo, double log_step,
          std::size_t begin, std::size_t end) {
  Best best;
  for (std::size_t i = begin; i < end; ++i) {
    const double gap = std::abs(total_at(u, grid_lambda(log_lo, log_step, i)) - target);
    if (gap < best.gap) best = {i, gap};
  }
  return best;
}

GridResult finish(std::span<const double> u, double log_lo, double log_step,
                  std::size_t index) {
  GridResult r;
  r.lambda = grid_lambda(log_lo, log_step, index);
  const auto alloc = delta_of_lambda(u, r.lambda);
  r.deltas = alloc.deltas;
  r.total = alloc.total;
  return r;
}

}  // namespace

GridResult lambda_grid_search_serial(std::span<const double> utilities,
                                     double delta_total, std::size_t points) {
  const double hi = max_utility(utilities);
  if (points < 2) fail(ErrorKind::kInvalidParameter, "grid needs at least two points");
  const double log_lo = std::log(kGridLambdaMin);
  const double log_step = (std::log(hi) - log_lo) / static_cast<double>(points - 1);
  const Best best = scan(utilities, delta_total, log_lo, log_step, 0, points);
  return finish(utilities, log_lo, log_step, best.index);
}

GridResult lambda_grid_search(std::span<const double> utilities, double delta_total,
                              std::size_t points) {
  const double hi = max_utility(utilities);
  if (points < 2) fail(ErrorKind::kInvalidParameter, "grid needs at least two points");
  const double log_lo = std::log(kGridLambdaMin);
  const double log_step = (std::log(hi) - log_lo) / static_cast<double>(points - 1);
  const std::size_t chunks = (points + kChunk - 1) / kChunk;
  std::vector<Best> partial(chunks);

#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < chunks; ++c) {
    partial[c] = scan(utilities, delta_total, log_lo, log_step, c * kChunk,
                      std::min(points, (c + 1) * kChunk));
  }

  Best best;
  for (const auto& b : partial) {
    if (b.gap < best.gap) best = b;
  }
  return finish(utilities, log_lo, log_step, best.index);
}

}  // namespace klb::oracles
