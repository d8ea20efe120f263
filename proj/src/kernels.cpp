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

#include "klbudget/kernels.hpp"

#include <cstdint>
#include <string>
#include <vector>

#include "klbudget/error.hpp"

namespace klb::kernels {
namespace {

void check_inputs(const MatrixGameSpec& spec, std::span<const double> p1,
                  int fixed_agent, int fixed_action) {
  spec.validate();
  if (static_cast<int>(p1.size()) != spec.n_agents) {
    fail(ErrorKind::kInputShape, "probability vector length " +
                                     std::to_string(p1.size()) +
                                     " does not match agent count");
  }
  if (fixed_agent != kNoFixedAgent &&
      (fixed_agent < 0 || fixed_agent >= spec.n_agents)) {
    fail(ErrorKind::kIndex, "agent index " + std::to_string(fixed_agent) +
                                " out of range");
  }
  if (fixed_agent != kNoFixedAgent && fixed_action != 0 && fixed_action != 1) {
    fail(ErrorKind::kInputShape, "fixed action must be 0 or 1");
  }
}

// Maps a compact index over the free agents to a full profile with the fixed
// agent's bit inserted.
inline std::uint32_t expand(std::uint32_t free_bits, int fixed_agent,
                            int fixed_action) noexcept {
  if (fixed_agent < 0) return free_bits;
  const std::uint32_t low_mask = (std::uint32_t{1} << fixed_agent) - 1;
  const std::uint32_t low = free_bits & low_mask;
  const std::uint32_t high = (free_bits & ~low_mask) << 1;
  return high | (std::uint32_t(fixed_action) << fixed_agent) | low;
}

inline double profile_term(std::uint32_t bits, const MatrixGameSpec& spec,
                           std::span<const double> p1, int fixed_agent) noexcept {
  const double r = matrix_reward_bits(bits, spec.n_agents, spec.reward_variant);
  if (r == 0.0) return 0.0;
  double w = r;
  for (int j = 0; j < spec.n_agents; ++j) {
    if (j == fixed_agent) continue;
    w *= (bits >> j) & 1u ? p1[j] : 1.0 - p1[j];
  }
  return w;
}

inline int free_agent_count(const MatrixGameSpec& spec, int fixed_agent) noexcept {
  return fixed_agent == kNoFixedAgent ? spec.n_agents : spec.n_agents - 1;
}

constexpr std::uint32_t kChunk = 1u << 10;

}  // namespace

double conditional_reward_serial(const MatrixGameSpec& spec,
                                 std::span<const double> p1, int fixed_agent,
                                 int fixed_action) {
  check_inputs(spec, p1, fixed_agent, fixed_action);
  const std::uint32_t count = std::uint32_t{1} << free_agent_count(spec, fixed_agent);
  double sum = 0.0;
  for (std::uint32_t k = 0; k < count; ++k) {
    sum += profile_term(expand(k, fixed_agent, fixed_action), spec, p1, fixed_agent);
  }
  return sum;
}

double conditional_reward_parallel(const MatrixGameSpec& spec,
                                   std::span<const double> p1, int fixed_agent,
                                   int fixed_action) {
  check_inputs(spec, p1, fixed_agent, fixed_action);
  const std::uint32_t count = std::uint32_t{1} << free_agent_count(spec, fixed_agent);
  const std::int64_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<double> partial(static_cast<std::size_t>(chunks), 0.0);

#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) {
    const std::uint32_t begin = static_cast<std::uint32_t>(c) * kChunk;
    const std::uint32_t end = begin + kChunk < count ? begin + kChunk : count;
    double s = 0.0;
    for (std::uint32_t k = begin; k < end; ++k) {
      s += profile_term(expand(k, fixed_agent, fixed_action), spec, p1, fixed_agent);
    }
    partial[static_cast<std::size_t>(c)] = s;
  }

  double sum = 0.0;
  for (double s : partial) sum += s;
  return sum;
}

double conditional_reward(const MatrixGameSpec& spec, std::span<const double> p1,
                          int fixed_agent, int fixed_action) {
  if (spec.n_agents >= kParallelMinAgents) {
    return conditional_reward_parallel(spec, p1, fixed_agent, fixed_action);
  }
  return conditional_reward_serial(spec, p1, fixed_agent, fixed_action);
}

}  // namespace klb::kernels
