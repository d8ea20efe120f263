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

#ifndef KLBUDGET_KERNELS_HPP
#define KLBUDGET_KERNELS_HPP

#include <span>

#include "klbudget/game_envs.hpp"

// Exact expectations of the matrix-game reward over all 2^N joint profiles.
// Each kernel has a serial reference and an OpenMP version. The parallel
// version sums fixed-size chunks in a fixed order, so its result does not
// depend on the thread count (it may differ from the serial sum in the last
// few ulps).
namespace klb::kernels {

/// Pass as `fixed_agent` to marginalize over every agent.
inline constexpr int kNoFixedAgent = -1;

/// Sum over profiles of prod_{j != fixed} pi_j(a_j) * R(a), restricted to
/// profiles where `fixed_agent` plays `fixed_action`. With kNoFixedAgent this
/// is E[R] under the product policy. `p1[j]` is agent j's probability of 1.
double conditional_reward_serial(const MatrixGameSpec& spec,
                                 std::span<const double> p1, int fixed_agent,
                                 int fixed_action);

double conditional_reward_parallel(const MatrixGameSpec& spec,
                                   std::span<const double> p1, int fixed_agent,
                                   int fixed_action);

/// Chooses the parallel kernel once the profile count makes it worthwhile.
double conditional_reward(const MatrixGameSpec& spec, std::span<const double> p1,
                          int fixed_agent, int fixed_action);

inline constexpr int kParallelMinAgents = 14;

}  // namespace klb::kernels

#endif  // KLBUDGET_KERNELS_HPP
