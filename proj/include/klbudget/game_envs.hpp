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

#ifndef KLBUDGET_GAME_ENVS_HPP
#define KLBUDGET_GAME_ENVS_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

namespace klb {

// ---------------------------------------------------------------------------
// N-agent sparse-reward matrix game.
//
// Every agent picks a binary action. The joint reward is 1.5 when all agents
// play 1. Otherwise it is 1 or 0 depending on the variant:
//   literal_suffix: 1 iff some a_j = 0 with a_k = 0 for every k > j, which
//                   reduces to "the last agent plays 0";
//   prefix_ones:    1 iff the profile is 1...10...0 with a nonempty zero tail.
// ---------------------------------------------------------------------------

enum class RewardVariant { kLiteralSuffix, kPrefixOnes };

inline constexpr double kMatrixMaxReward = 1.5;
inline constexpr int kMaxEnumerationAgents = 20;

struct MatrixGameSpec {
  int n_agents = 4;
  RewardVariant reward_variant = RewardVariant::kLiteralSuffix;

  void validate() const;
};

/// One binary action per agent, agent 0 first.
using DiscreteProfile = std::vector<std::uint8_t>;

double matrix_reward(std::span<const std::uint8_t> profile,
                     const MatrixGameSpec& spec);

/// Bit-packed form used by the enumeration kernels: bit i is agent i's action.
/// No validation; n must be in [1, 31].
double matrix_reward_bits(std::uint32_t bits, int n,
                          RewardVariant variant) noexcept;

/// All 2^n profiles, ordered by their bit-packed index (agent 0 is the low bit).
std::vector<DiscreteProfile> enumerate_profiles(int n);

// ---------------------------------------------------------------------------
// Two-player differential game on [0, 7]^2: a sum of unnormalized axis-aligned
// Gaussian bumps plus a linear term in a1.
// ---------------------------------------------------------------------------

struct GaussianBump {
  double weight;
  std::array<double, 2> mean;
  std::array<double, 2> stddev;
};

struct ActionBounds {
  double lo = 0.0;
  double hi = 7.0;

  bool contains(double a) const noexcept { return a >= lo && a <= hi; }
  double clamp(double a) const noexcept;
};

struct ContinuousAction {
  double a1;
  double a2;
};

struct DifferentialGameSpec {
  std::vector<GaussianBump> bumps;
  double linear_coef = 0.0;
  ActionBounds bounds;

  /// Global bump of height 10 at (5,5) with stddev (1,3), local bump of
  /// height 5.3 at (1,1) with stddev (1,1), and 0.1 * a1.
  static DifferentialGameSpec standard();
  void validate() const;
};

double differential_reward(ContinuousAction a, const DifferentialGameSpec& spec);

/// Same surface without the bounds check, for callers that already clipped.
double differential_reward_unchecked(ContinuousAction a,
                                     const DifferentialGameSpec& spec) noexcept;

/// Dumps a resolution x resolution grid over the action box as CSV with
/// header "a1,a2,reward".
void write_reward_surface_csv(std::ostream& out,
                              const DifferentialGameSpec& spec,
                              int resolution = 141);

using GameSpec = std::variant<MatrixGameSpec, DifferentialGameSpec>;

int agent_count(const GameSpec& game);

}  // namespace klb

#endif  // KLBUDGET_GAME_ENVS_HPP
