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

#include "klbudget/game_envs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "klbudget/error.hpp"

namespace klb {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInputShape: return "input-shape";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kEnumerationLimit: return "enumeration-limit";
    case ErrorKind::kInvalidPair: return "invalid-pair";
    case ErrorKind::kUnsupportedFamily: return "unsupported-family";
    case ErrorKind::kUnsupportedEnvironment: return "unsupported-environment";
    case ErrorKind::kIndex: return "index";
    case ErrorKind::kInvalidBatch: return "invalid-batch";
    case ErrorKind::kInsufficientData: return "insufficient-data";
    case ErrorKind::kInvalidParameter: return "invalid-parameter";
    case ErrorKind::kEmptySystem: return "empty-system";
    case ErrorKind::kInvalidMultiplier: return "invalid-multiplier";
    case ErrorKind::kNoPositiveUtility: return "no-positive-utility";
    case ErrorKind::kSolverFailure: return "solver-failure";
    case ErrorKind::kInvalidHistory: return "invalid-history";
    case ErrorKind::kExport: return "export";
    case ErrorKind::kParse: return "parse";
  }
  return "unknown";
}

void MatrixGameSpec::validate() const {
  if (n_agents < 2) {
    fail(ErrorKind::kInvalidParameter,
         "matrix game needs at least 2 agents, got " + std::to_string(n_agents));
  }
  if (n_agents > kMaxEnumerationAgents) {
    fail(ErrorKind::kEnumerationLimit,
         "matrix game supports at most " +
             std::to_string(kMaxEnumerationAgents) + " agents");
  }
}

double matrix_reward_bits(std::uint32_t bits, int n,
                          RewardVariant variant) noexcept {
  const std::uint32_t all = (std::uint32_t{1} << n) - 1;
  if (bits == all) return kMatrixMaxReward;
  if (variant == RewardVariant::kLiteralSuffix) {
    return (bits >> (n - 1)) & 1u ? 0.0 : 1.0;
  }
  // 1...10...0 with agent 0 in the low bit is exactly a mask of the form 2^k - 1.
  return (bits & (bits + 1)) == 0 ? 1.0 : 0.0;
}

double matrix_reward(std::span<const std::uint8_t> profile,
                     const MatrixGameSpec& spec) {
  if (static_cast<int>(profile.size()) != spec.n_agents) {
    fail(ErrorKind::kInputShape,
         "profile has " + std::to_string(profile.size()) + " actions, game has " +
             std::to_string(spec.n_agents) + " agents");
  }
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (profile[i] > 1) {
      fail(ErrorKind::kInputShape, "profile entries must be 0 or 1");
    }
    bits |= std::uint32_t{profile[i]} << i;
  }
  return matrix_reward_bits(bits, spec.n_agents, spec.reward_variant);
}

std::vector<DiscreteProfile> enumerate_profiles(int n) {
  if (n < 1) fail(ErrorKind::kInvalidParameter, "profile length must be positive");
  if (n > kMaxEnumerationAgents) {
    fail(ErrorKind::kEnumerationLimit,
         "refusing to enumerate 2^" + std::to_string(n) + " profiles");
  }
  const std::uint32_t count = std::uint32_t{1} << n;
  std::vector<DiscreteProfile> out;
  out.reserve(count);
  for (std::uint32_t bits = 0; bits < count; ++bits) {
    DiscreteProfile p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[i] = static_cast<std::uint8_t>((bits >> i) & 1u);
    out.push_back(std::move(p));
  }
  return out;
}

double ActionBounds::clamp(double a) const noexcept {
  return std::clamp(a, lo, hi);
}

DifferentialGameSpec DifferentialGameSpec::standard() {
  DifferentialGameSpec spec;
  spec.bumps = {
      GaussianBump{10.0, {5.0, 5.0}, {1.0, 3.0}},
      GaussianBump{5.3, {1.0, 1.0}, {1.0, 1.0}},
  };
  spec.linear_coef = 0.1;
  return spec;
}

void DifferentialGameSpec::validate() const {
  if (!(bounds.lo < bounds.hi)) {
    fail(ErrorKind::kInvalidParameter, "action bounds must satisfy lo < hi");
  }
  for (const auto& b : bumps) {
    if (!(b.stddev[0] > 0.0) || !(b.stddev[1] > 0.0)) {
      fail(ErrorKind::kInvalidParameter, "bump standard deviations must be positive");
    }
  }
}

double differential_reward_unchecked(ContinuousAction a,
                                     const DifferentialGameSpec& spec) noexcept {
  double r = spec.linear_coef * a.a1;
  for (const auto& b : spec.bumps) {
    const double z1 = (a.a1 - b.mean[0]) / b.stddev[0];
    const double z2 = (a.a2 - b.mean[1]) / b.stddev[1];
    r += b.weight * std::exp(-0.5 * (z1 * z1 + z2 * z2));
  }
  return r;
}

double differential_reward(ContinuousAction a, const DifferentialGameSpec& spec) {
  if (!spec.bounds.contains(a.a1) || !spec.bounds.contains(a.a2)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "action (%g, %g) outside [%g, %g]^2", a.a1,
                  a.a2, spec.bounds.lo, spec.bounds.hi);
    fail(ErrorKind::kDomain, buf);
  }
  return differential_reward_unchecked(a, spec);
}

void write_reward_surface_csv(std::ostream& out, const DifferentialGameSpec& spec,
                              int resolution) {
  if (resolution < 2) {
    fail(ErrorKind::kInvalidParameter, "surface resolution must be at least 2");
  }
  const double lo = spec.bounds.lo;
  const double step = (spec.bounds.hi - lo) / (resolution - 1);
  out << "a1,a2,reward\n";
  char buf[96];
  for (int i = 0; i < resolution; ++i) {
    // Last index lands exactly on the upper bound.
    const double a1 = i + 1 == resolution ? spec.bounds.hi : lo + i * step;
    for (int j = 0; j < resolution; ++j) {
      const double a2 = j + 1 == resolution ? spec.bounds.hi : lo + j * step;
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", a1, a2,
                    differential_reward_unchecked({a1, a2}, spec));
      out << buf;
    }
  }
}

int agent_count(const GameSpec& game) {
  if (const auto* m = std::get_if<MatrixGameSpec>(&game)) return m->n_agents;
  return 2;
}

}  // namespace klb
