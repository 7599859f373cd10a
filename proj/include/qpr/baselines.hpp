// Copyright 2026 The qpr Authors
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

// Real-valued WF/TWF/TAF and the two ways of treating a colour signal as
// real data: one problem per channel, or one problem on the stacked channels.

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qpr/dense.hpp"
#include "qpr/measurement.hpp"
#include "qpr/solver_types.hpp"

namespace qpr {

/// Real measurements y_k = (a_k^T x)^2 with standard normal A.
struct RealProblem {
  RMatrix a;
  RVector y;
  RVector amp;

  std::size_t n() const { return a.rows(); }
  std::size_t d() const { return a.cols(); }
};

RMatrix sample_real_gaussian(std::size_t n, std::size_t d, RandomStream& rng);
RealProblem make_real_problem(RMatrix a, const RVector& x);

enum class RealAlgorithm { wf, twf, taf };

std::string_view to_string(RealAlgorithm a);
std::optional<RealAlgorithm> parse_real_algorithm(std::string_view name);

/// Same parameter values as the quaternion counterparts (eta1 0.2 / 0.8 /
/// 1.2). With the shared gradient scaling these equal the step sizes of the
/// original real algorithms.
SolverConfig default_real_config(RealAlgorithm a);

/// min(||z - x||, ||z + x||).
double real_dist(const RVector& z, const RVector& x);

/// Runs the real solver. Control flow and update rules are those of the
/// quaternion solvers with every imaginary part zero.
RealRunTrace real_solver_run(const RealProblem& p, RealAlgorithm algo, const SolverConfig& cfg,
                             const RVector* truth = nullptr);

enum class ChannelMode { mono, concat };

struct ChannelLayout {
  ChannelMode mode = ChannelMode::concat;
  std::size_t d = 0;  // pixels per signal
};

/// `total` split into `parts` near-equal shares, the remainder going to the
/// first shares.
std::vector<std::size_t> split_budget(std::size_t total, std::size_t parts);

struct MultichannelResult {
  QVector estimate;  // pure
  double error = 0.0;
  std::chrono::nanoseconds wall_time{0};
};

/// Recovers a pure signal with real solvers.
///
/// mono: three d-dimensional problems (i, j, k channels) sharing the
/// `m_total` measurements; error sqrt(sum of squared per-channel dist_p).
/// concat: one 3d-dimensional problem on [x_i; x_j; x_k] with m_total
/// measurements; error dist_p on the stacked vector.
/// Ensembles are drawn from `seed`. Throws DivergenceError from the solvers.
MultichannelResult multichannel_recover(const QVector& x_pure, const ChannelLayout& layout, RealAlgorithm algo,
                                        std::size_t m_total, const SolverConfig& cfg, std::uint64_t seed);

}  // namespace qpr
