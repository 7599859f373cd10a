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

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qpr/dense.hpp"
#include "qpr/measurement.hpp"
#include "qpr/solver_types.hpp"

namespace qpr {

/// Quaternion phase-retrieval solvers.
///
/// qwf/qtwf/qtaf recover a general signal up to a right unit factor;
/// the p-prefixed variants purify every `tp` updates and recover a pure
/// signal up to sign. The last three are comparison baselines: QWF followed
/// by one purification, PQWF purifying by dropping the real part, and QWF
/// followed by dropping the real part.
enum class Algorithm {
  qwf,
  pqwf,
  qtwf,
  qtaf,
  pqtwf,
  pqtaf,
  qwf_purify_end,
  pqwf_drop_real,
  qwf_drop_real,
};

std::string_view to_string(Algorithm a);
std::optional<Algorithm> parse_algorithm(std::string_view name);

/// True for algorithms whose output is a pure quaternion signal.
bool is_pure_algorithm(Algorithm a);

/// Defaults used in the reference experiments: QWF eta1 = 0.2, PQWF 0.15,
/// (theta_z_lb, theta_z_ub, theta_h, theta_y, eta) = (0.3, 4.5, 5, 3, 0.8) for
/// the TWF family and (gamma, rho, eta) = (0.8, 1/6, 1.2) for the TAF family.
SolverConfig default_config(Algorithm a);

/// ||z - x sign(x^* z)||, the distance modulo a right unit factor.
double dist(const QVector& z, const QVector& x);

/// min(||z + x||, ||z - x||).
double dist_p(const QVector& z, const QVector& x);

QVector wf_gradient(const Ensemble& e, const Observations& obs, const QVector& z,
                    kernels::Backend b = kernels::Backend::parallel);
QVector qtwf_gradient(const Ensemble& e, const Observations& obs, const QVector& z, const SolverConfig& cfg);
QVector qtaf_gradient(const Ensemble& e, const Observations& obs, const QVector& z, double gamma,
                      kernels::Backend b = kernels::Backend::parallel);

/// lambda0 * top eigenvector of (1/n) sum_k y_k alpha_k alpha_k^*, with
/// lambda0 = sqrt(mean y).
QVector spectral_init(const Ensemble& e, const Observations& obs, int power_iters = 100,
                      kernels::Backend b = kernels::Backend::parallel);

/// Rows with y_k <= theta_y^2 lambda0^2.
std::vector<std::size_t> qtwf_selection(const Observations& obs, double theta_y);
QVector qtwf_init(const Ensemble& e, const Observations& obs, double theta_y, int power_iters = 100,
                  kernels::Backend b = kernels::Backend::parallel);

/// The ceil(rho n) rows with the largest y'_k / ||alpha_k||.
std::vector<std::size_t> qtaf_selection(const Ensemble& e, const Observations& obs, double rho);
QVector qtaf_init(const Ensemble& e, const Observations& obs, double rho, int power_iters = 100,
                  kernels::Backend b = kernels::Backend::parallel);

/// Unit q minimizing ||Re(z q)||, from the smallest eigenvector w of
/// V(z)^T V(z): q = (w0, -w1, -w2, -w3). Throws std::domain_error for z = 0.
Quaternion phase_factor_estimate(const QVector& z);

/// Im(z * phase_factor_estimate(z)); exactly pure.
QVector purify(const QVector& z);

/// With the nonnegativity prior, returns whichever of z, -z has the larger
/// sum of imaginary components; otherwise z unchanged.
QVector sign_align(const QVector& z, bool nonneg_prior);

/// One in-place solver update.
using StepFn = std::function<void(QVector&)>;

enum class Purifier { phase_estimate, drop_real };

/// Runs cfg.iters rounds of cfg.tp inner updates, each round followed by
/// purification. Trace points sit at round boundaries (iter = round * tp)
/// and measure dist_p.
RunTrace pure_wrap(const StepFn& inner_step, const Ensemble& e, const Observations& obs, QVector z0,
                   const SolverConfig& cfg, const QVector* truth = nullptr,
                   Purifier purifier = Purifier::phase_estimate);

RunTrace qwf_run(const Ensemble& e, const Observations& obs, const SolverConfig& cfg,
                 const QVector* truth = nullptr);
RunTrace qtwf_run(const Ensemble& e, const Observations& obs, const SolverConfig& cfg,
                  const QVector* truth = nullptr);
RunTrace qtaf_run(const Ensemble& e, const Observations& obs, const SolverConfig& cfg,
                  const QVector* truth = nullptr);
RunTrace pqwf_run(const Ensemble& e, const Observations& obs, const SolverConfig& cfg,
                  const QVector* truth = nullptr);
RunTrace pqtwf_run(const Ensemble& e, const Observations& obs, const SolverConfig& cfg,
                   const QVector* truth = nullptr);
RunTrace pqtaf_run(const Ensemble& e, const Observations& obs, const SolverConfig& cfg,
                   const QVector* truth = nullptr);

/// Dispatches to the solver for `a`. For pure algorithms final_error uses
/// dist_p, otherwise dist.
RunTrace run_algorithm(Algorithm a, const Ensemble& e, const Observations& obs, const SolverConfig& cfg,
                       const QVector* truth = nullptr);

}  // namespace qpr
