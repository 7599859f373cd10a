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

// Scalar-generic flow machinery. Instantiated for Quaternion (the solvers in
// algorithms.hpp) and for double (the real baselines), so both share one
// control flow.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qpr/dense.hpp"
#include "qpr/detail/power.hpp"
#include "qpr/kernels.hpp"
#include "qpr/solver_types.hpp"

namespace qpr::detail {

template <class T>
struct PhaseData {
  const DenseMatrix<T>& a;
  const RVector& y;
  const RVector& amp;

  std::size_t n() const { return a.rows(); }
  std::size_t d() const { return a.cols(); }
};

enum class ErrorMetric { phase, sign };

/// min over unit w of ||z - x w||, attained at w = sign(x^* z).
template <class T>
double dist(const DenseVector<T>& z, const DenseVector<T>& x) {
  if (z.size() != x.size()) throw std::invalid_argument("qpr::dist: length mismatch");
  const auto w = sign(inner(x, z));
  double s = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) s += abs2(z[j] - x[j] * w);
  return std::sqrt(s);
}

template <class T>
double dist_p(const DenseVector<T>& z, const DenseVector<T>& x) {
  if (z.size() != x.size()) throw std::invalid_argument("qpr::dist_p: length mismatch");
  double plus = 0.0;
  double minus = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    plus += abs2(z[j] + x[j]);
    minus += abs2(z[j] - x[j]);
  }
  return std::sqrt(std::min(plus, minus));
}

template <class T>
double truth_error(const DenseVector<T>& z, const DenseVector<T>& x, ErrorMetric m) {
  return m == ErrorMetric::phase ? dist(z, x) : dist_p(z, x);
}

template <class T>
DenseVector<T> forward(const PhaseData<T>& data, const DenseVector<T>& z, kernels::Backend b) {
  DenseVector<T> p(data.n());
  kernels::forward(data.a, z.span(), p.span(), b);
  return p;
}

template <class T>
double relative_residual(const PhaseData<T>& data, const DenseVector<T>& z, kernels::Backend b) {
  const auto p = forward(data, z, b);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double r = abs2(p[k]) - data.y[k];
    num += r * r;
    den += data.y[k] * data.y[k];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

template <class T>
DenseVector<T> weighted_backprojection(const PhaseData<T>& data, DenseVector<T> c, kernels::Backend b) {
  DenseVector<T> g(data.d());
  kernels::backproject(data.a, std::span<const T>(c.span()), g.span(), b);
  return g;
}

/// (1/n) sum_k (|alpha_k^* z|^2 - y_k) alpha_k alpha_k^* z
template <class T>
DenseVector<T> wf_gradient(const PhaseData<T>& data, const DenseVector<T>& z, kernels::Backend b) {
  auto p = forward(data, z, b);
  const double inv_n = 1.0 / static_cast<double>(data.n());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = p[k] * ((abs2(p[k]) - data.y[k]) * inv_n);
  return weighted_backprojection(data, std::move(p), b);
}

struct TwfThresholds {
  double z_lb;
  double z_ub;
  double h;
};

/// Trimmed Poisson log-likelihood gradient, an ascent direction:
/// (1/2n) sum_{k in E1 and E2} (y_k/|alpha_k^* z|^2 - 1) alpha_k alpha_k^* z.
/// K_t is recomputed from z on every call. Rows with alpha_k^* z = 0 never
/// contribute.
template <class T>
DenseVector<T> twf_gradient(const PhaseData<T>& data, const DenseVector<T>& z, const TwfThresholds& th,
                            kernels::Backend b) {
  const double nz = norm(z);
  if (!(nz > 0.0)) throw std::domain_error("qpr: truncated WF gradient requires z != 0");
  auto p = forward(data, z, b);
  const std::size_t n = data.n();
  double kt = 0.0;
  for (std::size_t k = 0; k < n; ++k) kt += std::abs(data.y[k] - abs2(p[k]));
  kt /= static_cast<double>(n);
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double a2 = abs2(p[k]);
    const double ratio = std::sqrt(a2) / nz;
    const bool e1 = a2 > 0.0 && th.z_lb <= ratio && ratio <= th.z_ub;
    const bool e2 = std::isinf(th.h) || std::abs(data.y[k] - a2) <= th.h * kt * ratio;
    p[k] = (e1 && e2) ? p[k] * ((data.y[k] / a2 - 1.0) * scale) : T{};
  }
  return weighted_backprojection(data, std::move(p), b);
}

/// Trimmed amplitude-loss gradient, a descent direction:
/// (1/2n) sum_{k: |alpha_k^* z| >= y'_k/(1+gamma)} (1 - y'_k/|alpha_k^* z|) alpha_k alpha_k^* z.
/// Rows with |alpha_k^* z| <= 1e-300 are dropped: they either fail the
/// trimming test or (y'_k = 0) contribute zero.
template <class T>
DenseVector<T> taf_gradient(const PhaseData<T>& data, const DenseVector<T>& z, double gamma,
                            kernels::Backend b) {
  if (!(norm2(z) > 0.0)) throw std::domain_error("qpr: truncated AF gradient requires z != 0");
  auto p = forward(data, z, b);
  const std::size_t n = data.n();
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double a = std::sqrt(abs2(p[k]));
    const bool keep = a > 1e-300 && a >= data.amp[k] / (1.0 + gamma);
    p[k] = keep ? p[k] * ((1.0 - data.amp[k] / a) * scale) : T{};
  }
  return weighted_backprojection(data, std::move(p), b);
}

inline double intensity_norm_estimate(const RVector& y) {
  double s = 0.0;
  for (double v : y) s += v;
  return y.size() ? std::sqrt(s / static_cast<double>(y.size())) : 0.0;
}

/// Indices k with y_k <= theta_y^2 lambda0^2.
inline std::vector<std::size_t> twf_selection(const RVector& y, double theta_y) {
  const double lambda0 = intensity_norm_estimate(y);
  const double bound = theta_y * theta_y * lambda0 * lambda0;
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < y.size(); ++k)
    if (std::abs(y[k]) <= bound) idx.push_back(k);
  return idx;
}

/// ceil(rho n), robust to rho n landing a rounding error above an integer.
inline std::size_t taf_selection_size(std::size_t n, double rho) {
  const double raw = rho * static_cast<double>(n);
  auto m = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::clamp<std::size_t>(m, 1, n);
}

/// Indices of the ceil(rho n) largest y'_k / ||alpha_k||, ties to the lower index.
template <class T>
std::vector<std::size_t> taf_selection(const DenseMatrix<T>& a, const RVector& amp, double rho) {
  const std::size_t n = a.rows();
  std::vector<double> score(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double rn = std::sqrt(norm2(a.row(k)));
    score[k] = rn > 0.0 ? amp[k] / rn : 0.0;
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) { return score[l] > score[r]; });
  idx.resize(taf_selection_size(n, rho));
  std::sort(idx.begin(), idx.end());
  return idx;
}

template <class T>
DenseVector<T> scaled_top_eigvec(const DenseMatrix<T>& a, const std::vector<double>& w, double lambda0,
                                 int power_iters, kernels::Backend b) {
  const DenseMatrix<T> s = kernels::weighted_gram(a, std::span<const double>(w), b);
  auto top = power_top_eig(s, power_iters);
  return top.vector * lambda0;
}

template <class T>
DenseVector<T> spectral_init(const PhaseData<T>& data, int power_iters, kernels::Backend b) {
  const double lambda0 = intensity_norm_estimate(data.y);
  if (!(lambda0 > 0.0)) return DenseVector<T>(data.d());
  std::vector<double> w(data.n());
  const double inv_n = 1.0 / static_cast<double>(data.n());
  for (std::size_t k = 0; k < data.n(); ++k) w[k] = data.y[k] * inv_n;
  return scaled_top_eigvec(data.a, w, lambda0, power_iters, b);
}

template <class T>
DenseVector<T> twf_init(const PhaseData<T>& data, double theta_y, int power_iters, kernels::Backend b) {
  const double lambda0 = intensity_norm_estimate(data.y);
  const auto sel = twf_selection(data.y, theta_y);
  if (sel.empty() || !(lambda0 > 0.0)) return DenseVector<T>(data.d());
  std::vector<double> w(data.n(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(data.n());
  for (std::size_t k : sel) w[k] = data.y[k] * inv_n;
  return scaled_top_eigvec(data.a, w, lambda0, power_iters, b);
}

template <class T>
DenseVector<T> taf_init(const PhaseData<T>& data, double rho, int power_iters, kernels::Backend b) {
  double s = 0.0;
  for (double v : data.amp) s += v * v;
  const double lambda0 = std::sqrt(s / static_cast<double>(data.n()));
  if (!(lambda0 > 0.0)) return DenseVector<T>(data.d());
  const auto sel = taf_selection(data.a, data.amp, rho);
  std::vector<double> w(data.n(), 0.0);
  const double inv_sel = 1.0 / static_cast<double>(sel.size());
  for (std::size_t k : sel) {
    const double rn2 = norm2(data.a.row(k));
    if (rn2 > 0.0) w[k] = inv_sel / rn2;
  }
  return scaled_top_eigvec(data.a, w, lambda0, power_iters, b);
}

/// Runs `updates` calls of `step` on z0, recording one trace point per
/// update. Truth (when given) switches the trace to benchmark mode.
template <class T, class Step>
BasicRunTrace<T> iterate(const PhaseData<T>& data, DenseVector<T> z, int updates, Step&& step,
                         const SolverConfig& cfg, const DenseVector<T>* truth, ErrorMetric metric,
                         std::chrono::steady_clock::time_point start) {
  using clock = std::chrono::steady_clock;
  BasicRunTrace<T> trace;
  trace.benchmark = truth != nullptr;
  auto record = [&](std::int64_t iter) {
    const double err = truth ? truth_error(z, *truth, metric) : relative_residual(data, z, cfg.backend);
    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - start).count();
    trace.points.push_back({iter, err, ns});
    return err;
  };
  const double nz0 = norm(z);
  double err = record(0);
  if (!(nz0 > 0.0) && updates > 0) {
    trace.notes.push_back("initial estimate is zero; no updates applied");
    updates = 0;
  }
  for (int t = 1; t <= updates; ++t) {
    if (cfg.stop_tol > 0.0 && err < cfg.stop_tol) break;
    step(z);
    const double nz = norm(z);
    if (!std::isfinite(nz) || nz > 1e6 * nz0) {
      throw DivergenceError("solver diverged at iteration " + std::to_string(t) + " (||z|| = " +
                            std::to_string(nz) + ", ||z0|| = " + std::to_string(nz0) + ")");
    }
    trace.iterations_run = t;
    err = record(t);
  }
  trace.final = std::move(z);
  if (truth) trace.final_error = truth_error(trace.final, *truth, metric);
  trace.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - start);
  return trace;
}

}  // namespace qpr::detail
