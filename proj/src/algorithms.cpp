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

#include "qpr/algorithms.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "qpr/detail/flow.hpp"
#include "qpr/linalg.hpp"

namespace qpr {

namespace {

using clock_type = std::chrono::steady_clock;

detail::PhaseData<Quaternion> data_of(const Ensemble& e, const Observations& obs) {
  if (obs.n() != e.n() || obs.amp.size() != e.n())
    throw std::invalid_argument("qpr: observation count does not match ensemble rows");
  return {e.a, obs.y, obs.amp};
}

detail::TwfThresholds thresholds_of(const SolverConfig& cfg) {
  return {cfg.theta_z_lb, cfg.theta_z_ub, cfg.theta_h};
}

void axpy_in_place(QVector& z, const QVector& g, double step) {
  for (std::size_t j = 0; j < z.size(); ++j) z[j] += g[j] * step;
}

constexpr std::array<std::pair<Algorithm, std::string_view>, 9> kNames = {{
    {Algorithm::qwf, "qwf"},
    {Algorithm::pqwf, "pqwf"},
    {Algorithm::qtwf, "qtwf"},
    {Algorithm::qtaf, "qtaf"},
    {Algorithm::pqtwf, "pqtwf"},
    {Algorithm::pqtaf, "pqtaf"},
    {Algorithm::qwf_purify_end, "qwf-purify-end"},
    {Algorithm::pqwf_drop_real, "pqwf-drop-real"},
    {Algorithm::qwf_drop_real, "qwf-drop-real"},
}};

RunTrace pure_wrap_impl(const StepFn& inner_step, const detail::PhaseData<Quaternion>& data, QVector z,
                        const SolverConfig& cfg, const QVector* truth, Purifier purifier,
                        clock_type::time_point start) {
  if (cfg.tp < 1) throw std::invalid_argument("qpr::pure_wrap: tp must be >= 1");
  RunTrace trace;
  trace.benchmark = truth != nullptr;
  auto record = [&](std::int64_t iter) {
    const double err = truth ? dist_p(z, *truth) : detail::relative_residual(data, z, cfg.backend);
    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(clock_type::now() - start).count();
    trace.points.push_back({iter, err, ns});
    return err;
  };
  const double nz0 = norm(z);
  double err = record(0);
  int rounds = cfg.iters;
  if (!(nz0 > 0.0) && rounds > 0) {
    trace.notes.push_back("initial estimate is zero; no updates applied");
    rounds = 0;
  }
  std::int64_t updates = 0;
  for (int r = 1; r <= rounds; ++r) {
    if (cfg.stop_tol > 0.0 && err < cfg.stop_tol) break;
    for (int j = 0; j < cfg.tp; ++j) {
      inner_step(z);
      ++updates;
      const double nz = norm(z);
      if (!std::isfinite(nz) || nz > 1e6 * nz0) {
        throw DivergenceError("solver diverged at update " + std::to_string(updates) + " (||z|| = " +
                              std::to_string(nz) + ", ||z0|| = " + std::to_string(nz0) + ")");
      }
    }
    if (norm2(z) > 0.0) z = purifier == Purifier::phase_estimate ? purify(z) : imag(std::move(z));
    trace.iterations_run = updates;
    err = record(static_cast<std::int64_t>(r) * cfg.tp);
  }
  trace.final = std::move(z);
  if (truth) trace.final_error = dist_p(trace.final, *truth);
  trace.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(clock_type::now() - start);
  return trace;
}

double wf_step(const QVector& z0, const SolverConfig& cfg) {
  const double n2 = norm2(z0);
  return n2 > 0.0 ? cfg.eta1 / n2 : 0.0;
}

StepFn wf_step_fn(const detail::PhaseData<Quaternion>& data, double eta, kernels::Backend b) {
  return [&data, eta, b](QVector& z) { axpy_in_place(z, detail::wf_gradient(data, z, b), -eta); };
}

StepFn twf_step_fn(const detail::PhaseData<Quaternion>& data, const SolverConfig& cfg) {
  const auto th = thresholds_of(cfg);
  return [&data, th, eta = cfg.eta1, b = cfg.backend](QVector& z) {
    axpy_in_place(z, detail::twf_gradient(data, z, th, b), eta);
  };
}

StepFn taf_step_fn(const detail::PhaseData<Quaternion>& data, const SolverConfig& cfg) {
  return [&data, gamma = cfg.gamma, eta = cfg.eta1, b = cfg.backend](QVector& z) {
    axpy_in_place(z, detail::taf_gradient(data, z, gamma, b), -eta);
  };
}

RunTrace run_plain(const detail::PhaseData<Quaternion>& data, QVector z0, const StepFn& step,
                   const SolverConfig& cfg, const QVector* truth, clock_type::time_point start) {
  return detail::iterate(data, std::move(z0), cfg.iters, step, cfg, truth, detail::ErrorMetric::phase, start);
}

}  // namespace

void SolverConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("invalid solver config: " + what); };
  if (!(eta1 > 0.0)) fail("eta1 must be > 0");
  if (iters < 0) fail("iters must be >= 0");
  if (tp < 1) fail("tp must be >= 1");
  if (!(theta_z_lb < theta_z_ub)) fail("theta_z_lb must be < theta_z_ub");
  if (!(theta_h > 0.0)) fail("theta_h must be > 0");
  if (!(theta_y > 0.0)) fail("theta_y must be > 0");
  if (!(gamma > 0.0)) fail("gamma must be > 0");
  if (!(rho > 0.0 && rho <= 1.0)) fail("rho must lie in (0, 1]");
  if (power_iters < 1) fail("power_iters must be >= 1");
  if (!(success_tol > 0.0)) fail("success_tol must be > 0");
  if (stop_tol < 0.0) fail("stop_tol must be >= 0");
}

std::string_view to_string(Algorithm a) {
  for (const auto& [alg, name] : kNames)
    if (alg == a) return name;
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (const auto& [alg, n] : kNames)
    if (n == name) return alg;
  return std::nullopt;
}

bool is_pure_algorithm(Algorithm a) { return a != Algorithm::qwf && a != Algorithm::qtwf && a != Algorithm::qtaf; }

SolverConfig default_config(Algorithm a) {
  SolverConfig cfg;
  switch (a) {
    case Algorithm::qwf:
    case Algorithm::qwf_purify_end:
    case Algorithm::qwf_drop_real:
      cfg.eta1 = 0.2;
      break;
    case Algorithm::pqwf:
    case Algorithm::pqwf_drop_real:
      cfg.eta1 = 0.15;
      break;
    case Algorithm::qtwf:
    case Algorithm::pqtwf:
      cfg.eta1 = 0.8;
      break;
    case Algorithm::qtaf:
    case Algorithm::pqtaf:
      cfg.eta1 = 1.2;
      break;
  }
  // Purifying variants count rounds; 300 rounds of 5 match the 1500-update budget.
  if (a == Algorithm::pqwf || a == Algorithm::pqtwf || a == Algorithm::pqtaf || a == Algorithm::pqwf_drop_real)
    cfg.iters = 1500 / cfg.tp;
  return cfg;
}

double dist(const QVector& z, const QVector& x) { return detail::dist(z, x); }
double dist_p(const QVector& z, const QVector& x) { return detail::dist_p(z, x); }

QVector wf_gradient(const Ensemble& e, const Observations& obs, const QVector& z, kernels::Backend b) {
  return detail::wf_gradient(data_of(e, obs), z, b);
}

QVector qtwf_gradient(const Ensemble& e, const Observations& obs, const QVector& z, const SolverConfig& cfg) {
  return detail::twf_gradient(data_of(e, obs), z, thresholds_of(cfg), cfg.backend);
}

QVector qtaf_gradient(const Ensemble& e, const Observations& obs, const QVector& z, double gamma,
                      kernels::Backend b) {
  return detail::taf_gradient(data_of(e, obs), z, gamma, b);
}

QVector spectral_init(const Ensemble& e, const Observations& obs, int power_iters, kernels::Backend b) {
  return detail::spectral_init(data_of(e, obs), power_iters, b);
}

std::vector<std::size_t> qtwf_selection(const Observations& obs, double theta_y) {
  return detail::twf_selection(obs.y, theta_y);
}

QVector qtwf_init(const Ensemble& e, const Observations& obs, double theta_y, int power_iters,
                  kernels::Backend b) {
  return detail::twf_init(data_of(e, obs), theta_y, power_iters, b);
}

std::vector<std::size_t> qtaf_selection(const Ensemble& e, const Observations& obs, double rho) {
  return detail::taf_selection(e.a, obs.amp, rho);
}

QVector qtaf_init(const Ensemble& e, const Observations& obs, double rho, int power_iters, kernels::Backend b) {
  return detail::taf_init(data_of(e, obs), rho, power_iters, b);
}

Quaternion phase_factor_estimate(const QVector& z) {
  if (!(norm2(z) > 0.0)) throw std::domain_error("qpr::phase_factor_estimate: z must be nonzero");
  Sym4 m{};
  for (const Quaternion& q : z) {
    const double v[4] = {q.w, q.x, q.y, q.z};
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m[r][c] += v[r] * v[c];
  }
  const auto w = sym4_min_eigvec(m);
  return {w[0], -w[1], -w[2], -w[3]};
}

QVector purify(const QVector& z) { return imag(z * phase_factor_estimate(z)); }

QVector sign_align(const QVector& z, bool nonneg_prior) {
  if (!nonneg_prior) return z;
  double s = 0.0;
  for (const auto& q : z) s += q.x + q.y + q.z;
  return s < 0.0 ? -z : z;
}

RunTrace pure_wrap(const StepFn& inner_step, const Ensemble& e, const Observations& obs, QVector z0,
                   const SolverConfig& cfg, const QVector* truth, Purifier purifier) {
  return pure_wrap_impl(inner_step, data_of(e, obs), std::move(z0), cfg, truth, purifier, clock_type::now());
}

RunTrace qwf_run(const Ensemble& e, const Observations& obs, const SolverConfig& cfg, const QVector* truth) {
  cfg.validate();
  const auto start = clock_type::now();
  const auto data = data_of(e, obs);
  QVector z0 = detail::spectral_init(data, cfg.power_iters, cfg.backend);
  const double eta = wf_step(z0, cfg);
  return run_plain(data, std::move(z0), wf_step_fn(data, eta, cfg.backend), cfg, truth, start);
}

RunTrace qtwf_run(const Ensemble& e, const Observations& obs, const SolverConfig& cfg, const QVector* truth) {
  cfg.validate();
  const auto start = clock_type::now();
  const auto data = data_of(e, obs);
  QVector z0 = detail::twf_init(data, cfg.theta_y, cfg.power_iters, cfg.backend);
  return run_plain(data, std::move(z0), twf_step_fn(data, cfg), cfg, truth, start);
}

RunTrace qtaf_run(const Ensemble& e, const Observations& obs, const SolverConfig& cfg, const QVector* truth) {
  cfg.validate();
  const auto start = clock_type::now();
  const auto data = data_of(e, obs);
  QVector z0 = detail::taf_init(data, cfg.rho, cfg.power_iters, cfg.backend);
  return run_plain(data, std::move(z0), taf_step_fn(data, cfg), cfg, truth, start);
}

RunTrace pqwf_run(const Ensemble& e, const Observations& obs, const SolverConfig& cfg, const QVector* truth) {
  cfg.validate();
  const auto start = clock_type::now();
  const auto data = data_of(e, obs);
  QVector z0 = detail::spectral_init(data, cfg.power_iters, cfg.backend);
  const double eta = wf_step(z0, cfg);
  return pure_wrap_impl(wf_step_fn(data, eta, cfg.backend), data, std::move(z0), cfg, truth,
                        Purifier::phase_estimate, start);
}

RunTrace pqtwf_run(const Ensemble& e, const Observations& obs, const SolverConfig& cfg, const QVector* truth) {
  cfg.validate();
  const auto start = clock_type::now();
  const auto data = data_of(e, obs);
  QVector z0 = detail::twf_init(data, cfg.theta_y, cfg.power_iters, cfg.backend);
  return pure_wrap_impl(twf_step_fn(data, cfg), data, std::move(z0), cfg, truth, Purifier::phase_estimate, start);
}

RunTrace pqtaf_run(const Ensemble& e, const Observations& obs, const SolverConfig& cfg, const QVector* truth) {
  cfg.validate();
  const auto start = clock_type::now();
  const auto data = data_of(e, obs);
  QVector z0 = detail::taf_init(data, cfg.rho, cfg.power_iters, cfg.backend);
  return pure_wrap_impl(taf_step_fn(data, cfg), data, std::move(z0), cfg, truth, Purifier::phase_estimate, start);
}

RunTrace run_algorithm(Algorithm a, const Ensemble& e, const Observations& obs, const SolverConfig& cfg,
                       const QVector* truth) {
  switch (a) {
    case Algorithm::qwf:
      return qwf_run(e, obs, cfg, truth);
    case Algorithm::qtwf:
      return qtwf_run(e, obs, cfg, truth);
    case Algorithm::qtaf:
      return qtaf_run(e, obs, cfg, truth);
    case Algorithm::pqwf:
      return pqwf_run(e, obs, cfg, truth);
    case Algorithm::pqtwf:
      return pqtwf_run(e, obs, cfg, truth);
    case Algorithm::pqtaf:
      return pqtaf_run(e, obs, cfg, truth);
    case Algorithm::pqwf_drop_real: {
      cfg.validate();
      const auto start = clock_type::now();
      const auto data = data_of(e, obs);
      QVector z0 = detail::spectral_init(data, cfg.power_iters, cfg.backend);
      const double eta = wf_step(z0, cfg);
      return pure_wrap_impl(wf_step_fn(data, eta, cfg.backend), data, std::move(z0), cfg, truth,
                            Purifier::drop_real, start);
    }
    case Algorithm::qwf_purify_end:
    case Algorithm::qwf_drop_real: {
      RunTrace trace = qwf_run(e, obs, cfg, truth);
      if (norm2(trace.final) > 0.0) {
        trace.final = a == Algorithm::qwf_purify_end ? purify(trace.final) : imag(std::move(trace.final));
      }
      if (truth) trace.final_error = dist_p(trace.final, *truth);
      return trace;
    }
  }
  throw std::invalid_argument("qpr::run_algorithm: unknown algorithm");
}

}  // namespace qpr
