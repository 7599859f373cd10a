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

#include "qpr/baselines.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "qpr/detail/flow.hpp"

namespace qpr {

namespace {

using clock_type = std::chrono::steady_clock;

constexpr std::uint64_t kRealEnsembleStream = 0x7265616c;  // "real"

void axpy_in_place(RVector& z, const RVector& g, double step) {
  for (std::size_t j = 0; j < z.size(); ++j) z[j] += step * g[j];
}

}  // namespace

RMatrix sample_real_gaussian(std::size_t n, std::size_t d, RandomStream& rng) {
  RMatrix a(n, d);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < d; ++j) a(k, j) = rng.normal();
  return a;
}

RealProblem make_real_problem(RMatrix a, const RVector& x) {
  Observations obs = observe(a, x);
  return {std::move(a), std::move(obs.y), std::move(obs.amp)};
}

std::string_view to_string(RealAlgorithm a) {
  switch (a) {
    case RealAlgorithm::wf:
      return "wf";
    case RealAlgorithm::twf:
      return "twf";
    case RealAlgorithm::taf:
      return "taf";
  }
  return "unknown";
}

std::optional<RealAlgorithm> parse_real_algorithm(std::string_view name) {
  for (auto a : {RealAlgorithm::wf, RealAlgorithm::twf, RealAlgorithm::taf})
    if (to_string(a) == name) return a;
  return std::nullopt;
}

SolverConfig default_real_config(RealAlgorithm a) {
  SolverConfig cfg;
  cfg.eta1 = a == RealAlgorithm::wf ? 0.2 : a == RealAlgorithm::twf ? 0.8 : 1.2;
  return cfg;
}

double real_dist(const RVector& z, const RVector& x) { return detail::dist_p(z, x); }

RealRunTrace real_solver_run(const RealProblem& p, RealAlgorithm algo, const SolverConfig& cfg,
                             const RVector* truth) {
  cfg.validate();
  if (p.y.size() != p.n() || p.amp.size() != p.n())
    throw std::invalid_argument("qpr::real_solver_run: observation count does not match rows");
  const auto start = clock_type::now();
  const detail::PhaseData<double> data{p.a, p.y, p.amp};
  const auto b = cfg.backend;
  RVector z0;
  switch (algo) {
    case RealAlgorithm::wf: {
      z0 = detail::spectral_init(data, cfg.power_iters, b);
      const double n2 = norm2(z0);
      const double eta = n2 > 0.0 ? cfg.eta1 / n2 : 0.0;
      auto step = [&](RVector& z) { axpy_in_place(z, detail::wf_gradient(data, z, b), -eta); };
      return detail::iterate(data, std::move(z0), cfg.iters, step, cfg, truth, detail::ErrorMetric::sign, start);
    }
    case RealAlgorithm::twf: {
      z0 = detail::twf_init(data, cfg.theta_y, cfg.power_iters, b);
      const detail::TwfThresholds th{cfg.theta_z_lb, cfg.theta_z_ub, cfg.theta_h};
      auto step = [&](RVector& z) { axpy_in_place(z, detail::twf_gradient(data, z, th, b), cfg.eta1); };
      return detail::iterate(data, std::move(z0), cfg.iters, step, cfg, truth, detail::ErrorMetric::sign, start);
    }
    case RealAlgorithm::taf: {
      z0 = detail::taf_init(data, cfg.rho, cfg.power_iters, b);
      auto step = [&](RVector& z) { axpy_in_place(z, detail::taf_gradient(data, z, cfg.gamma, b), -cfg.eta1); };
      return detail::iterate(data, std::move(z0), cfg.iters, step, cfg, truth, detail::ErrorMetric::sign, start);
    }
  }
  throw std::invalid_argument("qpr::real_solver_run: unknown algorithm");
}

std::vector<std::size_t> split_budget(std::size_t total, std::size_t parts) {
  if (parts == 0) throw std::invalid_argument("qpr::split_budget: parts must be >= 1");
  std::vector<std::size_t> out(parts, total / parts);
  for (std::size_t i = 0; i < total % parts; ++i) ++out[i];
  return out;
}

MultichannelResult multichannel_recover(const QVector& x_pure, const ChannelLayout& layout, RealAlgorithm algo,
                                        std::size_t m_total, const SolverConfig& cfg, std::uint64_t seed) {
  const std::size_t d = x_pure.size();
  if (layout.d != 0 && layout.d != d) throw std::invalid_argument("qpr::multichannel_recover: layout.d != signal length");
  if (!is_pure(x_pure)) throw std::invalid_argument("qpr::multichannel_recover: signal must be pure");
  const auto start = clock_type::now();

  std::array<RVector, 3> channels{RVector(d), RVector(d), RVector(d)};
  for (std::size_t j = 0; j < d; ++j) {
    channels[0][j] = x_pure[j].x;
    channels[1][j] = x_pure[j].y;
    channels[2][j] = x_pure[j].z;
  }

  MultichannelResult result;
  result.estimate = QVector(d);
  if (layout.mode == ChannelMode::mono) {
    const auto budget = split_budget(m_total, 3);
    double sq = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      if (budget[c] == 0) throw std::invalid_argument("qpr::multichannel_recover: empty channel budget");
      RandomStream rng(seed, {kRealEnsembleStream, c});
      const RealProblem p = make_real_problem(sample_real_gaussian(budget[c], d, rng), channels[c]);
      const RealRunTrace t = real_solver_run(p, algo, cfg, &channels[c]);
      sq += t.final_error * t.final_error;
      for (std::size_t j = 0; j < d; ++j) {
        double& slot = c == 0 ? result.estimate[j].x : c == 1 ? result.estimate[j].y : result.estimate[j].z;
        slot = t.final[j];
      }
    }
    result.error = std::sqrt(sq);
  } else {
    RVector stacked(3 * d);
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t j = 0; j < d; ++j) stacked[c * d + j] = channels[c][j];
    if (m_total == 0) throw std::invalid_argument("qpr::multichannel_recover: empty budget");
    RandomStream rng(seed, {kRealEnsembleStream, 3});
    const RealProblem p = make_real_problem(sample_real_gaussian(m_total, 3 * d, rng), stacked);
    const RealRunTrace t = real_solver_run(p, algo, cfg, &stacked);
    result.error = t.final_error;
    for (std::size_t j = 0; j < d; ++j) result.estimate[j] = {0.0, t.final[j], t.final[d + j], t.final[2 * d + j]};
  }
  result.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(clock_type::now() - start);
  return result;
}

}  // namespace qpr
