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

#include "qpr/harness.hpp"

#include <omp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace qpr {

namespace {

double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("bad number in ratio grid: '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace

std::optional<Model> parse_model(std::string_view name) {
  if (name == "quaternion") return Model::quaternion;
  if (name == "mono") return Model::mono;
  if (name == "concat") return Model::concat;
  return std::nullopt;
}

std::string_view to_string(Model m) {
  switch (m) {
    case Model::quaternion:
      return "quaternion";
    case Model::mono:
      return "mono";
    case Model::concat:
      return "concat";
  }
  return "unknown";
}

std::optional<SolverChoice> parse_solver(std::string_view algo, Model model) {
  SolverChoice s;
  s.model = model;
  if (model == Model::quaternion) {
    const auto a = parse_algorithm(algo);
    if (!a) return std::nullopt;
    s.algo = *a;
  } else {
    const auto r = parse_real_algorithm(algo);
    if (!r) return std::nullopt;
    s.real_algo = *r;
  }
  return s;
}

std::string describe(const SolverChoice& s) {
  if (s.model == Model::quaternion) return std::string(to_string(s.algo));
  return std::string(to_string(s.real_algo)) + "/" + std::string(to_string(s.model));
}

SolverConfig default_config(const SolverChoice& s) {
  return s.model == Model::quaternion ? default_config(s.algo) : default_real_config(s.real_algo);
}

bool recovers_pure(const SolverChoice& s) { return s.model != Model::quaternion || is_pure_algorithm(s.algo); }

std::size_t measurement_count(double ratio, std::size_t d) {
  return static_cast<std::size_t>(std::llround(ratio * static_cast<double>(d)));
}

std::vector<double> parse_ratio_grid(std::string_view text) {
  std::vector<double> out;
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw std::invalid_argument("ratio grid must look like lo:step:hi");
    const double lo = parse_double(parts[0]);
    const double step = parse_double(parts[1]);
    const double hi = parse_double(parts[2]);
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("ratio grid needs step > 0 and hi >= lo");
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  } else {
    for (auto p : split(text, ',')) out.push_back(parse_double(p));
  }
  if (out.empty()) throw std::invalid_argument("ratio grid is empty");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!(out[i] > 0.0)) throw std::invalid_argument("ratios must be positive");
    if (i > 0 && !(out[i] > out[i - 1])) throw std::invalid_argument("ratios must be ascending");
  }
  return out;
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t ratio_index, std::size_t trial) {
  RandomStream rng(base_seed, {ratio_index, trial});
  return rng.engine()();
}

TrialOutcome run_trial(const SolverChoice& s, const SolverConfig& cfg, std::size_t d, std::size_t n,
                       std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  TrialOutcome out;
  const SignalKind kind = recovers_pure(s) ? SignalKind::pure : SignalKind::general;
  const QVector x = sample_signal({d, kind, seed});
  try {
    if (s.model == Model::quaternion) {
      const Ensemble e = sample_ensemble(n, d, seed);
      const Observations obs = observe(e, x);
      out.error = run_algorithm(s.algo, e, obs, cfg, &x).final_error;
    } else {
      const ChannelLayout layout{s.model == Model::mono ? ChannelMode::mono : ChannelMode::concat, d};
      out.error = multichannel_recover(x, layout, s.real_algo, n, cfg, seed).error;
    }
  } catch (const DivergenceError&) {
    out.diverged = true;
    out.error = std::numeric_limits<double>::infinity();
  }
  out.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
  return out;
}

std::vector<SweepRow> success_sweep(const SweepSpec& spec) {
  if (spec.trials < 1) throw std::invalid_argument("sweep needs trials >= 1");
  if (spec.d < 1) throw std::invalid_argument("sweep needs d >= 1");
  if (spec.ratios.empty()) throw std::invalid_argument("sweep needs at least one ratio");
  spec.cfg.validate();
  SolverConfig cfg = spec.cfg;
  cfg.backend = kernels::Backend::serial;  // parallelism lives at the trial level

  const std::size_t trials = static_cast<std::size_t>(spec.trials);
  const std::size_t tasks = spec.ratios.size() * trials;
  std::vector<TrialOutcome> outcomes(tasks);
  std::exception_ptr failure;
  const int threads = spec.threads > 0 ? spec.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (std::ptrdiff_t task = 0; task < static_cast<std::ptrdiff_t>(tasks); ++task) {
    const std::size_t r = static_cast<std::size_t>(task) / trials;
    const std::size_t t = static_cast<std::size_t>(task) % trials;
    try {
      const std::size_t n = measurement_count(spec.ratios[r], spec.d);
      outcomes[task] = run_trial(spec.solver, cfg, spec.d, n, trial_seed(spec.base_seed, r, t));
    } catch (...) {
#pragma omp critical(qpr_sweep_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<SweepRow> rows;
  for (std::size_t r = 0; r < spec.ratios.size(); ++r) {
    SweepRow row;
    row.ratio = spec.ratios[r];
    row.n = measurement_count(spec.ratios[r], spec.d);
    row.trials = spec.trials;
    double err_sum = 0.0;
    int finite = 0;
    double wall = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto& o = outcomes[r * trials + t];
      if (o.diverged) {
        ++row.divergences;
      } else {
        err_sum += o.error;
        ++finite;
        if (o.error < cfg.success_tol) ++row.successes;
      }
      wall += o.wall_ms;
    }
    row.rate = static_cast<double>(row.successes) / static_cast<double>(row.trials);
    row.mean_final_error = finite ? err_sum / finite : std::numeric_limits<double>::quiet_NaN();
    row.mean_wall_ms = wall / static_cast<double>(trials);
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  const auto old = os.precision(17);
  os << "ratio,n,successes,trials,rate,mean_final_error,mean_wall_ms\n";
  for (const auto& r : rows) {
    os << r.ratio << ',' << r.n << ',' << r.successes << ',' << r.trials << ',' << r.rate << ','
       << r.mean_final_error << ',' << r.mean_wall_ms << '\n';
  }
  os.precision(old);
}

std::optional<double> full_success_onset(const std::vector<SweepRow>& rows, double threshold) {
  std::optional<double> onset;
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (it->rate < threshold) break;
    onset = it->ratio;
  }
  return onset;
}

std::vector<TraceRow> convergence_trace(const TraceSpec& spec) {
  spec.cfg.validate();
  if (spec.d < 1) throw std::invalid_argument("trace needs d >= 1");
  const std::size_t n = measurement_count(spec.ratio, spec.d);
  if (n < 1) throw std::invalid_argument("trace needs at least one measurement");
  const auto& s = spec.solver;
  std::vector<TracePoint> points;
  if (s.model == Model::quaternion) {
    const QVector x = sample_signal({spec.d, recovers_pure(s) ? SignalKind::pure : SignalKind::general, spec.seed});
    const Ensemble e = sample_ensemble(n, spec.d, spec.seed);
    const Observations obs = observe(e, x);
    points = run_algorithm(s.algo, e, obs, spec.cfg, &x).points;
  } else if (s.model == Model::concat) {
    const QVector x = sample_signal({spec.d, SignalKind::pure, spec.seed});
    RVector stacked(3 * spec.d);
    for (std::size_t j = 0; j < spec.d; ++j) {
      stacked[j] = x[j].x;
      stacked[spec.d + j] = x[j].y;
      stacked[2 * spec.d + j] = x[j].z;
    }
    RandomStream rng(spec.seed, {kEnsembleStream});
    const RealProblem p = make_real_problem(sample_real_gaussian(n, 3 * spec.d, rng), stacked);
    points = real_solver_run(p, s.real_algo, spec.cfg, &stacked).points;
  } else {
    throw std::invalid_argument("trace supports the quaternion and concat models only");
  }
  std::vector<TraceRow> rows;
  rows.reserve(points.size());
  for (const auto& p : points) rows.push_back({p.iter, std::log10(p.error), p.elapsed_ns});
  return rows;
}

void write_trace_rows_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
  const auto old = os.precision(17);
  os << "iter,log10_error,elapsed_ns\n";
  for (const auto& r : rows) os << r.iter << ',' << r.log10_error << ',' << r.elapsed_ns << '\n';
  os.precision(old);
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line needs >= 2 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit_line needs two distinct x values");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

}  // namespace qpr
