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

// Moment suite and the quick self-test behind `qpr selftest`.

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include "qpr/harness.hpp"
#include "qpr/linalg.hpp"

namespace qpr {

namespace {

constexpr std::uint64_t kMomentStream = 0x6d6f6d;  // "mom"
constexpr std::uint64_t kSelfTestStream = 0x736c66;  // "slf"

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
  }
  MomentCheck finish(std::string name, double expected, std::size_t n) const {
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double var = std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0));
    MomentCheck c{std::move(name), mean, expected, std::sqrt(var / nn), false};
    c.pass = std::abs(c.estimate - c.expected) <= 3.0 * c.std_error;
    return c;
  }
};

double& component(Quaternion& q, int c) { return c == 0 ? q.w : c == 1 ? q.x : c == 2 ? q.y : q.z; }

// Gradient under the quarter-scaled convention: a quarter of the gradient
// over the 4d real coordinates, by central differences.
QVector fd_gradient(const std::function<double(const QVector&)>& f, const QVector& z, double h) {
  QVector g(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) {
    for (int c = 0; c < 4; ++c) {
      QVector zp = z;
      QVector zm = z;
      component(zp[j], c) += h;
      component(zm[j], c) -= h;
      component(g[j], c) = 0.25 * (f(zp) - f(zm)) / (2.0 * h);
    }
  }
  return g;
}

double rel_diff(const QVector& a, const QVector& b) { return norm(a - b) / std::max(norm(b), 1e-300); }

SelfCheck gradient_check(std::uint64_t seed) {
  const std::size_t d = 4;
  const std::size_t n = 24;
  const Ensemble e = sample_ensemble(n, d, seed);
  const QVector x = sample_signal({d, SignalKind::general, seed});
  const Observations obs = observe(e, x);
  RandomStream rng(seed, {kSelfTestStream, 1});
  const QVector z = sample_signal(d, SignalKind::general, rng);
  const double nn = static_cast<double>(n);

  auto forward_abs2 = [&](const QVector& v) {
    const QVector p = matvec(e.a, v);
    std::vector<double> a2(n);
    for (std::size_t k = 0; k < n; ++k) a2[k] = abs2(p[k]);
    return a2;
  };
  auto f_wf = [&](const QVector& v) {
    double s = 0.0;
    const auto a2 = forward_abs2(v);
    for (std::size_t k = 0; k < n; ++k) s += (a2[k] - obs.y[k]) * (a2[k] - obs.y[k]);
    return s / nn;
  };
  auto f_twf = [&](const QVector& v) {
    double s = 0.0;
    const auto a2 = forward_abs2(v);
    for (std::size_t k = 0; k < n; ++k) s += obs.y[k] * std::log(a2[k]) - a2[k];
    return s / nn;
  };
  auto f_taf = [&](const QVector& v) {
    double s = 0.0;
    const auto a2 = forward_abs2(v);
    for (std::size_t k = 0; k < n; ++k) s += (std::sqrt(a2[k]) - obs.amp[k]) * (std::sqrt(a2[k]) - obs.amp[k]);
    return s / nn;
  };

  SolverConfig untrimmed;
  untrimmed.theta_z_lb = 0.0;
  untrimmed.theta_z_ub = std::numeric_limits<double>::infinity();
  untrimmed.theta_h = std::numeric_limits<double>::infinity();
  const double e_wf = rel_diff(wf_gradient(e, obs, z), fd_gradient(f_wf, z, 1e-6));
  const double e_twf = rel_diff(qtwf_gradient(e, obs, z, untrimmed), fd_gradient(f_twf, z, 1e-6));
  const double e_taf = rel_diff(qtaf_gradient(e, obs, z, 1e300), fd_gradient(f_taf, z, 1e-6));
  std::ostringstream os;
  os << "rel err wf " << e_wf << ", qtwf " << e_twf << ", qtaf " << e_taf;
  return {"gradients-vs-finite-differences", std::max({e_wf, e_twf, e_taf}) <= 1e-6, os.str()};
}

SelfCheck homomorphism_check(std::uint64_t seed) {
  RandomStream rng(seed, {kSelfTestStream, 2});
  const QMatrix a = sample_quaternion_gaussian(3, 4, rng);
  const QMatrix b = sample_quaternion_gaussian(4, 2, rng);
  const RMatrix lhs = real_rep(matmul(a, b));
  const RMatrix rhs = matmul(real_rep(a), real_rep(b));
  const double err = frobenius_norm(lhs - rhs) / frobenius_norm(rhs);
  const double ratio = frobenius_norm(real_rep(a)) / frobenius_norm(a);
  std::ostringstream os;
  os << "T(AB) vs T(A)T(B) rel err " << err << ", ||T(A)||/||A|| = " << ratio;
  return {"real-representation", err <= 1e-12 && std::abs(ratio - 2.0) <= 1e-12, os.str()};
}

SelfCheck phase_invariance_check(std::uint64_t seed) {
  const std::size_t d = 6;
  const Ensemble e = sample_ensemble(30, d, seed);
  const QVector x = sample_signal({d, SignalKind::general, seed});
  RandomStream rng(seed, {kSelfTestStream, 3});
  const Quaternion q = sign(Quaternion(rng.normal(), rng.normal(), rng.normal(), rng.normal()));
  const Observations a = observe(e, x);
  const Observations b = observe(e, x * q);
  double err = 0.0;
  for (std::size_t k = 0; k < a.n(); ++k) err = std::max(err, std::abs(a.y[k] - b.y[k]) / std::max(a.y[k], 1e-300));
  std::ostringstream os;
  os << "max rel change " << err;
  return {"right-phase-invariance", err <= 1e-12, os.str()};
}

SelfCheck purify_check(std::uint64_t seed) {
  const std::size_t d = 8;
  const QVector x = sample_signal({d, SignalKind::pure, seed});
  RandomStream rng(seed, {kSelfTestStream, 4});
  const Quaternion q = sign(Quaternion(rng.normal(), rng.normal(), rng.normal(), rng.normal()));
  const double err = dist_p(purify(x * q), x);
  std::ostringstream os;
  os << "dist_p(purify(x q), x) = " << err;
  return {"purification-recovers-sign-class", err <= 1e-9, os.str()};
}

SelfCheck recovery_check(std::uint64_t seed) {
  const std::size_t d = 16;
  const Ensemble e = sample_ensemble(10 * d, d, seed);
  const QVector x = sample_signal({d, SignalKind::general, seed});
  const auto trace = qwf_run(e, observe(e, x), default_config(Algorithm::qwf), &x);
  std::ostringstream os;
  os << "qwf d=16 n=160 final dist " << trace.final_error;
  return {"small-recovery", trace.final_error < 1e-5, os.str()};
}

SelfCheck kernel_check(std::uint64_t seed) {
  RandomStream rng(seed, {kSelfTestStream, 5});
  const QMatrix a = sample_quaternion_gaussian(300, 7, rng);
  QVector c(300);
  std::vector<double> w(300);
  for (std::size_t k = 0; k < 300; ++k) {
    c[k] = {rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    w[k] = rng.uniform();
  }
  QVector gs(7);
  QVector gp(7);
  kernels::serial::backproject(a, std::span<const Quaternion>(c.span()), gs.span());
  kernels::parallel::backproject(a, std::span<const Quaternion>(c.span()), gp.span());
  const double eb = rel_diff(gp, gs);
  const auto ss = kernels::serial::weighted_gram(a, std::span<const double>(w));
  const auto sp = kernels::parallel::weighted_gram(a, std::span<const double>(w));
  const double eg = frobenius_norm(sp - ss) / frobenius_norm(ss);
  std::ostringstream os;
  os << "backproject rel diff " << eb << ", gram rel diff " << eg;
  return {"serial-vs-parallel-kernels", eb <= 1e-13 && eg <= 1e-13, os.str()};
}

}  // namespace

std::vector<MomentCheck> moment_suite(std::size_t samples, std::size_t d, std::uint64_t seed) {
  if (samples < 2 || d < 1) throw std::invalid_argument("moment suite needs samples >= 2 and d >= 1");
  const QVector u = sample_signal({d, SignalKind::general, seed});
  const QVector v = sample_signal({d, SignalKind::general, seed + 1});
  RandomStream rng(seed, {kMomentStream});

  Accumulator m2;
  Accumulator m4;
  Accumulator m6;
  std::vector<Accumulator> cross(4 * d);
  for (std::size_t s = 0; s < samples; ++s) {
    const QMatrix row = sample_quaternion_gaussian(1, d, rng);  // the row is alpha^*
    Quaternion au{};
    Quaternion av{};
    for (std::size_t j = 0; j < d; ++j) {
      au += row(0, j) * u[j];
      av += row(0, j) * v[j];
    }
    const double s2 = abs2(au);
    m2.add(s2);
    m4.add(s2 * s2);
    m6.add(s2 * s2 * s2);
    const double wv = abs2(av);
    for (std::size_t j = 0; j < d; ++j) {
      Quaternion g = conj(row(0, j)) * au * wv;
      for (int c = 0; c < 4; ++c) cross[4 * j + c].add(component(g, c));
    }
  }

  std::vector<MomentCheck> out;
  out.push_back(m2.finish("E|a*u|^2", 1.0, samples));
  out.push_back(m4.finish("E|a*u|^4", 1.5, samples));
  out.push_back(m6.finish("E|a*u|^6", 3.0, samples));
  const Quaternion vu = inner(v, u);
  for (std::size_t j = 0; j < d; ++j) {
    Quaternion expect = u[j] + v[j] * vu * 0.5;
    for (int c = 0; c < 4; ++c) {
      static constexpr char kComp[] = "wxyz";
      out.push_back(cross[4 * j + c].finish(
          "E[a a*u |a*v|^2][" + std::to_string(j) + "]." + kComp[c], component(expect, c), samples));
    }
  }
  return out;
}

void write_moments_csv(std::ostream& os, const std::vector<MomentCheck>& checks) {
  const auto old = os.precision(17);
  os << "name,estimate,expected,std_error,pass\n";
  for (const auto& c : checks)
    os << '"' << c.name << "\"," << c.estimate << ',' << c.expected << ',' << c.std_error << ',' << (c.pass ? 1 : 0)
       << '\n';
  os.precision(old);
}

std::vector<SelfCheck> selftest(std::uint64_t seed) {
  std::vector<SelfCheck> out;
  out.push_back(gradient_check(seed));
  out.push_back(homomorphism_check(seed));
  out.push_back(phase_invariance_check(seed));
  out.push_back(purify_check(seed));
  out.push_back(kernel_check(seed));
  out.push_back(recovery_check(seed));
  const auto moments = moment_suite(20000, 3, seed);
  int failed = 0;
  for (const auto& m : moments) failed += m.pass ? 0 : 1;
  out.push_back({"moments", failed <= 1, std::to_string(failed) + " of " + std::to_string(moments.size()) +
                                             " estimates outside 3 standard errors"});
  return out;
}

}  // namespace qpr
