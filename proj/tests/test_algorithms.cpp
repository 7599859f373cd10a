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


#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "qpr/algorithms.hpp"
#include "qpr/linalg.hpp"
#include "test_util.hpp"

namespace qpr {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Instance {
  Ensemble e;
  QVector x;
  Observations obs;
};

Instance make_instance(std::size_t n, std::size_t d, std::uint64_t seed, SignalKind kind = SignalKind::general) {
  Instance in{sample_ensemble(n, d, seed), sample_signal({d, kind, seed}), {}};
  in.obs = observe(in.e, in.x);
  return in;
}

// ---- distances -------------------------------------------------------------

TEST(Dist, ZeroOnTheAmbiguityClass) {
  RandomStream rng(1);
  const QVector x = testing::random_qvector(6, rng);
  EXPECT_EQ(dist(x, x), 0.0);
  for (int t = 0; t < 20; ++t) EXPECT_NEAR(dist(x * testing::random_unit(rng), x), 0.0, 1e-13);
}

TEST(Dist, OrthogonalCaseUsesUnitSign) {
  QVector x(2);
  QVector z(2);
  x[0] = {1, 0, 0, 0};
  z[1] = {0, 2, 0, 0};
  EXPECT_NEAR(dist(z, x), std::sqrt(5.0), 1e-15);
}

TEST(Dist, NoSampledUnitDoesBetterAndInvariances) {
  RandomStream rng(2);
  for (int t = 0; t < 10; ++t) {
    const QVector x = testing::random_qvector(5, rng);
    const QVector z = testing::random_qvector(5, rng);
    const double d0 = dist(z, x);
    for (int s = 0; s < 1000; ++s) ASSERT_LE(d0, norm(z - x * testing::random_unit(rng)) + 1e-12);
    const Quaternion q = testing::random_unit(rng);
    EXPECT_NEAR(dist(z * q, x), d0, 1e-12);
    EXPECT_NEAR(dist(z, x * q), d0, 1e-12);
  }
}

TEST(DistP, MinimumOfTheTwoNorms) {
  RandomStream rng(3);
  const QVector x = testing::random_qvector(4, rng);
  const QVector z = testing::random_qvector(4, rng);
  EXPECT_EQ(dist_p(z, x), std::min(norm(z - x), norm(z + x)));
  EXPECT_EQ(dist_p(-x, x), 0.0);
  EXPECT_THROW(dist_p(z, QVector(3)), std::invalid_argument);
}

// ---- gradients against finite differences ----------------------------------

double wf_objective(const Instance& in, const QVector& v) {
  const auto a2 = testing::intensities(in.e.a, v);
  double s = 0.0;
  for (std::size_t k = 0; k < a2.size(); ++k) s += (a2[k] - in.obs.y[k]) * (a2[k] - in.obs.y[k]);
  return s / static_cast<double>(a2.size());
}

// Log-likelihood restricted to `mask` (all rows when empty).
double twf_objective(const Instance& in, const QVector& v, const std::vector<bool>& mask) {
  const auto a2 = testing::intensities(in.e.a, v);
  double s = 0.0;
  for (std::size_t k = 0; k < a2.size(); ++k)
    if (mask.empty() || mask[k]) s += in.obs.y[k] * std::log(a2[k]) - a2[k];
  return s / static_cast<double>(a2.size());
}

double taf_objective(const Instance& in, const QVector& v, const std::vector<bool>& mask) {
  const auto a2 = testing::intensities(in.e.a, v);
  double s = 0.0;
  for (std::size_t k = 0; k < a2.size(); ++k) {
    const double r = std::sqrt(a2[k]) - in.obs.amp[k];
    if (mask.empty() || mask[k]) s += r * r;
  }
  return s / static_cast<double>(a2.size());
}

SolverConfig untrimmed() {
  SolverConfig cfg;
  cfg.theta_z_lb = 0.0;
  cfg.theta_z_ub = kInf;
  cfg.theta_h = kInf;
  return cfg;
}

TEST(Gradients, MatchFiniteDifferencesUntrimmed) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance in = make_instance(40, 8, seed);
    RandomStream rng(seed, {99});
    const QVector z = in.x + testing::random_qvector(8, rng) * 0.3;
    const auto fd_wf = testing::quarter_fd_gradient([&](const QVector& v) { return wf_objective(in, v); }, z);
    const auto fd_twf = testing::quarter_fd_gradient([&](const QVector& v) { return twf_objective(in, v, {}); }, z);
    const auto fd_taf = testing::quarter_fd_gradient([&](const QVector& v) { return taf_objective(in, v, {}); }, z);
    EXPECT_LE(testing::rel_err(wf_gradient(in.e, in.obs, z), fd_wf), 1e-6) << "seed " << seed;
    EXPECT_LE(testing::rel_err(qtwf_gradient(in.e, in.obs, z, untrimmed()), fd_twf), 1e-6) << "seed " << seed;
    EXPECT_LE(testing::rel_err(qtaf_gradient(in.e, in.obs, z, 1e300), fd_taf), 1e-6) << "seed " << seed;
  }
}

TEST(Gradients, TrimmedMatchMaskedObjectives) {
  const SolverConfig cfg = default_config(Algorithm::qtwf);
  const double gamma = default_config(Algorithm::qtaf).gamma;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Instance in = make_instance(60, 6, seed);
    RandomStream rng(seed, {98});
    const QVector z = in.x + testing::random_qvector(6, rng) * 0.2;
    const auto a2 = testing::intensities(in.e.a, z);
    double kt = 0.0;
    for (std::size_t k = 0; k < a2.size(); ++k) kt += std::abs(in.obs.y[k] - a2[k]);
    kt /= static_cast<double>(a2.size());
    std::vector<bool> twf_mask(a2.size());
    std::vector<bool> taf_mask(a2.size());
    for (std::size_t k = 0; k < a2.size(); ++k) {
      const double ratio = std::sqrt(a2[k]) / norm(z);
      twf_mask[k] = ratio >= cfg.theta_z_lb && ratio <= cfg.theta_z_ub &&
                    std::abs(in.obs.y[k] - a2[k]) <= cfg.theta_h * kt * ratio;
      taf_mask[k] = std::sqrt(a2[k]) >= in.obs.amp[k] / (1.0 + gamma);
    }
    const auto fd_twf =
        testing::quarter_fd_gradient([&](const QVector& v) { return twf_objective(in, v, twf_mask); }, z);
    const auto fd_taf =
        testing::quarter_fd_gradient([&](const QVector& v) { return taf_objective(in, v, taf_mask); }, z);
    EXPECT_LE(testing::rel_err(qtwf_gradient(in.e, in.obs, z, cfg), fd_twf), 1e-6) << "seed " << seed;
    EXPECT_LE(testing::rel_err(qtaf_gradient(in.e, in.obs, z, gamma), fd_taf), 1e-6) << "seed " << seed;
  }
}

TEST(Gradients, VanishAtTheTruth) {
  const Instance in = make_instance(50, 7, 4);
  EXPECT_LE(norm(wf_gradient(in.e, in.obs, in.x)), 1e-10);
  EXPECT_LE(norm(qtwf_gradient(in.e, in.obs, in.x, default_config(Algorithm::qtwf))), 1e-10);
  EXPECT_LE(norm(qtaf_gradient(in.e, in.obs, in.x, 0.8)), 1e-10);
}

TEST(Gradients, WfStepIsRightPhaseEquivariant) {
  const Instance in = make_instance(50, 7, 5);
  RandomStream rng(5, {1});
  const QVector z = testing::random_qvector(7, rng);
  const Quaternion q = testing::random_unit(rng);
  const QVector lhs = wf_gradient(in.e, in.obs, z * q);
  const QVector rhs = wf_gradient(in.e, in.obs, z) * q;
  EXPECT_LE(norm(lhs - rhs), 1e-10 * (1.0 + norm(rhs)));
}

TEST(Gradients, TruncatedFlowsRejectZero) {
  const Instance in = make_instance(20, 3, 6);
  EXPECT_THROW(qtwf_gradient(in.e, in.obs, QVector(3), SolverConfig{}), std::domain_error);
  EXPECT_THROW(qtaf_gradient(in.e, in.obs, QVector(3), 0.8), std::domain_error);
}

TEST(Gradients, TafZeroMagnitudeRowsAreDropped) {
  Instance in = make_instance(20, 3, 7);
  for (std::size_t j = 0; j < 3; ++j) in.e.a(4, j) = Quaternion{};
  in.obs.amp[4] = 1.0;  // inconsistent on purpose: |alpha^* z| = 0 but y' > 0
  in.obs.y[4] = 1.0;
  RandomStream rng(7, {1});
  const QVector z = testing::random_qvector(3, rng);
  Observations zeroed = in.obs;
  zeroed.amp[4] = 0.0;
  zeroed.y[4] = 0.0;
  EXPECT_EQ(qtaf_gradient(in.e, in.obs, z, 0.8), qtaf_gradient(in.e, zeroed, z, 0.8));
}

// ---- initializations ------------------------------------------------------

TEST(Init, SelectionsFollowTheirRules) {
  const Instance in = make_instance(60, 5, 8);
  double mean = 0.0;
  for (double v : in.obs.y) mean += v;
  mean /= 60.0;
  const auto sel = qtwf_selection(in.obs, 1.0);
  for (std::size_t k = 0; k < 60; ++k) {
    const bool inside = in.obs.y[k] <= mean;
    EXPECT_EQ(std::find(sel.begin(), sel.end(), k) != sel.end(), inside);
  }
  const auto taf = qtaf_selection(in.e, in.obs, 1.0 / 6.0);
  EXPECT_EQ(taf.size(), 10u);  // ceil(60/6) exactly, despite 60 * (1/6) rounding up
  EXPECT_TRUE(std::is_sorted(taf.begin(), taf.end()));
  double min_in = kInf;
  double max_out = 0.0;
  for (std::size_t k = 0; k < 60; ++k) {
    double rn = 0.0;
    for (std::size_t j = 0; j < 5; ++j) rn += abs2(in.e.a(k, j));
    const double score = in.obs.amp[k] / std::sqrt(rn);
    if (std::find(taf.begin(), taf.end(), k) != taf.end())
      min_in = std::min(min_in, score);
    else
      max_out = std::max(max_out, score);
  }
  EXPECT_GE(min_in, max_out);
  EXPECT_EQ(qtaf_selection(in.e, in.obs, 0.05).size(), 3u);
}

TEST(Init, SpectralNormAndCorrelation) {
  const Instance in = make_instance(400, 10, 9);
  double mean = 0.0;
  for (double v : in.obs.y) mean += v;
  const QVector z0 = spectral_init(in.e, in.obs);
  EXPECT_NEAR(norm(z0), std::sqrt(mean / 400.0), 1e-12);
  EXPECT_LT(dist(z0, in.x), 0.5);
  EXPECT_LT(dist(qtwf_init(in.e, in.obs, 3.0), in.x), 0.5);
  EXPECT_LT(dist(qtaf_init(in.e, in.obs, 1.0 / 6.0), in.x), 0.5);
}

TEST(Init, ZeroDataGivesZeroEstimate) {
  Instance in = make_instance(20, 3, 10);
  for (auto& v : in.obs.y) v = 0.0;
  for (auto& v : in.obs.amp) v = 0.0;
  EXPECT_EQ(norm(spectral_init(in.e, in.obs)), 0.0);
  EXPECT_EQ(norm(qtaf_init(in.e, in.obs, 1.0 / 6.0)), 0.0);
  const auto trace = qwf_run(in.e, in.obs, default_config(Algorithm::qwf));
  EXPECT_EQ(trace.iterations_run, 0);
  EXPECT_FALSE(trace.notes.empty());
}

// ---- purification ---------------------------------------------------------

TEST(Purify, ReducesTheRealPartOptimally) {
  RandomStream rng(11);
  for (int t = 0; t < 50; ++t) {
    const QVector z = testing::random_qvector(6, rng);
    const Quaternion q = phase_factor_estimate(z);
    EXPECT_NEAR(abs(q), 1.0, 1e-12);
    double re_q = 0.0;
    double re_z = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      re_q += real(z[j] * q) * real(z[j] * q);
      re_z += real(z[j]) * real(z[j]);
    }
    EXPECT_LE(re_q, re_z + 1e-12);
    for (int s = 0; s < 200; ++s) {
      const Quaternion w = testing::random_unit(rng);
      double re_w = 0.0;
      for (const auto& e : z) re_w += real(e * w) * real(e * w);
      ASSERT_LE(re_q, re_w + 1e-12);
    }
    EXPECT_TRUE(is_pure(purify(z)));
  }
  EXPECT_THROW(phase_factor_estimate(QVector(3)), std::domain_error);
}

TEST(Purify, RecoversPureSignalsUpToSign) {
  RandomStream rng(12);
  for (int t = 0; t < 100; ++t) {
    const QVector x = sample_signal({10, SignalKind::pure, static_cast<std::uint64_t>(t)});
    ASSERT_GT(singular_values(vrep(x))[2], 1e-3);
    EXPECT_LE(dist_p(purify(x * testing::random_unit(rng)), x), 1e-9);
  }
}

TEST(Purify, SwappedChannelsAreSeparatedOnlyByQuaternionMeasurements) {
  RandomStream rng(13);
  const std::size_t d = 5;
  QVector x1(d);
  QVector x2(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double a = rng.normal();
    const double b = rng.normal();
    x1[j] = {0, a, b, 0};
    x2[j] = {0, b, a, 0};
  }
  QMatrix real_a(20, d);
  for (std::size_t k = 0; k < 20; ++k)
    for (std::size_t j = 0; j < d; ++j) real_a(k, j) = Quaternion(rng.normal());
  const auto r1 = observe(real_a, x1);
  const auto r2 = observe(real_a, x2);
  for (std::size_t k = 0; k < 20; ++k) EXPECT_NEAR(r1.y[k], r2.y[k], 1e-12 * (1.0 + r1.y[k]));
  const Ensemble e = sample_ensemble(20, d, 13);
  const auto q1 = observe(e, x1);
  const auto q2 = observe(e, x2);
  double diff = 0.0;
  for (std::size_t k = 0; k < 20; ++k) diff = std::max(diff, std::abs(q1.y[k] - q2.y[k]));
  EXPECT_GT(diff, 1e-3);
}

TEST(SignAlign, CanonicalizesNonnegativeSignals) {
  const QVector x = sample_signal({6, SignalKind::pure_nonnegative, 14});
  EXPECT_EQ(sign_align(x, true), x);
  EXPECT_EQ(sign_align(-x, true), x);
  EXPECT_EQ(sign_align(-x, false), -x);
}

// ---- runs -----------------------------------------------------------------

TEST(Runs, ConfigValidation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.eta1 = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.tp = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.theta_z_lb = 5.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SolverConfig{};
  cfg.iters = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Runs, DefaultsAndNames) {
  EXPECT_EQ(default_config(Algorithm::qwf).eta1, 0.2);
  EXPECT_EQ(default_config(Algorithm::pqwf).eta1, 0.15);
  EXPECT_EQ(default_config(Algorithm::qtwf).eta1, 0.8);
  EXPECT_EQ(default_config(Algorithm::pqtaf).eta1, 1.2);
  EXPECT_EQ(default_config(Algorithm::qwf).iters, 1500);
  EXPECT_EQ(default_config(Algorithm::pqwf).iters * default_config(Algorithm::pqwf).tp, 1500);
  for (auto a : {Algorithm::qwf, Algorithm::pqwf, Algorithm::qtwf, Algorithm::qtaf, Algorithm::pqtwf,
                 Algorithm::pqtaf, Algorithm::qwf_purify_end, Algorithm::pqwf_drop_real, Algorithm::qwf_drop_real})
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  EXPECT_FALSE(parse_algorithm("nope").has_value());
  EXPECT_FALSE(is_pure_algorithm(Algorithm::qtaf));
  EXPECT_TRUE(is_pure_algorithm(Algorithm::qwf_drop_real));
}

TEST(Runs, ZeroIterationsReturnsTheInitializer) {
  const Instance in = make_instance(100, 8, 15);
  SolverConfig cfg = default_config(Algorithm::qwf);
  cfg.iters = 0;
  const auto trace = qwf_run(in.e, in.obs, cfg, &in.x);
  EXPECT_EQ(trace.final, spectral_init(in.e, in.obs));
  ASSERT_EQ(trace.points.size(), 1u);
  EXPECT_EQ(trace.points[0].error, dist(trace.final, in.x));
}

TEST(Runs, DivergenceIsReported) {
  const Instance in = make_instance(100, 8, 16);
  SolverConfig cfg = default_config(Algorithm::qwf);
  cfg.eta1 = 50.0;
  EXPECT_THROW(qwf_run(in.e, in.obs, cfg), DivergenceError);
}

TEST(Runs, EveryGeneralSolverRecovers) {
  const Instance in = make_instance(200, 20, 17);
  for (auto a : {Algorithm::qwf, Algorithm::qtwf, Algorithm::qtaf}) {
    const auto trace = run_algorithm(a, in.e, in.obs, default_config(a), &in.x);
    EXPECT_LT(trace.final_error, 1e-5) << to_string(a);
    EXPECT_EQ(trace.final_error, dist(trace.final, in.x));
    EXPECT_EQ(trace.points.size(), 1501u);
  }
}

TEST(Runs, EveryPureSolverRecoversAndStaysPure) {
  const Instance in = make_instance(200, 20, 18, SignalKind::pure);
  for (auto a : {Algorithm::pqwf, Algorithm::pqtwf, Algorithm::pqtaf, Algorithm::qwf_purify_end}) {
    const auto trace = run_algorithm(a, in.e, in.obs, default_config(a), &in.x);
    EXPECT_TRUE(is_pure(trace.final)) << to_string(a);
    EXPECT_LT(trace.final_error, 1e-8) << to_string(a);
    EXPECT_EQ(trace.final_error, dist_p(trace.final, in.x));
  }
  const auto pq = pqwf_run(in.e, in.obs, default_config(Algorithm::pqwf), &in.x);
  ASSERT_EQ(pq.points.size(), 301u);
  for (std::size_t r = 0; r < pq.points.size(); ++r) EXPECT_EQ(pq.points[r].iter, static_cast<std::int64_t>(5 * r));
}

TEST(Runs, BlindModeRecordsResidual) {
  const Instance in = make_instance(200, 20, 19);
  const auto trace = qwf_run(in.e, in.obs, default_config(Algorithm::qwf));
  EXPECT_FALSE(trace.benchmark);
  EXPECT_TRUE(std::isnan(trace.final_error));
  EXPECT_LT(trace.points.back().error, 1e-8);
  EXPECT_GT(trace.points.front().error, trace.points.back().error);
}

TEST(Runs, StopTolerance) {
  const Instance in = make_instance(200, 20, 20);
  SolverConfig cfg = default_config(Algorithm::qwf);
  cfg.stop_tol = 1e-6;
  const auto trace = qwf_run(in.e, in.obs, cfg, &in.x);
  EXPECT_LT(trace.iterations_run, 1500);
  EXPECT_LT(trace.final_error, 1e-6);
  EXPECT_GE(trace.points[trace.points.size() - 2].error, 1e-6);
}

TEST(Runs, SerialAndParallelBackendsAgree) {
  const Instance in = make_instance(300, 12, 21);
  SolverConfig cfg = default_config(Algorithm::qtaf);
  cfg.iters = 50;
  cfg.backend = kernels::Backend::serial;
  const auto a = qtaf_run(in.e, in.obs, cfg, &in.x);
  cfg.backend = kernels::Backend::parallel;
  const auto b = qtaf_run(in.e, in.obs, cfg, &in.x);
  EXPECT_LE(norm(a.final - b.final), 1e-12);
}

TEST(Runs, QwfDescentIsMonotoneInPractice) {
  int monotone = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Instance in = make_instance(100, 10, 1000 + seed);
    SolverConfig cfg = default_config(Algorithm::qwf);
    cfg.backend = kernels::Backend::serial;
    const auto err = qwf_run(in.e, in.obs, cfg, &in.x).errors();
    bool ok = true;
    for (std::size_t t = err.size() / 10 + 1; t < err.size(); ++t) ok = ok && err[t] <= err[t - 1] + 1e-12;
    monotone += ok ? 1 : 0;
  }
  EXPECT_GE(monotone, 95);
}

}  // namespace
}  // namespace qpr
