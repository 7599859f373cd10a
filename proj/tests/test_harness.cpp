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
#include <sstream>

#include "qpr/harness.hpp"
#include "test_util.hpp"

namespace qpr {
namespace {

// CSV without its wall-clock column, the one field that legitimately varies.
std::string without_wall_time(const std::vector<SweepRow>& rows) {
  std::vector<SweepRow> copy = rows;
  for (auto& r : copy) r.mean_wall_ms = 0.0;
  std::ostringstream os;
  write_sweep_csv(os, copy);
  return os.str();
}

Image random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
  RandomStream rng(seed);
  Image img(w, h);
  for (auto& v : img.rgb) v = static_cast<std::uint8_t>(rng.engine()() % 256);
  return img;
}

TEST(RatioGrid, RangeAndListForms) {
  const auto g = parse_ratio_grid("3:0.5:13");
  ASSERT_EQ(g.size(), 21u);
  EXPECT_EQ(g.front(), 3.0);
  EXPECT_EQ(g.back(), 13.0);
  EXPECT_EQ(parse_ratio_grid("4, 6,8.5"), (std::vector<double>{4.0, 6.0, 8.5}));
  EXPECT_EQ(parse_ratio_grid("0.1:0.1:0.3").size(), 3u);
  for (const char* bad : {"", "3:0:5", "5:1:3", "3,2", "a,b", "0,1", "1:2"})
    EXPECT_THROW(parse_ratio_grid(bad), std::invalid_argument) << bad;
}

TEST(Sweep, BudgetBookkeeping) {
  EXPECT_EQ(measurement_count(6.5, 50), 325u);
  EXPECT_EQ(measurement_count(7.5, 256), 1920u);
  EXPECT_EQ(measurement_count(3.0, 100), 300u);
}

TEST(Sweep, OversampledSingleTrialSucceeds) {
  SweepSpec spec;
  spec.d = 10;
  spec.ratios = {20.0};
  spec.trials = 1;
  spec.solver = {Model::quaternion, Algorithm::qwf, RealAlgorithm::wf};
  spec.cfg = default_config(spec.solver);
  const auto rows = success_sweep(spec);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].n, 200u);
  EXPECT_EQ(rows[0].rate, 1.0);
  EXPECT_LT(rows[0].mean_final_error, 1e-5);
}

TEST(Sweep, AccountingDeterminismAndThreads) {
  SweepSpec spec;
  spec.d = 8;
  spec.ratios = {2.0, 4.0, 8.0};
  spec.trials = 6;
  spec.solver = {Model::quaternion, Algorithm::pqtaf, RealAlgorithm::wf};
  spec.cfg = default_config(spec.solver);
  spec.cfg.iters = 60;
  spec.threads = 1;
  const auto a = success_sweep(spec);
  spec.threads = 3;
  const auto b = success_sweep(spec);
  EXPECT_EQ(without_wall_time(a), without_wall_time(b));
  for (const auto& r : a) {
    EXPECT_LE(r.successes, r.trials);
    EXPECT_GE(r.rate, 0.0);
    EXPECT_LE(r.rate, 1.0);
    EXPECT_EQ(r.n, measurement_count(r.ratio, 8));
  }
  std::ostringstream os;
  write_sweep_csv(os, a);
  const std::string csv = os.str();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "ratio,n,successes,trials,rate,mean_final_error,mean_wall_ms");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Sweep, RealModelsRun) {
  SweepSpec spec;
  spec.d = 6;
  spec.ratios = {12.0};
  spec.trials = 2;
  for (Model m : {Model::mono, Model::concat}) {
    spec.solver = {m, Algorithm::qwf, RealAlgorithm::taf};
    spec.cfg = default_config(spec.solver);
    const auto rows = success_sweep(spec);
    EXPECT_EQ(rows[0].trials, 2);
    EXPECT_EQ(rows[0].successes + rows[0].divergences <= 2, true);
  }
}

TEST(Sweep, FullSuccessOnset) {
  std::vector<SweepRow> rows(4);
  const double rates[] = {0.0, 1.0, 0.9, 1.0};
  for (int i = 0; i < 4; ++i) {
    rows[i].ratio = 3.0 + i;
    rows[i].rate = rates[i];
  }
  EXPECT_EQ(full_success_onset(rows, 0.95), 6.0);
  EXPECT_EQ(full_success_onset(rows, 0.85), 4.0);
  rows[3].rate = 0.5;
  EXPECT_FALSE(full_success_onset(rows, 0.95).has_value());
}

TEST(Solver, ParsingAndDefaults) {
  EXPECT_TRUE(parse_solver("qwf", Model::quaternion).has_value());
  EXPECT_FALSE(parse_solver("qwf", Model::mono).has_value());
  EXPECT_FALSE(parse_solver("wf", Model::quaternion).has_value());
  const auto s = parse_solver("taf", Model::concat);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(describe(*s), "taf/concat");
  EXPECT_EQ(default_config(*s).eta1, 1.2);
  EXPECT_TRUE(recovers_pure(*s));
  EXPECT_FALSE(recovers_pure({Model::quaternion, Algorithm::qtaf, RealAlgorithm::wf}));
  EXPECT_EQ(parse_model("concat"), Model::concat);
  EXPECT_FALSE(parse_model("rgb").has_value());
}

TEST(Trace, FirstRowIsTheInitializerError) {
  TraceSpec spec;
  spec.d = 10;
  spec.ratio = 10.0;
  spec.solver = {Model::quaternion, Algorithm::qwf, RealAlgorithm::wf};
  spec.cfg = default_config(spec.solver);
  spec.cfg.iters = 30;
  spec.seed = 3;
  const auto rows = convergence_trace(spec);
  ASSERT_EQ(rows.size(), 31u);
  const QVector x = sample_signal({10, SignalKind::general, 3});
  const Ensemble e = sample_ensemble(100, 10, 3);
  const QVector z0 = spectral_init(e, observe(e, x));
  EXPECT_NEAR(rows[0].log10_error, std::log10(dist(z0, x)), 1e-12);
  std::ostringstream os;
  write_trace_rows_csv(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "iter,log10_error,elapsed_ns");
}

TEST(Trace, PureTracesSitOnRoundBoundaries) {
  TraceSpec spec;
  spec.d = 10;
  spec.solver = {Model::quaternion, Algorithm::pqwf, RealAlgorithm::wf};
  spec.cfg = default_config(spec.solver);
  spec.cfg.iters = 8;
  const auto rows = convergence_trace(spec);
  ASSERT_EQ(rows.size(), 9u);
  for (std::size_t r = 0; r < rows.size(); ++r) EXPECT_EQ(rows[r].iter, static_cast<std::int64_t>(5 * r));
}

TEST(Trace, ModelsSupported) {
  TraceSpec spec;
  spec.d = 6;
  spec.solver = {Model::concat, Algorithm::qwf, RealAlgorithm::taf};
  spec.cfg = default_config(spec.solver);
  spec.cfg.iters = 5;
  EXPECT_EQ(convergence_trace(spec).size(), 6u);
  spec.solver.model = Model::mono;
  EXPECT_THROW(convergence_trace(spec), std::invalid_argument);
}

TEST(LineFitTest, ExactLine) {
  const auto f = fit_line({0, 1, 2, 3}, {1, -1, -3, -5});
  EXPECT_NEAR(f.slope, -2.0, 1e-15);
  EXPECT_NEAR(f.intercept, 1.0, 1e-15);
  EXPECT_NEAR(f.r2, 1.0, 1e-15);
  EXPECT_THROW(fit_line({1, 1}, {0, 1}), std::invalid_argument);
}

TEST(Psnr, KnownValues) {
  const Image a = random_image(4, 4, 1);
  EXPECT_TRUE(std::isinf(psnr(a, a)));
  Image b = a;
  for (auto& v : b.rgb) v = v == 255 ? 254 : v + 1;  // every sample off by exactly one
  EXPECT_NEAR(psnr(a, b), 20.0 * std::log10(255.0), 1e-12);
  EXPECT_NEAR(psnr(a, b), 48.1308036, 1e-6);
  EXPECT_EQ(psnr(a, b), psnr(b, a));
  EXPECT_THROW(psnr(a, Image(2, 2)), std::invalid_argument);
}

TEST(Ppm, RoundTripAndComments) {
  const Image a = random_image(5, 3, 2);
  std::stringstream ss;
  write_ppm(ss, a);
  EXPECT_EQ(read_ppm(ss), a);
  std::string header = "P6\n# a comment\n2 1\n255\n";
  std::string body = {'\x01', '\x02', '\x03', '\x04', '\x05', '\x06'};
  std::istringstream is(header + body);
  const Image b = read_ppm(is);
  EXPECT_EQ(b.width, 2u);
  EXPECT_EQ(b.at(1, 0, 2), 6);
  std::istringstream bad("P3\n1 1\n255\n0 0 0\n");
  EXPECT_THROW(read_ppm(bad), std::runtime_error);
  std::istringstream truncated("P6\n2 2\n255\nabc");
  EXPECT_THROW(read_ppm(truncated), std::runtime_error);
}

TEST(ImagePipeline, ExactPathIsLossless) {
  ImageJob job;
  job.image = random_image(32, 16, 3);
  job.exact = true;
  const auto res = image_experiment(job);
  EXPECT_EQ(res.reconstruction, job.image);
  EXPECT_TRUE(std::isinf(res.psnr));
  ASSERT_EQ(res.blocks.size(), 2u);
  for (const auto& b : res.blocks) {
    EXPECT_LT(b.relative_error, 1e-9);
    EXPECT_TRUE(b.success);
  }
  std::ostringstream os;
  write_block_csv(os, res.blocks);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "block_id,relative_error,sigma3,success_flag");
}

TEST(ImagePipeline, RejectsBadJobs) {
  ImageJob job;
  job.image = random_image(20, 16, 4);
  EXPECT_THROW(image_experiment(job), std::invalid_argument);
  job.image = random_image(16, 16, 4);
  job.algo = Algorithm::qtaf;
  EXPECT_THROW(image_experiment(job), std::invalid_argument);
}

TEST(ImagePipeline, DuplicatedChannelIsFlagged) {
  RandomStream rng(5);
  QVector block(64);
  for (auto& q : block) {
    const double r = rng.uniform();
    q = {0.0, r, r, rng.uniform()};
  }
  EXPECT_LT(sigma3(block), kLowRankSigma3);
  const auto out = recover_block(block, 480, Algorithm::pqtaf, default_config(Algorithm::pqtaf), 5, true);
  EXPECT_TRUE(out.record.low_rank);
  QVector full(64);
  for (auto& q : full) q = {0.0, rng.uniform(), rng.uniform(), rng.uniform()};
  EXPECT_GT(sigma3(full), kLowRankSigma3);
}

TEST(ImagePipeline, BlackBlockIsTrivial) {
  const auto out = recover_block(QVector(16), 120, Algorithm::pqtaf, default_config(Algorithm::pqtaf), 1);
  EXPECT_TRUE(out.record.success);
  EXPECT_EQ(norm(out.estimate), 0.0);
}

TEST(Moments, SmallSuitePasses) {
  const auto checks = moment_suite(20000, 3, 7);
  ASSERT_EQ(checks.size(), 3u + 12u);
  int failed = 0;
  for (const auto& c : checks) failed += c.pass ? 0 : 1;
  EXPECT_LE(failed, 1);
  EXPECT_NEAR(checks[0].estimate, 1.0, 0.05);
}

TEST(SelfTest, AllChecksPass) {
  for (const auto& c : selftest(1)) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
}

}  // namespace
}  // namespace qpr
