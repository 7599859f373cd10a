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

// Experiment drivers: success-rate sweeps, convergence traces, colour image
// recovery, and the Monte-Carlo moment suite. Everything here emits plain
// rows; the CLI turns them into CSV.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qpr/algorithms.hpp"
#include "qpr/baselines.hpp"

namespace qpr {

enum class Model { quaternion, mono, concat };

std::optional<Model> parse_model(std::string_view name);
std::string_view to_string(Model m);

/// Which solver a trial runs: a quaternion algorithm, or a real algorithm
/// applied through one of the two channel layouts.
struct SolverChoice {
  Model model = Model::quaternion;
  Algorithm algo = Algorithm::qwf;
  RealAlgorithm real_algo = RealAlgorithm::wf;
};

/// Pairs an --algo name with a --model. Quaternion names need the quaternion
/// model; wf/twf/taf need mono or concat.
std::optional<SolverChoice> parse_solver(std::string_view algo, Model model);
std::string describe(const SolverChoice& s);
SolverConfig default_config(const SolverChoice& s);

/// True when trials draw pure signals and score with dist_p.
bool recovers_pure(const SolverChoice& s);

/// round(ratio * d).
std::size_t measurement_count(double ratio, std::size_t d);

/// "lo:step:hi" (inclusive, MATLAB style) or a comma list. Throws
/// std::invalid_argument on malformed, empty, non-positive or
/// non-ascending grids.
std::vector<double> parse_ratio_grid(std::string_view text);

/// Seed of trial t at ratio index r. Solvers compared under the same base
/// seed see identical signals and (quaternion) ensembles.
std::uint64_t trial_seed(std::uint64_t base_seed, std::size_t ratio_index, std::size_t trial);

struct TrialOutcome {
  double error = 0.0;  // dist or dist_p to the truth
  double wall_ms = 0.0;
  bool diverged = false;
};

/// One synthetic recovery: unit signal and ensemble from `seed`, n
/// measurements, solved with `cfg`. Divergence is reported, not thrown.
TrialOutcome run_trial(const SolverChoice& s, const SolverConfig& cfg, std::size_t d, std::size_t n,
                       std::uint64_t seed);

struct SweepSpec {
  std::size_t d = 50;
  std::vector<double> ratios;
  int trials = 50;
  SolverChoice solver;
  SolverConfig cfg;
  std::uint64_t base_seed = 1;
  int threads = 0;  // 0: OpenMP default
};

struct SweepRow {
  double ratio = 0.0;
  std::size_t n = 0;
  int successes = 0;
  int trials = 0;
  double rate = 0.0;
  double mean_final_error = 0.0;  // over trials that did not diverge; NaN if none
  double mean_wall_ms = 0.0;
  int divergences = 0;
};

/// Trials fan out over threads; each run is single-threaded and rows are
/// aggregated in index order, so output does not depend on scheduling.
std::vector<SweepRow> success_sweep(const SweepSpec& spec);

/// Columns: ratio,n,successes,trials,rate,mean_final_error,mean_wall_ms.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Smallest ratio from which every later row has rate >= threshold.
std::optional<double> full_success_onset(const std::vector<SweepRow>& rows, double threshold);

struct TraceSpec {
  std::size_t d = 50;
  double ratio = 10.0;
  SolverChoice solver;
  SolverConfig cfg;
  std::uint64_t seed = 1;
};

struct TraceRow {
  std::int64_t iter = 0;
  double log10_error = 0.0;
  std::int64_t elapsed_ns = 0;
};

/// Benchmark-mode trace of one run. Quaternion and concat models only.
/// Throws DivergenceError.
std::vector<TraceRow> convergence_trace(const TraceSpec& spec);

/// Columns: iter,log10_error,elapsed_ns.
void write_trace_rows_csv(std::ostream& os, const std::vector<TraceRow>& rows);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares line through (x, y); needs at least two distinct x.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Images

/// 8-bit RGB raster, row-major, interleaved.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(std::size_t w, std::size_t h) : width(w), height(h), rgb(w * h * 3, 0) {}
  std::uint8_t& at(std::size_t x, std::size_t y, int c) { return rgb[(y * width + x) * 3 + c]; }
  std::uint8_t at(std::size_t x, std::size_t y, int c) const { return rgb[(y * width + x) * 3 + c]; }
  bool operator==(const Image&) const = default;
};

/// Binary PPM (P6, maxval 255). Throws std::runtime_error on bad input.
Image read_ppm(std::istream& is);
Image read_ppm(const std::string& path);
void write_ppm(std::ostream& os, const Image& img);
void write_ppm(const std::string& path, const Image& img);

/// 10 log10(255^2 / MSE) over all channels; +inf for identical images.
/// Throws std::invalid_argument on a shape mismatch.
double psnr(const Image& a, const Image& b);

/// Pure quaternion vector (R, G, B)/255 of a block, pixels row-major.
QVector block_signal(const Image& img, std::size_t bx, std::size_t by, std::size_t block);

/// Third singular value of the d x 4 component matrix of x / ||x||.
double sigma3(const QVector& x);

/// Blocks below this sigma3 are reported as rank deficient.
inline constexpr double kLowRankSigma3 = 0.1;

struct BlockRecord {
  std::size_t block_id = 0;
  double relative_error = 0.0;  // ||estimate - x|| / ||x|| after sign alignment
  double sigma3 = 0.0;
  bool success = false;  // every 8-bit value recovered exactly
  bool low_rank = false;
};

struct BlockOutcome {
  QVector estimate;  // same scale as the input pixels
  BlockRecord record;
};

/// Recovers one block of pixel values in [0, 1] from `m` measurements with
/// a fresh ensemble drawn from `seed`. With `exact` the solver is skipped
/// and the normalized truth is fed through the rest of the pipeline.
BlockOutcome recover_block(const QVector& pixels, std::size_t m, Algorithm algo, const SolverConfig& cfg,
                           std::uint64_t seed, bool exact = false);

struct ImageJob {
  Image image;
  std::size_t block = 16;
  double oversampling = 7.5;  // measurements per block = round(oversampling * block^2)
  Algorithm algo = Algorithm::pqtaf;
  SolverConfig cfg;
  std::uint64_t base_seed = 1;
  int threads = 0;
  bool exact = false;
};

struct ImageResult {
  Image reconstruction;
  std::vector<BlockRecord> blocks;
  double psnr = 0.0;
};

/// Throws std::invalid_argument if the image does not tile into blocks or
/// the algorithm does not recover pure signals, DivergenceError from the
/// solver.
ImageResult image_experiment(const ImageJob& job);

/// Columns: block_id,relative_error,sigma3,success_flag.
void write_block_csv(std::ostream& os, const std::vector<BlockRecord>& blocks);

// ---------------------------------------------------------------------------
// Moments of the quaternion Gaussian ensemble

struct MomentCheck {
  std::string name;
  double estimate = 0.0;
  double expected = 0.0;
  double std_error = 0.0;
  bool pass = false;  // |estimate - expected| <= 3 std_error
};

/// Monte-Carlo estimates of E|a^* u|^2 = 1, E|a^* u|^4 = 3/2,
/// E|a^* u|^6 = 3 and every real component of E[a a^* u |a^* v|^2] =
/// u + (1/2) v v^* u, for random unit u, v in dimension d.
std::vector<MomentCheck> moment_suite(std::size_t samples, std::size_t d, std::uint64_t seed);

/// Columns: name,estimate,expected,std_error,pass.
void write_moments_csv(std::ostream& os, const std::vector<MomentCheck>& checks);

// ---------------------------------------------------------------------------
// Self-test

struct SelfCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Quick property checks (gradients against finite differences, algebra
/// identities, ambiguity laws, a small recovery). Seconds to run.
std::vector<SelfCheck> selftest(std::uint64_t seed);

}  // namespace qpr
