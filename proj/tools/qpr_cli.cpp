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

// qpr: command-line experiment runner.
//
//   qpr sweep    --algo qwf --d 50 --ratios 3:0.5:13 --trials 50
//   qpr trace    --algo pqwf --d 50 --ratio 10
//   qpr image    --in photo.ppm --out blocks.csv --out-image rec.ppm
//   qpr moments  --samples 100000
//   qpr selftest
//
// Exit codes: 0 ok, 1 I/O or other failure, 2 bad configuration,
// 3 solver divergence.

#include <omp.h>

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "qpr/harness.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SolverFlags {
  std::string algo;
  std::string model = "quaternion";
  std::optional<double> eta1;
  std::optional<int> tp;
  std::optional<int> iters;
  std::optional<double> stop_tol;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& f, const std::string& default_algo) {
  f.algo = default_algo;
  cmd->add_option("--algo", f.algo,
                  "qwf, pqwf, qtwf, qtaf, pqtwf, pqtaf, qwf-purify-end, pqwf-drop-real, qwf-drop-real, "
                  "or wf, twf, taf with --model mono|concat")
      ->capture_default_str();
  cmd->add_option("--model", f.model, "quaternion, mono or concat")->capture_default_str();
  cmd->add_option("--eta1", f.eta1, "step numerator (default per algorithm)");
  cmd->add_option("--tp", f.tp, "inner updates per purification round");
  cmd->add_option("--iters", f.iters,
                  "updates, or purification rounds for pure algorithms (default 1500 updates in total)");
  cmd->add_option("--stop-tol", f.stop_tol, "stop once the recorded error falls below this (0 = never)");
  cmd->add_option("--seed", f.seed, "base seed")->capture_default_str();
  cmd->add_option("--threads", f.threads, "worker threads (0 = all)")->capture_default_str();
  cmd->add_option("--out", f.out, "CSV output path (default stdout)");
}

qpr::SolverChoice solver_of(const SolverFlags& f) {
  const auto model = qpr::parse_model(f.model);
  if (!model) throw ConfigError("unknown model '" + f.model + "'");
  const auto s = qpr::parse_solver(f.algo, *model);
  if (!s) throw ConfigError("algorithm '" + f.algo + "' is not available for model '" + f.model + "'");
  return *s;
}

qpr::SolverConfig config_of(const SolverFlags& f, const qpr::SolverChoice& s) {
  qpr::SolverConfig cfg = qpr::default_config(s);
  const bool rounds = s.model == qpr::Model::quaternion && qpr::is_pure_algorithm(s.algo) &&
                      s.algo != qpr::Algorithm::qwf_purify_end && s.algo != qpr::Algorithm::qwf_drop_real;
  if (f.eta1) cfg.eta1 = *f.eta1;
  if (f.tp) {
    cfg.tp = *f.tp;
    // Keep the total update budget when only the period changes.
    if (rounds && !f.iters && cfg.tp > 0) cfg.iters = std::max(1, 1500 / cfg.tp);
  }
  if (f.iters) cfg.iters = *f.iters;
  if (f.stop_tol) cfg.stop_tol = *f.stop_tol;
  if (f.threads < 0) throw ConfigError("--threads must be >= 0");
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

// Stdout unless a path is given.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw std::runtime_error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quaternion phase retrieval experiments"};
  app.require_subcommand(1);

  // sweep
  SolverFlags sweep_f;
  std::size_t sweep_d = 50;
  std::string sweep_ratios = "3:0.5:13";
  int sweep_trials = 50;
  bool sweep_full = false;
  auto* sweep = app.add_subcommand("sweep", "success rate over an n/d grid");
  add_solver_flags(sweep, sweep_f, "qwf");
  sweep->add_option("--d", sweep_d, "signal length")->capture_default_str();
  sweep->add_option("--ratios", sweep_ratios, "n/d grid, lo:step:hi or a comma list")->capture_default_str();
  sweep->add_option("--trials", sweep_trials, "trials per ratio")->capture_default_str();
  sweep->add_flag("--full", sweep_full, "reference scale: d = 100, 100 trials");

  // trace
  SolverFlags trace_f;
  std::size_t trace_d = 50;
  double trace_ratio = 10.0;
  auto* trace = app.add_subcommand("trace", "error curve of one run");
  add_solver_flags(trace, trace_f, "qwf");
  trace->add_option("--d", trace_d, "signal length")->capture_default_str();
  trace->add_option("--ratio", trace_ratio, "n/d")->capture_default_str();

  // image
  SolverFlags image_f;
  std::string image_in;
  std::string image_out;
  std::size_t image_block = 16;
  double image_os = 7.5;
  bool image_exact = false;
  auto* image = app.add_subcommand("image", "block-wise recovery of a PPM colour image");
  add_solver_flags(image, image_f, "pqtaf");
  image->add_option("--in", image_in, "input image (binary PPM, P6)")->required();
  image->add_option("--out-image", image_out, "reconstructed image (PPM)");
  image->add_option("--block", image_block, "block edge in pixels")->capture_default_str();
  image->add_option("--oversampling", image_os, "measurements per pixel")->capture_default_str();
  image->add_flag("--exact", image_exact, "skip the solver (pipeline check)");

  // moments
  std::size_t mom_samples = 100000;
  std::size_t mom_d = 4;
  std::uint64_t mom_seed = 1;
  std::string mom_out;
  auto* moments = app.add_subcommand("moments", "Monte-Carlo moments of the Gaussian ensemble");
  moments->add_option("--samples", mom_samples)->capture_default_str();
  moments->add_option("--d", mom_d)->capture_default_str();
  moments->add_option("--seed", mom_seed)->capture_default_str();
  moments->add_option("--out", mom_out, "CSV output path (default stdout)");

  // selftest
  std::uint64_t self_seed = 1;
  auto* self = app.add_subcommand("selftest", "quick property checks");
  self->add_option("--seed", self_seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sweep) {
      if (sweep_full) {
        sweep_d = 100;
        sweep_trials = 100;
      }
      qpr::SweepSpec spec;
      spec.solver = solver_of(sweep_f);
      spec.cfg = config_of(sweep_f, spec.solver);
      spec.d = sweep_d;
      spec.trials = sweep_trials;
      spec.base_seed = sweep_f.seed;
      spec.threads = sweep_f.threads;
      try {
        spec.ratios = qpr::parse_ratio_grid(sweep_ratios);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      if (spec.d < 1 || spec.trials < 1) throw ConfigError("--d and --trials must be >= 1");
      Output out(sweep_f.out);
      const auto rows = qpr::success_sweep(spec);
      qpr::write_sweep_csv(out.stream(), rows);
      int div = 0;
      for (const auto& r : rows) div += r.divergences;
      if (div > 0) std::cerr << "note: " << div << " trial(s) diverged and were counted as failures\n";
    } else if (*trace) {
      qpr::TraceSpec spec;
      spec.solver = solver_of(trace_f);
      spec.cfg = config_of(trace_f, spec.solver);
      spec.d = trace_d;
      spec.ratio = trace_ratio;
      spec.seed = trace_f.seed;
      if (spec.solver.model == qpr::Model::mono) throw ConfigError("trace does not support the mono model");
      if (!(trace_ratio > 0.0) || trace_d < 1) throw ConfigError("--d and --ratio must be positive");
      if (trace_f.threads > 0) omp_set_num_threads(trace_f.threads);
      Output out(trace_f.out);
      qpr::write_trace_rows_csv(out.stream(), qpr::convergence_trace(spec));
    } else if (*image) {
      qpr::ImageJob job;
      const auto s = solver_of(image_f);
      if (s.model != qpr::Model::quaternion || !qpr::is_pure_algorithm(s.algo))
        throw ConfigError("image recovery needs a pure quaternion algorithm (pqwf, pqtwf, pqtaf, ...)");
      job.algo = s.algo;
      job.cfg = config_of(image_f, s);
      job.block = image_block;
      job.oversampling = image_os;
      job.base_seed = image_f.seed;
      job.threads = image_f.threads;
      job.exact = image_exact;
      job.image = qpr::read_ppm(image_in);
      if (job.block == 0 || job.image.width % job.block != 0 || job.image.height % job.block != 0)
        throw ConfigError("image size is not divisible by the block size");
      if (!(image_os > 0.0)) throw ConfigError("--oversampling must be > 0");
      Output out(image_f.out);
      const auto res = qpr::image_experiment(job);
      qpr::write_block_csv(out.stream(), res.blocks);
      if (!image_out.empty()) qpr::write_ppm(image_out, res.reconstruction);
      std::size_t low = 0;
      std::size_t ok = 0;
      for (const auto& b : res.blocks) {
        low += b.low_rank ? 1 : 0;
        ok += b.success ? 1 : 0;
      }
      std::cerr << "psnr " << res.psnr << " dB, " << ok << "/" << res.blocks.size() << " blocks exact";
      if (low > 0) std::cerr << ", " << low << " block(s) with sigma3 < " << qpr::kLowRankSigma3;
      std::cerr << '\n';
    } else if (*moments) {
      if (mom_samples < 2 || mom_d < 1) throw ConfigError("--samples must be >= 2 and --d >= 1");
      Output out(mom_out);
      const auto checks = qpr::moment_suite(mom_samples, mom_d, mom_seed);
      qpr::write_moments_csv(out.stream(), checks);
    } else if (*self) {
      bool all = true;
      for (const auto& c : qpr::selftest(self_seed)) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        all = all && c.pass;
      }
      return all ? 0 : kExitFailure;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const qpr::DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
