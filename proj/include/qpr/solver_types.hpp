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

#include <chrono>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpr/dense.hpp"
#include "qpr/kernels.hpp"

namespace qpr {

/// Solver knobs shared by every algorithm.
///
/// `eta1` is the step numerator. Wirtinger-flow steps use eta1 / ||z0||^2;
/// the truncated flows (TWF/TAF families) use eta1 directly.
struct SolverConfig {
  double eta1 = 0.2;
  int iters = 1500;  // updates, or purification rounds for the pure variants
  int tp = 5;        // inner updates per purification round
  double theta_z_lb = 0.3;
  double theta_z_ub = 4.5;
  double theta_h = 5.0;
  double theta_y = 3.0;
  double gamma = 0.8;
  double rho = 1.0 / 6.0;
  int power_iters = 100;
  double success_tol = 1e-5;
  // Stop once the recorded error (true error, or residual in blind mode)
  // drops below this. 0 disables, which is the reference behaviour.
  double stop_tol = 0.0;
  kernels::Backend backend = kernels::Backend::parallel;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

struct TracePoint {
  std::int64_t iter = 0;
  double error = 0.0;
  std::int64_t elapsed_ns = 0;
};

/// Convergence record of one run. In benchmark mode (true signal supplied)
/// `error` is the distance to the truth; otherwise it is the relative
/// intensity residual || |Az|^2 - y || / ||y||.
template <class T>
struct BasicRunTrace {
  std::vector<TracePoint> points;
  DenseVector<T> final;
  std::int64_t iterations_run = 0;
  std::chrono::nanoseconds wall_time{0};
  bool benchmark = false;
  double final_error = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> notes;

  std::vector<double> errors() const {
    std::vector<double> e;
    e.reserve(points.size());
    for (const auto& p : points) e.push_back(p.error);
    return e;
  }
};

using RunTrace = BasicRunTrace<Quaternion>;
using RealRunTrace = BasicRunTrace<double>;

/// Raised when an iterate exceeds 1e6 * ||z0|| or becomes non-finite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes "iter,error,elapsed_ns" rows.
template <class T>
void write_trace_csv(std::ostream& os, const BasicRunTrace<T>& trace) {
  const auto old = os.precision(17);
  os << "iter,error,elapsed_ns\n";
  for (const auto& p : trace.points) os << p.iter << ',' << p.error << ',' << p.elapsed_ns << '\n';
  os.precision(old);
}

}  // namespace qpr
