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

#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <random>

#include "qpr/dense.hpp"

namespace qpr {

/// Reproducible random stream keyed by (seed, path). Distinct paths give
/// independent streams, so parallel trials never share generator state.
///
/// Normal draws use std::normal_distribution, so values are stable per
/// platform/standard library but not across them.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {});

  double normal() { return normal_(engine_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Stream labels used under a common seed.
enum StreamTag : std::uint64_t {
  kEnsembleStream = 0x656e73,  // "ens"
  kSignalStream = 0x736967,    // "sig"
};

/// Quaternion Gaussian ensemble: every component of every entry is an
/// independent N(0, 1/4) draw, so E|A_kj|^2 = 1. Row k of A is alpha_k^*.
struct Ensemble {
  QMatrix a;
  std::uint64_t seed = 0;

  std::size_t n() const { return a.rows(); }
  std::size_t d() const { return a.cols(); }
};

Ensemble sample_ensemble(std::size_t n, std::size_t d, std::uint64_t seed);
QMatrix sample_quaternion_gaussian(std::size_t n, std::size_t d, RandomStream& rng);

enum class SignalKind { general, pure, pure_nonnegative };

struct SignalSpec {
  std::size_t d = 1;
  SignalKind kind = SignalKind::general;
  std::uint64_t seed = 0;
};

/// Unit-norm test signal. General entries draw N(0,1) in all four
/// components; pure kinds leave the real part exactly zero, and
/// pure_nonnegative takes absolute values of the imaginary draws.
QVector sample_signal(const SignalSpec& spec);
QVector sample_signal(std::size_t d, SignalKind kind, RandomStream& rng);

/// Phaseless data: y_k = |alpha_k^* x|^2 and amp_k = |alpha_k^* x|.
struct Observations {
  RVector y;
  RVector amp;

  std::size_t n() const { return y.size(); }
};

template <class T>
Observations observe(const DenseMatrix<T>& a, const DenseVector<T>& x) {
  const DenseVector<T> ax = matvec(a, x);
  Observations obs{RVector(ax.size()), RVector(ax.size())};
  for (std::size_t k = 0; k < ax.size(); ++k) {
    obs.y[k] = abs2(ax[k]);
    obs.amp[k] = std::sqrt(obs.y[k]);
  }
  return obs;
}

inline Observations observe(const Ensemble& e, const QVector& x) { return observe(e.a, x); }

/// Debug dump: index, the 8 real components of the row's first two
/// entries (blank when d < 2), y, y_amp.
void write_observations_csv(std::ostream& os, const Ensemble& e, const Observations& obs);

}  // namespace qpr
