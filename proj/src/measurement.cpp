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

#include "qpr/measurement.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace qpr {

RandomStream::RandomStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 1));
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (std::uint64_t p : path) push(p);
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
}

QMatrix sample_quaternion_gaussian(std::size_t n, std::size_t d, RandomStream& rng) {
  QMatrix a(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      Quaternion& q = a(i, j);
      q.w = 0.5 * rng.normal();
      q.x = 0.5 * rng.normal();
      q.y = 0.5 * rng.normal();
      q.z = 0.5 * rng.normal();
    }
  }
  return a;
}

Ensemble sample_ensemble(std::size_t n, std::size_t d, std::uint64_t seed) {
  RandomStream rng(seed, {kEnsembleStream});
  return {sample_quaternion_gaussian(n, d, rng), seed};
}

QVector sample_signal(std::size_t d, SignalKind kind, RandomStream& rng) {
  if (d == 0) throw std::invalid_argument("qpr::sample_signal: d must be >= 1");
  QVector x(d);
  for (auto& e : x) {
    if (kind == SignalKind::general) e.w = rng.normal();
    e.x = rng.normal();
    e.y = rng.normal();
    e.z = rng.normal();
    if (kind == SignalKind::pure_nonnegative) {
      e.x = std::abs(e.x);
      e.y = std::abs(e.y);
      e.z = std::abs(e.z);
    }
  }
  return x * (1.0 / norm(x));
}

QVector sample_signal(const SignalSpec& spec) {
  RandomStream rng(spec.seed, {kSignalStream});
  return sample_signal(spec.d, spec.kind, rng);
}

void write_observations_csv(std::ostream& os, const Ensemble& e, const Observations& obs) {
  const auto old = os.precision(17);
  os << "index,a0_w,a0_x,a0_y,a0_z,a1_w,a1_x,a1_y,a1_z,y,y_amp\n";
  for (std::size_t k = 0; k < obs.n(); ++k) {
    os << k;
    for (std::size_t j = 0; j < 2; ++j) {
      if (j < e.d()) {
        const Quaternion& q = e.a(k, j);
        os << ',' << q.w << ',' << q.x << ',' << q.y << ',' << q.z;
      } else {
        os << ",,,,";
      }
    }
    os << ',' << obs.y[k] << ',' << obs.amp[k] << '\n';
  }
  os.precision(old);
}

}  // namespace qpr
