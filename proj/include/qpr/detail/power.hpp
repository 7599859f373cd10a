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

#include <cmath>

#include "qpr/dense.hpp"

namespace qpr::detail {

template <class T>
struct PowerResult {
  double value = 0.0;
  DenseVector<T> vector;
};

template <class T>
DenseVector<T> normalized_ones(std::size_t d) {
  return DenseVector<T>(d, T(1.0 / std::sqrt(static_cast<double>(d))));
}

/// Power iteration on a Hermitian (or real symmetric) matrix. Keeps the
/// iterate with the largest Rayleigh quotient.
template <class T>
PowerResult<T> power_top_eig(const DenseMatrix<T>& s, int iters, DenseVector<T> start) {
  PowerResult<T> best;
  DenseVector<T> v = std::move(start);
  DenseVector<T> w = matvec(s, v);
  best.value = real(inner(v, w));
  best.vector = v;
  for (int t = 0; t < iters; ++t) {
    const double nw = norm(w);
    if (!(nw > 0.0)) break;
    v = w * (1.0 / nw);
    w = matvec(s, v);
    const double r = real(inner(v, w));
    if (r > best.value) {
      best.value = r;
      best.vector = v;
    }
  }
  return best;
}

template <class T>
PowerResult<T> power_top_eig(const DenseMatrix<T>& s, int iters) {
  const std::size_t d = s.rows();
  auto start = normalized_ones<T>(d);
  if (frobenius_norm(s) > 0.0 && !(norm(matvec(s, start)) > 0.0)) {
    // The start vector lies in the null space; nudge it once.
    start[0] += T(1e-8);
    start = start * (1.0 / norm(start));
  }
  return power_top_eig(s, iters, std::move(start));
}

}  // namespace qpr::detail
