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

// Data-parallel kernels behind every solver: forward products alpha_k^* z,
// back-projection sum_k alpha_k c_k, and weighted Gram assembly
// sum_k w_k alpha_k alpha_k^*.
//
// Each kernel has a serial reference and an OpenMP version. The OpenMP
// reductions split rows into fixed chunks and combine chunk partials in
// order, so results depend on the data only, never on the thread count.

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "qpr/dense.hpp"

namespace qpr::kernels {

enum class Backend { serial, parallel };

inline constexpr std::size_t kChunkRows = 128;

namespace detail {

template <class T>
void check_forward(const DenseMatrix<T>& a, std::span<const T> z, std::span<T> out) {
  if (z.size() != a.cols() || out.size() != a.rows())
    throw std::invalid_argument("qpr::kernels::forward: shape mismatch");
}

template <class T>
T row_dot(std::span<const T> row, std::span<const T> z) {
  T s{};
  for (std::size_t j = 0; j < row.size(); ++j) s += row[j] * z[j];
  return s;
}

// g += conj(row)^T c
template <class T>
void row_accumulate(std::span<const T> row, const T& c, std::span<T> g) {
  for (std::size_t j = 0; j < row.size(); ++j) g[j] += conj(row[j]) * c;
}

}  // namespace detail

namespace serial {

/// out_k = row_k(A) z = alpha_k^* z.
template <class T>
void forward(const DenseMatrix<T>& a, std::span<const T> z, std::span<T> out) {
  detail::check_forward(a, z, out);
  for (std::size_t k = 0; k < a.rows(); ++k) out[k] = detail::row_dot(a.row(k), z);
}

/// g = sum_k alpha_k c_k, i.e. g_j = sum_k conj(A_kj) c_k.
template <class T>
void backproject(const DenseMatrix<T>& a, std::span<const T> c, std::span<T> g) {
  if (c.size() != a.rows() || g.size() != a.cols())
    throw std::invalid_argument("qpr::kernels::backproject: shape mismatch");
  std::fill(g.begin(), g.end(), T{});
  for (std::size_t k = 0; k < a.rows(); ++k) {
    if (c[k] == T{}) continue;
    detail::row_accumulate(a.row(k), c[k], g);
  }
}

/// S = sum_k w_k alpha_k alpha_k^*, with S_ij = sum_k w_k conj(A_ki) A_kj.
/// Rows with zero weight are skipped. The result is exactly Hermitian.
template <class T>
DenseMatrix<T> weighted_gram(const DenseMatrix<T>& a, std::span<const double> w) {
  if (w.size() != a.rows()) throw std::invalid_argument("qpr::kernels::weighted_gram: shape mismatch");
  const std::size_t d = a.cols();
  DenseMatrix<T> s(d, d);
  for (std::size_t k = 0; k < a.rows(); ++k) {
    if (w[k] == 0.0) continue;
    const auto r = a.row(k);
    for (std::size_t i = 0; i < d; ++i) {
      const T ci = conj(r[i]) * w[k];
      for (std::size_t j = i; j < d; ++j) s(i, j) += ci * r[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    s(i, i) = T(real(s(i, i)));
    for (std::size_t j = 0; j < i; ++j) s(i, j) = conj(s(j, i));
  }
  return s;
}

}  // namespace serial

namespace parallel {

template <class T>
void forward(const DenseMatrix<T>& a, std::span<const T> z, std::span<T> out) {
  detail::check_forward(a, z, out);
  const auto n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) out[k] = detail::row_dot(a.row(k), z);
}

template <class T>
void backproject(const DenseMatrix<T>& a, std::span<const T> c, std::span<T> g) {
  if (c.size() != a.rows() || g.size() != a.cols())
    throw std::invalid_argument("qpr::kernels::backproject: shape mismatch");
  const std::size_t n = a.rows();
  const std::size_t d = a.cols();
  const std::size_t chunks = (n + kChunkRows - 1) / kChunkRows;
  std::vector<T> partial(chunks * d);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(chunks); ++b) {
    std::span<T> acc(partial.data() + b * d, d);
    const std::size_t lo = b * kChunkRows;
    const std::size_t hi = std::min(n, lo + kChunkRows);
    for (std::size_t k = lo; k < hi; ++k) {
      if (c[k] == T{}) continue;
      detail::row_accumulate(a.row(k), c[k], acc);
    }
  }
  std::fill(g.begin(), g.end(), T{});
  for (std::size_t b = 0; b < chunks; ++b)
    for (std::size_t j = 0; j < d; ++j) g[j] += partial[b * d + j];
}

template <class T>
DenseMatrix<T> weighted_gram(const DenseMatrix<T>& a, std::span<const double> w) {
  if (w.size() != a.rows()) throw std::invalid_argument("qpr::kernels::weighted_gram: shape mismatch");
  const std::size_t d = a.cols();
  const std::size_t n = a.rows();
  DenseMatrix<T> s(d, d);
  // Each thread owns whole output rows; the k order inside a row is fixed.
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(d); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    auto out = s.row(i);
    for (std::size_t k = 0; k < n; ++k) {
      if (w[k] == 0.0) continue;
      const auto r = a.row(k);
      const T ci = conj(r[i]) * w[k];
      for (std::size_t j = i; j < d; ++j) out[j] += ci * r[j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    s(i, i) = T(real(s(i, i)));
    for (std::size_t j = 0; j < i; ++j) s(i, j) = conj(s(j, i));
  }
  return s;
}

}  // namespace parallel

template <class T>
void forward(const DenseMatrix<T>& a, std::span<const T> z, std::span<T> out, Backend b) {
  if (b == Backend::parallel)
    parallel::forward(a, z, out);
  else
    serial::forward(a, z, out);
}

template <class T>
void backproject(const DenseMatrix<T>& a, std::span<const T> c, std::span<T> g, Backend b) {
  if (b == Backend::parallel)
    parallel::backproject(a, c, g);
  else
    serial::backproject(a, c, g);
}

template <class T>
DenseMatrix<T> weighted_gram(const DenseMatrix<T>& a, std::span<const double> w, Backend b) {
  return b == Backend::parallel ? parallel::weighted_gram(a, w) : serial::weighted_gram(a, w);
}

}  // namespace qpr::kernels
