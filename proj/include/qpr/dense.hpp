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
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qpr/quaternion.hpp"

namespace qpr {

/// Dense column vector over T (double or Quaternion).
template <class T>
class DenseVector {
 public:
  using value_type = T;

  DenseVector() = default;
  explicit DenseVector(std::size_t n, T fill = T{}) : data_(n, fill) {}
  DenseVector(std::initializer_list<T> init) : data_(init) {}
  explicit DenseVector(std::vector<T> data) : data_(std::move(data)) {}

  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  std::span<T> span() { return data_; }
  std::span<const T> span() const { return data_; }

  bool operator==(const DenseVector&) const = default;

 private:
  std::vector<T> data_;
};

/// Dense row-major matrix over T.
template <class T>
class DenseMatrix {
 public:
  using value_type = T;

  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using QVector = DenseVector<Quaternion>;
using QMatrix = DenseMatrix<Quaternion>;
using RVector = DenseVector<double>;
using RMatrix = DenseMatrix<double>;

template <class T>
double norm2(std::span<const T> v) {
  double s = 0.0;
  for (const T& e : v) s += abs2(e);
  return s;
}

template <class T>
double norm2(const DenseVector<T>& v) {
  return norm2(v.span());
}

template <class T>
double norm(const DenseVector<T>& v) {
  return std::sqrt(norm2(v));
}

template <class T>
double frobenius_norm(const DenseMatrix<T>& a) {
  double s = 0.0;
  const std::size_t count = a.rows() * a.cols();
  for (std::size_t i = 0; i < count; ++i) s += abs2(a.data()[i]);
  return std::sqrt(s);
}

/// x* z = sum_j conj(x_j) z_j.
template <class T>
T inner(const DenseVector<T>& x, const DenseVector<T>& z) {
  if (x.size() != z.size()) throw std::invalid_argument("qpr::inner: length mismatch");
  T s{};
  for (std::size_t j = 0; j < x.size(); ++j) s += conj(x[j]) * z[j];
  return s;
}

template <class T>
DenseVector<T> operator+(DenseVector<T> a, const DenseVector<T>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("qpr: vector length mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

template <class T>
DenseVector<T> operator-(DenseVector<T> a, const DenseVector<T>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("qpr: vector length mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

template <class T>
DenseVector<T> operator-(DenseVector<T> a) {
  for (auto& e : a) e = -e;
  return a;
}

/// Right multiplication v * s (entrywise v_i s).
template <class T, class S>
DenseVector<T> operator*(DenseVector<T> v, const S& s) {
  for (auto& e : v) e = e * s;
  return v;
}

/// Left multiplication s * v (entrywise s v_i).
template <class T, class S>
DenseVector<T> operator*(const S& s, DenseVector<T> v) {
  for (auto& e : v) e = s * e;
  return v;
}

/// y = A v, entry i = sum_j A_ij v_j with quaternion order preserved.
template <class T>
DenseVector<T> matvec(const DenseMatrix<T>& a, const DenseVector<T>& v) {
  if (a.cols() != v.size()) {
    throw std::invalid_argument("qpr::matvec: shape mismatch (" + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " times " + std::to_string(v.size()) +
                                ")");
  }
  DenseVector<T> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    T s{};
    const auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) s += r[j] * v[j];
    out[i] = s;
  }
  return out;
}

template <class T>
DenseMatrix<T> matmul(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("qpr::matmul: shape mismatch");
  DenseMatrix<T> out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const T ail = a(i, l);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += ail * b(l, j);
    }
  }
  return out;
}

/// Conjugate transpose A*.
template <class T>
DenseMatrix<T> adjoint(const DenseMatrix<T>& a) {
  DenseMatrix<T> out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = conj(a(i, j));
  return out;
}

template <class T>
DenseMatrix<T> operator+(DenseMatrix<T> a, const DenseMatrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("qpr: matrix shape mismatch");
  const std::size_t count = a.rows() * a.cols();
  for (std::size_t i = 0; i < count; ++i) a.data()[i] += b.data()[i];
  return a;
}

template <class T>
DenseMatrix<T> operator-(DenseMatrix<T> a, const DenseMatrix<T>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("qpr: matrix shape mismatch");
  const std::size_t count = a.rows() * a.cols();
  for (std::size_t i = 0; i < count; ++i) a.data()[i] -= b.data()[i];
  return a;
}

/// Real scaling of every entry.
template <class T>
DenseMatrix<T> operator*(DenseMatrix<T> a, double s) {
  const std::size_t count = a.rows() * a.cols();
  for (std::size_t i = 0; i < count; ++i) a.data()[i] = a.data()[i] * s;
  return a;
}

/// u v* as a d1 x d2 matrix.
template <class T>
DenseMatrix<T> outer(const DenseVector<T>& u, const DenseVector<T>& v) {
  DenseMatrix<T> out(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out(i, j) = u[i] * conj(v[j]);
  return out;
}

inline QVector imag(QVector v) {
  for (auto& e : v) e = imag(e);
  return v;
}

inline bool is_pure(const QVector& v) {
  for (const auto& e : v)
    if (e.w != 0.0) return false;
  return true;
}

}  // namespace qpr
