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
#include <iosfwd>
#include <limits>
#include <stdexcept>
#include <string>

namespace qpr {

/// Real quaternion w + x i + y j + z k.
///
/// Component order is always (w, x, y, z); every serialization and every
/// real representation in this library uses that order.
struct Quaternion {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Quaternion() = default;
  constexpr Quaternion(double w_, double x_ = 0.0, double y_ = 0.0, double z_ = 0.0)
      : w(w_), x(x_), y(y_), z(z_) {}

  static constexpr Quaternion one() { return {1.0, 0.0, 0.0, 0.0}; }
  static constexpr Quaternion i() { return {0.0, 1.0, 0.0, 0.0}; }
  static constexpr Quaternion j() { return {0.0, 0.0, 1.0, 0.0}; }
  static constexpr Quaternion k() { return {0.0, 0.0, 0.0, 1.0}; }

  constexpr double norm2() const { return w * w + x * x + y * y + z * z; }
  double abs() const { return std::sqrt(norm2()); }
  constexpr bool is_pure() const { return w == 0.0; }

  constexpr Quaternion& operator+=(const Quaternion& o) {
    w += o.w;
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Quaternion& operator-=(const Quaternion& o) {
    w -= o.w;
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Quaternion& operator*=(double s) {
    w *= s;
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  constexpr Quaternion& operator*=(const Quaternion& o);

  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

constexpr Quaternion operator-(const Quaternion& q) { return {-q.w, -q.x, -q.y, -q.z}; }
constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
constexpr Quaternion operator*(Quaternion q, double s) { return q *= s; }
constexpr Quaternion operator*(double s, Quaternion q) { return q *= s; }
constexpr Quaternion operator/(const Quaternion& q, double s) {
  return {q.w / s, q.x / s, q.y / s, q.z / s};
}

/// Hamilton product. i*j = k, j*k = i, k*i = j; not commutative.
constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

constexpr Quaternion& Quaternion::operator*=(const Quaternion& o) { return *this = *this * o; }

constexpr Quaternion conj(const Quaternion& q) { return {q.w, -q.x, -q.y, -q.z}; }
constexpr double abs2(const Quaternion& q) { return q.norm2(); }
inline double abs(const Quaternion& q) { return q.abs(); }
constexpr double real(const Quaternion& q) { return q.w; }

/// Vector part q - Re(q).
constexpr Quaternion imag(const Quaternion& q) { return {0.0, q.x, q.y, q.z}; }

// Real scalars participate in the same generic kernels as quaternions.
constexpr double conj(double v) { return v; }
constexpr double abs2(double v) { return v * v; }
constexpr double real(double v) { return v; }

/// Multiplicative inverse conj(q)/|q|^2. Zero and subnormal-magnitude inputs
/// (where |q|^2 underflows) throw std::domain_error.
inline Quaternion inverse(const Quaternion& q) {
  const double n2 = q.norm2();
  if (!(n2 >= std::numeric_limits<double>::min())) {
    throw std::domain_error("qpr::inverse: quaternion has zero (or underflowing) modulus");
  }
  return conj(q) / n2;
}

/// Phase q/|q|, with sign(0) = 1.
inline Quaternion sign(const Quaternion& q) {
  const double a = q.abs();
  if (a == 0.0) return Quaternion::one();
  return q / a;
}

inline double sign(double v) { return v < 0.0 ? -1.0 : 1.0; }

struct QuaternionParts {
  double re;
  double pi;
  double pj;
  double pk;
};

constexpr QuaternionParts parts(const Quaternion& q) { return {q.w, q.x, q.y, q.z}; }

/// "w+xi+yj+zk" with explicit signs on the imaginary terms, round-trip precision.
std::string to_string(const Quaternion& q);
std::ostream& operator<<(std::ostream& os, const Quaternion& q);

}  // namespace qpr
