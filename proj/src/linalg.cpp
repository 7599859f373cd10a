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

#include "qpr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "qpr/detail/power.hpp"

namespace qpr {

RMatrix real_rep(const QMatrix& a) {
  const std::size_t r = a.rows();
  const std::size_t c = a.cols();
  RMatrix t(4 * r, 4 * c);
  // Sign/component pattern per (block row, block col): component index into
  // (w, x, y, z) and sign.
  static constexpr int kComp[4][4] = {{0, 2, 1, 3}, {2, 0, 3, 1}, {1, 3, 0, 2}, {3, 1, 2, 0}};
  static constexpr int kSign[4][4] = {{1, 1, 1, 1}, {-1, 1, 1, -1}, {-1, -1, 1, 1}, {-1, 1, -1, 1}};
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const Quaternion& q = a(i, j);
      const double comp[4] = {q.w, q.x, q.y, q.z};
      for (int bi = 0; bi < 4; ++bi)
        for (int bj = 0; bj < 4; ++bj)
          t(bi * r + i, bj * c + j) = kSign[bi][bj] * comp[kComp[bi][bj]];
    }
  }
  return t;
}

RMatrix vrep(const QVector& v) {
  RMatrix m(v.size(), 4);
  for (std::size_t i = 0; i < v.size(); ++i) {
    m(i, 0) = v[i].w;
    m(i, 1) = v[i].x;
    m(i, 2) = v[i].y;
    m(i, 3) = v[i].z;
  }
  return m;
}

QMatrix as_column(const QVector& v) {
  QMatrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

QMatrix make_hermitian(const QMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("qpr::make_hermitian: matrix not square");
  const QMatrix adj = adjoint(a);
  const double asym = frobenius_norm(a - adj);
  if (asym == 0.0) return a;
  if (asym > 1e-10 * frobenius_norm(a)) {
    throw std::invalid_argument("qpr::make_hermitian: matrix is not Hermitian (asymmetry " +
                                std::to_string(asym) + ")");
  }
  QMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = 0.5 * (a(i, j) + adj(i, j));
  return out;
}

TopEigenpair herm_top_eig(const QMatrix& s, int iters) {
  if (iters < 1) throw std::invalid_argument("qpr::herm_top_eig: iters must be >= 1");
  if (s.rows() != s.cols() || s.rows() == 0)
    throw std::invalid_argument("qpr::herm_top_eig: matrix must be square and nonempty");
  auto r = detail::power_top_eig(s, iters);
  return {r.value, std::move(r.vector)};
}

Sym4Eigen sym4_eigen(const Sym4& m) {
  Sym4 a = m;
  Sym4 v{};
  for (int i = 0; i < 4; ++i) v[i][i] = 1.0;

  double fro = 0.0;
  for (const auto& row : a)
    for (double e : row) fro += e * e;
  fro = std::sqrt(fro);
  const double tol = 1e-14 * std::max(fro, 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < 4; ++p)
      for (int q = p + 1; q < 4; ++q) off += 2.0 * a[p][q] * a[p][q];
    if (std::sqrt(off) < tol) break;
    for (int p = 0; p < 4; ++p) {
      for (int q = p + 1; q < 4; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < 4; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 4; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 4; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<int, 4> order = {0, 1, 2, 3};
  // Stable on the original index so near-ties keep the lowest index first.
  std::stable_sort(order.begin(), order.end(), [&](int l, int r) {
    const double dl = a[l][l];
    const double dr = a[r][r];
    if (std::abs(dl - dr) <= 1e-12 * std::max(1.0, fro)) return false;
    return dl < dr;
  });
  Sym4Eigen out{};
  for (int c = 0; c < 4; ++c) {
    out.values[c] = a[order[c]][order[c]];
    for (int k = 0; k < 4; ++k) out.vectors[k][c] = v[k][order[c]];
  }
  return out;
}

std::array<double, 4> sym4_min_eigvec(const Sym4& m) {
  const Sym4Eigen e = sym4_eigen(m);
  std::array<double, 4> w = {e.vectors[0][0], e.vectors[1][0], e.vectors[2][0], e.vectors[3][0]};
  double n = 0.0;
  for (double c : w) n += c * c;
  n = std::sqrt(n);
  for (double& c : w) c /= n;
  for (double c : w) {
    if (std::abs(c) > 1e-12) {
      if (c < 0.0)
        for (double& x : w) x = -x;
      break;
    }
  }
  return w;
}

std::vector<double> singular_values(const RMatrix& a) {
  const bool transpose = a.rows() < a.cols();
  const std::size_t m = transpose ? a.cols() : a.rows();
  const std::size_t n = transpose ? a.rows() : a.cols();
  std::vector<std::vector<double>> col(n, std::vector<double>(m));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (transpose)
        col[i][j] = a(i, j);
      else
        col[j][i] = a(i, j);
    }

  constexpr double kEps = 1e-15;
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          alpha += col[p][k] * col[p][k];
          beta += col[q][k] * col[q][k];
          gamma += col[p][k] * col[q][k];
        }
        if (gamma == 0.0 || std::abs(gamma) <= kEps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < m; ++k) {
          const double up = col[p][k];
          const double uq = col[q][k];
          col[p][k] = c * up - s * uq;
          col[q][k] = s * up + c * uq;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (double e : col[j]) s += e * e;
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

QsvdResult qsvd_singular_values(const QMatrix& a) {
  const std::vector<double> sv = singular_values(real_rep(a));
  QsvdResult out;
  const std::size_t k = std::min(a.rows(), a.cols());
  const double smax = sv.empty() ? 0.0 : sv.front();
  out.values.reserve(k);
  for (std::size_t g = 0; g < k; ++g) {
    const double hi = sv[4 * g];
    const double lo = sv[4 * g + 3];
    if (hi - lo > 1e-6 * smax) out.clustered = false;
    out.values.push_back(0.25 * (sv[4 * g] + sv[4 * g + 1] + sv[4 * g + 2] + sv[4 * g + 3]));
  }
  return out;
}

void write_csv(std::ostream& os, const RMatrix& m) {
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << m(i, j);
    }
    os << '\n';
  }
  os.precision(old);
}

}  // namespace qpr
