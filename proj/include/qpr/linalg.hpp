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

#include <array>
#include <iosfwd>
#include <vector>

#include "qpr/dense.hpp"

namespace qpr {

/// 4d1 x 4d2 real representation T(A). With R = Re(A) and P_i, P_j, P_k the
/// imaginary component matrices, the block layout is
///
///   [  R    P_j   P_i   P_k ]
///   [ -P_j  R     P_k  -P_i ]
///   [ -P_i -P_k   R     P_j ]
///   [ -P_k  P_i  -P_j   R   ]
///
/// T is a homomorphism: T(AB) = T(A)T(B), T(A+B) = T(A)+T(B), T(A*) = T(A)^T.
RMatrix real_rep(const QMatrix& a);

/// d x 4 matrix with columns [Re, P_i, P_j, P_k] of v.
RMatrix vrep(const QVector& v);

/// Column vector as a d x 1 matrix.
QMatrix as_column(const QVector& v);

/// Checks A = A* up to rounding. Asymmetry below 1e-10 ||A||_F is removed by
/// (A + A*)/2; anything larger throws std::invalid_argument.
QMatrix make_hermitian(const QMatrix& a);

struct TopEigenpair {
  double value = 0.0;
  QVector vector;
};

/// Largest standard eigenvalue of a Hermitian matrix by power iteration
/// v <- S v / ||S v||, started from the normalized all-ones vector.
///
/// Returns the iterate with the largest Rayleigh quotient seen. A zero matrix
/// yields value 0 and the start vector.
TopEigenpair herm_top_eig(const QMatrix& s, int iters = 100);

using Sym4 = std::array<std::array<double, 4>, 4>;

/// Unit eigenvector of the smallest eigenvalue of a symmetric 4x4 matrix,
/// via cyclic Jacobi rotations. Among eigenvalues equal to within 1e-12 the
/// lowest diagonal index wins; the sign makes the first nonzero entry positive.
std::array<double, 4> sym4_min_eigvec(const Sym4& m);

/// Eigenvalues (ascending) and eigenvectors (columns) of a symmetric 4x4 matrix.
struct Sym4Eigen {
  std::array<double, 4> values;
  Sym4 vectors;
};
Sym4Eigen sym4_eigen(const Sym4& m);

/// Singular values of a real matrix, nonincreasing, by one-sided Jacobi.
std::vector<double> singular_values(const RMatrix& a);

struct QsvdResult {
  std::vector<double> values;  // min(d1, d2) entries, nonincreasing
  bool clustered = true;       // false if T(A)'s spectrum did not group into quadruples
};

/// Quaternion singular values, computed from T(A) whose singular values come
/// in groups of four.
QsvdResult qsvd_singular_values(const QMatrix& a);

/// CSV dump, one matrix row per line.
void write_csv(std::ostream& os, const RMatrix& m);

}  // namespace qpr
