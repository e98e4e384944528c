// include/ulnn/linalg.hpp
//
// Copyright 2026 The ulnn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "ulnn/types.hpp"

namespace ulnn {

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // columns, matching values
};

/// Flips each column so that its largest-magnitude entry is positive (first
/// such entry on ties).
inline void fix_column_signs(Matrix& columns) {
  for (Index j = 0; j < columns.cols(); ++j) {
    Index arg = 0;
    double best = -1.0;
    for (Index i = 0; i < columns.rows(); ++i) {
      const double a = std::abs(columns(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (columns.rows() > 0 && columns(arg, j) < 0.0) columns.col(j) *= -1.0;
  }
}

/// Eigendecomposition of a symmetric matrix, symmetrized first. Eigenvalues
/// descending (ties keep solver order), eigenvector signs fixed by
/// fix_column_signs.
inline SymmetricEigen eigendecompose(const Matrix& c) {
  if (c.rows() != c.cols()) throw DimensionError("eigendecompose: matrix is not square");
  require_finite(c, "eigendecompose");
  const Matrix sym = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw DataError("eigendecompose: solver did not converge");
  const Index n = sym.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  // Solver returns ascending values; reversed positions are the tie-break key.
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return solver.eigenvalues()[a] > solver.eigenvalues()[b];
  });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.values[k] = solver.eigenvalues()[order[static_cast<std::size_t>(k)]];
    out.vectors.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
  }
  fix_column_signs(out.vectors);
  return out;
}

/// Q factor of a Householder QR with columns signed so that diag(R) >= 0.
inline Matrix orthonormal_columns(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix& r = qr.matrixQR();
  for (Index j = 0; j < a.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

/// Nearest orthogonal matrix (polar factor) of a square matrix.
inline Matrix nearest_orthogonal(const Matrix& v) {
  Eigen::JacobiSVD<Matrix> svd(v, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

inline double orthogonality_residual(const Matrix& v) {
  return (v * v.transpose() - Matrix::Identity(v.rows(), v.rows())).norm();
}

inline Matrix standard_normal_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  // Column-major fill order is part of the seeded output contract.
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

/// Population covariance (1/N) of the columns of a matrix whose columns are
/// samples; the mean is removed first.
inline Matrix column_covariance(const Matrix& samples_as_columns) {
  const Vector mean = samples_as_columns.rowwise().mean();
  const Matrix centered = samples_as_columns.colwise() - mean;
  return centered * centered.transpose() / static_cast<double>(samples_as_columns.cols());
}

}  // namespace ulnn
