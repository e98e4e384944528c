// include/ulnn/bridge.hpp
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

// Visual class features, centered semantic features and the CCA bridge
// between them.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "ulnn/linalg.hpp"
#include "ulnn/types.hpp"

namespace ulnn {

enum class VisualKind { pca, ica, random };

inline std::string to_string(VisualKind k) {
  switch (k) {
    case VisualKind::pca:
      return "pca";
    case VisualKind::ica:
      return "ica";
    case VisualKind::random:
      return "random-semi-orthogonal";
  }
  return "?";
}

inline VisualKind parse_visual_kind(const std::string& s) {
  if (s == "pca") return VisualKind::pca;
  if (s == "ica") return VisualKind::ica;
  if (s == "random" || s == "random-semi-orthogonal") return VisualKind::random;
  throw UsageError("unknown visual feature kind '" + s + "' (expected pca, ica or random)");
}

/// d x n matrix with one column per seen class.
struct VisualFeatures {
  Matrix matrix;
  VisualKind kind = VisualKind::pca;
};

/// d x n matrix with orthonormal rows drawn from a seeded Gaussian.
inline Matrix random_semi_orthogonal(Index d, Index n, std::uint64_t seed) {
  if (d < 1 || d > n) throw UsageError("semi-orthogonal matrix needs 1 <= d <= n");
  std::mt19937_64 rng(seed);
  return orthonormal_columns(standard_normal_matrix(n, d, rng)).transpose();
}

/// f(.): scales every column to unit L1 norm.
inline Matrix l1_normalize_columns(const Matrix& x) {
  Matrix out = x;
  for (Index j = 0; j < x.cols(); ++j) {
    const double norm = x.col(j).lpNorm<1>();
    if (!(norm > 0.0)) throw DegenerateInputError("l1 normalization: column " + std::to_string(j) + " is all zeros");
    out.col(j) /= norm;
  }
  return out;
}

inline Vector l1_normalize(const Vector& x) {
  const double norm = x.lpNorm<1>();
  if (!(norm > 0.0)) throw DegenerateInputError("l1 normalization: zero vector");
  return x / norm;
}

struct CenteredSemantic {
  Matrix seen;    // s x n
  Matrix unseen;  // s x m
  Vector mean;    // seen-class mean that was removed
};

/// Subtracts the seen-class mean from both the seen and unseen columns.
inline CenteredSemantic center_semantic(const Matrix& seen, const Matrix& unseen) {
  if (seen.cols() < 1) throw DataError("semantic centering needs at least one seen class");
  if (unseen.cols() > 0 && unseen.rows() != seen.rows())
    throw DimensionError("semantic centering: seen and unseen features have different dimensions");
  CenteredSemantic out;
  out.mean = seen.rowwise().mean();
  out.seen = seen.colwise() - out.mean;
  out.unseen = unseen.cols() > 0 ? Matrix(unseen.colwise() - out.mean) : Matrix(seen.rows(), 0);
  return out;
}

/// Class-mean matrix M (n x n, column i = mean output of seen class i). An
/// empty optional stands for the identity approximation.
using ClassMeans = std::optional<Matrix>;

/// Mean output row of each class; rows are samples, labels index classes.
inline Matrix class_means(const Matrix& outputs, const std::vector<Index>& labels, Index classes) {
  if (static_cast<Index>(labels.size()) != outputs.rows()) throw DimensionError("class means: label count does not match rows");
  Matrix sums = Matrix::Zero(outputs.cols(), classes);
  std::vector<Index> counts(static_cast<std::size_t>(classes), 0);
  for (Index r = 0; r < outputs.rows(); ++r) {
    const Index c = labels[static_cast<std::size_t>(r)];
    if (c < 0 || c >= classes) throw DataError("class means: label " + std::to_string(c) + " out of range");
    sums.col(c) += outputs.row(r).transpose();
    ++counts[static_cast<std::size_t>(c)];
  }
  for (Index c = 0; c < classes; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) throw DataError("class means: class " + std::to_string(c) + " has no samples");
    sums.col(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
  }
  return sums;
}

struct VisualClassMatrix {
  Matrix f;     // d x n
  Vector mean;  // column mean of f
};

/// F = f(W1 M), or f(W1) when M is the identity.
inline VisualClassMatrix visual_class_matrix(const Matrix& w1, const ClassMeans& means = std::nullopt) {
  if (means && means->rows() != w1.cols()) throw DimensionError("visual class matrix: W1 and M do not compose");
  VisualClassMatrix out;
  out.f = l1_normalize_columns(means ? Matrix(w1 * *means) : w1);
  out.mean = out.f.rowwise().mean();
  return out;
}

struct CcaModel {
  Matrix p1;          // d x c
  Matrix p2;          // s x c
  Vector correlations;
  double ridge1 = 0.0;  // absolute ridge added to C11
  double ridge2 = 0.0;  // absolute ridge added to C22
  Vector fbar;        // mean of the first view's columns
  Vector mean2;       // mean of the second view's columns
};

namespace detail {

/// A view reduced to its column space: X - mean = basis * coords with
/// orthonormal basis (dim x r) and coords (r x n).
struct ReducedView {
  Matrix basis;
  Vector singular;  // of the centered view
  Matrix right;     // n x r right singular vectors
};

inline ReducedView reduce_view(const Matrix& centered) {
  Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Index rank = 0;
  const double cutoff = s.size() > 0 ? 1e-10 * s[0] : 0.0;
  while (rank < s.size() && s[rank] > cutoff) ++rank;
  ReducedView v;
  v.basis = svd.matrixU().leftCols(rank);
  v.singular = s.head(rank);
  v.right = svd.matrixV().leftCols(rank);
  return v;
}

}  // namespace detail

/// CCA between two views whose columns are paired samples (here: classes).
///
/// Covariances use 1/n over columns after removing each view's mean. Each
/// view gets a ridge eps_k = ridge * trace(C_kk) / dim_k. Both views are
/// reduced to their column spaces by a thin SVD, so the second view's s x s
/// covariance is never formed; the whitened cross-covariance is then
/// decomposed by SVD. Sign convention: the largest-magnitude entry of each
/// column of P1 is positive.
inline CcaModel fit_cca(const Matrix& x1, const Matrix& x2, Index c, double ridge = 1e-6) {
  const Index n = x1.cols();
  if (x2.cols() != n) throw DimensionError("CCA: views have different numbers of paired columns");
  if (n < 2) throw DataError("CCA needs at least 2 paired columns");
  if (ridge < 0.0) throw UsageError("CCA ridge must be non-negative");
  if (c < 1 || c > std::min({x1.rows(), x2.rows(), n - 1}))
    throw DataError("CCA: requested " + std::to_string(c) + " dimensions, at most min(d, s, n-1) = " +
                    std::to_string(std::min({x1.rows(), x2.rows(), n - 1})) + " allowed");
  require_finite(x1, "CCA view 1");
  require_finite(x2, "CCA view 2");

  CcaModel model;
  model.fbar = x1.rowwise().mean();
  model.mean2 = x2.rowwise().mean();
  const Matrix c1 = x1.colwise() - model.fbar;
  const Matrix c2 = x2.colwise() - model.mean2;
  const detail::ReducedView v1 = detail::reduce_view(c1);
  const detail::ReducedView v2 = detail::reduce_view(c2);
  if (v1.singular.size() == 0 || v2.singular.size() == 0) throw DegenerateInputError("CCA: a view has zero variance");
  if (c > v1.singular.size() || c > v2.singular.size())
    throw DegenerateInputError("CCA: requested " + std::to_string(c) + " dimensions but view ranks are " +
                               std::to_string(v1.singular.size()) + " and " + std::to_string(v2.singular.size()));

  const double nn = static_cast<double>(n);
  const Vector var1 = v1.singular.array().square() / nn;
  const Vector var2 = v2.singular.array().square() / nn;
  model.ridge1 = ridge * var1.sum() / static_cast<double>(x1.rows());
  model.ridge2 = ridge * var2.sum() / static_cast<double>(x2.rows());
  const Vector k1 = (var1.array() + model.ridge1).rsqrt();
  const Vector k2 = (var2.array() + model.ridge2).rsqrt();

  // Coordinates in each reduced basis are diag(s) * right^T, so the reduced
  // cross-covariance is diag(s1) R1^T R2 diag(s2) / n.
  const Matrix cross = v1.singular.asDiagonal() * (v1.right.transpose() * v2.right) * v2.singular.asDiagonal() / nn;
  const Matrix t = k1.asDiagonal() * cross * k2.asDiagonal();
  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeThinU | Eigen::ComputeThinV);

  model.correlations = svd.singularValues().head(c);
  model.p1 = v1.basis * k1.asDiagonal() * svd.matrixU().leftCols(c);
  model.p2 = v2.basis * k2.asDiagonal() * svd.matrixV().leftCols(c);
  for (Index j = 0; j < c; ++j) {
    Index arg = 0;
    model.p1.col(j).cwiseAbs().maxCoeff(&arg);
    if (model.p1(arg, j) < 0.0) {
      model.p1.col(j) *= -1.0;
      model.p2.col(j) *= -1.0;
    }
  }
  return model;
}

}  // namespace ulnn
