// include/ulnn/whitening.hpp
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

// Mean/covariance estimation over output vectors, PCA and whitening.

#include <cstdint>
#include <string>
#include <vector>

#include "ulnn/linalg.hpp"
#include "ulnn/parallel.hpp"
#include "ulnn/types.hpp"

namespace ulnn {

/// Exact running sums for mean and covariance. Sums (not running averages)
/// make merge exact up to floating-point addition order.
class MomentAccumulator {
 public:
  MomentAccumulator() = default;
  explicit MomentAccumulator(Index dim) : sum_(Vector::Zero(dim)), outer_(Matrix::Zero(dim, dim)) {}

  Index dim() const { return sum_.size(); }
  std::uint64_t count() const { return count_; }
  const Vector& sum() const { return sum_; }
  const Matrix& outer_sum() const { return outer_; }

  void add(const Vector& x) {
    if (x.size() != dim())
      throw DimensionError("moment accumulator expects dimension " + std::to_string(dim()) + ", got " +
                           std::to_string(x.size()));
    require_finite(x, "moment accumulator input");
    sum_ += x;
    outer_.noalias() += x * x.transpose();
    ++count_;
  }

  void merge(const MomentAccumulator& other) {
    if (other.count_ == 0) return;
    if (count_ == 0 && dim() == 0) {
      *this = other;
      return;
    }
    if (other.dim() != dim()) throw DimensionError("moment accumulator merge: dimension mismatch");
    sum_ += other.sum_;
    outer_ += other.outer_;
    count_ += other.count_;
  }

  Vector mean() const {
    require_samples();
    return sum_ / static_cast<double>(count_);
  }

  /// (1/N) sum x x^T - m m^T
  Matrix covariance() const {
    require_samples();
    const Vector m = mean();
    Matrix c = outer_ / static_cast<double>(count_) - m * m.transpose();
    return 0.5 * (c + c.transpose());
  }

 private:
  void require_samples() const {
    if (count_ < 2) throw DataError("covariance needs at least 2 samples, got " + std::to_string(count_));
  }

  std::uint64_t count_ = 0;
  Vector sum_;
  Matrix outer_;
};

/// Accumulates the rows of a samples x dim matrix. Rows are grouped into
/// fixed chunks of `chunk_rows`, each chunk summed sequentially and the chunk
/// sums merged left to right, so the result does not depend on `threads`.
inline MomentAccumulator accumulate_rows(const Matrix& rows, std::size_t chunk_rows = 4096, unsigned threads = 1) {
  if (chunk_rows == 0) throw UsageError("chunk_rows must be positive");
  const std::size_t n = static_cast<std::size_t>(rows.rows());
  const std::size_t chunks = (n + chunk_rows - 1) / chunk_rows;
  std::vector<MomentAccumulator> partial(chunks, MomentAccumulator(rows.cols()));
  parallel_for(chunks, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const std::size_t stop = std::min(n, (c + 1) * chunk_rows);
      for (std::size_t r = c * chunk_rows; r < stop; ++r) partial[c].add(rows.row(static_cast<Index>(r)).transpose());
    }
  });
  MomentAccumulator total(rows.cols());
  for (const auto& p : partial) total.merge(p);
  return total;
}

/// Streaming counterpart of accumulate_rows: feed rows one at a time and get
/// the same chunked reduction.
class ChunkedMomentAccumulator {
 public:
  explicit ChunkedMomentAccumulator(Index dim, std::size_t chunk_rows = 4096)
      : chunk_rows_(chunk_rows), total_(dim), chunk_(dim) {
    if (chunk_rows == 0) throw UsageError("chunk_rows must be positive");
  }

  void add(const Vector& x) {
    chunk_.add(x);
    if (chunk_.count() == chunk_rows_) flush();
  }

  MomentAccumulator finish() {
    flush();
    return total_;
  }

 private:
  void flush() {
    if (chunk_.count() == 0) return;
    total_.merge(chunk_);
    chunk_ = MomentAccumulator(total_.dim());
  }

  std::size_t chunk_rows_;
  MomentAccumulator total_;
  MomentAccumulator chunk_;
};

/// PCA / whitening model fit from a covariance matrix.
///
/// Eigenvalues are sorted descending; eigenvectors are the columns of
/// `eigenvectors`. Only eigenvalues strictly above `floor()` (1e-10 of the
/// largest) can be retained, since output vectors living on the probability
/// simplex always give a singular covariance.
class WhiteningModel {
 public:
  static constexpr double kRelativeFloor = 1e-10;

  WhiteningModel() = default;

  WhiteningModel(Vector mean, Vector eigenvalues, Matrix eigenvectors, Index dim)
      : mean_(std::move(mean)), eigenvalues_(std::move(eigenvalues)), eigenvectors_(std::move(eigenvectors)) {
    if (eigenvectors_.rows() != mean_.size() || eigenvectors_.cols() != eigenvalues_.size())
      throw DimensionError("whitening model: inconsistent shapes");
    set_dim(dim);
  }

  static WhiteningModel fit(const MomentAccumulator& acc, Index dim) {
    const SymmetricEigen eig = eigendecompose(acc.covariance());
    return WhiteningModel(acc.mean(), eig.values, eig.vectors, dim);
  }

  static WhiteningModel fit_rows(const Matrix& rows, Index dim, std::size_t chunk_rows = 4096, unsigned threads = 1) {
    return fit(accumulate_rows(rows, chunk_rows, threads), dim);
  }

  Index input_dim() const { return mean_.size(); }
  Index dim() const { return dim_; }
  const Vector& mean() const { return mean_; }
  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }

  double floor() const { return eigenvalues_.size() == 0 ? 0.0 : kRelativeFloor * eigenvalues_[0]; }

  /// Number of eigenvalues strictly above the floor.
  Index valid_rank() const {
    if (eigenvalues_.size() == 0 || !(eigenvalues_[0] > 0.0)) return 0;
    Index r = 0;
    while (r < eigenvalues_.size() && eigenvalues_[r] > floor()) ++r;
    return r;
  }

  /// D_d^(-1/2) E_d^T, rows ordered by descending eigenvalue.
  Matrix whitening_matrix(Index d) const {
    check_dim(d);
    Matrix u = eigenvectors_.leftCols(d).transpose();
    for (Index i = 0; i < d; ++i) u.row(i) /= std::sqrt(eigenvalues_[i]);
    return u;
  }
  Matrix whitening_matrix() const { return whitening_matrix(dim_); }

  /// E_d^T
  Matrix pca_matrix(Index d) const {
    check_dim(d);
    return eigenvectors_.leftCols(d).transpose();
  }
  Matrix pca_matrix() const { return pca_matrix(dim_); }

  Vector whiten(const Vector& x) const {
    if (x.size() != input_dim())
      throw DimensionError("whiten: expected dimension " + std::to_string(input_dim()) + ", got " +
                           std::to_string(x.size()));
    return whitening_matrix() * (x - mean_);
  }

  /// Whitens every row of a samples x n matrix; returns samples x d.
  Matrix whiten_rows(const Matrix& rows) const {
    if (rows.cols() != input_dim())
      throw DimensionError("whiten: expected " + std::to_string(input_dim()) + " columns, got " +
                           std::to_string(rows.cols()));
    const Matrix u = whitening_matrix();
    return (rows.rowwise() - mean_.transpose()) * u.transpose();
  }

  void set_dim(Index d) {
    check_dim(d);
    dim_ = d;
  }

 private:
  void check_dim(Index d) const {
    if (d < 1) throw UsageError("retained dimension must be at least 1");
    if (d > valid_rank())
      throw DataError("retained dimension " + std::to_string(d) + " exceeds numerically valid rank " +
                      std::to_string(valid_rank()));
  }

  Vector mean_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
  Index dim_ = 0;
};

}  // namespace ulnn
