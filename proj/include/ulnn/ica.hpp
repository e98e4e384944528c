// include/ulnn/ica.hpp
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

// Stochastic-gradient ICA on whitened outputs. The rotation V is learned with
// a log-cosh source prior (score -tanh) and a self-correcting orthogonality
// term, without explicit projection in each step.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ulnn/linalg.hpp"
#include "ulnn/types.hpp"
#include "ulnn/whitening.hpp"

namespace ulnn {

/// Form of the orthogonality correction term in the update.
enum class CorrectionForm {
  right_v,      // 1/2 (I - V V^T) V
  transpose_v,  // 1/2 (I - V V^T) V^T, as printed in the original algorithm
};

inline std::string to_string(CorrectionForm f) { return f == CorrectionForm::right_v ? "right-v" : "transpose-v"; }

inline CorrectionForm parse_correction_form(const std::string& s) {
  if (s == "right-v") return CorrectionForm::right_v;
  if (s == "transpose-v") return CorrectionForm::transpose_v;
  throw UsageError("unknown ICA correction form '" + s + "' (expected right-v or transpose-v)");
}

struct IcaConfig {
  Index components = 0;  // 0 = take the whitening model's dimension
  Index batch_size = 500;
  double lr0 = 0.005;
  int halving_period = 10;
  int epochs = 30;
  std::uint64_t seed = 0;
  int reorthogonalize_every = 0;  // steps; 0 = never
  CorrectionForm correction = CorrectionForm::right_v;
  Index monitor_samples = 10000;

  void validate() const {
    if (components < 0) throw UsageError("ICA components must be non-negative");
    if (batch_size < 1) throw UsageError("ICA batch size must be at least 1");
    if (!(lr0 > 0.0)) throw UsageError("ICA learning rate must be positive");
    if (halving_period < 1) throw UsageError("ICA halving period must be positive");
    if (epochs < 0) throw UsageError("ICA epochs must be non-negative");
    if (reorthogonalize_every < 0) throw UsageError("ICA re-orthogonalization period must be >= 0");
    if (monitor_samples < 1) throw UsageError("ICA monitor sample count must be positive");
  }

  /// lr0 * 2^-floor(epoch / halving_period)
  double learning_rate(int epoch) const { return std::ldexp(lr0, -(epoch / halving_period)); }
};

struct EpochTrace {
  int epoch = 0;
  double learning_rate = 0.0;
  double objective = 0.0;
  double orthogonality = 0.0;      // at the end of the epoch
  double max_orthogonality = 0.0;  // worst over every step in the epoch
};

struct IcaModel {
  Matrix rotation;   // V, d x d
  Matrix whitening;  // U, d x n
  Matrix demixing;   // W = V U with unit-norm rows
  Vector scaling;    // row norms of V U before normalization
  IcaConfig config;
  std::vector<EpochTrace> trace;
  double max_orthogonality = 0.0;  // over all training steps
};

inline Matrix init_rotation(Index d, std::uint64_t seed) {
  if (d < 1) throw UsageError("rotation dimension must be at least 1");
  std::mt19937_64 rng(seed);
  return orthonormal_columns(standard_normal_matrix(d, d, rng));
}

/// g(s) = -tanh(s), elementwise.
template <typename Derived>
auto score(const Eigen::MatrixBase<Derived>& s) {
  return (-s.array().tanh()).matrix();
}

inline double log_cosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

/// One update of V from a d x B block of whitened samples (columns). The
/// gradient term is averaged over the block; the correction is applied once.
inline Matrix sgd_step(const Matrix& v, const Matrix& batch, double lr,
                       CorrectionForm form = CorrectionForm::right_v) {
  if (v.rows() != v.cols() || batch.rows() != v.cols())
    throw DimensionError("sgd_step: V must be d x d and the batch d x B");
  if (batch.cols() < 1) throw DimensionError("sgd_step: empty batch");
  const Index d = v.rows();
  const Matrix g = score(v * batch);
  Matrix next = v;
  next.noalias() += (lr / static_cast<double>(batch.cols())) * (g * batch.transpose());
  const Matrix gap = Matrix::Identity(d, d) - v * v.transpose();
  if (form == CorrectionForm::right_v)
    next.noalias() += 0.5 * gap * v;
  else
    next.noalias() += 0.5 * gap * v.transpose();
  return next;
}

/// Mean over samples (columns) of sum_i -log cosh((V z)_i).
inline double monitor_objective(const Matrix& v, const Matrix& samples) {
  if (samples.cols() == 0) return 0.0;
  const Matrix y = v * samples;
  double total = 0.0;
  for (Index j = 0; j < y.cols(); ++j)
    for (Index i = 0; i < y.rows(); ++i) total -= log_cosh(y(i, j));
  return total / static_cast<double>(samples.cols());
}

/// Normalized Amari error in [0, 1]; zero iff P is a scaled permutation.
inline double amari_index(const Matrix& p) {
  if (p.rows() != p.cols()) throw DimensionError("amari_index: matrix must be square");
  const Index d = p.rows();
  if (d < 2) {
    if (d == 1 && p(0, 0) == 0.0) throw DegenerateInputError("amari_index: zero row");
    return 0.0;
  }
  const Matrix a = p.cwiseAbs();
  double rows_term = 0.0;
  for (Index i = 0; i < d; ++i) {
    const double m = a.row(i).maxCoeff();
    if (!(m > 0.0)) throw DegenerateInputError("amari_index: row " + std::to_string(i) + " is zero");
    rows_term += a.row(i).sum() / m - 1.0;
  }
  double cols_term = 0.0;
  for (Index j = 0; j < d; ++j) {
    const double m = a.col(j).maxCoeff();
    if (!(m > 0.0)) throw DegenerateInputError("amari_index: column " + std::to_string(j) + " is zero");
    cols_term += a.col(j).sum() / m - 1.0;
  }
  return (rows_term + cols_term) / (2.0 * static_cast<double>(d) * static_cast<double>(d - 1));
}

/// Exact re-orthogonalization, forms W = V U and normalizes its rows.
inline IcaModel finalize_ica(Matrix rotation, const Matrix& whitening, const IcaConfig& config) {
  IcaModel model;
  model.rotation = nearest_orthogonal(rotation);
  model.whitening = whitening;
  model.demixing = model.rotation * whitening;
  model.scaling = model.demixing.rowwise().norm();
  for (Index i = 0; i < model.demixing.rows(); ++i) {
    if (!(model.scaling[i] > 0.0)) throw DegenerateInputError("ICA component " + std::to_string(i) + " has zero norm");
    model.demixing.row(i) /= model.scaling[i];
  }
  model.config = config;
  return model;
}

using EpochCallback = std::function<void(const EpochTrace&, const Matrix& rotation)>;

/// Trains V on whitened samples (columns of a d x N matrix).
inline IcaModel train_ica_whitened(const Matrix& whitened, const Matrix& whitening, IcaConfig config,
                                   const EpochCallback& on_epoch = {}) {
  config.validate();
  const Index d = whitened.rows();
  const Index n = whitened.cols();
  if (config.components == 0) config.components = d;
  if (config.components != d)
    throw DimensionError("ICA components (" + std::to_string(config.components) +
                         ") do not match whitened dimension (" + std::to_string(d) + ")");
  if (whitening.rows() != d) throw DimensionError("ICA: whitening matrix rows do not match data dimension");
  if (n == 0) throw DataError("ICA: empty data source");

  Matrix v = init_rotation(d, config.seed);
  const Index monitor_n = std::min(n, config.monitor_samples);
  const Matrix monitor = whitened.leftCols(monitor_n);
  const double blowup = 10.0 * std::sqrt(static_cast<double>(d));

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<EpochTrace> trace;
  double worst = orthogonality_residual(v);
  Matrix batch(d, std::min(config.batch_size, n));
  long step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    const double lr = config.learning_rate(epoch);
    double epoch_worst = 0.0;
    for (Index start = 0; start < n; start += config.batch_size) {
      const Index b = std::min(config.batch_size, n - start);
      if (batch.cols() != b) batch.resize(d, b);
      for (Index j = 0; j < b; ++j) batch.col(j) = whitened.col(order[static_cast<std::size_t>(start + j)]);
      v = sgd_step(v, batch, lr, config.correction);
      ++step;
      if (config.reorthogonalize_every > 0 && step % config.reorthogonalize_every == 0) v = nearest_orthogonal(v);
      if (!v.allFinite() || v.norm() > blowup)
        throw DivergenceError("ICA diverged at epoch " + std::to_string(epoch) + " step " + std::to_string(step) +
                              " (|V|_F = " + std::to_string(v.norm()) + ", lr = " + std::to_string(lr) + ")");
      epoch_worst = std::max(epoch_worst, orthogonality_residual(v));
    }
    EpochTrace t;
    t.epoch = epoch;
    t.learning_rate = lr;
    t.objective = monitor_objective(v, monitor);
    t.orthogonality = orthogonality_residual(v);
    t.max_orthogonality = epoch_worst;
    worst = std::max(worst, epoch_worst);
    trace.push_back(t);
    if (on_epoch) on_epoch(t, v);
  }
  IcaModel model = finalize_ica(v, whitening, config);
  model.trace = std::move(trace);
  model.max_orthogonality = worst;
  return model;
}

/// Whitens raw output rows (samples x n) with the model and trains V.
inline IcaModel train_ica(const Matrix& rows, const WhiteningModel& whitening, IcaConfig config,
                          const EpochCallback& on_epoch = {}) {
  if (rows.rows() == 0) throw DataError("ICA: empty data source");
  if (config.components != 0 && config.components != whitening.dim())
    throw DimensionError("ICA components (" + std::to_string(config.components) +
                         ") do not match the whitening model dimension (" + std::to_string(whitening.dim()) + ")");
  const Matrix z = whitening.whiten_rows(rows).transpose();
  return train_ica_whitened(z, whitening.whitening_matrix(), config, on_epoch);
}

}  // namespace ulnn
