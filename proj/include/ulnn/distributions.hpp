// include/ulnn/distributions.hpp
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

// Output-layer transforms (softmax with temperature, normalized logits) and
// per-class excess kurtosis of classifier outputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ulnn/types.hpp"

namespace ulnn {

enum class TransformKind { softmax, normalized_logits, temperature_rescale };

/// A row transform applied to classifier outputs, recorded as a tag in file
/// metadata ("softmax(T=1)", "normalized-logits", ...).
struct OutputTransform {
  TransformKind kind = TransformKind::softmax;
  double temperature = 1.0;

  std::string tag() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
      case TransformKind::softmax:
        os << "softmax(T=" << temperature << ")";
        break;
      case TransformKind::normalized_logits:
        os << "normalized-logits";
        break;
      case TransformKind::temperature_rescale:
        os << "temperature-rescale(T=" << temperature << ")";
        break;
    }
    return os.str();
  }

  static OutputTransform softmax_at(double t) { return {TransformKind::softmax, t}; }
  static OutputTransform normalized() { return {TransformKind::normalized_logits, 1.0}; }

  /// Accepts "softmax", "normalized-logits" and "temperature-rescale".
  static OutputTransform parse(const std::string& name, double t = 1.0) {
    if (name == "softmax") return {TransformKind::softmax, t};
    if (name == "normalized-logits" || name == "normalized_logits")
      return {TransformKind::normalized_logits, 1.0};
    if (name == "temperature-rescale" || name == "temperature_rescale")
      return {TransformKind::temperature_rescale, t};
    throw UsageError("unknown transform '" + name +
                     "' (expected softmax, normalized-logits or temperature-rescale)");
  }
};

namespace detail {

inline void check_temperature(double t) {
  if (!(t > 0.0) || !std::isfinite(t))
    throw DataError("temperature must be a positive finite number");
}

}  // namespace detail

inline Vector softmax(const Vector& logits, double temperature = 1.0) {
  detail::check_temperature(temperature);
  require_finite(logits, "softmax input");
  if (logits.size() == 0) throw DimensionError("softmax of an empty vector");
  const double peak = logits.maxCoeff();
  Vector out = ((logits.array() - peak) / temperature).exp().matrix();
  out /= out.sum();
  return out;
}

/// p_i^(1/T) / sum_j p_j^(1/T), evaluated as softmax(log p, T).
inline Vector temperature_rescale(const Vector& probs, double temperature) {
  detail::check_temperature(temperature);
  require_finite(probs, "temperature_rescale input");
  for (Index i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0))
      throw DegenerateInputError("temperature_rescale needs strictly positive probabilities; entry " +
                                 std::to_string(i) + " is " + std::to_string(probs[i]));
  }
  return softmax(probs.array().log().matrix(), temperature);
}

inline Vector normalized_logits(const Vector& logits) {
  require_finite(logits, "normalized_logits input");
  if (logits.size() == 0) throw DimensionError("normalized_logits of an empty vector");
  const double lowest = logits.minCoeff();
  Vector out = logits.array() - lowest;
  const double total = out.sum();
  if (!(total > 0.0)) throw DegenerateInputError("degenerate constant logits: normalization undefined");
  out /= total;
  return out;
}

inline Vector apply_transform(const Vector& row, const OutputTransform& t) {
  switch (t.kind) {
    case TransformKind::softmax:
      return softmax(row, t.temperature);
    case TransformKind::normalized_logits:
      return normalized_logits(row);
    case TransformKind::temperature_rescale:
      return temperature_rescale(row, t.temperature);
  }
  return row;
}

/// Applies the transform to every row (sample) of a samples x classes matrix.
inline Matrix apply_transform_rows(const Matrix& rows, const OutputTransform& t) {
  Matrix out(rows.rows(), rows.cols());
  for (Index r = 0; r < rows.rows(); ++r) {
    try {
      out.row(r) = apply_transform(rows.row(r).transpose(), t).transpose();
    } catch (const DataError& e) {
      throw DegenerateInputError("row " + std::to_string(r) + ": " + e.what());
    }
  }
  return out;
}

struct KurtosisReport {
  std::uint64_t samples = 0;
  Vector mean;
  Vector variance;
  // Excess kurtosis per class; empty where the class has zero variance.
  std::vector<std::optional<double>> kurtosis;
};

/// Mergeable central-moment accumulator (counts, means and central sums up to
/// fourth order per column). Merging uses the pairwise update formulas, so a
/// fixed merge order gives reproducible results.
class KurtosisAccumulator {
 public:
  KurtosisAccumulator() = default;
  explicit KurtosisAccumulator(Index dim)
      : mean_(Vector::Zero(dim)), m2_(Vector::Zero(dim)), m3_(Vector::Zero(dim)), m4_(Vector::Zero(dim)) {}

  Index dim() const { return mean_.size(); }
  std::uint64_t count() const { return count_; }

  void add(const Vector& x) {
    if (x.size() != dim())
      throw DimensionError("kurtosis accumulator expects dimension " + std::to_string(dim()) + ", got " +
                           std::to_string(x.size()));
    require_finite(x, "kurtosis input");
    const double n1 = static_cast<double>(count_);
    ++count_;
    const double n = static_cast<double>(count_);
    for (Index i = 0; i < dim(); ++i) {
      const double delta = x[i] - mean_[i];
      const double delta_n = delta / n;
      const double delta_n2 = delta_n * delta_n;
      const double term1 = delta * delta_n * n1;
      mean_[i] += delta_n;
      m4_[i] += term1 * delta_n2 * (n * n - 3 * n + 3) + 6 * delta_n2 * m2_[i] - 4 * delta_n * m3_[i];
      m3_[i] += term1 * delta_n * (n - 2) - 3 * delta_n * m2_[i];
      m2_[i] += term1;
    }
  }

  void add_rows(const Matrix& rows) {
    for (Index r = 0; r < rows.rows(); ++r) add(rows.row(r).transpose());
  }

  void merge(const KurtosisAccumulator& other) {
    if (other.count_ == 0) return;
    if (count_ == 0) {
      *this = other;
      return;
    }
    if (other.dim() != dim()) throw DimensionError("kurtosis accumulator merge: dimension mismatch");
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    for (Index i = 0; i < dim(); ++i) {
      const double delta = other.mean_[i] - mean_[i];
      const double d2 = delta * delta;
      const double d3 = d2 * delta;
      const double d4 = d2 * d2;
      const double m2 = m2_[i] + other.m2_[i] + d2 * na * nb / n;
      const double m3 = m3_[i] + other.m3_[i] + d3 * na * nb * (na - nb) / (n * n) +
                        3.0 * delta * (na * other.m2_[i] - nb * m2_[i]) / n;
      const double m4 = m4_[i] + other.m4_[i] + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
                        6.0 * d2 * (na * na * other.m2_[i] + nb * nb * m2_[i]) / (n * n) +
                        4.0 * delta * (na * other.m3_[i] - nb * m3_[i]) / n;
      mean_[i] += delta * nb / n;
      m2_[i] = m2;
      m3_[i] = m3;
      m4_[i] = m4;
    }
    count_ += other.count_;
  }

  KurtosisReport report() const {
    if (count_ < 4) throw DataError("kurtosis needs at least 4 samples, got " + std::to_string(count_));
    KurtosisReport r;
    r.samples = count_;
    r.mean = mean_;
    const double n = static_cast<double>(count_);
    r.variance = m2_ / n;
    r.kurtosis.resize(static_cast<std::size_t>(dim()));
    for (Index i = 0; i < dim(); ++i) {
      if (!(m2_[i] > 0.0)) continue;
      r.kurtosis[static_cast<std::size_t>(i)] = n * m4_[i] / (m2_[i] * m2_[i]) - 3.0;
    }
    return r;
  }

 private:
  std::uint64_t count_ = 0;
  Vector mean_;
  Vector m2_;
  Vector m3_;
  Vector m4_;
};

/// Per-class excess kurtosis E(x^4)/E(x^2)^2 - 3 of mean-removed columns,
/// population moments. Rows are samples.
inline KurtosisReport kurtosis_per_class(const Matrix& samples) {
  if (samples.cols() < 1) throw DimensionError("kurtosis: matrix has no columns");
  KurtosisAccumulator acc(samples.cols());
  acc.add_rows(samples);
  return acc.report();
}

}  // namespace ulnn
