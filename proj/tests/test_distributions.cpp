// tests/test_distributions.cpp
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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "ulnn/distributions.hpp"

namespace ulnn {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

// Direct long-double evaluation of exp(y_i / T) / sum exp(y_j / T).
std::vector<long double> softmax_oracle(const std::vector<long double>& y, long double t) {
  long double total = 0.0L;
  std::vector<long double> e;
  for (long double v : y) {
    e.push_back(std::exp(v / t));
    total += e.back();
  }
  for (auto& v : e) v /= total;
  return e;
}

TEST(Softmax, UniformLogitsGiveUniformOutput) {
  for (double c : {-50.0, 0.0, 3.5, 700.0})
    for (double t : {0.1, 1.0, 7.0}) {
      const Vector x = softmax(Vector::Constant(4, c), t);
      for (Index i = 0; i < 4; ++i) EXPECT_NEAR(x[i], 0.25, 1e-15);
    }
}

TEST(Softmax, OneTwoThree) {
  const Vector x = softmax(vec({1, 2, 3}), 1.0);
  const auto oracle = softmax_oracle({1, 2, 3}, 1);
  for (Index i = 0; i < 3; ++i) EXPECT_NEAR(x[i], static_cast<double>(oracle[static_cast<std::size_t>(i)]), 1e-12);
  EXPECT_NEAR(x[0], 0.09003057, 1e-8);
  EXPECT_NEAR(x[1], 0.24472847, 1e-8);
  EXPECT_NEAR(x[2], 0.66524096, 1e-8);
}

TEST(Softmax, SaturatesWithoutOverflow) {
  const Vector x = softmax(vec({0, 1000}), 1.0);
  EXPECT_TRUE(x.allFinite());
  EXPECT_GE(x[0], 0.0);
  EXPECT_LT(x[0], 1e-300);
  EXPECT_EQ(x[1], 1.0);
}

TEST(Softmax, ShiftInvariance) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vector y(10);
    for (Index i = 0; i < y.size(); ++i) y[i] = normal(rng);
    const double shift = normal(rng) * 100.0;
    const Vector a = softmax(y, 1.3);
    const Vector b = softmax((y.array() + shift).matrix(), 1.3);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(a.sum(), 1.0, 1e-12);
  }
}

TEST(Softmax, RejectsBadInput) {
  EXPECT_THROW(softmax(vec({1, 2}), 0.0), DataError);
  EXPECT_THROW(softmax(vec({1, 2}), -1.0), DataError);
  EXPECT_THROW(softmax(vec({1, std::nan("")}), 1.0), NonFiniteError);
  EXPECT_THROW(softmax(vec({1, INFINITY}), 1.0), NonFiniteError);
}

TEST(TemperatureRescale, IdentityAtTemperatureOne) {
  const Vector p = vec({0.1, 0.2, 0.3, 0.4});
  EXPECT_LT((temperature_rescale(p, 1.0) - p).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(TemperatureRescale, MatchesPowerRenormalization) {
  const Vector p = vec({1e-6, 0.9, 0.1, 1e-9});
  const Vector x = temperature_rescale(p, 3.0);
  long double total = 0.0L;
  std::vector<long double> e;
  for (Index i = 0; i < p.size(); ++i) {
    e.push_back(std::pow(static_cast<long double>(p[i]), 1.0L / 3.0L));
    total += e.back();
  }
  for (Index i = 0; i < p.size(); ++i) EXPECT_NEAR(x[i], static_cast<double>(e[static_cast<std::size_t>(i)] / total), 1e-14);
}

TEST(TemperatureRescale, PublishedExampleWithinTolerance) {
  const Vector x = temperature_rescale(vec({1e-6, 0.9, 0.1, 1e-9}), 3.0);
  const Vector published = vec({0.015, 0.664, 0.319, 0.001});
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(x[i], published[i], 0.02) << "entry " << i;
}

TEST(TemperatureRescale, HighTemperatureApproachesUniform) {
  const Vector x = temperature_rescale(vec({1e-6, 0.9, 0.1, 1e-9}), 1e6);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(x[i], 0.25, 1e-3);
}

TEST(TemperatureRescale, ComposesWithSoftmax) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    Vector y(8);
    for (Index i = 0; i < y.size(); ++i) y[i] = normal(rng);
    for (double t : {0.5, 2.0, 3.0, 10.0})
      EXPECT_LT((temperature_rescale(softmax(y, 1.0), t) - softmax(y, t)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(TemperatureRescale, RejectsZeroEntries) {
  EXPECT_THROW(temperature_rescale(vec({0.0, 1.0}), 2.0), DegenerateInputError);
  EXPECT_THROW(temperature_rescale(vec({0.5, 0.5}), 0.0), DataError);
}

TEST(NormalizedLogits, Examples) {
  const Vector a = normalized_logits(vec({1, 2, 3}));
  EXPECT_EQ(a[0], 0.0);
  EXPECT_NEAR(a[1], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(a[2], 2.0 / 3.0, 1e-15);
  const Vector b = normalized_logits(vec({-2, 0}));
  EXPECT_EQ(b[0], 0.0);
  EXPECT_EQ(b[1], 1.0);
  EXPECT_THROW(normalized_logits(vec({5, 5, 5})), DegenerateInputError);
}

TEST(NormalizedLogits, SimplexAndExactZero) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    Vector y(12);
    for (Index i = 0; i < y.size(); ++i) y[i] = normal(rng);
    const Vector x = normalized_logits(y);
    EXPECT_NEAR(x.sum(), 1.0, 1e-12);
    EXPECT_EQ(x.minCoeff(), 0.0);
    EXPECT_GE(x.minCoeff(), 0.0);
  }
}

TEST(NormalizedLogits, PermutationEquivariant) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector y(9);
  for (Index i = 0; i < y.size(); ++i) y[i] = normal(rng);
  std::vector<Index> perm(9);
  for (Index i = 0; i < 9; ++i) perm[static_cast<std::size_t>(i)] = i;
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(perm.begin(), perm.end(), rng);
    Vector py(9);
    for (Index i = 0; i < 9; ++i) py[i] = y[perm[static_cast<std::size_t>(i)]];
    const Vector x = normalized_logits(y);
    const Vector px = normalized_logits(py);
    for (Index i = 0; i < 9; ++i) EXPECT_NEAR(px[i], x[perm[static_cast<std::size_t>(i)]], 1e-15);
  }
}

TEST(OutputTransform, ParseAndTag) {
  EXPECT_EQ(OutputTransform::parse("softmax", 1.0).tag(), "softmax(T=1)");
  EXPECT_EQ(OutputTransform::parse("normalized-logits").tag(), "normalized-logits");
  EXPECT_EQ(OutputTransform::parse("temperature-rescale", 3.0).kind, TransformKind::temperature_rescale);
  EXPECT_THROW(OutputTransform::parse("sigmoid"), UsageError);
}

TEST(OutputTransform, RowsReportOffendingRow) {
  Matrix y(3, 2);
  y << 1, 2, 4, 4, 0, 1;
  try {
    apply_transform_rows(y, OutputTransform::normalized());
    FAIL() << "constant row accepted";
  } catch (const DegenerateInputError& e) {
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
}

Matrix laplace_columns(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = expo(rng) - expo(rng);
  return m;
}

TEST(Kurtosis, GaussianNearZero) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(1000000, 2);
  for (Index i = 0; i < m.rows(); ++i) {
    m(i, 0) = normal(rng);
    m(i, 1) = normal(rng);
  }
  const auto r = kurtosis_per_class(m);
  for (const auto& k : r.kurtosis) {
    ASSERT_TRUE(k.has_value());
    EXPECT_NEAR(*k, 0.0, 0.05);
  }
}

TEST(Kurtosis, LaplaceNearThree) {
  const auto r = kurtosis_per_class(laplace_columns(1000000, 2, 2));
  for (const auto& k : r.kurtosis) {
    ASSERT_TRUE(k.has_value());
    EXPECT_NEAR(*k, 3.0, 0.2);
  }
}

TEST(Kurtosis, ConstantColumnUndefined) {
  Matrix m = laplace_columns(100, 3, 4);
  m.col(1).setConstant(0.7);
  const auto r = kurtosis_per_class(m);
  EXPECT_TRUE(r.kurtosis[0].has_value());
  EXPECT_FALSE(r.kurtosis[1].has_value());
  EXPECT_TRUE(r.kurtosis[2].has_value());
  EXPECT_EQ(r.variance[1], 0.0);
}

TEST(Kurtosis, MatchesTwoPassOracle) {
  const Matrix m = laplace_columns(5000, 3, 9);
  const auto r = kurtosis_per_class(m);
  for (Index j = 0; j < m.cols(); ++j) {
    const double mean = m.col(j).mean();
    const Vector c = m.col(j).array() - mean;
    const double m2 = c.array().square().mean();
    const double m4 = c.array().pow(4).mean();
    EXPECT_NEAR(*r.kurtosis[static_cast<std::size_t>(j)], m4 / (m2 * m2) - 3.0, 1e-10);
    EXPECT_NEAR(r.mean[j], mean, 1e-12);
    EXPECT_NEAR(r.variance[j], m2, 1e-12);
  }
}

TEST(Kurtosis, AffineInvariance) {
  const Matrix m = laplace_columns(20000, 1, 12);
  const auto base = kurtosis_per_class(m);
  for (auto [a, b] : {std::pair{2.5, -1.0}, std::pair{-0.01, 300.0}, std::pair{1000.0, 1e4}}) {
    const Matrix t = (a * m.array() + b).matrix();
    EXPECT_NEAR(*kurtosis_per_class(t).kurtosis[0], *base.kurtosis[0], 1e-8);
  }
}

TEST(Kurtosis, MergeMatchesSinglePass) {
  const Matrix m = laplace_columns(3001, 4, 21);
  KurtosisAccumulator whole(4);
  whole.add_rows(m);
  KurtosisAccumulator left(4), mid(4), right(4);
  left.add_rows(m.topRows(1000));
  mid.add_rows(m.middleRows(1000, 1));
  right.add_rows(m.bottomRows(2000));
  left.merge(mid);
  left.merge(right);
  const auto a = whole.report();
  const auto b = left.report();
  EXPECT_EQ(b.samples, 3001u);
  for (Index j = 0; j < 4; ++j) {
    EXPECT_NEAR(*a.kurtosis[static_cast<std::size_t>(j)], *b.kurtosis[static_cast<std::size_t>(j)], 1e-10);
    EXPECT_NEAR(a.mean[j], b.mean[j], 1e-13);
  }
}

TEST(Kurtosis, NeedsFourSamples) {
  EXPECT_THROW(kurtosis_per_class(Matrix::Random(3, 2)), DataError);
  EXPECT_NO_THROW(kurtosis_per_class(Matrix::Random(4, 2)));
}

TEST(Kurtosis, SoftmaxOfGaussianLogitsIsSuperGaussian) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index classes = 10;
  KurtosisAccumulator acc(classes);
  Vector y(classes);
  for (int s = 0; s < 100000; ++s) {
    for (Index i = 0; i < classes; ++i) y[i] = normal(rng);
    acc.add(softmax(y, 1.0));
  }
  for (const auto& k : acc.report().kurtosis) {
    ASSERT_TRUE(k.has_value());
    EXPECT_GT(*k, 0.0);
  }
}

}  // namespace
}  // namespace ulnn
