// tests/test_taxonomy.cpp
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

#include <random>
#include <sstream>

#include "ulnn/taxonomy.hpp"

namespace ulnn {
namespace {

// root - animal - dog, root - animal - cat, root - plant - tree; island - rock
TaxonomyGraph sample_graph() {
  TaxonomyGraph g;
  std::istringstream edges("# comment\nroot\tanimal\nanimal\tdog\nanimal\tcat\n\nroot\tplant\nplant\ttree\nisland\trock\n");
  read_edges(edges, g);
  std::istringstream reg("0\tdog\tseen\tDog\n1\tcat\tseen\tCat\n2\ttree\tunseen\tTree\n3\trock\tunseen\n");
  g.set_classes(read_registry(reg));
  return g;
}

Matrix euclidean_distances(const Matrix& points) {
  Matrix d(points.cols(), points.cols());
  for (Index a = 0; a < points.cols(); ++a)
    for (Index b = 0; b < points.cols(); ++b) d(a, b) = (points.col(a) - points.col(b)).norm();
  return d;
}

TEST(Graph, ShortestPaths) {
  const TaxonomyGraph g = sample_graph();
  EXPECT_EQ(g.node_count(), 8);
  EXPECT_EQ(g.edge_count(), 6);
  EXPECT_EQ(g.shortest_path_length("dog", "dog"), 0);
  EXPECT_EQ(g.shortest_path_length("animal", "dog"), 1);
  EXPECT_EQ(g.shortest_path_length("dog", "cat"), 2);
  EXPECT_EQ(g.shortest_path_length("dog", "tree"), 4);
  EXPECT_EQ(g.shortest_path_length("cat", "root"), 2);
  EXPECT_FALSE(g.shortest_path_length("dog", "rock").has_value());
  EXPECT_THROW(g.shortest_path_length("dog", "unicorn"), DataError);
}

TEST(Graph, PathSimilarity) {
  TaxonomyGraph chain;
  chain.add_edge("a", "b");
  chain.add_edge("b", "c");
  chain.add_edge("c", "d");
  EXPECT_EQ(chain.path_similarity("a", "a"), 1.0);
  EXPECT_EQ(chain.path_similarity("a", "b"), 0.5);
  EXPECT_EQ(chain.path_similarity("a", "d"), 0.25);
  EXPECT_EQ(chain.path_similarity("d", "a"), 0.25);
  const TaxonomyGraph g = sample_graph();
  EXPECT_EQ(g.path_similarity("dog", "rock"), 0.0);
}

TEST(Graph, SimilarityIsSymmetricAndOneOnlyOnSelf) {
  const TaxonomyGraph g = sample_graph();
  for (Index a = 0; a < g.node_count(); ++a)
    for (Index b = 0; b < g.node_count(); ++b) {
      const double s = g.path_similarity(g.node_id(a), g.node_id(b));
      EXPECT_EQ(s, g.path_similarity(g.node_id(b), g.node_id(a)));
      EXPECT_EQ(s == 1.0, a == b);
    }
}

TEST(Graph, EdgeErrors) {
  TaxonomyGraph g;
  g.add_edge("a", "b");
  EXPECT_THROW(g.add_edge("a", "a"), FormatError);
  EXPECT_THROW(g.add_edge("b", "a"), FormatError);
  std::istringstream bad("a\tb\tc\n");
  EXPECT_THROW(read_edges(bad, g), FormatError);
}

TEST(Registry, Errors) {
  auto with = [](const std::string& text) {
    TaxonomyGraph g;
    g.add_edge("a", "b");
    g.add_edge("a", "c");
    std::istringstream in(text);
    g.set_classes(read_registry(in));
    return g;
  };
  EXPECT_NO_THROW(with("0\tb\tseen\n1\tc\tunseen\n"));
  EXPECT_THROW(with("0\tb\tseen\n2\tc\tunseen\n"), FormatError);
  EXPECT_THROW(with("0\tb\tunseen\n1\tc\tseen\n"), FormatError);
  EXPECT_THROW(with("0\tb\tseen\n1\tzzz\tunseen\n"), DataError);
  EXPECT_THROW(with("0\tb\tseen\n1\tb\tunseen\n"), DataError);
  EXPECT_THROW(with("0\tb\tmaybe\n"), FormatError);
  EXPECT_THROW(with("x\tb\tseen\n"), FormatError);
}

TEST(Registry, OrderAndLookup) {
  const TaxonomyGraph g = sample_graph();
  EXPECT_EQ(g.seen_count(), 2);
  EXPECT_EQ(g.unseen_count(), 2);
  EXPECT_EQ(g.find_class("Tree"), 2);
  EXPECT_EQ(g.find_class("rock"), 3);
  EXPECT_THROW(g.find_class("unicorn"), DataError);
  std::ostringstream out;
  write_registry(out, g.classes());
  std::istringstream back(out.str());
  const auto again = read_registry(back);
  ASSERT_EQ(again.size(), 4u);
  EXPECT_EQ(again[0].label, "Dog");
  EXPECT_FALSE(again[2].seen);
}

TEST(Distance, Entries) {
  const Matrix d = distance_matrix(sample_graph());
  EXPECT_EQ(d.diagonal(), Vector::Zero(4));
  EXPECT_EQ(d, d.transpose());
  EXPECT_DOUBLE_EQ(d(0, 1), 1.0 - 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(d(0, 2), 1.0 - 1.0 / 5.0);
  EXPECT_EQ(d(0, 3), 1.0);
  EXPECT_GE(d.minCoeff(), 0.0);
  EXPECT_LE(d.maxCoeff(), 1.0);
  TaxonomyGraph pair;
  pair.add_edge("p", "q");
  pair.set_classes({{0, "p", true, ""}, {1, "q", true, ""}});
  EXPECT_EQ(distance_matrix(pair)(0, 1), 0.5);
}

TEST(Distance, IndependentOfThreads) {
  TaxonomyGraph g;
  std::vector<ClassEntry> classes;
  for (int i = 1; i < 60; ++i) g.add_edge("n" + std::to_string((i - 1) / 3), "n" + std::to_string(i));
  for (int i = 0; i < 60; ++i) classes.push_back({i, "n" + std::to_string(i), i < 40, ""});
  g.set_classes(classes);
  EXPECT_EQ(distance_matrix(g, 1), distance_matrix(g, 4));
}

TEST(Mds, SinglePoint) {
  const SemanticEmbedding e = classical_mds(Matrix::Zero(1, 1), 3);
  EXPECT_EQ(e.coordinates.rows(), 0);
  EXPECT_EQ(e.coordinates.cols(), 1);
}

TEST(Mds, CollinearPoints) {
  Matrix pts(1, 3);
  pts << 0, 1, 3;
  const Matrix d = euclidean_distances(pts);
  const SemanticEmbedding e = classical_mds(d, 3);
  EXPECT_EQ(e.retained, 1);
  EXPECT_LT(max_abs(euclidean_distances(e.coordinates) - d), 1e-10);
  EXPECT_LT(e.reconstruction_error, 1e-10);
}

TEST(Mds, EuclideanOracleAndCentering) {
  std::mt19937_64 rng(1);
  const Matrix pts = standard_normal_matrix(3, 80, rng);
  const Matrix d = euclidean_distances(pts);
  const SemanticEmbedding e = classical_mds(d, 3);
  EXPECT_EQ(e.retained, 3);
  EXPECT_LT(max_abs(euclidean_distances(e.coordinates) - d), 1e-8);
  EXPECT_LT(e.coordinates.rowwise().sum().cwiseAbs().maxCoeff(), 1e-8);
  // Requesting fewer dimensions keeps the leading ones.
  const SemanticEmbedding two = classical_mds(d, 2);
  EXPECT_EQ(two.retained, 2);
  EXPECT_LT(max_abs(two.coordinates - e.coordinates.topRows(2)), 1e-10);
  EXPECT_GT(two.reconstruction_error, 1e-3);
}

TEST(Mds, NonEuclideanInputReportsError) {
  const Matrix d = distance_matrix(sample_graph());
  const SemanticEmbedding e = classical_mds(d, 10);
  EXPECT_LE(e.retained, 3);
  for (Index k = 0; k < e.retained; ++k) EXPECT_GT(e.spectrum[k], 0.0);
  EXPECT_LT(e.coordinates.rowwise().sum().cwiseAbs().maxCoeff(), 1e-8);
  double worst = 0.0;
  for (Index a = 0; a < 4; ++a)
    for (Index b = a + 1; b < 4; ++b)
      worst = std::max(worst, std::abs((e.coordinates.col(a) - e.coordinates.col(b)).norm() - d(a, b)));
  EXPECT_NEAR(e.reconstruction_error, worst, 1e-15);
}

TEST(Mds, Errors) {
  Matrix d = Matrix::Zero(3, 3);
  d(0, 1) = 1.0;
  EXPECT_THROW(classical_mds(d, 2), DataError);
  EXPECT_THROW(classical_mds(Matrix::Zero(3, 3), 0), UsageError);
  EXPECT_THROW(classical_mds(Matrix::Zero(2, 3), 2), DimensionError);
}

}  // namespace
}  // namespace ulnn
