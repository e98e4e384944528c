// include/ulnn/zeroshot.hpp
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

// Zero-shot prediction index, flat hit@k evaluation and the class-ranking
// analyses on component matrices.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "ulnn/bridge.hpp"
#include "ulnn/parallel.hpp"
#include "ulnn/taxonomy.hpp"
#include "ulnn/types.hpp"

namespace ulnn {

enum class Pool { seen, unseen, both };

inline std::string to_string(Pool p) {
  switch (p) {
    case Pool::seen:
      return "seen";
    case Pool::unseen:
      return "unseen";
    case Pool::both:
      return "both";
  }
  return "?";
}

inline Pool parse_pool(const std::string& s) {
  if (s == "seen") return Pool::seen;
  if (s == "unseen") return Pool::unseen;
  if (s == "both") return Pool::both;
  throw UsageError("unknown pool '" + s + "' (expected seen, unseen or both)");
}

struct ScoredClass {
  Index cls = 0;  // global class index
  double score = 0.0;
};

/// Descending score, ascending class index on ties.
inline bool ranks_before(const ScoredClass& a, const ScoredClass& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.cls < b.cls;
}

struct Prediction {
  Pool pool = Pool::both;
  std::vector<ScoredClass> ranked;
};

/// Precomputed, column-normalized class projections for one pool.
struct ClassBank {
  Matrix columns;            // c x k, unit L2 columns
  Vector norms;              // original column norms
  std::vector<Index> classes;  // global class index per column
};

struct ZeroShotIndex {
  Matrix w1;    // d x n visual features
  Matrix p1;    // d x c
  Vector fbar;  // d
  ClassBank seen;
  ClassBank unseen;
  std::vector<Index> excluded;  // zero-norm projected classes

  Index input_dim() const { return w1.cols(); }
  Index common_dim() const { return p1.cols(); }
};

namespace detail {

inline ClassBank make_bank(const Matrix& projected, Index first_class, std::vector<Index>& excluded) {
  ClassBank bank;
  std::vector<Index> keep;
  const double scale = projected.size() ? std::max(1.0, max_abs(projected)) : 1.0;
  for (Index j = 0; j < projected.cols(); ++j) {
    const double norm = projected.col(j).norm();
    if (norm > 1e-14 * scale)
      keep.push_back(j);
    else
      excluded.push_back(first_class + j);
  }
  bank.columns.resize(projected.rows(), static_cast<Index>(keep.size()));
  bank.norms.resize(static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const Index j = keep[k];
    const double norm = projected.col(j).norm();
    bank.columns.col(static_cast<Index>(k)) = projected.col(j) / norm;
    bank.norms[static_cast<Index>(k)] = norm;
    bank.classes.push_back(first_class + j);
  }
  return bank;
}

}  // namespace detail

/// Projects the centered semantic features of both pools through P2 and
/// stores them column-normalized. Seen classes are 0..n-1, unseen n..n+m-1.
/// Classes whose projection has zero norm are dropped and listed in
/// `excluded` (with a warning on `warn`, when given).
inline ZeroShotIndex build_index(const CcaModel& cca, const Matrix& w1, const Matrix& seen_semantic,
                                 const Matrix& unseen_semantic, std::ostream* warn = nullptr) {
  if (cca.p1.rows() != w1.rows()) throw DimensionError("index: P1 rows do not match visual feature dimension");
  if (seen_semantic.rows() != cca.p2.rows()) throw DimensionError("index: P2 rows do not match semantic dimension");
  if (seen_semantic.cols() != w1.cols())
    throw DimensionError("index: " + std::to_string(seen_semantic.cols()) + " seen semantic columns for " +
                         std::to_string(w1.cols()) + " seen classes");
  if (unseen_semantic.cols() > 0 && unseen_semantic.rows() != cca.p2.rows())
    throw DimensionError("index: unseen semantic dimension does not match P2");
  ZeroShotIndex index;
  index.w1 = w1;
  index.p1 = cca.p1;
  index.fbar = cca.fbar;
  const Matrix p2t = cca.p2.transpose();
  index.seen = detail::make_bank(p2t * seen_semantic, 0, index.excluded);
  index.unseen = detail::make_bank(unseen_semantic.cols() > 0 ? Matrix(p2t * unseen_semantic) : Matrix(cca.p2.cols(), 0),
                                   w1.cols(), index.excluded);
  if (index.seen.classes.empty() && index.unseen.classes.empty()) throw DataError("index: every class was excluded");
  if (warn && !index.excluded.empty()) {
    *warn << "warning: " << index.excluded.size() << " class(es) with zero-norm projection excluded:";
    for (Index c : index.excluded) *warn << ' ' << c;
    *warn << '\n';
  }
  return index;
}

/// q = P1^T (f(W1 x) - fbar)
inline Vector query_vector(const ZeroShotIndex& index, const Vector& x) {
  if (x.size() != index.input_dim())
    throw DimensionError("query: expected output dimension " + std::to_string(index.input_dim()) + ", got " +
                         std::to_string(x.size()));
  const Vector q = index.p1.transpose() * (l1_normalize(index.w1 * x) - index.fbar);
  return q;
}

/// Cosine scores of a query against every class column of a pool.
inline std::vector<ScoredClass> pool_scores(const ZeroShotIndex& index, const Vector& q, Pool pool) {
  const double qn = q.norm();
  if (!(qn > 0.0)) throw DegenerateInputError("query vector is zero; cosine similarity undefined");
  std::vector<ScoredClass> out;
  auto add = [&](const ClassBank& bank) {
    if (bank.columns.cols() == 0) return;
    const Vector s = bank.columns.transpose() * q / qn;
    for (Index j = 0; j < s.size(); ++j) out.push_back({bank.classes[static_cast<std::size_t>(j)], s[j]});
  };
  if (pool != Pool::unseen) add(index.seen);
  if (pool != Pool::seen) add(index.unseen);
  return out;
}

inline Prediction predict(const ZeroShotIndex& index, const Vector& x, Index top_k, Pool pool) {
  if (top_k < 1) throw UsageError("top_k must be at least 1");
  auto scores = pool_scores(index, query_vector(index, x), pool);
  const auto k = static_cast<std::size_t>(std::min<Index>(top_k, static_cast<Index>(scores.size())));
  std::partial_sort(scores.begin(), scores.begin() + static_cast<std::ptrdiff_t>(k), scores.end(), ranks_before);
  scores.resize(k);
  return {pool, std::move(scores)};
}

inline bool pool_contains(const ZeroShotIndex& index, Index cls, Pool pool) {
  auto in = [cls](const ClassBank& b) { return std::find(b.classes.begin(), b.classes.end(), cls) != b.classes.end(); };
  if (pool == Pool::seen) return in(index.seen);
  if (pool == Pool::unseen) return in(index.unseen);
  return in(index.seen) || in(index.unseen);
}

inline Index pool_size(const ZeroShotIndex& index, Pool pool) {
  const auto s = static_cast<Index>(index.seen.classes.size());
  const auto u = static_cast<Index>(index.unseen.classes.size());
  return pool == Pool::seen ? s : pool == Pool::unseen ? u : s + u;
}

struct HitResult {
  Pool pool = Pool::both;
  Index k = 0;
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  double accuracy() const { return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total); }
};

/// Zero-based rank of `truth` within a scored pool.
inline Index rank_of(const std::vector<ScoredClass>& scores, Index truth) {
  auto it = std::find_if(scores.begin(), scores.end(), [truth](const ScoredClass& s) { return s.cls == truth; });
  if (it == scores.end()) throw DataError("label " + std::to_string(truth) + " is not in the evaluated pool");
  Index better = 0;
  for (const auto& s : scores)
    if (ranks_before(s, *it)) ++better;
  return better;
}

/// Generic flat hit@k over precomputed ranks of the true label.
inline std::vector<HitResult> hits_from_ranks(const std::vector<Index>& ranks, const std::vector<Index>& ks, Pool pool) {
  std::vector<HitResult> out;
  for (Index k : ks) {
    if (k < 1) throw UsageError("hit@k needs k >= 1");
    HitResult h;
    h.pool = pool;
    h.k = k;
    h.total = ranks.size();
    h.hits = static_cast<std::uint64_t>(std::count_if(ranks.begin(), ranks.end(), [k](Index r) { return r < k; }));
    out.push_back(h);
  }
  return out;
}

/// Flat hit@k: fraction of samples (rows of `outputs`) whose true label is
/// among the top-k predictions in `pool`.
inline std::vector<HitResult> topk_accuracy(const ZeroShotIndex& index, const Matrix& outputs,
                                            const std::vector<Index>& labels, const std::vector<Index>& ks, Pool pool,
                                            unsigned threads = 1) {
  if (outputs.rows() == 0) throw DataError("evaluation dataset is empty");
  if (static_cast<Index>(labels.size()) != outputs.rows()) throw DimensionError("evaluation: label count does not match rows");
  for (Index l : labels)
    if (!pool_contains(index, l, pool))
      throw DataError("label " + std::to_string(l) + " is outside the " + to_string(pool) + " pool");
  std::vector<Index> ranks(labels.size());
  parallel_for(labels.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const auto scores = pool_scores(index, query_vector(index, outputs.row(static_cast<Index>(r)).transpose()), pool);
      ranks[r] = rank_of(scores, labels[r]);
    }
  });
  return hits_from_ranks(ranks, ks, pool);
}

/// Classes sorted by their signed value in one row of a d x n component
/// matrix, largest first.
inline std::vector<ScoredClass> rank_classes_by_component(const Matrix& features, Index component, Index top) {
  if (component < 0 || component >= features.rows())
    throw DataError("component " + std::to_string(component) + " out of range (have " + std::to_string(features.rows()) + ")");
  std::vector<ScoredClass> out;
  for (Index j = 0; j < features.cols(); ++j) out.push_back({j, features(component, j)});
  std::sort(out.begin(), out.end(), ranks_before);
  if (top >= 0 && top < static_cast<Index>(out.size())) out.resize(static_cast<std::size_t>(top));
  return out;
}

/// Per-class argmax component of a d x n feature matrix.
inline std::vector<Index> dominant_components(const Matrix& features) {
  std::vector<Index> out;
  for (Index j = 0; j < features.cols(); ++j) {
    Index arg = 0;
    features.col(j).maxCoeff(&arg);
    out.push_back(arg);
  }
  return out;
}

/// Components that are the argmax of at least one class, ordered by how many
/// classes they dominate (descending), then by index.
inline std::vector<std::pair<Index, Index>> component_table(const Matrix& features) {
  std::vector<Index> count(static_cast<std::size_t>(features.rows()), 0);
  for (Index c : dominant_components(features)) ++count[static_cast<std::size_t>(c)];
  std::vector<std::pair<Index, Index>> out;
  for (Index i = 0; i < features.rows(); ++i)
    if (count[static_cast<std::size_t>(i)] > 0) out.emplace_back(i, count[static_cast<std::size_t>(i)]);
  std::stable_sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.second > b.second; });
  return out;
}

/// Classes ranked by cosine similarity of their feature columns to the query
/// class's column; the query class itself is excluded.
inline std::vector<ScoredClass> nearest_classes_visual(Index cls, const Matrix& features, Index top) {
  if (cls < 0 || cls >= features.cols()) throw DataError("class " + std::to_string(cls) + " out of range");
  const double qn = features.col(cls).norm();
  if (!(qn > 0.0)) throw DegenerateInputError("class " + std::to_string(cls) + " has a zero-norm feature column");
  std::vector<ScoredClass> out;
  for (Index j = 0; j < features.cols(); ++j) {
    if (j == cls) continue;
    const double n = features.col(j).norm();
    const double s = n > 0.0 ? features.col(j).dot(features.col(cls)) / (n * qn) : 0.0;
    out.push_back({j, s});
  }
  std::sort(out.begin(), out.end(), ranks_before);
  if (top >= 0 && top < static_cast<Index>(out.size())) out.resize(static_cast<std::size_t>(top));
  return out;
}

/// Registered classes ranked by path similarity to `cls`, self excluded.
inline std::vector<ScoredClass> nearest_classes_semantic(Index cls, const TaxonomyGraph& graph, Index top) {
  if (cls < 0 || cls >= graph.class_count()) throw DataError("unknown class " + std::to_string(cls));
  const Vector s = graph.class_similarities(cls);
  std::vector<ScoredClass> out;
  for (Index j = 0; j < s.size(); ++j)
    if (j != cls) out.push_back({j, s[j]});
  std::sort(out.begin(), out.end(), ranks_before);
  if (top >= 0 && top < static_cast<Index>(out.size())) out.resize(static_cast<std::size_t>(top));
  return out;
}

}  // namespace ulnn
