// include/ulnn/synthetic.hpp
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

// Seeded synthetic worlds with known ground truth: a noise-free linear ICA
// mixture, and a zero-shot world whose classifier outputs, taxonomy and
// unseen classes all derive from latent class attributes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "ulnn/linalg.hpp"
#include "ulnn/taxonomy.hpp"
#include "ulnn/types.hpp"

namespace ulnn {

struct IcaWorldSpec {
  Index sources = 10;
  Index samples = 200000;
  double condition_bound = 10.0;
  bool identity_mixing = false;
  std::uint64_t seed = 0;
  int max_tries = 10000;

  void validate() const {
    if (sources < 1 || samples < 1) throw UsageError("ICA world needs positive source and sample counts");
    if (!(condition_bound >= 1.0)) throw UsageError("condition bound must be at least 1");
    if (max_tries < 1) throw UsageError("max_tries must be positive");
  }
};

struct IcaWorld {
  Matrix data;     // samples x sources, rows x = A s
  Matrix mixing;   // A
  Matrix sources;  // samples x sources
};

inline double condition_number(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  return s[s.size() - 1] > 0.0 ? s[0] / s[s.size() - 1] : std::numeric_limits<double>::infinity();
}

/// Unit-variance Laplace(0, 1/sqrt(2)) draw as a scaled difference of two
/// standard exponentials.
inline double laplace_unit(std::mt19937_64& rng) {
  std::exponential_distribution<double> ex(1.0);
  const double a = ex(rng);
  const double b = ex(rng);
  return (a - b) / std::sqrt(2.0);
}

inline IcaWorld generate_ica_world(const IcaWorldSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  IcaWorld w;
  const Index n = spec.sources;
  if (spec.identity_mixing) {
    w.mixing = Matrix::Identity(n, n);
  } else {
    bool found = false;
    for (int t = 0; t < spec.max_tries && !found; ++t) {
      w.mixing = standard_normal_matrix(n, n, rng);
      found = condition_number(w.mixing) <= spec.condition_bound;
    }
    if (!found)
      throw DataError("no mixing matrix with condition <= " + std::to_string(spec.condition_bound) + " after " +
                      std::to_string(spec.max_tries) + " draws");
  }
  w.sources.resize(spec.samples, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < spec.samples; ++i) w.sources(i, j) = laplace_unit(rng);
  w.data = w.sources * w.mixing.transpose();
  return w;
}

struct ZeroShotWorldSpec {
  Index attribute_dim = 16;
  Index seen = 40;
  Index unseen = 20;
  Index latent_branching = 3;  // fan-out of the latent attribute hierarchy
  double spread = 2.0;         // std of the first hierarchy step
  double decay = 0.7;          // step std shrinks by this factor per level
  double noise = 0.6;         // std of per-sample attribute noise
  Index branching = 2;        // taxonomy branching factor
  double logit_scale = 1.0;   // logits = -scale * squared attribute distance
  double logit_noise = 0.5;   // std of iid noise added to each logit
  Index train_per_class = 100;
  Index test_per_class = 50;
  std::uint64_t seed = 0;

  void validate() const {
    if (attribute_dim < 1 || seen < 2 || unseen < 0 || latent_branching < 2 || branching < 2 || train_per_class < 1 ||
        test_per_class < 1)
      throw UsageError("zero-shot world: counts must be positive (seen >= 2, branching >= 2)");
    if (noise < 0.0 || logit_noise < 0.0 || !(spread >= 0.0) || !(decay > 0.0) || !(logit_scale > 0.0))
      throw UsageError("zero-shot world: noise and spread must be >= 0, logit scale > 0");
  }
};

struct LabeledOutputs {
  Matrix logits;  // samples x seen classes
  std::vector<Index> labels;
};

struct ZeroShotWorld {
  Matrix attributes;  // attribute_dim x (seen + unseen)
  LabeledOutputs train;
  LabeledOutputs test_seen;
  LabeledOutputs test_unseen;
  std::vector<std::pair<std::string, std::string>> edges;  // parent, child
  std::vector<ClassEntry> classes;
  double spearman = 0.0;  // tree hops vs attribute distance, over class pairs
};

namespace detail {

/// Average ranks (1-based) with ties sharing their mean rank.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

/// k-means on the given columns; returns a cluster id per member. Seeded
/// k-means++ initialisation, fixed iteration cap.
inline std::vector<Index> kmeans(const Matrix& points, const std::vector<Index>& members, Index k,
                                 std::mt19937_64& rng) {
  const std::size_t m = members.size();
  std::vector<Index> centres_idx;
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  centres_idx.push_back(static_cast<Index>(pick(rng)));
  std::vector<double> d2(m);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (static_cast<Index>(centres_idx.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Index c : centres_idx)
        best = std::min(best, (points.col(members[i]) - points.col(members[static_cast<std::size_t>(c)])).squaredNorm());
      d2[i] = best;
      total += best;
    }
    if (!(total > 0.0)) break;
    double r = unit(rng) * total;
    std::size_t chosen = m - 1;
    for (std::size_t i = 0; i < m; ++i) {
      r -= d2[i];
      if (r <= 0.0) {
        chosen = i;
        break;
      }
    }
    centres_idx.push_back(static_cast<Index>(chosen));
  }
  const Index kk = static_cast<Index>(centres_idx.size());
  Matrix centres(points.rows(), kk);
  for (Index c = 0; c < kk; ++c) centres.col(c) = points.col(members[static_cast<std::size_t>(centres_idx[static_cast<std::size_t>(c)])]);
  std::vector<Index> assign(m, 0);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < m; ++i) {
      Index best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (Index c = 0; c < kk; ++c) {
        const double d = (points.col(members[i]) - centres.col(c)).squaredNorm();
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      changed = changed || assign[i] != best;
      assign[i] = best;
    }
    Matrix sums = Matrix::Zero(points.rows(), kk);
    std::vector<Index> counts(static_cast<std::size_t>(kk), 0);
    for (std::size_t i = 0; i < m; ++i) {
      sums.col(assign[i]) += points.col(members[i]);
      ++counts[static_cast<std::size_t>(assign[i])];
    }
    for (Index c = 0; c < kk; ++c)
      if (counts[static_cast<std::size_t>(c)] > 0) centres.col(c) = sums.col(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
    if (!changed && iter > 0) break;
  }
  return assign;
}

inline std::string class_node_id(Index c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "c%03lld", static_cast<long long>(c));
  return buf;
}

/// Recursive top-down clustering; classes become leaves.
inline void build_tree(const Matrix& points, const std::vector<Index>& members, const std::string& node, Index branching,
                       std::mt19937_64& rng, std::vector<std::pair<std::string, std::string>>& edges) {
  std::vector<std::vector<Index>> parts(static_cast<std::size_t>(branching));
  const Index k = std::min<Index>(branching, static_cast<Index>(members.size()));
  const auto assign = kmeans(points, members, k, rng);
  for (std::size_t i = 0; i < members.size(); ++i) parts[static_cast<std::size_t>(assign[i])].push_back(members[i]);
  parts.erase(std::remove_if(parts.begin(), parts.end(), [](const auto& p) { return p.empty(); }), parts.end());
  if (parts.size() < 2) {
    // Coincident points: split by position in the member list.
    parts.assign(static_cast<std::size_t>(k), {});
    for (std::size_t i = 0; i < members.size(); ++i) parts[i % static_cast<std::size_t>(k)].push_back(members[i]);
  }
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (parts[p].size() == 1) {
      edges.emplace_back(node, class_node_id(parts[p][0]));
      continue;
    }
    const std::string child = node + "." + std::to_string(p);
    edges.emplace_back(node, child);
    build_tree(points, parts[p], child, branching, rng, edges);
  }
}

/// Seen attributes from a Gaussian walk down a balanced latent hierarchy:
/// every child adds an isotropic step whose std shrinks by `decay` per level.
inline void latent_walk(Matrix& attributes, Index lo, Index hi, const Vector& here, double step,
                        const ZeroShotWorldSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  if (hi - lo == 1) {
    attributes.col(lo) = here;
    return;
  }
  const Index parts = std::min(spec.latent_branching, hi - lo);
  for (Index p = 0; p < parts; ++p) {
    const Index a = lo + (hi - lo) * p / parts;
    const Index b = lo + (hi - lo) * (p + 1) / parts;
    Vector child = here;
    for (Index i = 0; i < child.size(); ++i) child[i] += step * normal(rng);
    latent_walk(attributes, a, b, child, step * spec.decay, spec, rng);
  }
}

inline LabeledOutputs sample_outputs(const Matrix& attributes, const std::vector<Index>& classes, Index per_class,
                                     const ZeroShotWorldSpec& spec, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  LabeledOutputs out;
  out.logits.resize(static_cast<Index>(classes.size()) * per_class, spec.seen);
  Index row = 0;
  for (Index c : classes) {
    for (Index s = 0; s < per_class; ++s, ++row) {
      Vector a = attributes.col(c);
      if (spec.noise > 0.0)
        for (Index i = 0; i < a.size(); ++i) a[i] += spec.noise * normal(rng);
      for (Index j = 0; j < spec.seen; ++j) {
        out.logits(row, j) = -spec.logit_scale * (a - attributes.col(j)).squaredNorm();
        if (spec.logit_noise > 0.0) out.logits(row, j) += spec.logit_noise * normal(rng);
      }
      out.labels.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

/// Spearman rank correlation of two equally long samples.
inline double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DimensionError("spearman: need two samples of equal length >= 2");
  const auto rx = detail::average_ranks(x);
  const auto ry = detail::average_ranks(y);
  const Eigen::Map<const Vector> a(rx.data(), static_cast<Index>(rx.size()));
  const Eigen::Map<const Vector> b(ry.data(), static_cast<Index>(ry.size()));
  const Vector ca = a.array() - a.mean();
  const Vector cb = b.array() - b.mean();
  const double den = ca.norm() * cb.norm();
  return den > 0.0 ? ca.dot(cb) / den : 0.0;
}

inline ZeroShotWorld generate_zeroshot_world(const ZeroShotWorldSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Index n = spec.seen;
  const Index m = spec.unseen;
  const Index total = n + m;
  ZeroShotWorld w;
  w.attributes.resize(spec.attribute_dim, total);

  detail::latent_walk(w.attributes, 0, n, Vector::Zero(spec.attribute_dim), spec.spread, spec, rng);

  // Unseen classes mix a seen class with one of its three nearest seen
  // neighbours; each (class, neighbour) pair is used at most once.
  std::set<std::pair<Index, Index>> used;
  std::uniform_int_distribution<Index> pick_seen(0, n - 1);
  std::uniform_real_distribution<double> weight(0.25, 0.75);
  for (Index u = 0; u < m; ++u) {
    for (int attempt = 0;; ++attempt) {
      const Index j = pick_seen(rng);
      std::vector<std::pair<double, Index>> near;
      for (Index k = 0; k < n; ++k)
        if (k != j) near.emplace_back((w.attributes.col(j) - w.attributes.col(k)).squaredNorm(), k);
      std::sort(near.begin(), near.end());
      const Index choices = std::min<Index>(3, static_cast<Index>(near.size()));
      std::uniform_int_distribution<Index> pick_near(0, choices - 1);
      const Index k = near[static_cast<std::size_t>(pick_near(rng))].second;
      const auto key = std::minmax(j, k);
      if (used.count(key) && attempt < 1000) continue;
      used.insert(key);
      const double a = weight(rng);
      w.attributes.col(n + u) = a * w.attributes.col(j) + (1.0 - a) * w.attributes.col(k);
      break;
    }
  }

  std::vector<Index> everyone(static_cast<std::size_t>(total));
  std::iota(everyone.begin(), everyone.end(), Index{0});
  detail::build_tree(w.attributes, everyone, "root", spec.branching, rng, w.edges);

  for (Index c = 0; c < total; ++c)
    w.classes.push_back({c, detail::class_node_id(c), c < n, (c < n ? "seen_" : "unseen_") + std::to_string(c)});

  std::vector<Index> seen_ids(static_cast<std::size_t>(n));
  std::iota(seen_ids.begin(), seen_ids.end(), Index{0});
  std::vector<Index> unseen_ids(static_cast<std::size_t>(m));
  std::iota(unseen_ids.begin(), unseen_ids.end(), n);
  w.train = detail::sample_outputs(w.attributes, seen_ids, spec.train_per_class, spec, rng);
  w.test_seen = detail::sample_outputs(w.attributes, seen_ids, spec.test_per_class, spec, rng);
  w.test_unseen = detail::sample_outputs(w.attributes, unseen_ids, spec.test_per_class, spec, rng);

  TaxonomyGraph graph;
  for (const auto& [p, c] : w.edges) graph.add_edge(p, c);
  graph.set_classes(w.classes);
  std::vector<double> hops;
  std::vector<double> dist;
  for (Index a = 0; a < total; ++a) {
    const auto h = graph.hops_from(graph.class_node(a));
    for (Index b = a + 1; b < total; ++b) {
      hops.push_back(h[static_cast<std::size_t>(graph.class_node(b))]);
      dist.push_back((w.attributes.col(a) - w.attributes.col(b)).norm());
    }
  }
  w.spearman = spearman_correlation(hops, dist);
  return w;
}

}  // namespace ulnn
