// include/ulnn/taxonomy.hpp
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

// Class taxonomy graph, path-based class similarity and classic MDS
// embeddings of the resulting distance matrix.

#include <algorithm>
#include <deque>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ulnn/linalg.hpp"
#include "ulnn/parallel.hpp"
#include "ulnn/types.hpp"

namespace ulnn {

struct ClassEntry {
  Index index = 0;  // global column index: seen classes 0..n-1, unseen n..n+m-1
  std::string node;
  bool seen = true;
  std::string label;
};

/// Undirected hierarchy graph over node identifiers, plus the registry of
/// classes that live on its nodes.
class TaxonomyGraph {
 public:
  Index node_count() const { return static_cast<Index>(ids_.size()); }
  Index edge_count() const { return edges_; }

  bool has_node(const std::string& id) const { return index_.count(id) != 0; }

  Index add_node(const std::string& id) {
    if (id.empty()) throw FormatError("taxonomy: empty node identifier");
    auto it = index_.find(id);
    if (it != index_.end()) return it->second;
    const Index k = node_count();
    index_.emplace(id, k);
    ids_.push_back(id);
    adjacency_.emplace_back();
    return k;
  }

  void add_edge(const std::string& parent, const std::string& child) {
    if (parent == child) throw FormatError("taxonomy: self-loop on node '" + parent + "'");
    const Index a = add_node(parent);
    const Index b = add_node(child);
    auto& na = adjacency_[static_cast<std::size_t>(a)];
    if (std::find(na.begin(), na.end(), b) != na.end())
      throw FormatError("taxonomy: duplicate edge " + parent + " - " + child);
    na.push_back(b);
    adjacency_[static_cast<std::size_t>(b)].push_back(a);
    ++edges_;
  }

  Index node_index(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw DataError("taxonomy: unknown node '" + id + "'");
    return it->second;
  }

  const std::string& node_id(Index k) const { return ids_.at(static_cast<std::size_t>(k)); }

  /// Hop counts from `source` to every node; -1 where unreachable.
  std::vector<int> hops_from(Index source) const {
    std::vector<int> dist(ids_.size(), -1);
    std::deque<Index> queue;
    dist[static_cast<std::size_t>(source)] = 0;
    queue.push_back(source);
    while (!queue.empty()) {
      const Index u = queue.front();
      queue.pop_front();
      for (Index w : adjacency_[static_cast<std::size_t>(u)]) {
        if (dist[static_cast<std::size_t>(w)] >= 0) continue;
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
        queue.push_back(w);
      }
    }
    return dist;
  }

  /// Minimum edge count between two nodes; nullopt when disconnected.
  std::optional<int> shortest_path_length(const std::string& a, const std::string& b) const {
    const Index ia = node_index(a);
    const Index ib = node_index(b);
    const int d = hops_from(ia)[static_cast<std::size_t>(ib)];
    if (d < 0) return std::nullopt;
    return d;
  }

  /// 1 / (1 + hops); 0 for unreachable pairs.
  double path_similarity(const std::string& a, const std::string& b) const {
    const auto d = shortest_path_length(a, b);
    return d ? 1.0 / (1.0 + *d) : 0.0;
  }

  /// Registers classes. Entries are sorted by index; indices must be exactly
  /// 0..N-1 with every seen class before every unseen one, and each node may
  /// carry at most one class.
  void set_classes(std::vector<ClassEntry> entries) {
    std::sort(entries.begin(), entries.end(), [](const ClassEntry& a, const ClassEntry& b) { return a.index < b.index; });
    std::set<std::string> used;
    bool unseen_started = false;
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& e = entries[k];
      if (e.index != static_cast<Index>(k))
        throw FormatError("class registry: indices must be 0..N-1 without gaps (missing " + std::to_string(k) + ")");
      if (!has_node(e.node)) throw DataError("class registry: class " + std::to_string(e.index) + " maps to unknown node '" + e.node + "'");
      if (!used.insert(e.node).second) throw DataError("class registry: node '" + e.node + "' registered twice");
      if (!e.seen) unseen_started = true;
      if (e.seen && unseen_started)
        throw FormatError("class registry: seen class " + std::to_string(e.index) + " listed after unseen classes");
    }
    classes_ = std::move(entries);
    class_nodes_.clear();
    for (const auto& e : classes_) class_nodes_.push_back(node_index(e.node));
  }

  const std::vector<ClassEntry>& classes() const { return classes_; }
  Index class_count() const { return static_cast<Index>(classes_.size()); }
  Index seen_count() const {
    return static_cast<Index>(std::count_if(classes_.begin(), classes_.end(), [](const ClassEntry& e) { return e.seen; }));
  }
  Index unseen_count() const { return class_count() - seen_count(); }
  Index class_node(Index cls) const { return class_nodes_.at(static_cast<std::size_t>(cls)); }

  /// Class index for a node id or class label; throws when unknown.
  Index find_class(const std::string& key) const {
    for (const auto& e : classes_)
      if (e.node == key || (!e.label.empty() && e.label == key)) return e.index;
    throw DataError("unknown class '" + key + "'");
  }

  /// Path similarities from one registered class to every registered class.
  Vector class_similarities(Index cls) const {
    const auto hops = hops_from(class_node(cls));
    Vector s(class_count());
    for (Index j = 0; j < class_count(); ++j) {
      const int h = hops[static_cast<std::size_t>(class_nodes_[static_cast<std::size_t>(j)])];
      s[j] = h < 0 ? 0.0 : 1.0 / (1.0 + h);
    }
    return s;
  }

 private:
  std::unordered_map<std::string, Index> index_;
  std::vector<std::string> ids_;
  std::vector<std::vector<Index>> adjacency_;
  Index edges_ = 0;
  std::vector<ClassEntry> classes_;
  std::vector<Index> class_nodes_;
};

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, '\t')) out.push_back(field);
  if (!line.empty() && line.back() == '\t') out.emplace_back();
  return out;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace detail

/// Reads `parent<TAB>child` lines. Blank lines and lines starting with '#'
/// are skipped.
inline void read_edges(std::istream& in, TaxonomyGraph& graph) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    const auto f = detail::split_tabs(line);
    if (f.size() != 2) throw FormatError("taxonomy line " + std::to_string(lineno) + ": expected parent<TAB>child");
    try {
      graph.add_edge(f[0], f[1]);
    } catch (const FormatError& e) {
      throw FormatError("taxonomy line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

/// Reads `class_index<TAB>node_id<TAB>seen|unseen<TAB>label` lines.
inline std::vector<ClassEntry> read_registry(std::istream& in) {
  std::vector<ClassEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::strip_cr(line);
    if (line.empty() || line[0] == '#') continue;
    const auto f = detail::split_tabs(line);
    if (f.size() < 3 || f.size() > 4)
      throw FormatError("registry line " + std::to_string(lineno) + ": expected index<TAB>node<TAB>seen|unseen<TAB>label");
    ClassEntry e;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(f[0], &used);
      if (used != f[0].size() || v < 0) throw std::invalid_argument("index");
      e.index = static_cast<Index>(v);
    } catch (const std::exception&) {
      throw FormatError("registry line " + std::to_string(lineno) + ": bad class index '" + f[0] + "'");
    }
    e.node = f[1];
    if (f[2] == "seen")
      e.seen = true;
    else if (f[2] == "unseen")
      e.seen = false;
    else
      throw FormatError("registry line " + std::to_string(lineno) + ": pool must be seen or unseen, got '" + f[2] + "'");
    if (f.size() == 4) e.label = f[3];
    out.push_back(std::move(e));
  }
  return out;
}

inline void write_edges(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& edges) {
  for (const auto& [p, c] : edges) out << p << '\t' << c << '\n';
}

inline void write_registry(std::ostream& out, const std::vector<ClassEntry>& classes) {
  for (const auto& e : classes) out << e.index << '\t' << e.node << '\t' << (e.seen ? "seen" : "unseen") << '\t' << e.label << '\n';
}

/// D_ij = 1 - path_similarity over registered classes (seen first). One
/// breadth-first traversal per class node.
inline Matrix distance_matrix(const TaxonomyGraph& graph, unsigned threads = 1) {
  const Index n = graph.class_count();
  if (n < 2) throw DataError("distance matrix needs at least 2 registered classes");
  Matrix d(n, n);
  parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) d.row(static_cast<Index>(i)) = (1.0 - graph.class_similarities(static_cast<Index>(i)).array()).matrix().transpose();
  });
  return d;
}

struct SemanticEmbedding {
  Matrix coordinates;  // dims x classes
  Vector spectrum;     // all Gram eigenvalues, descending
  Index retained = 0;
  double reconstruction_error = 0.0;  // max |pairwise distance - D|
};

/// Classic MDS: double-center the squared distances, keep the top
/// min(max_dim, #positive) eigenpairs (eigenvalues above 1e-10 of the
/// largest magnitude), coordinates E sqrt(L) transposed to dims x classes.
inline SemanticEmbedding classical_mds(const Matrix& d, Index max_dim) {
  if (max_dim < 1) throw UsageError("MDS dimension must be at least 1");
  if (d.rows() != d.cols()) throw DimensionError("MDS: distance matrix must be square");
  require_finite(d, "MDS distance matrix");
  const Index n = d.rows();
  const double scale = std::max(1.0, max_abs(d));
  if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw DataError("MDS: distance matrix is not symmetric");
  SemanticEmbedding out;
  if (n <= 1) {
    out.coordinates = Matrix::Zero(0, n);
    out.spectrum = Vector::Zero(n);
    return out;
  }
  const Matrix sq = d.array().square().matrix();
  const Matrix j = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  const Matrix b = -0.5 * j * sq * j;
  const SymmetricEigen eig = eigendecompose(b);
  out.spectrum = eig.values;
  const double peak = eig.values.cwiseAbs().maxCoeff();
  const double floor = 1e-10 * peak;
  Index keep = 0;
  while (keep < n && keep < max_dim && eig.values[keep] > floor) ++keep;
  out.retained = keep;
  out.coordinates.resize(keep, n);
  for (Index k = 0; k < keep; ++k) out.coordinates.row(k) = std::sqrt(eig.values[k]) * eig.vectors.col(k).transpose();
  double worst = 0.0;
  for (Index a = 0; a < n; ++a)
    for (Index c = a + 1; c < n; ++c)
      worst = std::max(worst, std::abs((out.coordinates.col(a) - out.coordinates.col(c)).norm() - d(a, c)));
  out.reconstruction_error = worst;
  return out;
}

}  // namespace ulnn
