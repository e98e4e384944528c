// include/ulnn/pipeline.hpp
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

// End-to-end run: outputs -> PCA/ICA visual features -> taxonomy MDS -> CCA
// -> prediction index -> hit@k evaluation. Every stage's artifact is written
// to the output directory.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "ulnn/bridge.hpp"
#include "ulnn/distributions.hpp"
#include "ulnn/ica.hpp"
#include "ulnn/io/config.hpp"
#include "ulnn/io/matrix_file.hpp"
#include "ulnn/io/models.hpp"
#include "ulnn/io/text_formats.hpp"
#include "ulnn/synthetic.hpp"
#include "ulnn/taxonomy.hpp"
#include "ulnn/whitening.hpp"
#include "ulnn/zeroshot.hpp"

namespace ulnn {

struct PipelineResult {
  std::vector<HitResult> results;
  Vector correlations;
  Index semantic_dim = 0;
  double mds_reconstruction_error = 0.0;
  double ica_max_orthogonality = 0.0;
};

inline TaxonomyGraph load_taxonomy(const std::string& edges_path, const std::string& registry_path) {
  TaxonomyGraph graph;
  std::ifstream edges(edges_path);
  if (!edges) throw DataError("cannot open " + edges_path);
  read_edges(edges, graph);
  std::ifstream reg(registry_path);
  if (!reg) throw DataError("cannot open " + registry_path);
  graph.set_classes(read_registry(reg));
  return graph;
}

/// Writes the embedding matrix (dims x classes) plus a `.classes` sidecar
/// with one node id per column.
inline void write_embedding(const SemanticEmbedding& e, const TaxonomyGraph& graph, const std::string& path) {
  io::write_matrix(e.coordinates, path);
  std::vector<std::string> ids;
  for (const auto& c : graph.classes()) ids.push_back(c.node);
  io::write_lines(ids, path + ".classes");
}

/// Loads an embedding and checks its class-order sidecar against the registry.
inline Matrix read_embedding(const std::string& path, const TaxonomyGraph& graph) {
  Matrix coords = io::read_matrix(path);
  const auto ids = io::read_lines(path + ".classes");
  if (static_cast<Index>(ids.size()) != coords.cols() || coords.cols() != graph.class_count())
    throw DataError(path + ": embedding has " + std::to_string(coords.cols()) + " columns, sidecar " +
                    std::to_string(ids.size()) + " classes, registry " + std::to_string(graph.class_count()));
  for (Index c = 0; c < graph.class_count(); ++c)
    if (ids[static_cast<std::size_t>(c)] != graph.classes()[static_cast<std::size_t>(c)].node)
      throw DataError(path + ": class order differs from the registry at column " + std::to_string(c));
  return coords;
}

/// Writes a synthetic world as pipeline inputs plus `world.cfg`, a run
/// configuration pointing at them (relative to the directory).
inline io::RunConfig write_zeroshot_world(const ZeroShotWorld& w, const std::string& dir) {
  const std::filesystem::path root(dir);
  std::filesystem::create_directories(root);
  auto at = [&](const char* name) { return (root / name).string(); };
  io::write_matrix(w.train.logits, at("train_outputs.bin"));
  io::write_labels(w.train.labels, at("train_labels.txt"));
  io::write_matrix(w.test_seen.logits, at("test_seen_outputs.bin"));
  io::write_labels(w.test_seen.labels, at("test_seen_labels.txt"));
  io::write_matrix(w.test_unseen.logits, at("test_unseen_outputs.bin"));
  io::write_labels(w.test_unseen.labels, at("test_unseen_labels.txt"));
  io::write_matrix(w.attributes, at("attributes.bin"));
  {
    std::ofstream out(at("taxonomy.tsv"), std::ios::trunc);
    if (!out) throw DataError("cannot write " + at("taxonomy.tsv"));
    write_edges(out, w.edges);
  }
  {
    std::ofstream out(at("registry.tsv"), std::ios::trunc);
    if (!out) throw DataError("cannot write " + at("registry.tsv"));
    write_registry(out, w.classes);
  }
  io::RunConfig cfg;
  cfg.train_outputs = "train_outputs.bin";
  cfg.train_labels = "train_labels.txt";
  cfg.taxonomy = "taxonomy.tsv";
  cfg.registry = "registry.tsv";
  cfg.test_seen_outputs = "test_seen_outputs.bin";
  cfg.test_seen_labels = "test_seen_labels.txt";
  cfg.test_unseen_outputs = "test_unseen_outputs.bin";
  cfg.test_unseen_labels = "test_unseen_labels.txt";
  cfg.out_dir = "run";
  std::ofstream out(at("world.cfg"), std::ios::trunc);
  if (!out) throw DataError("cannot write " + at("world.cfg"));
  out << "# synthetic zero-shot world, spearman = " << w.spearman << '\n' << cfg.to_text();
  cfg.base_dir = dir;
  return cfg;
}

/// Visual features W1 for the configured kind. `ica_out`, when non-null,
/// receives the trained ICA model.
inline VisualFeatures make_visual_features(const io::RunConfig& cfg, const Matrix& fit_rows, const WhiteningModel& wm,
                                           IcaModel* ica_out, std::ostream* log) {
  switch (cfg.visual) {
    case VisualKind::pca:
      return {wm.pca_matrix(), VisualKind::pca};
    case VisualKind::ica: {
      IcaConfig ic = cfg.ica;
      ic.seed = cfg.seed;
      IcaModel model = train_ica(fit_rows, wm, ic, [&](const EpochTrace& t, const Matrix&) {
        if (log)
          *log << "ica epoch " << t.epoch << " lr " << t.learning_rate << " objective " << t.objective
               << " orthogonality " << t.orthogonality << '\n';
      });
      VisualFeatures v{model.demixing, VisualKind::ica};
      if (ica_out) *ica_out = std::move(model);
      return v;
    }
    case VisualKind::random:
      return {random_semi_orthogonal(wm.dim(), wm.input_dim(), cfg.seed), VisualKind::random};
  }
  throw UsageError("unknown visual feature kind");
}

inline PipelineResult run_pipeline(const io::RunConfig& cfg, std::ostream* log = nullptr) {
  cfg.validate();
  if (cfg.out_dir.empty()) throw UsageError("pipeline needs out_dir");
  for (const auto* p : {&cfg.train_outputs, &cfg.taxonomy, &cfg.registry})
    if (p->empty()) throw UsageError("pipeline needs train_outputs, taxonomy and registry");
  const std::filesystem::path out = cfg.resolve(cfg.out_dir);
  std::filesystem::create_directories(out);
  auto path = [&](const char* name) { return (out / name).string(); };

  const Matrix train = io::read_matrix(cfg.resolve(cfg.train_outputs));
  TaxonomyGraph graph = load_taxonomy(cfg.resolve(cfg.taxonomy), cfg.resolve(cfg.registry));
  const Index n = graph.seen_count();
  if (train.cols() != n)
    throw DataError("training outputs have " + std::to_string(train.cols()) + " columns but the registry lists " +
                    std::to_string(n) + " seen classes");

  const Matrix fit_rows = apply_transform_rows(train, cfg.fit());
  const WhiteningModel wm = WhiteningModel::fit_rows(fit_rows, cfg.whiten_dim, cfg.chunk_rows, cfg.threads);
  io::write_model(io::to_model(wm, cfg.fit().tag()), path("pca.model"));
  if (log) *log << "pca: " << wm.dim() << " of " << wm.valid_rank() << " valid dimensions\n";

  PipelineResult result;
  IcaModel ica;
  const VisualFeatures visual = make_visual_features(cfg, fit_rows, wm, &ica, log);
  if (cfg.visual == VisualKind::ica) {
    io::write_model(io::to_model(ica, cfg.fit().tag()), path("ica.model"));
    result.ica_max_orthogonality = ica.max_orthogonality;
  }

  const SemanticEmbedding emb = classical_mds(distance_matrix(graph, cfg.threads),
                                               cfg.mds_max_dim > 0 ? cfg.mds_max_dim : graph.class_count());
  write_embedding(emb, graph, path("embedding.bin"));
  result.semantic_dim = emb.retained;
  result.mds_reconstruction_error = emb.reconstruction_error;
  if (log) *log << "mds: " << emb.retained << " dimensions, max distance error " << emb.reconstruction_error << '\n';

  const CenteredSemantic sem = center_semantic(emb.coordinates.leftCols(n), emb.coordinates.rightCols(graph.unseen_count()));
  ClassMeans means;
  if (cfg.class_means_from_data) {
    if (cfg.train_labels.empty()) throw UsageError("class_means = data needs train_labels");
    means = class_means(apply_transform_rows(train, cfg.query()), io::read_labels(cfg.resolve(cfg.train_labels)), n);
  }
  const VisualClassMatrix f = visual_class_matrix(visual.matrix, means);
  const CcaModel cca = fit_cca(f.f, sem.seen, cfg.effective_cca_dims(), cfg.cca_ridge);
  io::write_model(io::to_model(cca, visual), path("cca.model"));
  result.correlations = cca.correlations;

  const ZeroShotIndex index = build_index(cca, visual.matrix, sem.seen, sem.unseen, log);
  io::write_model(io::to_model(index), path("index.model"));

  auto load_set = [&](const std::string& outputs, const std::string& labels, Matrix& x, std::vector<Index>& y) {
    if (outputs.empty() || labels.empty()) return false;
    x = apply_transform_rows(io::read_matrix(cfg.resolve(outputs)), cfg.query());
    y = io::read_labels(cfg.resolve(labels));
    return true;
  };
  Matrix xs, xu;
  std::vector<Index> ys, yu;
  const bool have_seen = load_set(cfg.test_seen_outputs, cfg.test_seen_labels, xs, ys);
  const bool have_unseen = load_set(cfg.test_unseen_outputs, cfg.test_unseen_labels, xu, yu);
  for (Pool pool : cfg.pools) {
    Matrix x;
    std::vector<Index> y;
    if (pool != Pool::unseen && have_seen) {
      x = xs;
      y = ys;
    }
    if (pool != Pool::seen && have_unseen) {
      Matrix joined(x.rows() + xu.rows(), xu.cols());
      if (x.rows()) joined.topRows(x.rows()) = x;
      joined.bottomRows(xu.rows()) = xu;
      x = std::move(joined);
      y.insert(y.end(), yu.begin(), yu.end());
    }
    if (x.rows() == 0) continue;
    const auto hits = topk_accuracy(index, x, y, cfg.topk, pool, cfg.threads);
    result.results.insert(result.results.end(), hits.begin(), hits.end());
  }
  io::write_results(result.results, path("results.csv"));
  return result;
}

}  // namespace ulnn
