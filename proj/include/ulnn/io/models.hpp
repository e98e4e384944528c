// include/ulnn/io/models.hpp
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

// Conversions between the in-memory models and ModelFile containers.

#include <string>
#include <vector>

#include "ulnn/bridge.hpp"
#include "ulnn/ica.hpp"
#include "ulnn/io/model_file.hpp"
#include "ulnn/taxonomy.hpp"
#include "ulnn/whitening.hpp"
#include "ulnn/zeroshot.hpp"

namespace ulnn::io {

namespace detail {

inline Matrix as_column(const Vector& v) { return Matrix(v); }

inline Matrix index_column(const std::vector<Index>& v) {
  Matrix m(static_cast<Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Index>(i), 0) = static_cast<double>(v[i]);
  return m;
}

inline std::vector<Index> index_list(const Matrix& m) {
  std::vector<Index> out;
  for (Index i = 0; i < m.rows(); ++i) out.push_back(static_cast<Index>(m(i, 0)));
  return out;
}

}  // namespace detail

inline ModelFile to_model(const WhiteningModel& w, const std::string& transform_tag) {
  ModelFile f;
  f.kind = "whitening";
  f.set("dim", static_cast<long long>(w.dim()));
  f.set("transform", transform_tag);
  f.matrices["mean"] = detail::as_column(w.mean());
  f.matrices["eigenvalues"] = detail::as_column(w.eigenvalues());
  f.matrices["eigenvectors"] = w.eigenvectors();
  return f;
}

inline WhiteningModel whitening_from_model(const ModelFile& m) {
  if (m.kind != "whitening") throw FormatError("expected a whitening model, found '" + m.kind + "'");
  return WhiteningModel(m.vector("mean"), m.vector("eigenvalues"), m.matrix("eigenvectors"), static_cast<Index>(m.integer("dim")));
}

inline ModelFile to_model(const IcaModel& ica, const std::string& transform_tag) {
  ModelFile f;
  f.kind = "ica";
  f.set("transform", transform_tag);
  f.set("components", static_cast<long long>(ica.rotation.rows()));
  f.set("batch_size", static_cast<long long>(ica.config.batch_size));
  f.set("lr0", ica.config.lr0);
  f.set("halving_period", static_cast<long long>(ica.config.halving_period));
  f.set("epochs", static_cast<long long>(ica.config.epochs));
  f.set("seed", std::to_string(ica.config.seed));
  f.set("reorthogonalize_every", static_cast<long long>(ica.config.reorthogonalize_every));
  f.set("correction", to_string(ica.config.correction));
  f.set("max_orthogonality", ica.max_orthogonality);
  f.matrices["rotation"] = ica.rotation;
  f.matrices["whitening"] = ica.whitening;
  f.matrices["demixing"] = ica.demixing;
  f.matrices["scaling"] = detail::as_column(ica.scaling);
  Matrix trace(static_cast<Index>(ica.trace.size()), 5);
  for (std::size_t e = 0; e < ica.trace.size(); ++e) {
    const auto& t = ica.trace[e];
    trace.row(static_cast<Index>(e)) << t.epoch, t.learning_rate, t.objective, t.orthogonality, t.max_orthogonality;
  }
  f.matrices["trace"] = trace;
  return f;
}

inline IcaModel ica_from_model(const ModelFile& m) {
  if (m.kind != "ica") throw FormatError("expected an ica model, found '" + m.kind + "'");
  IcaModel ica;
  ica.rotation = m.matrix("rotation");
  ica.whitening = m.matrix("whitening");
  ica.demixing = m.matrix("demixing");
  ica.scaling = m.vector("scaling");
  ica.config.components = static_cast<Index>(m.integer("components"));
  ica.config.batch_size = static_cast<Index>(m.integer("batch_size"));
  ica.config.lr0 = m.number("lr0");
  ica.config.halving_period = static_cast<int>(m.integer("halving_period"));
  ica.config.epochs = static_cast<int>(m.integer("epochs"));
  ica.config.seed = std::stoull(m.attribute("seed"));
  ica.config.reorthogonalize_every = static_cast<int>(m.integer("reorthogonalize_every"));
  ica.config.correction = parse_correction_form(m.attribute("correction"));
  ica.max_orthogonality = m.number("max_orthogonality");
  const Matrix& trace = m.matrix("trace");
  for (Index e = 0; e < trace.rows(); ++e) {
    EpochTrace t;
    t.epoch = static_cast<int>(trace(e, 0));
    t.learning_rate = trace(e, 1);
    t.objective = trace(e, 2);
    t.orthogonality = trace(e, 3);
    t.max_orthogonality = trace(e, 4);
    ica.trace.push_back(t);
  }
  return ica;
}

/// Visual feature matrix W1 carried by a pca or ica model file.
inline VisualFeatures visual_features_from_model(const ModelFile& m) {
  if (m.kind == "whitening") return {whitening_from_model(m).pca_matrix(), VisualKind::pca};
  if (m.kind == "ica") return {m.matrix("demixing"), VisualKind::ica};
  if (m.kind == "visual" || m.kind == "cca") return {m.matrix("w1"), parse_visual_kind(m.attribute("provenance"))};
  throw FormatError("model kind '" + m.kind + "' does not carry visual features");
}

inline ModelFile to_model(const VisualFeatures& v) {
  ModelFile f;
  f.kind = "visual";
  f.set("provenance", to_string(v.kind));
  f.matrices["w1"] = v.matrix;
  return f;
}

/// The CCA model also carries the visual features it was fit on, which the
/// prediction index needs for queries.
inline ModelFile to_model(const CcaModel& cca, const VisualFeatures& visual) {
  ModelFile f;
  f.kind = "cca";
  f.set("provenance", to_string(visual.kind));
  f.set("ridge1", cca.ridge1);
  f.set("ridge2", cca.ridge2);
  f.matrices["p1"] = cca.p1;
  f.matrices["p2"] = cca.p2;
  f.matrices["correlations"] = detail::as_column(cca.correlations);
  f.matrices["fbar"] = detail::as_column(cca.fbar);
  f.matrices["mean2"] = detail::as_column(cca.mean2);
  f.matrices["w1"] = visual.matrix;
  return f;
}

inline CcaModel cca_from_model(const ModelFile& m) {
  if (m.kind != "cca") throw FormatError("expected a cca model, found '" + m.kind + "'");
  CcaModel c;
  c.p1 = m.matrix("p1");
  c.p2 = m.matrix("p2");
  c.correlations = m.vector("correlations");
  c.fbar = m.vector("fbar");
  c.mean2 = m.vector("mean2");
  c.ridge1 = m.number("ridge1");
  c.ridge2 = m.number("ridge2");
  return c;
}

inline ModelFile to_model(const ZeroShotIndex& index) {
  ModelFile f;
  f.kind = "index";
  f.matrices["w1"] = index.w1;
  f.matrices["p1"] = index.p1;
  f.matrices["fbar"] = detail::as_column(index.fbar);
  f.matrices["seen_columns"] = index.seen.columns;
  f.matrices["seen_norms"] = detail::as_column(index.seen.norms);
  f.matrices["seen_classes"] = detail::index_column(index.seen.classes);
  f.matrices["unseen_columns"] = index.unseen.columns;
  f.matrices["unseen_norms"] = detail::as_column(index.unseen.norms);
  f.matrices["unseen_classes"] = detail::index_column(index.unseen.classes);
  f.matrices["excluded"] = detail::index_column(index.excluded);
  return f;
}

inline ZeroShotIndex index_from_model(const ModelFile& m) {
  if (m.kind != "index") throw FormatError("expected an index model, found '" + m.kind + "'");
  ZeroShotIndex index;
  index.w1 = m.matrix("w1");
  index.p1 = m.matrix("p1");
  index.fbar = m.vector("fbar");
  index.seen.columns = m.matrix("seen_columns");
  index.seen.norms = m.vector("seen_norms");
  index.seen.classes = detail::index_list(m.matrix("seen_classes"));
  index.unseen.columns = m.matrix("unseen_columns");
  index.unseen.norms = m.vector("unseen_norms");
  index.unseen.classes = detail::index_list(m.matrix("unseen_classes"));
  index.excluded = detail::index_list(m.matrix("excluded"));
  if (index.p1.rows() != index.w1.rows() || index.fbar.size() != index.w1.rows())
    throw FormatError("index model: inconsistent shapes");
  return index;
}

}  // namespace ulnn::io
