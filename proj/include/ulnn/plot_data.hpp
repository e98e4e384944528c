// include/ulnn/plot_data.hpp
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

// CSV tables for external plotting: class embeddings over two components,
// per-class component bars, and per-class kurtosis values.

#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ulnn/distributions.hpp"
#include "ulnn/types.hpp"

namespace ulnn {

enum class PlotKind { embedding_scatter, component_bars, kurtosis_hist };

inline std::string to_string(PlotKind k) {
  switch (k) {
    case PlotKind::embedding_scatter:
      return "embedding-scatter";
    case PlotKind::component_bars:
      return "component-bars";
    case PlotKind::kurtosis_hist:
      return "kurtosis-hist";
  }
  return "?";
}

inline PlotKind parse_plot_kind(const std::string& s) {
  if (s == "embedding-scatter") return PlotKind::embedding_scatter;
  if (s == "component-bars") return PlotKind::component_bars;
  if (s == "kurtosis-hist") return PlotKind::kurtosis_hist;
  throw UsageError("unknown plot data kind '" + s + "' (embedding-scatter, component-bars, kurtosis-hist)");
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

inline std::string class_label(const std::vector<std::string>& labels, Index c) {
  return c < static_cast<Index>(labels.size()) ? labels[static_cast<std::size_t>(c)] : std::to_string(c);
}

}  // namespace detail

/// One row per class: `class_id,label,comp_<a>,comp_<b>`. `features` holds
/// one column per class.
inline void write_embedding_scatter(std::ostream& out, const Matrix& features, const std::vector<std::string>& labels,
                                    Index comp_a, Index comp_b) {
  for (Index c : {comp_a, comp_b})
    if (c < 0 || c >= features.rows())
      throw UsageError("component " + std::to_string(c) + " out of range [0, " + std::to_string(features.rows()) + ")");
  out.precision(17);
  out << "class_id,label,comp_" << comp_a << ",comp_" << comp_b << '\n';
  for (Index j = 0; j < features.cols(); ++j)
    out << j << ',' << detail::csv_field(detail::class_label(labels, j)) << ',' << features(comp_a, j) << ','
        << features(comp_b, j) << '\n';
}

/// One row per requested class with its first `dims` component values.
inline void write_component_bars(std::ostream& out, const Matrix& features, const std::vector<std::string>& labels,
                                 const std::vector<Index>& classes, Index dims) {
  if (dims < 1 || dims > features.rows())
    throw UsageError("component-bars needs 1 <= dims <= " + std::to_string(features.rows()));
  out.precision(17);
  out << "class_id,label";
  for (Index i = 0; i < dims; ++i) out << ",comp_" << i;
  out << '\n';
  for (Index c : classes) {
    if (c < 0 || c >= features.cols()) throw UsageError("class " + std::to_string(c) + " out of range");
    out << c << ',' << detail::csv_field(detail::class_label(labels, c));
    for (Index i = 0; i < dims; ++i) out << ',' << features(i, c);
    out << '\n';
  }
}

/// One row per class; classes with zero variance get `undefined`.
inline void write_kurtosis_hist(std::ostream& out, const KurtosisReport& report, const std::vector<std::string>& labels) {
  out.precision(17);
  out << "class_id,label,kurtosis\n";
  for (std::size_t j = 0; j < report.kurtosis.size(); ++j) {
    out << j << ',' << detail::csv_field(detail::class_label(labels, static_cast<Index>(j))) << ',';
    if (report.kurtosis[j])
      out << *report.kurtosis[j];
    else
      out << "undefined";
    out << '\n';
  }
}

}  // namespace ulnn
