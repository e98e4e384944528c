// include/ulnn/io/config.hpp
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

// Flat `key = value` run configuration. Unknown keys are rejected; command
// line flags are applied after the file and win.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ulnn/bridge.hpp"
#include "ulnn/distributions.hpp"
#include "ulnn/ica.hpp"
#include "ulnn/types.hpp"
#include "ulnn/zeroshot.hpp"

namespace ulnn::io {

struct RunConfig {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t chunk_rows = 4096;

  std::string fit_transform = "normalized-logits";
  double fit_temperature = 1.0;
  std::string query_transform = "softmax";
  double query_temperature = 1.0;

  Index whiten_dim = 16;
  VisualKind visual = VisualKind::pca;
  IcaConfig ica;
  bool class_means_from_data = false;  // false: M = I

  Index mds_max_dim = 0;  // 0: every positive dimension
  Index cca_dims = 0;  // 0: use whiten_dim
  double cca_ridge = 1e-6;

  std::vector<Pool> pools = {Pool::seen, Pool::unseen, Pool::both};
  std::vector<Index> topk = {1, 2, 5, 10};

  std::string train_outputs;
  std::string train_labels;
  std::string taxonomy;
  std::string registry;
  std::string test_seen_outputs;
  std::string test_seen_labels;
  std::string test_unseen_outputs;
  std::string test_unseen_labels;
  std::string out_dir;
  // Relative paths resolve against this directory (the config file's).
  std::string base_dir;

  std::string resolve(const std::string& path) const {
    if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
    return (std::filesystem::path(base_dir) / path).string();
  }

  OutputTransform fit() const { return OutputTransform::parse(fit_transform, fit_temperature); }
  OutputTransform query() const { return OutputTransform::parse(query_transform, query_temperature); }
  Index effective_cca_dims() const { return cca_dims > 0 ? cca_dims : whiten_dim; }

  /// Sets one key; throws UsageError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);

  void validate() const {
    if (threads < 1) throw UsageError("threads must be at least 1");
    if (chunk_rows < 1) throw UsageError("chunk_rows must be positive");
    fit();
    query();
    if (fit().kind == TransformKind::temperature_rescale || query().kind == TransformKind::temperature_rescale)
      throw UsageError("pipeline transforms must be softmax or normalized-logits");
    if (whiten_dim < 1) throw UsageError("whiten_dim must be at least 1");
    ica.validate();
    if (mds_max_dim < 0) throw UsageError("mds_max_dim must be non-negative");
    if (cca_dims < 0) throw UsageError("cca_dims must be non-negative");
    if (cca_ridge < 0) throw UsageError("cca_ridge must be non-negative");
    if (topk.empty()) throw UsageError("topk list is empty");
    for (Index k : topk)
      if (k < 1) throw UsageError("topk entries must be at least 1");
    if (pools.empty()) throw UsageError("pools list is empty");
  }

  std::string to_text() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

inline double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

inline void RunConfig::set(const std::string& key, const std::string& raw) {
  using namespace detail;
  const std::string v = trim(raw);
  const std::map<std::string, std::function<void()>> setters = {
      {"seed", [&] { seed = static_cast<std::uint64_t>(to_int(key, v)); }},
      {"threads", [&] { threads = static_cast<unsigned>(std::max<long long>(0, to_int(key, v))); }},
      {"chunk_rows", [&] { chunk_rows = static_cast<std::size_t>(std::max<long long>(0, to_int(key, v))); }},
      {"fit_transform", [&] { fit_transform = v; }},
      {"fit_temperature", [&] { fit_temperature = to_real(key, v); }},
      {"query_transform", [&] { query_transform = v; }},
      {"query_temperature", [&] { query_temperature = to_real(key, v); }},
      {"whiten_dim", [&] { whiten_dim = static_cast<Index>(to_int(key, v)); }},
      {"visual", [&] { visual = parse_visual_kind(v); }},
      {"class_means", [&] {
         if (v == "identity")
           class_means_from_data = false;
         else if (v == "data")
           class_means_from_data = true;
         else
           throw UsageError("config key 'class_means': expected identity or data");
       }},
      {"ica.batch_size", [&] { ica.batch_size = static_cast<Index>(to_int(key, v)); }},
      {"ica.lr0", [&] { ica.lr0 = to_real(key, v); }},
      {"ica.halving_period", [&] { ica.halving_period = static_cast<int>(to_int(key, v)); }},
      {"ica.epochs", [&] { ica.epochs = static_cast<int>(to_int(key, v)); }},
      {"ica.reorthogonalize_every", [&] { ica.reorthogonalize_every = static_cast<int>(to_int(key, v)); }},
      {"ica.correction", [&] { ica.correction = parse_correction_form(v); }},
      {"ica.monitor_samples", [&] { ica.monitor_samples = static_cast<Index>(to_int(key, v)); }},
      {"mds_max_dim", [&] { mds_max_dim = static_cast<Index>(to_int(key, v)); }},
      {"cca_dims", [&] { cca_dims = static_cast<Index>(to_int(key, v)); }},
      {"cca_ridge", [&] { cca_ridge = to_real(key, v); }},
      {"pools", [&] {
         pools.clear();
         for (const auto& p : split_list(v)) pools.push_back(parse_pool(p));
       }},
      {"topk", [&] {
         topk.clear();
         for (const auto& k : split_list(v)) topk.push_back(static_cast<Index>(to_int(key, k)));
       }},
      {"train_outputs", [&] { train_outputs = v; }},
      {"train_labels", [&] { train_labels = v; }},
      {"taxonomy", [&] { taxonomy = v; }},
      {"registry", [&] { registry = v; }},
      {"test_seen_outputs", [&] { test_seen_outputs = v; }},
      {"test_seen_labels", [&] { test_seen_labels = v; }},
      {"test_unseen_outputs", [&] { test_unseen_outputs = v; }},
      {"test_unseen_labels", [&] { test_unseen_labels = v; }},
      {"out_dir", [&] { out_dir = v; }},
  };
  auto it = setters.find(key);
  if (it == setters.end()) throw UsageError("unknown config key '" + key + "'");
  it->second();
}

inline std::string RunConfig::to_text() const {
  std::ostringstream os;
  os.precision(17);
  auto list = [](const auto& items, auto fmt) {
    std::string s;
    for (const auto& x : items) s += (s.empty() ? "" : ",") + fmt(x);
    return s;
  };
  os << "seed = " << seed << '\n'
     << "threads = " << threads << '\n'
     << "chunk_rows = " << chunk_rows << '\n'
     << "fit_transform = " << fit_transform << '\n'
     << "fit_temperature = " << fit_temperature << '\n'
     << "query_transform = " << query_transform << '\n'
     << "query_temperature = " << query_temperature << '\n'
     << "whiten_dim = " << whiten_dim << '\n'
     << "visual = " << (visual == VisualKind::random ? std::string("random") : to_string(visual)) << '\n'
     << "class_means = " << (class_means_from_data ? "data" : "identity") << '\n'
     << "ica.batch_size = " << ica.batch_size << '\n'
     << "ica.lr0 = " << ica.lr0 << '\n'
     << "ica.halving_period = " << ica.halving_period << '\n'
     << "ica.epochs = " << ica.epochs << '\n'
     << "ica.reorthogonalize_every = " << ica.reorthogonalize_every << '\n'
     << "ica.correction = " << to_string(ica.correction) << '\n'
     << "ica.monitor_samples = " << ica.monitor_samples << '\n'
     << "mds_max_dim = " << mds_max_dim << '\n'
     << "cca_dims = " << cca_dims << '\n'
     << "cca_ridge = " << cca_ridge << '\n'
     << "pools = " << list(pools, [](Pool p) { return to_string(p); }) << '\n'
     << "topk = " << list(topk, [](Index k) { return std::to_string(k); }) << '\n';
  const std::pair<const char*, const std::string*> paths[] = {
      {"train_outputs", &train_outputs},       {"train_labels", &train_labels},
      {"taxonomy", &taxonomy},                 {"registry", &registry},
      {"test_seen_outputs", &test_seen_outputs}, {"test_seen_labels", &test_seen_labels},
      {"test_unseen_outputs", &test_unseen_outputs}, {"test_unseen_labels", &test_unseen_labels},
      {"out_dir", &out_dir}};
  for (const auto& [k, v] : paths)
    if (!v->empty()) os << k << " = " << *v << '\n';
  return os.str();
}

/// Parses `key = value` lines; '#' starts a comment line.
inline RunConfig parse_config(std::istream& in, const std::string& source, RunConfig base = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(source + " line " + std::to_string(lineno) + ": expected key = value");
    try {
      base.set(detail::trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const UsageError& e) {
      throw UsageError(source + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  RunConfig cfg = parse_config(in, path, std::move(base));
  cfg.base_dir = std::filesystem::path(path).parent_path().string();
  return cfg;
}

}  // namespace ulnn::io
