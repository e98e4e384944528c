// include/ulnn/io/text_formats.hpp
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

// Small line-oriented files: labels, class-order sidecars, metadata sidecars
// and evaluation results.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ulnn/types.hpp"
#include "ulnn/zeroshot.hpp"

namespace ulnn::io {

/// One non-negative integer class index per line.
inline std::vector<Index> read_labels(std::istream& in, const std::string& source) {
  std::vector<Index> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(line, &used);
      if (used != line.size() || v < 0) throw std::invalid_argument(line);
      out.push_back(static_cast<Index>(v));
    } catch (const std::exception&) {
      throw FormatError(source + " line " + std::to_string(lineno) + ": bad label '" + line + "'");
    }
  }
  return out;
}

inline std::vector<Index> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_labels(in, path);
}

inline void write_labels(const std::vector<Index>& labels, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  for (Index l : labels) out << l << '\n';
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

inline void write_lines(const std::vector<std::string>& lines, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  for (const auto& l : lines) out << l << '\n';
}

/// `key=value` sidecar written next to a matrix file (`<path>.meta`).
inline void write_metadata(const std::map<std::string, std::string>& meta, const std::string& matrix_path) {
  std::ofstream out(matrix_path + ".meta", std::ios::trunc);
  if (!out) throw DataError("cannot write " + matrix_path + ".meta");
  for (const auto& [k, v] : meta) out << k << '=' << v << '\n';
}

inline std::map<std::string, std::string> read_metadata(const std::string& matrix_path) {
  std::map<std::string, std::string> out;
  std::ifstream in(matrix_path + ".meta");
  if (!in) return out;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

/// CSV `pool,k,hits,total,accuracy`.
inline void write_results(std::ostream& out, const std::vector<HitResult>& results) {
  out << "pool,k,hits,total,accuracy\n";
  out.precision(17);
  for (const auto& r : results) out << to_string(r.pool) << ',' << r.k << ',' << r.hits << ',' << r.total << ',' << r.accuracy() << '\n';
}

inline void write_results(const std::vector<HitResult>& results, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  write_results(out, results);
}

/// Fixed-width text table of hit@k results.
inline std::string format_results_table(const std::vector<HitResult>& results) {
  std::ostringstream os;
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-8s %6s %10s %10s %10s\n", "pool", "k", "hits", "total", "hit@k");
  os << buf;
  for (const auto& r : results) {
    std::snprintf(buf, sizeof buf, "%-8s %6lld %10llu %10llu %9.2f%%\n", to_string(r.pool).c_str(),
                  static_cast<long long>(r.k), static_cast<unsigned long long>(r.hits),
                  static_cast<unsigned long long>(r.total), 100.0 * r.accuracy());
    os << buf;
  }
  return os.str();
}

}  // namespace ulnn::io
