// include/ulnn/io/matrix_file.hpp
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

// Matrix files. Binary layout: 8-byte magic "ULNNMAT1", uint32 LE rows,
// uint32 LE cols, then rows*cols float64 LE values in row-major order.
// Text CSV with an optional header row is accepted on read.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ulnn/types.hpp"

namespace ulnn::io {

inline constexpr char kMatrixMagic[8] = {'U', 'L', 'N', 'N', 'M', 'A', 'T', '1'};

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xffu);
  out.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_f64(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xffu);
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint32_t get_u32(const unsigned char* b) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

inline double get_f64(const unsigned char* b) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return std::bit_cast<double>(v);
}

inline std::uint32_t checked_dim(Index v, const char* what) {
  if (v < 0 || static_cast<std::uint64_t>(v) > std::numeric_limits<std::uint32_t>::max())
    throw FormatError(std::string("matrix ") + what + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(v);
}

}  // namespace detail

/// Writes the dimensions and payload (no magic) of a matrix.
inline void write_matrix_body(std::ostream& out, const Matrix& m) {
  detail::put_u32(out, detail::checked_dim(m.rows(), "row count"));
  detail::put_u32(out, detail::checked_dim(m.cols(), "column count"));
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) detail::put_f64(out, m(r, c));
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
  out.write(kMatrixMagic, sizeof kMatrixMagic);
  write_matrix_body(out, m);
}

/// Reads dimensions and payload following the magic.
inline Matrix read_matrix_body(std::istream& in, const std::string& source) {
  unsigned char dims[8];
  in.read(reinterpret_cast<char*>(dims), 8);
  if (in.gcount() != 8) throw FormatError(source + ": truncated matrix header");
  const std::uint64_t rows = detail::get_u32(dims);
  const std::uint64_t cols = detail::get_u32(dims + 4);
  const std::uint64_t count = rows * cols;
  if (count > static_cast<std::uint64_t>(std::numeric_limits<std::streamsize>::max() / 8) ||
      count > static_cast<std::uint64_t>(std::numeric_limits<Index>::max()))
    throw FormatError(source + ": matrix dimensions overflow");
  const std::uint64_t expected = count * 8;
  // Grow in bounded chunks so a corrupt header cannot force a huge allocation.
  std::vector<unsigned char> payload;
  std::uint64_t got = 0;
  constexpr std::uint64_t kChunk = std::uint64_t{1} << 24;
  while (got < expected) {
    const std::uint64_t want = std::min(kChunk, expected - got);
    payload.resize(static_cast<std::size_t>(got + want));
    in.read(reinterpret_cast<char*>(payload.data() + got), static_cast<std::streamsize>(want));
    const auto n = static_cast<std::uint64_t>(in.gcount());
    got += n;
    if (n < want) break;
  }
  if (got != expected)
    throw FormatError(source + ": truncated payload, expected " + std::to_string(expected) + " bytes of values for " +
                      std::to_string(rows) + "x" + std::to_string(cols) + ", got " + std::to_string(got));
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  std::size_t k = 0;
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c, k += 8) m(r, c) = detail::get_f64(payload.data() + k);
  if (!m.allFinite()) throw NonFiniteError(source + ": matrix contains non-finite values");
  return m;
}

namespace detail {

inline bool parse_number(const std::string& field, double& value) {
  std::size_t b = field.find_first_not_of(" \t");
  std::size_t e = field.find_last_not_of(" \t\r");
  if (b == std::string::npos) return false;
  const std::string s = field.substr(b, e - b + 1);
  try {
    std::size_t used = 0;
    value = std::stod(s, &used);
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

inline std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

/// Parses comma-separated rows. A first line whose fields are not all
/// numbers is taken as a header and skipped.
inline Matrix read_csv_matrix(std::istream& in, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto fields = detail::split_commas(line);
    std::vector<double> values(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i) numeric = numeric && detail::parse_number(fields[i], values[i]);
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw FormatError(source + " line " + std::to_string(lineno) + ": non-numeric field");
    }
    first = false;
    if (!rows.empty() && values.size() != rows.front().size())
      throw FormatError(source + " line " + std::to_string(lineno) + ": expected " + std::to_string(rows.front().size()) +
                        " fields, got " + std::to_string(values.size()));
    rows.push_back(std::move(values));
  }
  const Index r = static_cast<Index>(rows.size());
  const Index c = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  if (!m.allFinite()) throw NonFiniteError(source + ": matrix contains non-finite values");
  return m;
}

/// Reads a binary matrix when the magic is present, CSV otherwise.
inline Matrix read_matrix(std::istream& in, const std::string& source = "matrix") {
  char magic[8] = {};
  in.read(magic, 8);
  const auto got = in.gcount();
  if (got == 8 && std::memcmp(magic, kMatrixMagic, 8) == 0) return read_matrix_body(in, source);
  if (got >= 4 && std::memcmp(magic, "ULNN", 4) == 0) throw FormatError(source + ": magic mismatch (not a ULNNMAT1 matrix)");
  for (std::streamsize i = 0; i < got; ++i) {
    const auto ch = static_cast<unsigned char>(magic[i]);
    if (ch < 0x09 || (ch > 0x0d && ch < 0x20) || ch == 0x7f) throw FormatError(source + ": magic mismatch (not a ULNNMAT1 matrix)");
  }
  std::string text(magic, static_cast<std::size_t>(got));
  text.append(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  std::istringstream csv(text);
  return read_csv_matrix(csv, source);
}

inline Matrix read_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return read_matrix(in, path);
}

inline void write_matrix(const Matrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  write_matrix(out, m);
  if (!out) throw DataError("write failed for " + path);
}

inline void write_csv_matrix(std::ostream& out, const Matrix& m) {
  out.precision(17);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m(r, c);
    out << '\n';
  }
}

}  // namespace ulnn::io
