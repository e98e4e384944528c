// include/ulnn/io/model_file.hpp
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

// Model container: magic "ULNNMDL1", a kind string, sorted string
// attributes and sorted named matrices (each stored like a matrix file body).
//
//   magic[8] | u32 len, kind | u32 count, (u32 len, key, u32 len, value)*
//            | u32 count, (u32 len, name, u32 rows, u32 cols, f64 LE row-major)*

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "ulnn/io/matrix_file.hpp"
#include "ulnn/types.hpp"

namespace ulnn::io {

inline constexpr char kModelMagic[8] = {'U', 'L', 'N', 'N', 'M', 'D', 'L', '1'};

struct ModelFile {
  std::string kind;
  std::map<std::string, std::string> attributes;
  std::map<std::string, Matrix> matrices;

  const Matrix& matrix(const std::string& name) const {
    auto it = matrices.find(name);
    if (it == matrices.end()) throw FormatError(kind + " model: missing matrix '" + name + "'");
    return it->second;
  }

  const std::string& attribute(const std::string& key) const {
    auto it = attributes.find(key);
    if (it == attributes.end()) throw FormatError(kind + " model: missing attribute '" + key + "'");
    return it->second;
  }

  double number(const std::string& key) const {
    const std::string& v = attribute(key);
    try {
      std::size_t used = 0;
      const double x = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw FormatError(kind + " model: attribute '" + key + "' is not a number: " + v);
    }
  }

  long long integer(const std::string& key) const {
    const std::string& v = attribute(key);
    try {
      std::size_t used = 0;
      const long long x = std::stoll(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw FormatError(kind + " model: attribute '" + key + "' is not an integer: " + v);
    }
  }

  void set(const std::string& key, const std::string& value) { attributes[key] = value; }
  void set(const std::string& key, double value) {
    std::ostringstream os;
    os.precision(17);
    os << value;
    attributes[key] = os.str();
  }
  void set(const std::string& key, long long value) { attributes[key] = std::to_string(value); }

  /// Vectors are stored as single-column matrices.
  Vector vector(const std::string& name) const {
    const Matrix& m = matrix(name);
    if (m.cols() != 1 && m.rows() != 0) throw FormatError(kind + " model: '" + name + "' is not a column vector");
    return m.col(0);
  }
};

namespace detail {

inline void put_string(std::ostream& out, const std::string& s) {
  put_u32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::uint32_t read_u32(std::istream& in, const std::string& source) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (in.gcount() != 4) throw FormatError(source + ": truncated model file");
  return get_u32(b);
}

inline std::string read_string(std::istream& in, const std::string& source) {
  const std::uint32_t n = read_u32(in, source);
  if (n > (1u << 24)) throw FormatError(source + ": implausible string length in model file");
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (static_cast<std::uint32_t>(in.gcount()) != n) throw FormatError(source + ": truncated model file");
  return s;
}

}  // namespace detail

inline void write_model(std::ostream& out, const ModelFile& model) {
  out.write(kModelMagic, sizeof kModelMagic);
  detail::put_string(out, model.kind);
  detail::put_u32(out, static_cast<std::uint32_t>(model.attributes.size()));
  for (const auto& [k, v] : model.attributes) {
    detail::put_string(out, k);
    detail::put_string(out, v);
  }
  detail::put_u32(out, static_cast<std::uint32_t>(model.matrices.size()));
  for (const auto& [k, m] : model.matrices) {
    detail::put_string(out, k);
    write_matrix_body(out, m);
  }
}

inline ModelFile read_model(std::istream& in, const std::string& source = "model") {
  char magic[8] = {};
  in.read(magic, 8);
  if (in.gcount() != 8 || std::memcmp(magic, kModelMagic, 8) != 0)
    throw FormatError(source + ": magic mismatch (not a ULNNMDL1 model file)");
  ModelFile model;
  model.kind = detail::read_string(in, source);
  const std::uint32_t attrs = detail::read_u32(in, source);
  for (std::uint32_t i = 0; i < attrs; ++i) {
    std::string k = detail::read_string(in, source);
    model.attributes[k] = detail::read_string(in, source);
  }
  const std::uint32_t mats = detail::read_u32(in, source);
  for (std::uint32_t i = 0; i < mats; ++i) {
    std::string k = detail::read_string(in, source);
    model.matrices[k] = read_matrix_body(in, source + ":" + k);
  }
  return model;
}

inline void write_model(const ModelFile& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  write_model(out, model);
  if (!out) throw DataError("write failed for " + path);
}

inline ModelFile read_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return read_model(in, path);
}

inline ModelFile expect_kind(ModelFile model, const std::string& kind, const std::string& source) {
  if (model.kind != kind) throw FormatError(source + ": expected a " + kind + " model, found '" + model.kind + "'");
  return model;
}

}  // namespace ulnn::io
