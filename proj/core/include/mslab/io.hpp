// Copyright (C) 2026 The mslab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

#include "mslab/fields.hpp"
#include "mslab/forward.hpp"

namespace mslab {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary grid file: "MSGRID1\0", then little-endian u64 dims[3], f64
/// spacing[3], f64 origin[3], u8 component count, and (re, im) f64 pairs per
/// component interleaved node by node, x fastest.
struct GridFile {
  Grid grid;
  std::vector<std::vector<cplx>> components;
};

void write_grid_file(const std::string& path, const GridFile& file);
GridFile read_grid_file(const std::string& path);
GridFile to_grid_file(const ScalarField& f);
GridFile to_grid_file(const VectorField& f);
GridFile to_grid_file(const TwoForm& f);

/// JSON with the basis, shift, residuals and the matrix as row-major re/im arrays.
void write_cauchy_map(const std::string& path, const CauchyDataMap& map);
CauchyDataMap read_cauchy_map(const std::string& path);
/// relative_frobenius of two map files; throws InvalidArgument on basis mismatch.
double diff_cauchy_maps(const std::string& path_a, const std::string& path_b);

/// %.17g.
std::string format_real(double v);

/// RFC 4180 CSV: header first, CRLF line ends, fields quoted when needed.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> row);
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace mslab
