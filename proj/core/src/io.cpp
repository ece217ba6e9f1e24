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

#include "mslab/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include "json.hpp"

namespace mslab {
namespace {

constexpr char kMagic[8] = {'M', 'S', 'G', 'R', 'I', 'D', '1', '\0'};

template <typename T>
void put(std::string& out, T v) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.append(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("grid file is truncated");
  unsigned char b[sizeof(T)];
  std::memcpy(b, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  pos += sizeof(T);
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace

void write_grid_file(const std::string& path, const GridFile& file) {
  const Grid& g = file.grid;
  require(!file.components.empty() && file.components.size() < 256, "grid file needs 1 to 255 components");
  for (const auto& c : file.components) require(c.size() == g.size(), "component size must match the grid");
  std::string out(kMagic, sizeof(kMagic));
  for (int d = 0; d < 3; ++d) put<std::uint64_t>(out, g.dims[d]);
  for (int d = 0; d < 3; ++d) put<double>(out, g.spacing[d]);
  for (int d = 0; d < 3; ++d) put<double>(out, g.origin[d]);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(file.components.size()));
  out.reserve(out.size() + g.size() * file.components.size() * 16);
  for (std::size_t n = 0; n < g.size(); ++n)
    for (const auto& c : file.components) {
      put<double>(out, c[n].real());
      put<double>(out, c[n].imag());
    }
  write_all(path, out);
}

GridFile read_grid_file(const std::string& path) {
  const std::string in = read_all(path);
  if (in.size() < sizeof(kMagic) || std::memcmp(in.data(), kMagic, sizeof(kMagic)) != 0)
    throw IoError(path + " is not an MSGRID1 file");
  std::size_t pos = sizeof(kMagic);
  GridFile f;
  for (int d = 0; d < 3; ++d) f.grid.dims[d] = take<std::uint64_t>(in, pos);
  for (int d = 0; d < 3; ++d) f.grid.spacing[d] = take<double>(in, pos);
  for (int d = 0; d < 3; ++d) f.grid.origin[d] = take<double>(in, pos);
  const std::size_t count = take<std::uint8_t>(in, pos);
  const std::size_t n = f.grid.size();
  if (in.size() - pos != n * count * 16) throw IoError(path + ": payload size does not match the header");
  f.components.assign(count, std::vector<cplx>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < count; ++c) {
      const double re = take<double>(in, pos);
      const double im = take<double>(in, pos);
      f.components[c][i] = {re, im};
    }
  return f;
}

GridFile to_grid_file(const ScalarField& f) { return {f.grid, {f.values}}; }
GridFile to_grid_file(const VectorField& f) { return {f.grid, {f.comp[0], f.comp[1], f.comp[2]}}; }
GridFile to_grid_file(const TwoForm& f) { return {f.grid, {f.comp[0], f.comp[1], f.comp[2]}}; }

void write_cauchy_map(const std::string& path, const CauchyDataMap& map) {
  using nlohmann::json;
  json j;
  j["format"] = "mslab-cauchy-map";
  j["version"] = 1;
  j["basis"] = {{"max_degree", map.basis.max_degree},
                {"center", {map.basis.center[0], map.basis.center[1], map.basis.center[2]}},
                {"radius", map.basis.radius}};
  j["shift"] = map.shift;
  j["condition_estimate"] = map.condition_estimate;
  j["residuals"] = map.residuals;
  const auto rows = map.matrix.rows(), cols = map.matrix.cols();
  std::vector<double> re, im;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      re.push_back(map.matrix(r, c).real());
      im.push_back(map.matrix(r, c).imag());
    }
  j["matrix"] = {{"rows", rows}, {"cols", cols}, {"re", re}, {"im", im}};
  write_all(path, j.dump(1) + "\n");
}

CauchyDataMap read_cauchy_map(const std::string& path) {
  using nlohmann::json;
  CauchyDataMap m;
  try {
    const json j = json::parse(read_all(path));
    if (j.at("format") != "mslab-cauchy-map") throw IoError(path + " is not a Cauchy map file");
    const json& b = j.at("basis");
    m.basis.max_degree = b.at("max_degree").get<int>();
    const auto c = b.at("center").get<std::vector<double>>();
    if (c.size() != 3) throw IoError(path + ": basis center must have 3 entries");
    m.basis.center = {c[0], c[1], c[2]};
    m.basis.radius = b.at("radius").get<double>();
    m.shift = j.at("shift").get<double>();
    m.condition_estimate = j.at("condition_estimate").get<double>();
    m.residuals = j.at("residuals").get<std::vector<double>>();
    const json& mat = j.at("matrix");
    const auto rows = mat.at("rows").get<Eigen::Index>(), cols = mat.at("cols").get<Eigen::Index>();
    const auto re = mat.at("re").get<std::vector<double>>(), im = mat.at("im").get<std::vector<double>>();
    if (rows < 0 || cols < 0 || re.size() != static_cast<std::size_t>(rows * cols) || im.size() != re.size())
      throw IoError(path + ": matrix size does not match its entries");
    m.matrix.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index k = 0; k < cols; ++k) {
        const auto i = static_cast<std::size_t>(r * cols + k);
        m.matrix(r, k) = {re[i], im[i]};
      }
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return m;
}

double diff_cauchy_maps(const std::string& path_a, const std::string& path_b) {
  return relative_frobenius(read_cauchy_map(path_a), read_cauchy_map(path_b));
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  require(!header_.empty(), "CSV header must be non-empty");
}

void CsvTable::add_row(std::vector<std::string> row) {
  require(row.size() == header_.size(), "CSV row width must match the header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << field(r[i]);
    out << "\r\n";
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out.str();
}

void CsvTable::write(const std::string& path) const { write_all(path, str()); }

std::string sha256_file(const std::string& path) {
  const std::string data = read_all(path);
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 failed for " + path);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

}  // namespace mslab
