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

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>

#include "doctest.h"
#include "mslab/forward.hpp"
#include "mslab/io.hpp"

using namespace mslab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mslab_io_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string bytes_of(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void put_bytes(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

}  // namespace

TEST_CASE("grid file round trip is bit exact") {
  const Grid g{{5, 4, 3}, {0.1, 0.2 / 3.0, 1e-3}, {0.1, -0.2, 0.3}};
  GridFile f{g, {std::vector<cplx>(g.size()), std::vector<cplx>(g.size())}};
  for (std::size_t n = 0; n < g.size(); ++n) {
    f.components[0][n] = {std::sin(1.0 + n) / 3.0, std::exp(-0.1 * n)};
    f.components[1][n] = {-0.0, std::numeric_limits<double>::denorm_min() * n};
  }
  f.components[1][0] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::quiet_NaN()};
  const fs::path p = scratch("a.msgrid");
  write_grid_file(p.string(), f);
  const GridFile back = read_grid_file(p.string());
  CHECK(back.grid == g);
  REQUIRE(back.components.size() == 2);
  for (int c = 0; c < 2; ++c)
    CHECK(std::memcmp(back.components[c].data(), f.components[c].data(), g.size() * sizeof(cplx)) == 0);

  write_grid_file(scratch("b.msgrid").string(), back);
  CHECK(bytes_of(p) == bytes_of(scratch("b.msgrid")));
}

TEST_CASE("grid file layout") {
  const Grid g{{2, 2, 2}, {1.0, 1.0, 1.0}, {-0.5, -0.5, -0.5}};
  GridFile f{g, {std::vector<cplx>(g.size(), cplx(1.5, -2.0))}};
  const fs::path p = scratch("layout.msgrid");
  write_grid_file(p.string(), f);
  const std::string b = bytes_of(p);
  CHECK(b.size() == 8 + 24 + 24 + 24 + 1 + 8 * 16);
  CHECK(std::memcmp(b.data(), "MSGRID1\0", 8) == 0);
  // 2 as a little-endian u64, then 1.0 (the spacing) as a little-endian f64.
  CHECK(b.substr(8, 8) == std::string("\x02\0\0\0\0\0\0\0", 8));
  CHECK(b.substr(32, 8) == std::string("\0\0\0\0\0\0\xf0\x3f", 8));
  CHECK(static_cast<unsigned char>(b[80]) == 1);
  // 1.5 = 0x3FF8000000000000, -2.0 = 0xC000000000000000.
  CHECK(b.substr(81, 8) == std::string("\0\0\0\0\0\0\xf8\x3f", 8));
  CHECK(b.substr(89, 8) == std::string("\0\0\0\0\0\0\0\xc0", 8));
}

TEST_CASE("grid file errors") {
  const fs::path p = scratch("bad.msgrid");
  put_bytes(p, "NOTAGRID and more bytes");
  CHECK_THROWS_AS(read_grid_file(p.string()), IoError);
  const Grid g{{3, 3, 3}, {0.5, 0.5, 0.5}, {}};
  write_grid_file(p.string(), {g, {std::vector<cplx>(g.size())}});
  std::string b = bytes_of(p);
  put_bytes(p, b.substr(0, b.size() - 5));
  CHECK_THROWS_AS(read_grid_file(p.string()), IoError);
  CHECK_THROWS_AS(read_grid_file(scratch("missing.msgrid").string()), IoError);
  CHECK_THROWS_AS(write_grid_file(p.string(), {g, {std::vector<cplx>(3)}}), InvalidArgument);
  CHECK_THROWS_AS(write_grid_file(p.string(), {g, {}}), InvalidArgument);
}

TEST_CASE("Cauchy map files") {
  const Domain d = build_ball_domain(1.0, 16);
  PotentialModel m;
  m.scalar_terms.push_back({Family::GaussianBump, {1.0, 0.3}, {0.1, 0.0, 0.0}, 0.3, {1, 0, 0}});
  const CauchyDataMap a = cauchy_data_map(sample_potentials(m, d.grid()), d, 2);
  const CauchyDataMap b = cauchy_data_map(zero_potentials(d.grid()), d, 2);
  const CauchyDataMap c = cauchy_data_map(zero_potentials(d.grid()), d, 1);
  const std::string pa = scratch("a.json").string(), pb = scratch("b.json").string(), pc = scratch("c.json").string();
  write_cauchy_map(pa, a);
  write_cauchy_map(pb, b);
  write_cauchy_map(pc, c);
  const CauchyDataMap back = read_cauchy_map(pa);
  CHECK(back.basis == a.basis);
  CHECK(back.matrix == a.matrix);
  CHECK(back.residuals == a.residuals);
  CHECK(back.condition_estimate == a.condition_estimate);
  CHECK(diff_cauchy_maps(pa, pa) == 0.0);
  CHECK(diff_cauchy_maps(pa, pb) == relative_frobenius(a, b));
  CHECK_THROWS_AS(diff_cauchy_maps(pa, pc), InvalidArgument);
  put_bytes(scratch("junk.json"), "{\"format\": \"mslab-cauchy-map\"}");
  CHECK_THROWS_AS(read_cauchy_map(scratch("junk.json").string()), IoError);
}

TEST_CASE("CSV tables") {
  CsvTable t({"name", "value"});
  t.add_row({"plain", "1"});
  t.add_row({"with,comma", "say \"hi\""});
  t.add_row({"multi\nline", ""});
  CHECK(t.str() == "name,value\r\nplain,1\r\n\"with,comma\",\"say \"\"hi\"\"\"\r\n\"multi\nline\",\r\n");
  CHECK_THROWS_AS(t.add_row({"short"}), InvalidArgument);
  CHECK_THROWS_AS(CsvTable({}), InvalidArgument);
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(1.0) == "1");
  CHECK(format_real(-2.5e-300) == "-2.5e-300");
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -1e-310}) CHECK(std::strtod(format_real(v).c_str(), nullptr) == v);
}

TEST_CASE("SHA-256 of files") {
  const fs::path p = scratch("abc.txt");
  put_bytes(p, "abc");
  CHECK(sha256_file(p.string()) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  put_bytes(p, "");
  CHECK(sha256_file(p.string()) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
