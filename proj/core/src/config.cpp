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

#include "mslab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "mslab/cgo.hpp"

namespace mslab {

PipelineKind parse_pipeline(const std::string& name) {
  if (name == "forward") return PipelineKind::Forward;
  if (name == "cgo-diagnostics" || name == "cgo") return PipelineKind::CgoDiagnostics;
  if (name == "recover-curl") return PipelineKind::RecoverCurl;
  if (name == "recover-q") return PipelineKind::RecoverQ;
  if (name == "boundary") return PipelineKind::Boundary;
  if (name == "verify") return PipelineKind::Verify;
  throw InvalidArgument("unknown pipeline '" + name + "'");
}

std::string pipeline_name(PipelineKind kind) {
  switch (kind) {
    case PipelineKind::Forward: return "forward";
    case PipelineKind::CgoDiagnostics: return "cgo-diagnostics";
    case PipelineKind::RecoverCurl: return "recover-curl";
    case PipelineKind::RecoverQ: return "recover-q";
    case PipelineKind::Boundary: return "boundary";
    case PipelineKind::Verify: return "verify";
  }
  return "verify";
}

namespace {

std::string locate(const std::string& field, int line, int column) {
  std::string where = field.empty() ? "config" : "field '" + field + "'";
  if (line > 0) where += " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
  return where;
}

void fail(const std::string& field, const std::string& message) { throw ConfigError(field, message); }

void check_range(const std::string& field, double v, double lo, double hi, bool open_lo = false) {
  const bool ok = std::isfinite(v) && (open_lo ? v > lo : v >= lo) && v <= hi;
  if (!ok) {
    std::ostringstream m;
    m << "must be in " << (open_lo ? "(" : "[") << lo << ", " << hi << "], got " << v;
    fail(field, m.str());
  }
}

void check_terms(const std::string& field, const std::vector<TermSpec>& terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const TermSpec& t = terms[i];
    const std::string f = field + "[" + std::to_string(i) + "]";
    for (int d = 0; d < 3; ++d) {
      check_range(f + ".center", t.center[d], -10.0, 10.0);
      if (!std::isfinite(t.direction[d].real()) || !std::isfinite(t.direction[d].imag()))
        fail(f + ".direction", "entries must be finite");
    }
    if (!std::isfinite(t.amplitude.real()) || !std::isfinite(t.amplitude.imag())) fail(f + ".amplitude", "must be finite");
    check_range(f + ".width", t.width, 0.0, 10.0, true);
  }
}

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message, int line, int column)
    : InvalidArgument(locate(field, line, column) + ": " + message),
      field_(std::move(field)),
      line_(line),
      column_(column) {}

void validate(const ScenarioConfig& c) {
  if (c.name.empty()) fail("name", "must be non-empty");
  check_range("domain.radius", c.radius, 0.1, 10.0);
  if (c.grid < 16 || c.grid > 128) fail("domain.grid", "must be in [16, 128], got " + std::to_string(c.grid));
  check_terms("potentials.side1.A", c.side1.vector_terms);
  check_terms("potentials.side1.q", c.side1.scalar_terms);
  check_terms("potentials.side2.A", c.side2.vector_terms);
  check_terms("potentials.side2.q", c.side2.scalar_terms);

  if (c.h_sweep.empty()) fail("knobs.h_sweep", "must be non-empty");
  for (std::size_t i = 0; i < c.h_sweep.size(); ++i) {
    check_range("knobs.h_sweep", c.h_sweep[i], 0.0, 1.0, true);
    if (i > 0 && !(c.h_sweep[i] < c.h_sweep[i - 1])) fail("knobs.h_sweep", "must be strictly decreasing");
  }
  check_range("knobs.sigma", c.sigma, 0.0, 1.0, true);
  check_range("knobs.epsilon", c.epsilon, 0.0, 1.0, true);
  check_range("knobs.xi_max", c.xi_max, 0.0, 20.0, true);
  if (c.m_sweep.empty()) fail("knobs.M_sweep", "must be non-empty");
  for (std::size_t i = 0; i < c.m_sweep.size(); ++i) {
    check_range("knobs.M_sweep", c.m_sweep[i], 1.0, 256.0);
    if (i > 0 && !(c.m_sweep[i] > c.m_sweep[i - 1])) fail("knobs.M_sweep", "must be strictly increasing");
  }
  if (c.max_degree < 0 || c.max_degree > 12) fail("knobs.max_degree", "must be in [0, 12]");
  try {
    parse_scheme(c.scheme);
  } catch (const InvalidArgument& e) {
    fail("knobs.scheme", e.what());
  }
  const double xn = norm(c.xi);
  if (!std::isfinite(xn) || xn == 0.0) fail("knobs.xi", "must be a nonzero finite vector");
  if (xn * c.h_sweep.front() >= 2.0) fail("knobs.xi", "|xi| * h must stay below 2 for every h in the sweep");
  if (std::abs(norm(c.x0) - c.radius) > 1e-9 * c.radius) fail("knobs.x0", "must lie on the sphere of the domain radius");
  if (std::abs(norm(c.tau) - 1.0) > 1e-10) fail("knobs.tau", "must be a unit vector");
  if (std::abs(dot(c.tau, c.x0)) > 1e-10 * c.radius) fail("knobs.tau", "must be tangent to the sphere at x0");

  const Tolerances& t = c.tolerances;
  const std::pair<const char*, double> tols[] = {
      {"gauge_frobenius", t.gauge_frobenius}, {"dbar_residual", t.dbar_residual},
      {"carleman_growth", t.carleman_growth}, {"eskin_ralston", t.eskin_ralston},
      {"exact_identity", t.exact_identity},   {"curl_l2", t.curl_l2},
      {"q_l2", t.q_l2},                       {"boundary", t.boundary},
      {"normalization", t.normalization},     {"solve_residual", t.solve_residual}};
  for (const auto& [k, v] : tols) check_range(std::string("tolerances.") + k, v, 0.0, 100.0, true);

  if (c.output_dir.empty()) fail("output.dir", "must be non-empty");
  if ((c.pipeline == PipelineKind::Verify || c.pipeline == PipelineKind::CgoDiagnostics) && !c.seed)
    fail("seed", "is required by the " + pipeline_name(c.pipeline) + " pipeline");
  if (c.threads < 1 || c.threads > 256) fail("threads", "must be in [1, 256]");
}

namespace {

using nlohmann::json;

std::pair<int, int> line_column(const std::string& text, std::size_t offset) {
  int line = 1, column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

// Finds each key of a dotted path in order; array indices are skipped.
std::pair<int, int> field_position(const std::string& text, const std::string& field) {
  std::size_t pos = 0, found = std::string::npos;
  std::stringstream parts(field);
  std::string part;
  while (std::getline(parts, part, '.')) {
    part = part.substr(0, part.find('['));
    if (part.empty()) continue;
    const std::string key = "\"" + part + "\"";
    std::size_t at = text.find(key, pos);
    while (at != std::string::npos) {
      std::size_t k = at + key.size();
      while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
      if (k < text.size() && text[k] == ':') break;
      at = text.find(key, at + 1);
    }
    if (at == std::string::npos) break;
    found = at;
    pos = at + key.size();
  }
  return found == std::string::npos ? std::pair{0, 0} : line_column(text, found);
}

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  [[noreturn]] void error(const std::string& field, const std::string& message) const {
    const auto [line, column] = field_position(text_, field);
    throw ConfigError(field, message, line, column);
  }

  void object(const json& j, const std::string& path, std::initializer_list<const char*> keys) const {
    if (!j.is_object()) error(path, "must be an object");
    for (const auto& [k, v] : j.items()) {
      bool known = false;
      for (const char* key : keys) known = known || k == key;
      if (!known) error(join(path, k), "unknown key");
    }
  }

  double number(const json& j, const std::string& path) const {
    if (!j.is_number()) error(path, "must be a number");
    return j.get<double>();
  }

  std::uint64_t unsigned_integer(const json& j, const std::string& path) const {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
      error(path, "must be a non-negative integer");
    return j.get<std::uint64_t>();
  }

  std::string string(const json& j, const std::string& path) const {
    if (!j.is_string()) error(path, "must be a string");
    return j.get<std::string>();
  }

  cplx complex(const json& j, const std::string& path) const {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
      return {j[0].get<double>(), j[1].get<double>()};
    error(path, "must be a number or a [re, im] pair");
  }

  Vec3 vec3(const json& j, const std::string& path) const {
    if (!j.is_array() || j.size() != 3) error(path, "must be an array of 3 numbers");
    return {number(j[0], path), number(j[1], path), number(j[2], path)};
  }

  CVec3 cvec3(const json& j, const std::string& path) const {
    if (!j.is_array() || j.size() != 3) error(path, "must be an array of 3 entries");
    return {complex(j[0], path), complex(j[1], path), complex(j[2], path)};
  }

  std::vector<double> numbers(const json& j, const std::string& path) const {
    if (!j.is_array()) error(path, "must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(number(v, path));
    return out;
  }

  std::vector<TermSpec> terms(const json& j, const std::string& path) const {
    if (!j.is_array()) error(path, "must be an array of terms");
    std::vector<TermSpec> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string p = path + "[" + std::to_string(i) + "]";
      const json& t = j[i];
      object(t, p, {"family", "amplitude", "center", "width", "direction"});
      if (!t.contains("family")) error(p + ".family", "is required");
      TermSpec s;
      try {
        s.family = parse_family(string(t["family"], p + ".family"));
      } catch (const ConfigError&) {
        throw;
      } catch (const InvalidArgument& e) {
        error(p + ".family", e.what());
      }
      if (s.family == Family::Zero) error(p + ".family", "zero terms are written as an empty list");
      if (t.contains("amplitude")) s.amplitude = complex(t["amplitude"], p + ".amplitude");
      if (t.contains("center")) s.center = vec3(t["center"], p + ".center");
      if (t.contains("width")) s.width = number(t["width"], p + ".width");
      if (t.contains("direction")) s.direction = cvec3(t["direction"], p + ".direction");
      out.push_back(s);
    }
    return out;
  }

  static std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

 private:
  const std::string& text_;
};

json complex_json(cplx z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

json terms_json(const std::vector<TermSpec>& terms) {
  json out = json::array();
  for (const TermSpec& t : terms)
    out.push_back({{"family", family_name(t.family)},
                   {"amplitude", complex_json(t.amplitude)},
                   {"center", {t.center[0], t.center[1], t.center[2]}},
                   {"width", t.width},
                   {"direction", {complex_json(t.direction[0]), complex_json(t.direction[1]), complex_json(t.direction[2])}}});
  return out;
}

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError("", std::string("malformed JSON: ") + e.what(), line, column);
  }
  const Reader r(text);
  ScenarioConfig c;
  r.object(j, "", {"name", "pipeline", "seed", "threads", "domain", "potentials", "knobs", "tolerances", "output"});
  if (!j.contains("pipeline")) r.error("pipeline", "is required");
  try {
    c.pipeline = parse_pipeline(r.string(j["pipeline"], "pipeline"));
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    r.error("pipeline", e.what());
  }
  if (j.contains("name")) c.name = r.string(j["name"], "name");
  if (j.contains("seed")) c.seed = r.unsigned_integer(j["seed"], "seed");
  if (j.contains("threads")) c.threads = static_cast<int>(std::min<std::uint64_t>(r.unsigned_integer(j["threads"], "threads"), 1u << 20));

  if (j.contains("domain")) {
    const json& d = j["domain"];
    r.object(d, "domain", {"shape", "radius", "grid"});
    if (d.contains("shape") && r.string(d["shape"], "domain.shape") != "ball") r.error("domain.shape", "only \"ball\" is supported");
    if (d.contains("radius")) c.radius = r.number(d["radius"], "domain.radius");
    if (d.contains("grid")) c.grid = r.unsigned_integer(d["grid"], "domain.grid");
  }
  if (j.contains("potentials")) {
    const json& p = j["potentials"];
    r.object(p, "potentials", {"side1", "side2"});
    for (int s = 1; s <= 2; ++s) {
      const std::string key = "side" + std::to_string(s);
      if (!p.contains(key)) continue;
      const std::string path = "potentials." + key;
      r.object(p[key], path, {"A", "q"});
      PotentialModel& m = s == 1 ? c.side1 : c.side2;
      if (p[key].contains("A")) m.vector_terms = r.terms(p[key]["A"], path + ".A");
      if (p[key].contains("q")) m.scalar_terms = r.terms(p[key]["q"], path + ".q");
    }
  }
  if (j.contains("knobs")) {
    const json& k = j["knobs"];
    r.object(k, "knobs", {"h_sweep", "sigma", "epsilon", "xi_max", "M_sweep", "max_degree", "scheme", "xi", "x0", "tau"});
    if (k.contains("h_sweep")) c.h_sweep = r.numbers(k["h_sweep"], "knobs.h_sweep");
    if (k.contains("sigma")) c.sigma = r.number(k["sigma"], "knobs.sigma");
    if (k.contains("epsilon")) c.epsilon = r.number(k["epsilon"], "knobs.epsilon");
    if (k.contains("xi_max")) c.xi_max = r.number(k["xi_max"], "knobs.xi_max");
    if (k.contains("M_sweep")) c.m_sweep = r.numbers(k["M_sweep"], "knobs.M_sweep");
    if (k.contains("max_degree"))
      c.max_degree = static_cast<int>(std::min<std::uint64_t>(r.unsigned_integer(k["max_degree"], "knobs.max_degree"), 1000));
    if (k.contains("scheme")) c.scheme = r.string(k["scheme"], "knobs.scheme");
    if (k.contains("xi")) c.xi = r.vec3(k["xi"], "knobs.xi");
    if (k.contains("x0")) c.x0 = r.vec3(k["x0"], "knobs.x0");
    if (k.contains("tau")) c.tau = r.vec3(k["tau"], "knobs.tau");
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    Tolerances& o = c.tolerances;
    const std::pair<const char*, double*> slots[] = {
        {"gauge_frobenius", &o.gauge_frobenius}, {"dbar_residual", &o.dbar_residual},
        {"carleman_growth", &o.carleman_growth}, {"eskin_ralston", &o.eskin_ralston},
        {"exact_identity", &o.exact_identity},   {"curl_l2", &o.curl_l2},
        {"q_l2", &o.q_l2},                       {"boundary", &o.boundary},
        {"normalization", &o.normalization},     {"solve_residual", &o.solve_residual}};
    if (!t.is_object()) r.error("tolerances", "must be an object");
    for (const auto& [key, v] : t.items()) {
      double* slot = nullptr;
      for (const auto& [name, ptr] : slots)
        if (key == name) slot = ptr;
      if (!slot) r.error("tolerances." + key, "unknown key");
      *slot = r.number(v, "tolerances." + key);
    }
  }
  if (j.contains("output")) {
    r.object(j["output"], "output", {"dir"});
    if (j["output"].contains("dir")) c.output_dir = r.string(j["output"]["dir"], "output.dir");
  }
  try {
    validate(c);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    const std::string prefix = "field '" + e.field() + "': ";
    r.error(e.field(), msg.rfind(prefix, 0) == 0 ? msg.substr(prefix.size()) : msg);
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file " + path);
  return parse_config({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
}

std::string to_json(const ScenarioConfig& c) {
  json j;
  j["name"] = c.name;
  j["pipeline"] = pipeline_name(c.pipeline);
  if (c.seed) j["seed"] = *c.seed;
  j["threads"] = c.threads;
  j["domain"] = {{"shape", "ball"}, {"radius", c.radius}, {"grid", c.grid}};
  j["potentials"] = {{"side1", {{"A", terms_json(c.side1.vector_terms)}, {"q", terms_json(c.side1.scalar_terms)}}},
                     {"side2", {{"A", terms_json(c.side2.vector_terms)}, {"q", terms_json(c.side2.scalar_terms)}}}};
  j["knobs"] = {{"h_sweep", c.h_sweep}, {"sigma", c.sigma},           {"epsilon", c.epsilon},
                {"xi_max", c.xi_max},   {"M_sweep", c.m_sweep},       {"max_degree", c.max_degree},
                {"scheme", c.scheme},   {"xi", vec_json(c.xi)},       {"x0", vec_json(c.x0)},
                {"tau", vec_json(c.tau)}};
  const Tolerances& t = c.tolerances;
  j["tolerances"] = {{"gauge_frobenius", t.gauge_frobenius}, {"dbar_residual", t.dbar_residual},
                     {"carleman_growth", t.carleman_growth}, {"eskin_ralston", t.eskin_ralston},
                     {"exact_identity", t.exact_identity},   {"curl_l2", t.curl_l2},
                     {"q_l2", t.q_l2},                       {"boundary", t.boundary},
                     {"normalization", t.normalization},     {"solve_residual", t.solve_residual}};
  j["output"] = {{"dir", c.output_dir}};
  return j.dump(2) + "\n";
}

ScenarioConfig default_config(PipelineKind kind) {
  ScenarioConfig c;
  c.pipeline = kind;
  c.name = pipeline_name(kind);
  switch (kind) {
    case PipelineKind::Forward:
      c.name = "gauge-pair";
      c.side1.vector_terms.push_back({Family::GaussianBump, {0.5, 0.1}, {0.0, 0.1, 0.0}, 0.3, {0.0, 1.0, 0.0}});
      c.side1.scalar_terms.push_back({Family::GaussianBump, {2.0, 0.0}, {0.0, 0.0, 0.1}, 0.3, {1.0, 0.0, 0.0}});
      c.side2 = c.side1;
      c.side2.vector_terms.push_back({Family::GradientBump, {0.8, 0.0}, {0.1, 0.0, 0.0}, 0.2, {1.0, 0.0, 0.0}});
      break;
    case PipelineKind::CgoDiagnostics:
      c.name = "smooth-bump";
      c.seed = 1;
      c.side1.vector_terms.push_back({Family::GaussianBump, {1.0, 0.0}, {0.1, 0.0, 0.0}, 0.3, {0.3, 0.6, -0.4}});
      c.side1.scalar_terms.push_back({Family::GaussianBump, {1.0, 0.0}, {0.0, 0.1, 0.0}, 0.3, {1.0, 0.0, 0.0}});
      break;
    case PipelineKind::RecoverCurl:
      c.name = "rotation-bump";
      c.side1.vector_terms.push_back({Family::RotationBump, {1.0, 0.0}, {}, 0.25, {1.0, 0.0, 0.0}});
      c.h_sweep = {0.2, 0.1, 0.05};
      break;
    case PipelineKind::RecoverQ:
      c.name = "scalar-bump";
      c.side1.scalar_terms.push_back({Family::GaussianBump, {1.0, 0.0}, {0.1, 0.0, -0.1}, 0.3, {1.0, 0.0, 0.0}});
      c.h_sweep = {0.2, 0.1, 0.05};
      c.xi_max = 4.0;
      break;
    case PipelineKind::Boundary:
      c.name = "tangential-constant";
      c.side1.vector_terms.push_back({Family::GaussianBump, {1.0, 0.0}, {0.2, 0.1, 0.3}, 0.4, {0.3, -0.2, 0.5}});
      c.side1.scalar_terms.push_back({Family::GaussianBump, {2.0, 0.0}, {}, 0.4, {1.0, 0.0, 0.0}});
      c.side2 = c.side1;
      c.side1.vector_terms.push_back({Family::LocalConstant, {1.0, 0.0}, c.x0, 0.6, {1.0, 0.0, 0.0}});
      break;
    case PipelineKind::Verify:
      c.seed = 1;
      break;
  }
  return c;
}

}  // namespace mslab
