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

#include "mslab/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <openssl/evp.h>

#include "json.hpp"
#include "mslab/boundary.hpp"
#include "mslab/cgo.hpp"
#include "mslab/forward.hpp"
#include "mslab/recovery.hpp"
#include "run_context.hpp"

namespace mslab {
namespace {

using detail::RunContext;

std::string fr(double v) { return format_real(v); }

std::string sha256_text(const std::string& text) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

struct Setup {
  Domain domain;
  PotentialPair p1;
  PotentialPair p2;
  SolverOptions solver;
};

Setup make_setup(const ScenarioConfig& c) {
  Domain d = build_ball_domain(c.radius, c.grid);
  PotentialPair p1 = sample_potentials(c.side1, d.grid());
  PotentialPair p2 = sample_potentials(c.side2, d.grid());
  SolverOptions so;
  so.seed = c.seed.value_or(1);
  return {std::move(d), std::move(p1), std::move(p2), so};
}

GridFile potential_grid(const PotentialPair& p) {
  return {p.grid(), {p.A.comp[0], p.A.comp[1], p.A.comp[2], p.q.values}};
}

ScatteringOptions scattering_options(const ScenarioConfig& c) {
  ScatteringOptions o;
  o.h_sweep = c.h_sweep;
  o.extrapolate = c.h_sweep.size() >= 2;
  o.threads = c.threads;
  o.cgo.sigma = c.sigma;
  o.cgo.remainder.scheme = parse_scheme(c.scheme);
  return o;
}

// Side 2 equals side 1 up to added gradient_bump vector terms (either way).
bool is_gauge_pair(const PotentialModel& a, const PotentialModel& b) {
  if (a.scalar_terms != b.scalar_terms) return false;
  auto rest = [](const std::vector<TermSpec>& big, std::vector<TermSpec> small) {
    std::vector<TermSpec> left;
    for (const TermSpec& t : big) {
      auto it = std::find(small.begin(), small.end(), t);
      if (it != small.end()) small.erase(it);
      else left.push_back(t);
    }
    return std::pair{left, small};
  };
  const auto [extra, missing] = rest(b.vector_terms, a.vector_terms);
  const auto [extra2, missing2] = rest(a.vector_terms, b.vector_terms);
  const auto gradients = [](const std::vector<TermSpec>& ts) {
    return std::all_of(ts.begin(), ts.end(), [](const TermSpec& t) { return t.family == Family::GradientBump; });
  };
  return a != b && ((missing.empty() && gradients(extra)) || (missing2.empty() && gradients(extra2)));
}

void run_forward(RunContext& run) {
  const ScenarioConfig& c = run.config();
  Setup s = make_setup(c);
  CauchyDataMap maps[2];
  CsvTable table({"side", "basis_size", "condition_estimate", "max_residual", "frobenius_norm"});
  for (int side = 0; side < 2; ++side) {
    const std::string name = "side" + std::to_string(side + 1);
    run.step("cauchy-map " + name, [&](StepReport& st) {
      maps[side] = cauchy_data_map(side == 0 ? s.p1 : s.p2, s.domain, c.max_degree, s.solver);
      const double max_res = *std::max_element(maps[side].residuals.begin(), maps[side].residuals.end());
      st.diagnostics = {{"basis_size", static_cast<double>(maps[side].basis.size())},
                        {"condition_estimate", maps[side].condition_estimate},
                        {"max_residual", max_res}};
      table.add_row({name, std::to_string(maps[side].basis.size()), fr(maps[side].condition_estimate), fr(max_res),
                     fr(maps[side].matrix.norm())});
      run.check("forward solve residual " + name, max_res, "<=", c.tolerances.solve_residual);
    });
    write_cauchy_map(run.path("cauchy_map_" + name + ".json"), maps[side]);
    run.write("potentials_" + name + ".msgrid", potential_grid(side == 0 ? s.p1 : s.p2));
  }
  run.write("forward.csv", table);
  const double diff = relative_frobenius(maps[1], maps[0]);
  CsvTable summary({"quantity", "value"});
  summary.add_row({"relative_frobenius", fr(diff)});
  run.write("summary.csv", summary);
  if (is_gauge_pair(c.side1, c.side2)) run.check("gauge pair maps agree", diff, "<=", c.tolerances.gauge_frobenius);
}

void run_cgo(RunContext& run) {
  const ScenarioConfig& c = run.config();
  Setup s = make_setup(c);
  const Frame frame = lattice_frames(c.xi)[0];
  CgoOptions o;
  o.sigma = c.sigma;
  o.remainder.scheme = parse_scheme(c.scheme);
  CsvTable table({"h", "norm_g", "norm_g_over_h", "norm_r", "solve_residual", "iterations", "empirical_constant",
                  "equation_residual"});
  std::vector<double> g_over_h, r;
  ScalarField last_factor;
  for (double h : c.h_sweep) {
    run.step("cgo h=" + fr(h), [&](StepReport& st) {
      const CgoSolution sol = build_cgo(s.p1, cgo_side(make_zeta_pair(c.xi, frame.mu1, frame.mu2, h), 1), s.domain, o);
      const CgoDiagnostics& dg = sol.diagnostics;
      g_over_h.push_back(dg.norm_g / h);
      r.push_back(dg.norm_r);
      st.diagnostics = {{"norm_g_over_h", dg.norm_g / h}, {"norm_r", dg.norm_r}, {"iterations", static_cast<double>(dg.iterations)}};
      table.add_row({fr(h), fr(dg.norm_g), fr(dg.norm_g / h), fr(dg.norm_r), fr(dg.solve_residual),
                     std::to_string(dg.iterations), fr(dg.empirical_constant), fr(dg.equation_residual)});
      run.check("cgo equation residual h=" + fr(h), dg.equation_residual, "<=", c.tolerances.solve_residual);
      last_factor = sol.factor();
    });
  }
  run.write("cgo.csv", table);
  run.write("cgo_factor.msgrid", to_grid_file(last_factor));
  for (std::size_t k = 1; k < r.size(); ++k) {
    run.check("g/h decreases at h=" + fr(c.h_sweep[k]), g_over_h[k], "<", g_over_h[k - 1]);
    run.check("r decreases at h=" + fr(c.h_sweep[k]), r[k], "<", r[k - 1]);
  }
  if (r.size() >= 2) run.check("final r at most half the initial", r.back(), "<=", 0.5 * r.front());

  CsvTable carleman({"h", "sup_ratio_laplacian", "sup_ratio_magnetic"});
  std::vector<double> lap, mag;
  run.step("carleman", [&](StepReport& st) {
    const auto family = carleman_test_family(s.domain, 20, *c.seed);
    CarlemanProbe probe;
    probe.epsilon = c.epsilon;
    for (double h : c.h_sweep) {
      probe.h = h;
      double a = 0.0, b = 0.0;
      for (const auto& u : family) {
        a = std::max(a, carleman_ratio(probe, u, -1.0));
        b = std::max(b, carleman_ratio(probe, u, -1.0, s.p1));
      }
      lap.push_back(a);
      mag.push_back(b);
      carleman.add_row({fr(h), fr(a), fr(b)});
    }
    st.diagnostics = {{"family_size", static_cast<double>(family.size())}};
  });
  run.write("carleman.csv", carleman);
  if (lap.size() >= 2) {
    const std::size_t n = lap.size();
    run.check("carleman growth laplacian", lap[n - 1] / lap[n - 2], "<=", c.tolerances.carleman_growth);
    run.check("carleman growth magnetic", mag[n - 1] / mag[n - 2], "<=", c.tolerances.carleman_growth);
  }
}

std::vector<std::string> xi_cells(const Vec3& xi) { return {fr(xi[0]), fr(xi[1]), fr(xi[2])}; }

void append(std::vector<std::string>& row, std::vector<std::string> more) {
  row.insert(row.end(), more.begin(), more.end());
}

void run_recover_curl(RunContext& run) {
  const ScenarioConfig& c = run.config();
  Setup s = make_setup(c);
  const double step = lattice_step(s.domain.grid());
  const std::vector<Vec3> lattice = xi_lattice(step, c.xi_max);
  std::vector<ScatteringSample> samples;
  run.step("scattering samples", [&](StepReport& st) {
    samples = scattering_samples(s.p1, s.p2, lattice, s.domain, scattering_options(c));
    double worst = 0.0;
    for (const auto& x : samples) worst = std::max(worst, x.extrapolation_error);
    st.diagnostics = {{"lattice_points", static_cast<double>(lattice.size())},
                      {"samples", static_cast<double>(samples.size())},
                      {"max_extrapolation_error", worst}};
  });
  CsvTable st({"xi1", "xi2", "xi3", "mu1_1", "mu1_2", "mu1_3", "mu2_1", "mu2_2", "mu2_3", "value_re", "value_im",
               "h_used", "extrapolation_error"});
  for (const auto& x : samples) {
    std::vector<std::string> row = xi_cells(x.xi);
    append(row, xi_cells(x.mu1));
    append(row, xi_cells(x.mu2));
    append(row, {fr(x.value.real()), fr(x.value.imag()), fr(x.h_used), fr(x.extrapolation_error)});
    st.add_row(row);
  }
  run.write("samples.csv", st);

  CurlSpectrum spectrum;
  run.step("curl recovery", [&](StepReport& sr) {
    spectrum = recover_curl(samples);
    sr.diagnostics = {{"skipped", static_cast<double>(spectrum.skipped.size())}};
  });
  const PotentialModel w = difference(c.side1, c.side2);
  std::optional<CurlSpectrum> exact;
  double scale = 0.0;
  try {
    exact = analytic_curl(w, spectrum.xi);
    for (const Vec3& xi : spectrum.xi) scale += dot(xi, xi) * std::pow(norm(w.A_hat(xi)), 2);
    scale = std::sqrt(scale);
  } catch (const InvalidArgument&) {
    exact.reset();
  }
  std::vector<std::string> header{"xi1", "xi2", "xi3"};
  for (const char* k : {"w12", "w13", "w23"}) append(header, {std::string(k) + "_re", std::string(k) + "_im"});
  if (exact)
    for (const char* k : {"w12", "w13", "w23"})
      append(header, {std::string(k) + "_analytic_re", std::string(k) + "_analytic_im"});
  CsvTable ct(header);
  for (std::size_t i = 0; i < spectrum.xi.size(); ++i) {
    std::vector<std::string> row = xi_cells(spectrum.xi[i]);
    for (const cplx& v : spectrum.values[i]) append(row, {fr(v.real()), fr(v.imag())});
    if (exact)
      for (const cplx& v : exact->values[i]) append(row, {fr(v.real()), fr(v.imag())});
    ct.add_row(row);
  }
  run.write("curl_spectrum.csv", ct);
  run.write("curl_field.msgrid", to_grid_file(curl_field(spectrum, s.domain.grid(), step)));

  CsvTable summary({"quantity", "value"});
  const double norm_rec = spectrum_norm(spectrum);
  summary.add_row({"lattice_points", std::to_string(spectrum.xi.size())});
  summary.add_row({"skipped_points", std::to_string(spectrum.skipped.size())});
  summary.add_row({"spectrum_norm", fr(norm_rec)});
  if (exact) {
    const double norm_exact = spectrum_norm(*exact);
    summary.add_row({"analytic_norm", fr(norm_exact)});
    summary.add_row({"field_scale", fr(scale)});
    if (norm_exact > 1e-12 * scale) {
      const double err = relative_l2(spectrum, *exact);
      summary.add_row({"relative_l2_error", fr(err)});
      run.check("curl spectrum relative L2 error", err, "<=", c.tolerances.curl_l2);
    } else if (scale > 0.0) {
      summary.add_row({"curl_to_scale", fr(norm_rec / scale)});
      run.check("curl-free difference gives small curl", norm_rec / scale, "<=", c.tolerances.curl_l2);
    }
  }
  run.write("summary.csv", summary);
}

void run_recover_q(RunContext& run) {
  const ScenarioConfig& c = run.config();
  Setup s = make_setup(c);
  QRecovery q;
  run.step("q recovery", [&](StepReport& st) {
    q = recover_q(s.p1, s.p2, c.xi_max, s.domain, scattering_options(c));
    st.diagnostics = {{"lattice_points", static_cast<double>(q.xi.size())}};
  });
  const PotentialModel w = difference(c.side1, c.side2);
  std::optional<std::vector<cplx>> exact;
  try {
    std::vector<cplx> e;
    for (const Vec3& xi : q.xi) e.push_back(w.q_hat(xi));
    exact = std::move(e);
  } catch (const InvalidArgument&) {
    exact.reset();
  }
  std::vector<std::string> header{"xi1", "xi2", "xi3", "value_re", "value_im", "extrapolation_error"};
  if (exact) append(header, {"analytic_re", "analytic_im"});
  CsvTable t(header);
  for (std::size_t i = 0; i < q.xi.size(); ++i) {
    std::vector<std::string> row = xi_cells(q.xi[i]);
    append(row, {fr(q.transform[i].real()), fr(q.transform[i].imag()), fr(q.extrapolation_error[i])});
    if (exact) append(row, {fr((*exact)[i].real()), fr((*exact)[i].imag())});
    t.add_row(row);
  }
  run.write("q_transform.csv", t);
  run.write("q_field.msgrid", to_grid_file(q.field));
  CsvTable summary({"quantity", "value"});
  summary.add_row({"lattice_points", std::to_string(q.xi.size())});
  summary.add_row({"field_l2", fr(norm_l2(q.field))});
  if (exact) {
    const ScalarField ref = inverse_lattice_transform(q.xi, *exact, s.domain.grid(), lattice_step(s.domain.grid()));
    const double ref_norm = norm_l2(ref);
    summary.add_row({"analytic_l2", fr(ref_norm)});
    if (ref_norm > 0.0) {
      const double err = norm_l2(q.field - ref) / ref_norm;
      summary.add_row({"relative_l2_error", fr(err)});
      run.check("band-limited q relative L2 error", err, "<=", c.tolerances.q_l2);
    }
  }
  run.write("summary.csv", summary);
}

void run_boundary(RunContext& run) {
  const ScenarioConfig& c = run.config();
  Setup s = make_setup(c);
  BoundaryRecovery r;
  BoundaryOptions bo;
  bo.solver = s.solver;
  run.step("boundary recovery", [&](StepReport& st) {
    r = boundary_tangential_recovery(s.p1, s.p2, c.x0, c.tau, c.m_sweep, s.domain, bo);
    st.diagnostics = {{"largest_resolved_M", r.largest_resolved_M}, {"extrapolation_error", r.extrapolation_error}};
  });
  CsvTable t({"M", "N", "resolved", "patch_nodes", "main_re", "main_im", "coupled_re", "coupled_im", "total_re",
              "total_im", "normalization", "l2_scaled", "correction_ratio"});
  double normalization = 0.0;
  for (const BoundaryStep& b : r.steps) {
    t.add_row({fr(b.M), fr(b.N), b.resolved ? "1" : "0", std::to_string(b.patch_nodes), fr(b.main.real()),
               fr(b.main.imag()), fr(b.coupled.real()), fr(b.coupled.imag()), fr(b.total.real()), fr(b.total.imag()),
               fr(b.normalization), fr(b.l2_scaled), fr(b.correction_ratio)});
    if (b.resolved && b.M == r.largest_resolved_M) normalization = b.normalization;
  }
  run.write("boundary.csv", t);

  const CVec3 w = c.side1.A(c.x0) - c.side2.A(c.x0);
  const cplx expected = dot(complexify(c.tau), w);
  const double scale = std::sqrt(std::norm(w[0]) + std::norm(w[1]) + std::norm(w[2]));
  CsvTable summary({"quantity", "value"});
  summary.add_row({"limit_re", fr(r.limit.real())});
  summary.add_row({"limit_im", fr(r.limit.imag())});
  summary.add_row({"extrapolation_error", fr(r.extrapolation_error)});
  summary.add_row({"value_at_largest_re", fr(r.value_at_largest.real())});
  summary.add_row({"value_at_largest_im", fr(r.value_at_largest.imag())});
  summary.add_row({"largest_resolved_M", fr(r.largest_resolved_M)});
  summary.add_row({"expected_re", fr(expected.real())});
  summary.add_row({"expected_im", fr(expected.imag())});
  summary.add_row({"difference_scale", fr(scale)});
  run.write("summary.csv", summary);
  if (scale > 0.0)
    run.check("tangential difference at the largest resolved M", std::abs(r.value_at_largest - expected) / scale, "<=",
              c.tolerances.boundary);
  run.check("probe normalization at the largest resolved M", std::abs(normalization - 0.5) / 0.5, "<=",
            c.tolerances.normalization);
}

nlohmann::json check_json(const CheckResult& k) {
  return {{"name", k.name}, {"value", k.value}, {"relation", k.relation}, {"threshold", k.threshold}, {"passed", k.passed}};
}

CheckResult check_from(const nlohmann::json& j) {
  return {j.at("name").get<std::string>(), j.at("value").get<double>(), j.at("relation").get<std::string>(),
          j.at("threshold").get<double>(), j.at("passed").get<bool>()};
}

}  // namespace

bool RunReport::passed() const {
  const auto ok = [](const CheckResult& k) { return k.passed; };
  return std::all_of(checks.begin(), checks.end(), ok) && std::all_of(rerun_checks.begin(), rerun_checks.end(), ok);
}

RunReport run_pipeline(const ScenarioConfig& config) {
  validate(config);
  namespace fs = std::filesystem;
  const fs::path out(config.output_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory " + config.output_dir + ": " + ec.message());

  const std::string config_text = to_json(config);
  std::optional<RunReport> previous;
  if (fs::exists(out / "report.json")) {
    try {
      previous = read_report((out / "report.json").string());
    } catch (const IoError&) {
      previous.reset();
    }
  }

  RunReport report;
  report.pipeline = pipeline_name(config.pipeline);
  report.scenario = config.name;
  report.seed = config.seed;
  report.output_dir = config.output_dir;
  report.config_sha256 = sha256_text(config_text);
  const auto t0 = std::chrono::steady_clock::now();

  RunContext run(config, report);
  {
    std::ofstream f(run.path("config.json"), std::ios::binary | std::ios::trunc);
    f << config_text;
    if (!f) throw IoError("cannot write config.json in " + config.output_dir);
  }
  switch (config.pipeline) {
    case PipelineKind::Forward: run_forward(run); break;
    case PipelineKind::CgoDiagnostics: run_cgo(run); break;
    case PipelineKind::RecoverCurl: run_recover_curl(run); break;
    case PipelineKind::RecoverQ: run_recover_q(run); break;
    case PipelineKind::Boundary: run_boundary(run); break;
    case PipelineKind::Verify: detail::run_verify(run); break;
  }
  CsvTable checks({"check", "value", "relation", "threshold", "passed"});
  for (const CheckResult& k : report.checks)
    checks.add_row({k.name, fr(k.value), k.relation, fr(k.threshold), k.passed ? "true" : "false"});
  run.write("checks.csv", checks);

  for (const std::string& f : run.files()) {
    const fs::path p = out / f;
    report.artifacts.push_back({f, sha256_file(p.string()), static_cast<std::uint64_t>(fs::file_size(p))});
  }
  if (previous && previous->config_sha256 == report.config_sha256) {
    for (const ArtifactEntry& old : previous->artifacts) {
      const auto it = std::find_if(report.artifacts.begin(), report.artifacts.end(),
                                   [&](const ArtifactEntry& a) { return a.path == old.path; });
      const bool same = it != report.artifacts.end() && it->sha256 == old.sha256;
      report.rerun_checks.push_back({"rerun matches previous hash of " + old.path, same ? 1.0 : 0.0, ">", 0.5, same});
    }
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream f(out / "report.json", std::ios::binary | std::ios::trunc);
  f << report_to_json(report);
  if (!f) throw IoError("cannot write report.json in " + config.output_dir);
  return report;
}

std::string report_to_json(const RunReport& r) {
  using nlohmann::json;
  json j;
  j["format"] = "mslab-run-report";
  j["version"] = 1;
  j["pipeline"] = r.pipeline;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed ? json(*r.seed) : json(nullptr);
  j["output_dir"] = r.output_dir;
  j["config_sha256"] = r.config_sha256;
  j["passed"] = r.passed();
  j["wall_seconds"] = r.wall_seconds;
  json steps = json::array();
  for (const StepReport& s : r.steps) {
    json d = json::object();
    for (const auto& [k, v] : s.diagnostics) d[k] = v;
    steps.push_back({{"name", s.name}, {"wall_seconds", s.wall_seconds}, {"diagnostics", d}});
  }
  j["steps"] = steps;
  j["checks"] = json::array();
  for (const CheckResult& k : r.checks) j["checks"].push_back(check_json(k));
  j["rerun_checks"] = json::array();
  for (const CheckResult& k : r.rerun_checks) j["rerun_checks"].push_back(check_json(k));
  j["artifacts"] = json::array();
  for (const ArtifactEntry& a : r.artifacts)
    j["artifacts"].push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  return j.dump(2) + "\n";
}

RunReport read_report(const std::string& path) {
  using nlohmann::json;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  RunReport r;
  try {
    const json j = json::parse(std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()));
    if (j.at("format") != "mslab-run-report") throw IoError(path + " is not a run report");
    r.pipeline = j.at("pipeline").get<std::string>();
    r.scenario = j.at("scenario").get<std::string>();
    if (!j.at("seed").is_null()) r.seed = j.at("seed").get<std::uint64_t>();
    r.output_dir = j.at("output_dir").get<std::string>();
    r.config_sha256 = j.at("config_sha256").get<std::string>();
    r.wall_seconds = j.at("wall_seconds").get<double>();
    for (const auto& s : j.at("steps")) {
      StepReport st{s.at("name").get<std::string>(), s.at("wall_seconds").get<double>(), {}};
      for (const auto& [k, v] : s.at("diagnostics").items()) st.diagnostics.emplace_back(k, v.get<double>());
      r.steps.push_back(std::move(st));
    }
    for (const auto& k : j.at("checks")) r.checks.push_back(check_from(k));
    for (const auto& k : j.at("rerun_checks")) r.rerun_checks.push_back(check_from(k));
    for (const auto& a : j.at("artifacts"))
      r.artifacts.push_back({a.at("path").get<std::string>(), a.at("sha256").get<std::string>(),
                             a.at("bytes").get<std::uint64_t>()});
  } catch (const json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return r;
}

std::vector<std::string> verify_manifest(const std::string& report_path) {
  namespace fs = std::filesystem;
  const RunReport r = read_report(report_path);
  const fs::path dir = fs::path(report_path).parent_path();
  std::vector<std::string> bad;
  for (const ArtifactEntry& a : r.artifacts) {
    const fs::path p = dir / a.path;
    if (!fs::exists(p) || sha256_file(p.string()) != a.sha256) bad.push_back(a.path);
  }
  return bad;
}

}  // namespace mslab
