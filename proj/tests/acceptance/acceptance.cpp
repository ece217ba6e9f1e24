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

// Acceptance suite: one line per criterion, "criterion N: PASS|FAIL ...".
// Usage: mslab_acceptance [N ...]; no arguments runs all criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mslab/boundary.hpp"
#include "mslab/cauchy_transform.hpp"
#include "mslab/cgo.hpp"
#include "mslab/forward.hpp"
#include "mslab/io.hpp"
#include "mslab/pipeline.hpp"
#include "mslab/recovery.hpp"

using namespace mslab;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

PotentialModel smooth_bump_model() {
  PotentialModel m;
  m.vector_terms.push_back({Family::GaussianBump, {1.0, 0.0}, {0.1, 0.0, 0.0}, 0.3, {0.3, 0.6, -0.4}});
  m.scalar_terms.push_back({Family::GaussianBump, {1.0, 0.0}, {0.0, 0.1, 0.0}, 0.3, {1.0, 0.0, 0.0}});
  return m;
}

// 1. Cauchy maps of A and A + grad psi agree, better on the finer grid.
Outcome gauge_invariance() {
  constexpr double kTolerance = 5e-2;
  PotentialModel base;
  base.vector_terms.push_back({Family::GaussianBump, {0.5, 0.1}, {0.0, 0.1, 0.0}, 0.3, {0.0, 1.0, 0.0}});
  base.scalar_terms.push_back({Family::GaussianBump, {2.0, 0.0}, {0.0, 0.0, 0.1}, 0.3, {1.0, 0.0, 0.0}});
  PotentialModel gauged = base;
  gauged.vector_terms.push_back({Family::GradientBump, {0.8, 0.0}, {0.1, 0.0, 0.0}, 0.2, {1.0, 0.0, 0.0}});
  double diff[2];
  const std::size_t grids[2] = {32, 48};
  for (int k = 0; k < 2; ++k) {
    const Domain d = build_ball_domain(1.0, grids[k]);
    const CauchyDataMap a = cauchy_data_map(sample_potentials(base, d.grid()), d, 3);
    const CauchyDataMap b = cauchy_data_map(sample_potentials(gauged, d.grid()), d, 3);
    diff[k] = relative_frobenius(b, a);
  }
  return {diff[0] <= kTolerance && diff[1] < diff[0],
          "relative Frobenius " + fmt(diff[0]) + " at 32^3 (<= " + fmt(kTolerance) + "), " + fmt(diff[1]) + " at 48^3"};
}

// 2. zeta0 . grad (N^{-1} f) reproduces f for a Gaussian bump.
Outcome dbar_oracle() {
  constexpr double kTolerance = 1e-2;
  const Domain d = build_ball_domain(1.0, 64);
  const ScalarField f = sample_scalar(d.grid(), [](const Vec3& x) {
    const Vec3 y = x - Vec3{0.1, -0.05, 0.0};
    return cplx(std::exp(-dot(y, y) / (2.0 * 0.3 * 0.3)));
  });
  double worst = 0.0;
  for (const CVec3& z : {CVec3{1.0, kI, 0.0}, LaminaFrame::make(normalized(Vec3{1, 1, 0}), normalized(Vec3{-1, 1, 1})).zeta0}) {
    const ScalarField phi = cauchy_inverse(f, z, {8.0, 512});
    worst = std::max(worst, norm_sup(restrict_to(directional_dbar(phi, z) - f, d)) / norm_sup(f));
  }
  return {worst <= kTolerance, "sup residual " + fmt(worst) + " (<= " + fmt(kTolerance) + ")"};
}

// 3. ||g||/h and ||r|| strictly decrease over the h sweep; r halves.
Outcome cgo_decay() {
  const Domain d = build_ball_domain(1.0, 32);
  const PotentialPair p = sample_potentials(smooth_bump_model(), d.grid());
  CgoOptions o;
  o.sigma = 0.25;
  std::vector<double> g, r;
  for (double h : {0.4, 0.2, 0.1, 0.05}) {
    const CgoSolution s = build_cgo(p, cgo_side(make_zeta_pair({0.0, 0.0, 1.0}, {1, 0, 0}, {0, 1, 0}, h), 1), d, o);
    g.push_back(s.diagnostics.norm_g / h);
    r.push_back(s.diagnostics.norm_r);
  }
  bool ok = r.back() <= 0.5 * r.front();
  std::string detail = "g/h";
  for (double v : g) detail += " " + fmt(v);
  detail += "; r";
  for (double v : r) detail += " " + fmt(v);
  for (std::size_t k = 1; k < r.size(); ++k) ok = ok && g[k] < g[k - 1] && r[k] < r[k - 1];
  return {ok, detail};
}

// 4. Sup of the Carleman ratio over seeded bumps grows at most 1.5x between the finest h.
Outcome carleman() {
  constexpr double kGrowth = 1.5;
  const Domain d = build_ball_domain(1.0, 32);
  const PotentialPair p = sample_potentials(smooth_bump_model(), d.grid());
  const auto family = carleman_test_family(d, 20, 2024);
  CarlemanProbe probe;
  probe.alpha = {1.0, 0.0, 0.0};
  probe.epsilon = 0.25;
  std::vector<double> lap, mag;
  for (double h : {0.2, 0.1, 0.05}) {
    probe.h = h;
    double a = 0.0, b = 0.0;
    for (const auto& u : family) {
      a = std::max(a, carleman_ratio(probe, u, -1.0));
      b = std::max(b, carleman_ratio(probe, u, -1.0, p));
    }
    lap.push_back(a);
    mag.push_back(b);
  }
  const double gl = lap[2] / lap[1], gm = mag[2] / mag[1];
  return {gl <= kGrowth && gm <= kGrowth, "growth laplacian " + fmt(gl) + ", magnetic " + fmt(gm) + " (<= " + fmt(kGrowth) + ")"};
}

// 5. Eskin-Ralston gap over 10 seeded bump fields and 5 frames.
Outcome eskin_ralston() {
  constexpr double kTolerance = 2e-2;
  const Grid g = make_cube_grid({}, 1.25, 32);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::pair<Vec3, Frame>> frames;
  for (int k = 0; k < 5; ++k) {
    const Vec3 xi = (0.5 + 0.75 * (u(rng) + 1.0)) * normalized(Vec3{u(rng), u(rng), u(rng)});
    frames.emplace_back(xi, lattice_frames(xi)[k % 2]);
  }
  double worst = 0.0;
  for (int f = 0; f < 10; ++f) {
    PotentialModel m;
    m.vector_terms.push_back({Family::GaussianBump, {0.3 + 0.35 * (u(rng) + 1.0), 0.3 * u(rng)},
                              {0.2 * u(rng), 0.2 * u(rng), 0.2 * u(rng)}, 0.27 + 0.04 * u(rng),
                              {cplx(u(rng), 0.5 * u(rng)), cplx(u(rng), 0.5 * u(rng)), cplx(u(rng), 0.5 * u(rng))}});
    const VectorField w = sample_potentials(m, g).A;
    for (const auto& [xi, fr] : frames) {
      const auto [lhs, rhs] = eskin_ralston_check(w, xi, fr.mu1, fr.mu2);
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
  }
  return {worst <= kTolerance, "max relative gap " + fmt(worst) + " (<= " + fmt(kTolerance) + ")"};
}

PotentialModel rotation_difference() {
  PotentialModel m;
  m.vector_terms.push_back({Family::RotationBump, {1.0, 0.0}, {}, 0.25, {1.0, 0.0, 0.0}});
  return m;
}

// 6. Curl of a rotational difference from PDE-based samples; a gradient difference gives a small curl.
Outcome curl_recovery() {
  constexpr double kTolerance = 0.1;
  const Domain d = build_ball_domain(1.0, 32);
  const Grid& g = d.grid();
  const std::vector<Vec3> lattice = xi_lattice(lattice_step(g), 2.0);
  ScatteringOptions o;
  o.h_sweep = {0.2, 0.1, 0.05};
  const PotentialPair zero = zero_potentials(g);

  const PotentialModel rot = rotation_difference();
  const CurlSpectrum rec = recover_curl(scattering_samples(sample_potentials(rot, g), zero, lattice, d, o));
  const CurlSpectrum exact = analytic_curl(rot, rec.xi);
  const double err = relative_l2(rec, exact);
  const double scale = spectrum_norm(exact);

  PotentialModel grad;
  grad.vector_terms.push_back({Family::GradientBump, {1.0, 0.0}, {0.05, -0.05, 0.0}, 0.25, {1.0, 0.0, 0.0}});
  const CurlSpectrum gc = recover_curl(scattering_samples(sample_potentials(grad, g), zero, lattice, d, o));
  const double ratio = spectrum_norm(gc) / scale;
  return {rec.skipped.empty() && err <= kTolerance && ratio <= kTolerance,
          "relative L2 " + fmt(err) + " over " + std::to_string(rec.xi.size()) + " points, gradient case " + fmt(ratio) +
              " of scale (both <= " + fmt(kTolerance) + ")"};
}

// 7. Curl from exact samples, bypassing PDE solves.
Outcome exact_identity() {
  constexpr double kTolerance = 1e-12;
  PotentialModel w = rotation_difference();
  w.vector_terms.push_back({Family::GaussianBump, {0.7, -0.2}, {0.1, 0.0, -0.1}, 0.3, {cplx(0.2, 0.1), -0.5, 0.9}});
  const std::vector<Vec3> lattice = xi_lattice(lattice_step(build_ball_domain(1.0, 32).grid()), 2.0);
  const CurlSpectrum rec = recover_curl(analytic_samples(w, lattice));
  const CurlSpectrum ref = analytic_curl(w, rec.xi);
  double worst = 0.0;
  for (std::size_t i = 0; i < rec.xi.size(); ++i)
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(rec.values[i][k] - ref.values[i][k]));
  const bool complete = rec.xi.size() + 1 == lattice.size() && rec.skipped.empty();
  return {complete && worst <= kTolerance, "max per-point error " + fmt(worst) + " (<= " + fmt(kTolerance) + ")"};
}

// 8. Gaussian q1 - q2, band limited to |xi| <= 4.
Outcome q_recovery() {
  constexpr double kTolerance = 0.15;
  const Domain d = build_ball_domain(1.0, 32);
  const Grid& g = d.grid();
  PotentialModel q;
  q.scalar_terms.push_back({Family::GaussianBump, {1.0, 0.0}, {0.1, 0.0, -0.1}, 0.3, {1.0, 0.0, 0.0}});
  ScatteringOptions o;
  o.h_sweep = {0.2, 0.1, 0.05};
  const QRecovery r = recover_q(sample_potentials(q, g), zero_potentials(g), 4.0, d, o);
  std::vector<cplx> exact;
  for (const Vec3& xi : r.xi) exact.push_back(q.q_hat(xi));
  const ScalarField ref = inverse_lattice_transform(r.xi, exact, g, lattice_step(g));
  const double err = norm_l2(r.field - ref) / norm_l2(ref);
  return {err <= kTolerance, "relative L2 " + fmt(err) + " over " + std::to_string(r.xi.size()) + " points (<= " +
                                 fmt(kTolerance) + ")"};
}

// 9. Tangential and normal boundary differences, probe normalization.
Outcome boundary_determination() {
  constexpr double kTolerance = 0.1;
  constexpr double kNormalization = 0.05;
  const Domain d = build_ball_domain(1.0, 32);
  const Vec3 x0 = normalized(Vec3{1.0, 2.0, 2.0});
  const Vec3 tau = normalized(cross(x0, Vec3{0.0, 0.0, 1.0}));
  const std::vector<double> sweep{8.0, 16.0, 32.0};
  constexpr double c = 1.0;
  auto run = [&](const Vec3& direction) {
    PotentialModel m1, m2;
    m1.vector_terms = {{Family::GaussianBump, {1.0, 0.0}, {0.2, 0.1, 0.3}, 0.4, {0.3, -0.2, 0.5}}};
    m1.scalar_terms = {{Family::GaussianBump, {2.0, 0.0}, {}, 0.4, {1.0, 0.0, 0.0}}};
    m2 = m1;
    m1.vector_terms.push_back({Family::LocalConstant, {c, 0.0}, x0, 0.6, complexify(direction)});
    return boundary_tangential_recovery(sample_potentials(m1, d.grid()), sample_potentials(m2, d.grid()), x0, tau,
                                        sweep, d);
  };
  const BoundaryRecovery t = run(tau);
  const BoundaryRecovery n = run(x0);
  const double tangential = std::abs(t.value_at_largest - c) / c;
  const double normal = std::abs(n.value_at_largest) / c;
  double normalization = 0.0;
  for (const BoundaryStep& s : t.steps)
    if (s.M == t.largest_resolved_M) normalization = std::abs(s.normalization - 0.5) / 0.5;
  return {tangential <= kTolerance && normal <= kTolerance && normalization <= kNormalization,
          "M=" + fmt(t.largest_resolved_M) + ": tangential error " + fmt(tangential) + ", normal " + fmt(normal) +
              " (<= " + fmt(kTolerance) + "), normalization error " + fmt(normalization) + " (<= " +
              fmt(kNormalization) + ")"};
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 10. Two verify runs with one seed give byte-identical CSV files.
Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "mslab_acceptance_determinism";
  fs::remove_all(root);
  std::vector<RunReport> reports;
  for (const char* dir : {"first", "second"}) {
    ScenarioConfig c = default_config(PipelineKind::Verify);
    c.seed = 20260101;
    c.output_dir = (root / dir).string();
    reports.push_back(run_pipeline(c));
  }
  std::vector<std::string> csv;
  for (const ArtifactEntry& a : reports[0].artifacts)
    if (fs::path(a.path).extension() == ".csv") csv.push_back(a.path);
  bool same = !csv.empty() && reports[0].passed() && reports[1].passed();
  for (const std::string& f : csv) same = same && read_file(root / "first" / f) == read_file(root / "second" / f);
  for (const ArtifactEntry& a : reports[1].artifacts)
    if (fs::path(a.path).extension() == ".csv") same = same && std::count(csv.begin(), csv.end(), a.path) == 1;
  return {same, std::to_string(csv.size()) + " CSV files compared, suites " +
                    (reports[0].passed() && reports[1].passed() ? "passed" : "failed")};
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "gauge invariance", 180.0, gauge_invariance},
      {2, "dbar inverse oracle", 60.0, dbar_oracle},
      {3, "CGO decay chain", 600.0, cgo_decay},
      {4, "Carleman ratio boundedness", 300.0, carleman},
      {5, "Eskin-Ralston equality", 300.0, eskin_ralston},
      {6, "curl recovery", 1200.0, curl_recovery},
      {7, "exact algebraic identity", 1.0, exact_identity},
      {8, "q recovery", 1200.0, q_recovery},
      {9, "boundary determination", 600.0, boundary_determination},
      {10, "determinism", 600.0, determinism},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    char* end = nullptr;
    const long id = std::strtol(argv[i], &end, 10);
    if (*end != '\0' || id < 1 || id > static_cast<long>(criteria().size())) {
      std::fprintf(stderr, "usage: %s [criterion 1-%zu ...]\n", argv[0], criteria().size());
      return 2;
    }
    selected.push_back(static_cast<int>(id));
  }
  if (selected.empty())
    for (const Criterion& c : criteria()) selected.push_back(c.id);

  int failures = 0;
  for (int id : selected) {
    const Criterion& c = criteria()[static_cast<std::size_t>(id - 1)];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = seconds <= c.budget_seconds;
    const bool passed = o.passed && in_budget;
    failures += passed ? 0 : 1;
    std::printf("criterion %d: %s %s: %s; %.2f s (budget %.0f s%s)\n", c.id, passed ? "PASS" : "FAIL", c.title,
                o.detail.c_str(), seconds, c.budget_seconds, in_budget ? "" : ", exceeded");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
