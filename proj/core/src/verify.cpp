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

#include <algorithm>
#include <cmath>
#include <random>

#include "mslab/boundary.hpp"
#include "mslab/cgo.hpp"
#include "mslab/forward.hpp"
#include "mslab/recovery.hpp"
#include "run_context.hpp"

namespace mslab::detail {
namespace {

class BumpSource {
 public:
  explicit BumpSource(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  TermSpec bump(Family family, double reach) {
    TermSpec t;
    t.family = family;
    t.amplitude = {uniform(0.3, 1.0), uniform(-0.3, 0.3)};
    t.center = {uniform(-reach, reach), uniform(-reach, reach), uniform(-reach, reach)};
    t.width = uniform(0.25, 0.35);
    t.direction = {cplx(uniform(-1, 1), uniform(-0.5, 0.5)), cplx(uniform(-1, 1), uniform(-0.5, 0.5)),
                   cplx(uniform(-1, 1), uniform(-0.5, 0.5))};
    return t;
  }

 private:
  std::mt19937_64 rng_;
};

std::string fr(double v) { return format_real(v); }

void suite_gauge(RunContext& run, BumpSource& src, const Domain& d) {
  const ScenarioConfig& c = run.config();
  PotentialModel base;
  base.vector_terms.push_back(src.bump(Family::GaussianBump, 0.15));
  base.scalar_terms.push_back(src.bump(Family::GaussianBump, 0.15));
  base.scalar_terms.back().amplitude = {2.0 * base.scalar_terms.back().amplitude.real(), 0.0};
  PotentialModel partner = base;
  TermSpec g = src.bump(Family::GradientBump, 0.1);
  g.width = 0.2;
  g.amplitude = {0.8, 0.0};
  partner.vector_terms.push_back(g);
  PotentialModel curl = base;
  curl.vector_terms.push_back({Family::RotationBump, {3.0, 0.0}, {}, 0.35, {1.0, 0.0, 0.0}});

  CauchyDataMap a, b, m;
  run.step("gauge invariance", [&](StepReport& st) {
    SolverOptions so;
    so.seed = c.seed.value_or(1);
    a = cauchy_data_map(sample_potentials(base, d.grid()), d, 2, so);
    b = cauchy_data_map(sample_potentials(partner, d.grid()), d, 2, so);
    m = cauchy_data_map(sample_potentials(curl, d.grid()), d, 2, so);
    st.diagnostics = {{"gauge_pair", relative_frobenius(b, a)}, {"curl_pair", relative_frobenius(m, a)}};
  });
  const double gauge = relative_frobenius(b, a);
  run.check("gauge pair Cauchy maps agree", gauge, "<=", c.tolerances.gauge_frobenius);
  run.check("curl-mismatched pair exceeds 10x the gauge pair", relative_frobenius(m, a), ">", 10.0 * gauge);

  write_cauchy_map(run.path("verify_map_base.json"), a);
  write_cauchy_map(run.path("verify_map_gauge.json"), b);
  const CauchyDataMap back = read_cauchy_map(run.path("verify_map_base.json"));
  const bool exact = back.matrix == a.matrix && back.basis == a.basis && back.residuals == a.residuals;
  run.check("Cauchy map JSON round trip is exact", exact ? 0.0 : 1.0, "<=", 0.0);
}

void suite_dbar(RunContext& run, BumpSource& src, const Domain& coarse) {
  const Domain d = coarse.grid().dims[0] >= 64 ? coarse : build_ball_domain(coarse.radius(), 64);
  const Vec3 center{src.uniform(-0.1, 0.1), src.uniform(-0.1, 0.1), src.uniform(-0.1, 0.1)};
  const double width = 0.3;
  const ScalarField f = sample_scalar(d.grid(), [&](const Vec3& x) {
    const Vec3 y = x - center;
    return cplx(std::exp(-dot(y, y) / (2.0 * width * width)));
  });
  double worst = 0.0;
  run.step("dbar inverse", [&](StepReport& st) {
    for (const CVec3& z : {CVec3{1.0, kI, 0.0}, LaminaFrame::make(normalized(Vec3{1, 1, 0}), normalized(Vec3{-1, 1, 1})).zeta0}) {
      const ScalarField phi = cauchy_inverse(f, z, {8.0, 512});
      const ScalarField r = restrict_to(directional_dbar(phi, z) - f, d);
      worst = std::max(worst, norm_sup(r) / norm_sup(f));
    }
    st.diagnostics = {{"relative_residual", worst}};
  });
  run.check("dbar inverse residual", worst, "<=", run.config().tolerances.dbar_residual);
}

void suite_eskin_ralston(RunContext& run, BumpSource& src, const Domain& d) {
  double worst = 0.0;
  const double step = lattice_step(d.grid());
  run.step("Eskin-Ralston", [&](StepReport& st) {
    for (int k = 0; k < 3; ++k) {
      PotentialModel m;
      m.vector_terms.push_back(src.bump(Family::GaussianBump, 0.2));
      const VectorField w = sample_potentials(m, d.grid()).A;
      const Vec3 xi{step * std::round(src.uniform(-1.4, 1.4)), step * std::round(src.uniform(-1.4, 1.4)), step};
      for (const Frame& f : lattice_frames(xi)) {
        const auto [lhs, rhs] = eskin_ralston_check(w, xi, f.mu1, f.mu2);
        worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
      }
    }
    st.diagnostics = {{"max_relative_gap", worst}};
  });
  run.check("Eskin-Ralston relative gap", worst, "<=", run.config().tolerances.eskin_ralston);
}

void suite_exact_identity(RunContext& run, BumpSource& src, const Domain& d) {
  PotentialModel w;
  w.vector_terms.push_back(src.bump(Family::RotationBump, 0.1));
  w.vector_terms.push_back(src.bump(Family::GaussianBump, 0.1));
  const std::vector<Vec3> lattice = xi_lattice(lattice_step(d.grid()), 2.0);
  double worst = 0.0;
  run.step("exact curl identity", [&](StepReport& st) {
    const CurlSpectrum rec = recover_curl(analytic_samples(w, lattice));
    const CurlSpectrum ref = analytic_curl(w, rec.xi);
    for (std::size_t i = 0; i < rec.xi.size(); ++i) {
      double scale = 0.0, err = 0.0;
      for (int k = 0; k < 3; ++k) {
        scale = std::max(scale, std::abs(ref.values[i][k]));
        err = std::max(err, std::abs(rec.values[i][k] - ref.values[i][k]));
      }
      if (scale > 0.0) worst = std::max(worst, err / scale);
    }
    st.diagnostics = {{"max_relative_error", worst}, {"lattice_points", static_cast<double>(rec.xi.size())}};
  });
  run.check("curl from exact samples per lattice point", worst, "<=", run.config().tolerances.exact_identity);
}

void suite_carleman(RunContext& run, BumpSource& src, const Domain& d) {
  const ScenarioConfig& c = run.config();
  PotentialModel m;
  m.vector_terms.push_back(src.bump(Family::GaussianBump, 0.2));
  m.scalar_terms.push_back(src.bump(Family::GaussianBump, 0.2));
  const PotentialPair p = sample_potentials(m, d.grid());
  const auto family = carleman_test_family(d, 4, *c.seed);
  std::vector<double> lap, mag;
  CsvTable t({"h", "sup_ratio_laplacian", "sup_ratio_magnetic"});
  run.step("Carleman ratios", [&](StepReport&) {
    CarlemanProbe probe;
    probe.epsilon = c.epsilon;
    for (double h : {0.2, 0.1, 0.05}) {
      probe.h = h;
      double a = 0.0, b = 0.0;
      for (const auto& u : family) {
        a = std::max(a, carleman_ratio(probe, u, -1.0));
        b = std::max(b, carleman_ratio(probe, u, -1.0, p));
      }
      lap.push_back(a);
      mag.push_back(b);
      t.add_row({fr(h), fr(a), fr(b)});
    }
  });
  run.write("verify_carleman.csv", t);
  run.check("Carleman growth laplacian", lap[2] / lap[1], "<=", c.tolerances.carleman_growth);
  run.check("Carleman growth magnetic", mag[2] / mag[1], "<=", c.tolerances.carleman_growth);
}

void suite_cgo(RunContext& run, BumpSource& src, const Domain& d) {
  PotentialModel m;
  m.vector_terms.push_back(src.bump(Family::GaussianBump, 0.2));
  const PotentialPair p = sample_potentials(m, d.grid());
  double residual = 0.0;
  run.step("CGO solution", [&](StepReport& st) {
    const CgoFrequency f = cgo_side(make_zeta_pair({0.0, 0.0, 1.0}, {1, 0, 0}, {0, 1, 0}, 0.2), 1);
    const CgoSolution s = build_cgo(p, f, d);
    residual = s.diagnostics.equation_residual;
    run.write("verify_cgo_factor.msgrid", to_grid_file(s.factor()));
    const GridFile back = read_grid_file(run.path("verify_cgo_factor.msgrid"));
    st.diagnostics = {{"equation_residual", residual}, {"norm_r", s.diagnostics.norm_r}};
    run.check("binary grid round trip is exact",
              back.grid == d.grid() && back.components.size() == 1 && back.components[0] == s.factor().values ? 0.0 : 1.0,
              "<=", 0.0);
  });
  run.check("CGO equation residual", residual, "<=", run.config().tolerances.solve_residual);
}

void suite_gauge_closing(RunContext& run, BumpSource& src, const Domain& d) {
  PotentialModel m;
  TermSpec t = src.bump(Family::GaussianBump, 0.1);
  t.amplitude = {t.amplitude.real(), 0.0};
  m.scalar_terms.push_back(t);
  const ScalarField psi = sample_potentials(m, d.grid()).q;
  double residual = 0.0;
  run.step("gauge closing", [&](StepReport& st) {
    residual = close_gauge(gradient(psi)).residual;
    st.diagnostics = {{"residual", residual}};
  });
  run.check("gauge closing residual", residual, "<=", 1e-2);
}

void suite_probe(RunContext& run, const Domain& d) {
  const ScenarioConfig& c = run.config();
  CsvTable t({"M", "normalization", "l2_scaled"});
  double last = 0.0;
  run.step("probe normalization", [&](StepReport&) {
    for (double M : c.m_sweep) {
      const BoundaryProbe probe = make_boundary_probe(d, c.x0, c.tau, M);
      last = probe_normalization(probe);
      t.add_row({fr(M), fr(last), fr(probe_l2_scaled(probe))});
    }
  });
  run.write("verify_probe.csv", t);
  run.check("probe normalization at the largest M", std::abs(last - 0.5) / 0.5, "<=", c.tolerances.normalization);
}

}  // namespace

void run_verify(RunContext& run) {
  const ScenarioConfig& c = run.config();
  const Domain d = build_ball_domain(c.radius, c.grid);
  BumpSource src(*c.seed);
  suite_gauge(run, src, d);
  suite_dbar(run, src, d);
  suite_eskin_ralston(run, src, d);
  suite_exact_identity(run, src, d);
  suite_carleman(run, src, d);
  suite_cgo(run, src, d);
  suite_gauge_closing(run, src, d);
  suite_probe(run, d);
}

}  // namespace mslab::detail
