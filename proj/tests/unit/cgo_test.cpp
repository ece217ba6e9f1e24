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
#include <random>

#include "doctest.h"
#include "mslab/cgo.hpp"
#include "mslab/forward.hpp"

using namespace mslab;

namespace {

PotentialModel bump_model(double qa = 1.0) {
  PotentialModel m;
  m.vector_terms.push_back({Family::GaussianBump, {1.0, 0.0}, {0.1, 0.0, 0.0}, 0.3, {0.3, 0.6, -0.4}});
  m.scalar_terms.push_back({Family::GaussianBump, {qa, 0.0}, {0.0, 0.1, 0.0}, 0.3, {1, 0, 0}});
  return m;
}

const CVec3 kPlane{1.0, kI, 0.0};

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (const auto& v : f.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("scheme names") {
  CHECK(parse_scheme("expansion") == ConjugationScheme::Expansion);
  CHECK(parse_scheme(scheme_name(ConjugationScheme::DiscreteSimilarity)) == ConjugationScheme::DiscreteSimilarity);
  CHECK_THROWS_AS(parse_scheme("fourier"), InvalidArgument);
}

TEST_CASE("frequency sides") {
  const ZetaPair z = make_zeta_pair({0, 0, 1.0}, {1, 0, 0}, {0, 1, 0}, 0.2);
  const CgoFrequency f1 = cgo_side(z, 1), f2 = cgo_side(z, 2);
  CHECK(std::abs(dot(f1.zeta, f1.zeta)) < 1e-14);
  CHECK(std::abs(dot(f2.zeta, f2.zeta)) < 1e-14);
  CHECK(norm(f1.zeta1()) < 0.2);
  CHECK(norm(f2.zeta1()) < 0.2);
  CHECK(std::abs(f2.zeta0()[0] + 1.0) < 1e-15);
  CHECK_THROWS_AS(cgo_side(z, 3), InvalidArgument);
}

TEST_CASE("conjugated operator on constants and plane waves") {
  const Domain dom = build_ball_domain(1.0, 32);
  const Grid& g = dom.grid();
  const PotentialPair p = zero_potentials(g);
  const ScalarField one = sample_scalar(g, [](const Vec3&) { return cplx(1.0); });
  CHECK(max_abs(conjugated_apply(p, one, kPlane, 0.3)) < 1e-12);

  const Vec3 xi0{1.0, -0.5, 0.8};
  const double h = 0.3;
  const cplx symbol = h * h * dot(xi0, xi0) - 2.0 * kI * h * dot(kPlane, complexify(xi0));
  const ScalarField w = sample_scalar(g, [&](const Vec3& x) { return std::exp(kI * dot(xi0, x)); });
  const ScalarField pw = conjugated_apply(p, w, kPlane, h);
  double err = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n)
    if (dom.contains(g.point(n))) err = std::max(err, std::abs(pw[n] - symbol * w[n]));
  CHECK(err < 1e-2 * std::abs(symbol));

  const PotentialModel zero;
  for (const Vec3& x : {Vec3{0.1, 0.2, -0.3}, Vec3{-0.5, 0.0, 0.4}}) {
    const auto xj = coordinates(x);
    const Jet wj = exp(kI * (xi0[0] * xj[0] + xi0[1] * xj[1] + xi0[2] * xj[2]));
    CHECK(std::abs(conjugated_apply_at(zero, wj, kPlane, h, x) - symbol * wj.v) < 1e-12);
  }
}

namespace {

Jet random_field(std::mt19937_64& rng, const std::array<Jet, 3>& x) {
  std::normal_distribution<double> nd;
  Jet out;
  for (int t = 0; t < 2; ++t) {
    const cplx amp(nd(rng), nd(rng));
    const double b0 = 0.3 * nd(rng), b1 = 0.3 * nd(rng), b2 = 0.3 * nd(rng);
    const double c0 = nd(rng), c1 = nd(rng), c2 = nd(rng), ph = nd(rng);
    out = out + amp * exp(b0 * x[0] + b1 * x[1] + b2 * x[2]) * sin(c0 * x[0] + c1 * x[1] + c2 * x[2] + Jet(ph));
  }
  return out;
}

// e^{-x.zeta/h} h^2 L (e^{x.zeta/h} w) by jets of the full product.
cplx explicit_conjugation(const PotentialModel& m, const Jet& w, const std::array<Jet, 3>& x, const CVec3& zeta,
                          double h, const Vec3& p) {
  const Jet e = exp((zeta[0] / h) * x[0] + (zeta[1] / h) * x[1] + (zeta[2] / h) * x[2]);
  const Jet u = e * w;
  const auto a = m.A_jet(p);
  cplx div = 0.0, adu = 0.0, aa = 0.0;
  for (int d = 0; d < 3; ++d) {
    div += a[d].g[d];
    adu += a[d].v * u.g[d];
    aa += a[d].v * a[d].v;
  }
  const cplx lu = -u.lap - 2.0 * kI * adu - kI * div * u.v + (aa + m.q(p)) * u.v;
  return h * h * lu / e.v;
}

}  // namespace

TEST_CASE("expansion matches explicit conjugation") {
  const PotentialModel m = bump_model(1.5);
  const ZetaPair z = make_zeta_pair({0.5, 0.0, 1.0}, {0, 1, 0}, normalized(Vec3{1.0, 0.0, -0.5}), 0.5);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-0.7, 0.7);
  for (int k = 0; k < 10; ++k) {
    const Vec3 p{uni(rng), uni(rng), uni(rng)};
    const auto x = coordinates(p);
    const Jet w = random_field(rng, x);
    for (int side = 1; side <= 2; ++side) {
      const CVec3 zeta = cgo_side(z, side).zeta;
      const cplx fast = conjugated_apply_at(m, w, zeta, 0.5, p);
      const cplx slow = explicit_conjugation(m, w, x, zeta, 0.5, p);
      CHECK(std::abs(fast - slow) <= 1e-8 * std::max(1.0, std::abs(slow)));
    }
  }
}

TEST_CASE("similarity scheme matches explicit grid conjugation") {
  const Grid g = make_cube_grid({0, 0, 0}, 1.25, 24);
  const Domain box = Domain::box({-1.1, -1.1, -1.1}, {1.1, 1.1, 1.1}, g);
  const PotentialPair p = sample_potentials(bump_model(1.5), g);
  const DiscreteOperator op(p, box);
  const double h = 0.5;
  const CVec3 zeta = cgo_side(make_zeta_pair({0, 0, 1.0}, {1, 0, 0}, {0, 1, 0}, h), 1).zeta;
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    std::normal_distribution<double> nd;
    const Vec3 c{nd(rng), nd(rng), nd(rng)};
    const cplx amp(nd(rng), nd(rng));
    const ScalarField w = sample_scalar(g, [&](const Vec3& x) { return amp * std::sin(dot(c, x) + 0.3) + x[0] * x[1]; });
    ScalarField u(g);
    for (std::size_t n = 0; n < g.size(); ++n) u[n] = std::exp(dot(g.point(n), zeta) / h) * w[n];
    const ScalarField lu = op.apply_grid(u);
    const ScalarField fast = conjugated_apply(p, w, zeta, h, ConjugationScheme::DiscreteSimilarity);
    double num = 0.0, den = 0.0;
    for (std::size_t n : op.interior()) {
      const cplx slow = h * h * lu[n] / std::exp(dot(g.point(n), zeta) / h);
      num = std::max(num, std::abs(fast[n] - slow));
      den = std::max(den, std::abs(slow));
    }
    CHECK(num <= 1e-8 * den);
  }
}

TEST_CASE("right side of the remainder equation") {
  const Domain dom = build_ball_domain(1.0, 32);
  const Grid& g = dom.grid();
  const CgoFrequency f = cgo_side(make_zeta_pair({0, 0, 1.0}, {1, 0, 0}, {0, 1, 0}, 0.2), 1);
  const PotentialPair zero = zero_potentials(g);
  const ScalarField one = sample_scalar(g, [](const Vec3&) { return cplx(1.0); });
  CHECK(max_abs(cgo_rhs(zero, one, f, VectorField(g))) < 1e-14);

  const PotentialPair p = sample_potentials(bump_model(), g);
  const VectorField sharp = sharp_potential(p.A, dom, f.h, 0.25);
  const ScalarField phase = transport_phase(sharp, f.frame);
  ScalarField a(g);
  for (std::size_t n = 0; n < g.size(); ++n) a[n] = std::exp(phase[n]);
  const ScalarField rhs = cgo_rhs(p, a, f, sharp);
  const ScalarField expect = transport_terms(a, sharp, f.zeta0(), f.h) - conjugated_apply(p, a, f.zeta, f.h);
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    num = std::max(num, std::abs(rhs[n] - expect[n]));
    den = std::max(den, std::abs(rhs[n]));
  }
  CHECK(num <= 1e-8 * den);
}

TEST_CASE("zero right side gives zero remainder") {
  const Domain dom = build_ball_domain(1.0, 24);
  const CgoFrequency f = plain_frequency(kPlane, 0.2);
  const RemainderResult r = solve_remainder(sample_potentials(bump_model(), dom.grid()), ScalarField(dom.grid()), f, dom);
  CHECK(max_abs(r.r) == 0.0);
  CHECK(r.norm_h1 == 0.0);
}

TEST_CASE("harmonic exponential needs no correction") {
  const Domain dom = build_ball_domain(1.0, 24);
  const Grid& g = dom.grid();
  for (double h : {0.4, 0.1}) {
    const CgoSolution s = build_cgo(zero_potentials(g), plain_frequency(kPlane, h), dom);
    CHECK(max_abs(s.amplitude - sample_scalar(g, [](const Vec3&) { return cplx(1.0); })) < 1e-12);
    CHECK(max_abs(s.remainder) < 1e-12);
    const ScalarField u = s.u();
    for (std::size_t n = 0; n < g.size(); n += 97) {
      const cplx e = std::exp(dot(g.point(n), kPlane) / h);
      CHECK(std::abs(u[n] - e) <= 1e-12 * std::abs(e));
    }
  }
}

TEST_CASE("assembled solution solves the forward equation") {
  const Domain dom = build_ball_domain(1.0, 32);
  const Grid& g = dom.grid();
  const PotentialPair p = sample_potentials(bump_model(), g);
  CgoOptions opt;
  opt.remainder.scheme = ConjugationScheme::DiscreteSimilarity;
  const CgoFrequency f = cgo_side(make_zeta_pair({0, 0, 1.0}, {1, 0, 0}, {0, 1, 0}, 0.2), 1);
  const CgoSolution s = build_cgo(p, f, dom, opt);
  CHECK(s.diagnostics.solve_residual <= 1e-9);
  const ScalarField u = s.u();
  const DiscreteOperator op(p, dom);
  const ScalarField lu = op.apply_grid(u);
  double num = 0.0, den = 0.0;
  for (std::size_t n : op.interior()) {
    num += std::norm(lu[n]);
    den += std::norm(u[n]);
  }
  CHECK(std::sqrt(num / den) <= 1e-6);
}

TEST_CASE("decay chain over h") {
  const Domain dom = build_ball_domain(1.0, 32);
  const PotentialPair p = sample_potentials(bump_model(), dom.grid());
  std::vector<double> g_over_h, r, phase_err;
  const VectorField ext = extend_by_cutoff(p.A, dom);
  for (double h : {0.4, 0.2, 0.1, 0.05}) {
    const CgoFrequency f = cgo_side(make_zeta_pair({0, 0, 1.0}, {1, 0, 0}, {0, 1, 0}, h), 1);
    const CgoSolution s = build_cgo(p, f, dom);
    g_over_h.push_back(s.diagnostics.norm_g / h);
    r.push_back(s.diagnostics.norm_r);
    CHECK(s.diagnostics.equation_residual < 1e-8);
    const ScalarField phi = transport_phase(ext, f.frame);
    double e = 0.0;
    for (std::size_t n = 0; n < phi.size(); ++n)
      if (dom.contains(dom.grid().point(n))) e = std::max(e, std::abs(s.phase[n] - phi[n]));
    phase_err.push_back(e);
  }
  for (std::size_t k = 1; k < r.size(); ++k) {
    CHECK(g_over_h[k] < g_over_h[k - 1]);
    CHECK(r[k] < r[k - 1]);
    CHECK(phase_err[k] < phase_err[k - 1]);
  }
  CHECK(r.back() <= 0.5 * r.front());
}

TEST_CASE("remainder constant cap") {
  const Domain dom = build_ball_domain(1.0, 24);
  CgoOptions opt;
  opt.remainder.constant_cap = 1e-6;
  const CgoFrequency f = cgo_side(make_zeta_pair({0, 0, 1.0}, {1, 0, 0}, {0, 1, 0}, 0.2), 1);
  CHECK_THROWS_AS(build_cgo(sample_potentials(bump_model(), dom.grid()), f, dom, opt), NumericalError);
}

TEST_CASE("exponent guard") {
  const Domain dom = build_ball_domain(1.0, 16);
  CHECK_THROWS_AS(check_exponent_range(dom.grid(), kPlane, 1e-3), NumericalError);
  CHECK_NOTHROW(check_exponent_range(dom.grid(), kPlane, 0.05));
  CHECK_THROWS_AS(build_cgo(zero_potentials(dom.grid()), plain_frequency(kPlane, 1e-3), dom), NumericalError);
}

namespace {

double cross_residual(const PotentialPair& p, const CgoSolution& c, const Domain& dom) {
  const ScalarField w = c.factor();
  const ScalarField full = conjugated_apply(p, w, c.frequency.zeta, c.h(), ConjugationScheme::DiscreteSimilarity);
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n)
    if (dom.contains(dom.grid().point(n))) {
      num += std::norm(full[n]);
      den += std::norm(w[n]);
    }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("gauge covariance of the construction") {
  const Domain dom = build_ball_domain(1.0, 32);
  PotentialModel m;
  m.vector_terms.push_back(bump_model().vector_terms[0]);
  PotentialModel mg = m;
  mg.vector_terms.push_back({Family::GradientBump, {0.5, 0.0}, {0.0, 0.1, 0.0}, 0.2, {1, 0, 0}});
  const PotentialPair pa = sample_potentials(m, dom.grid()), pb = sample_potentials(mg, dom.grid());
  for (double h : {0.4, 0.2}) {
    const CgoFrequency f = cgo_side(make_zeta_pair({0, 0, 1.0}, {1, 0, 0}, {0, 1, 0}, h), 1);
    const double ra = cross_residual(pa, build_cgo(pa, f, dom), dom);
    const double rb = cross_residual(pb, build_cgo(pb, f, dom), dom);
    CHECK(rb <= 2.0 * ra);
    CHECK(ra <= 2.0 * rb);
  }
}

TEST_CASE("carleman ratios stay bounded") {
  const Domain dom = build_ball_domain(1.0, 32);
  const PotentialPair p = sample_potentials(bump_model(2.0), dom.grid());
  const auto family = carleman_test_family(dom, 6, 3);
  CHECK(family.size() == 6);
  CarlemanProbe probe;
  probe.h = 0.1;
  CHECK(carleman_ratio(probe, ScalarField(dom.grid()), -1.0) == 0.0);
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
  for (std::size_t k = 1; k < lap.size(); ++k) {
    CHECK(lap[k] < 2.0 * lap[k - 1]);
    CHECK(mag[k] < 2.0 * mag[k - 1]);
  }
  CHECK(std::abs(probe.phi_eps({0.5, 0, 0}) - (0.5 + 0.05 / 0.5 * 0.25)) < 1e-15);
}
