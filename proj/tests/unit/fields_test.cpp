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
#include "mslab/fields.hpp"

using namespace mslab;

namespace {

cplx gaussian(const Vec3& x, double s) { return std::exp(-dot(x, x) / (2.0 * s * s)); }

}  // namespace

TEST_CASE("extension by cutoff") {
  const Domain d = build_ball_domain(1.0, 24);
  const Grid& g = d.grid();

  VectorField zero(g);
  CHECK(norm_sup(extend_by_cutoff(zero, d)) == 0.0);

  VectorField c = sample_vector(g, [](const Vec3&) { return CVec3{1.0, 2.0, -1.0}; });
  const VectorField ec = extend_by_cutoff(c, d);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double r = d.rho(g.point(n));
    if (r > 0.0) CHECK(std::abs(ec.comp[1][n] - 2.0) < 1e-14);
    if (r < -0.2) CHECK(std::abs(ec.comp[1][n]) == 0.0);
  }

  // garbage outside the domain must not leak into the extension
  VectorField s = sample_vector(g, [&](const Vec3& x) {
    if (d.rho(x) <= 0.0) return CVec3{100.0, 100.0, 100.0};
    return CVec3{std::sin(x[0]), x[1] * x[2], std::cos(x[0] + x[2])};
  });
  double interior_sup = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n)
    if (d.rho(g.point(n)) > 0.0) interior_sup = std::max(interior_sup, norm(s.at(n)));
  const VectorField es = extend_by_cutoff(s, d);
  CHECK(norm_sup(es) <= 1.01 * interior_sup);
}

TEST_CASE("cutoff profile") {
  CHECK(extension_cutoff(0.1, 1.0) == 1.0);
  CHECK(extension_cutoff(-0.25, 1.0) == 0.0);
  CHECK(extension_cutoff(-0.1, 1.0) == doctest::Approx(0.5));
  double prev = 1.0;
  for (int i = 1; i <= 20; ++i) {
    const double v = extension_cutoff(-0.01 * i, 1.0);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("mollify constant and contraction") {
  const Grid g = make_cube_grid({0, 0, 0}, 1.0, 33);
  ScalarField c(g, cplx(3.0, -1.0));
  const ScalarField mc = mollify(c, {0.2});
  // Away from the box edge the constant is reproduced.
  CHECK(std::abs(mc.at(16, 16, 16) - cplx(3.0, -1.0)) < 1e-12);
  CHECK(std::abs(mc.at(10, 20, 14) - cplx(3.0, -1.0)) < 1e-12);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField r(g);
  for (auto& v : r.values) v = cplx(u(rng), u(rng));
  CHECK(norm_sup(mollify(r, {0.15})) <= norm_sup(r) + 1e-12);

  CHECK_THROWS_AS(mollify(c, {0.05}), InvalidArgument);
}

TEST_CASE("mollify gaussian bump convergence") {
  const Grid g = make_cube_grid({0, 0, 0}, 0.6, 49);
  const ScalarField f = sample_scalar(g, [](const Vec3& x) { return gaussian(x, 0.12); });
  double prev_err = 1e300;
  double prev_grad_tau = -1.0;
  for (double tau : {0.2, 0.1, 0.05}) {
    const ScalarField m = mollify(f, {tau});
    const double err = norm_sup(m - f);
    CHECK(err < prev_err);
    prev_err = err;
    const double grad_tau = norm_sup(gradient(m)) * tau;
    if (prev_grad_tau > 0.0) CHECK(grad_tau <= 2.0 * prev_grad_tau);
    prev_grad_tau = grad_tau;
  }
}

TEST_CASE("gauge transform and curl") {
  const Domain d = build_ball_domain(1.0, 32);
  const Grid& g = d.grid();
  const VectorField a = sample_vector(g, [](const Vec3& x) {
    return CVec3{std::sin(x[1]) * gaussian(x, 0.5), x[0] * x[2] * gaussian(x, 0.4), cplx(0.0, x[1]) * gaussian(x, 0.6)};
  });
  const ScalarField zero(g);
  CHECK(norm_sup(gauge_transform(a, zero) - a) == 0.0);

  const ScalarField x1 = sample_scalar(g, [](const Vec3& x) { return x[0]; });
  const VectorField gx = gauge_transform(VectorField(g), extend_by_cutoff(x1, d));
  for (std::size_t n = 0; n < g.size(); ++n)
    if (d.rho(g.point(n)) > 0.1) CHECK(std::abs(gx.comp[0][n] - 1.0) < 1e-12);

  const ScalarField psi = sample_scalar(g, [](const Vec3& x) {
    return cplx(std::cos(2.0 * x[0] + x[1]), x[2] * x[2]) * gaussian(x, 0.35);
  });
  const TwoForm c0 = curl(a);
  const TwoForm c1 = curl(gauge_transform(a, psi));
  for (int p = 0; p < 3; ++p)
    for (std::size_t n = 0; n < g.size(); ++n) CHECK(std::abs(c0.comp[p][n] - c1.comp[p][n]) < 1e-8);
  CHECK(norm_sup(curl(gradient(psi))) < 1e-10);
}

TEST_CASE("curl of rotation field") {
  const Domain d = build_ball_domain(1.0, 32);
  const Grid& g = d.grid();
  const VectorField rot = sample_vector(g, [](const Vec3& x) { return CVec3{-x[1], x[0], 0.0}; });
  const TwoForm c = curl(extend_by_cutoff(rot, d));
  for (std::size_t n = 0; n < g.size(); ++n)
    if (d.rho(g.point(n)) > 0.1) {
      CHECK(std::abs(c.comp[0][n] - 2.0) < 1e-12);
      CHECK(std::abs(c.comp[1][n]) < 1e-12);
    }
}

TEST_CASE("curl matches a one-sided difference oracle") {
  double prev = 1e300;
  for (std::size_t res : {17, 33}) {
    const Grid g = make_cube_grid({0, 0, 0}, 1.0, res);
    auto fa = [](const Vec3& x) {
      return CVec3{std::sin(x[1] + 0.3 * x[2]), std::cos(x[0] * x[2]), cplx(x[0] * x[1], std::sin(x[0]))};
    };
    const VectorField a = sample_vector(g, fa);
    const TwoForm c = curl(a);
    const double hh = g.spacing[0];
    // Forward differences evaluated directly from the analytic field.
    double err = 0.0;
    constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Vec3 x = g.point(n);
      for (int p = 0; p < 3; ++p) {
        const int j = pairs[p][0], k = pairs[p][1];
        Vec3 ej{}, ek{};
        ej[j] = hh;
        ek[k] = hh;
        const cplx oracle = (fa(x + ej)[k] - fa(x)[k]) / hh - (fa(x + ek)[j] - fa(x)[j]) / hh;
        err = std::max(err, std::abs(c.comp[p][n] - oracle));
      }
    }
    CHECK(err < 2.0 * hh);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("semiclassical Sobolev norms") {
  const Grid g = make_cube_grid({0, 0, 0}, 1.5, 40);
  const ScalarField u = sample_scalar(g, [](const Vec3& x) {
    return cplx(1.0, 0.5 * x[0]) * gaussian(x - Vec3{0.1, 0, -0.2}, 0.3);
  });
  for (double h : {1.0, 0.3, 0.05}) CHECK(std::abs(norm_sobolev_scl(u, 0.0, h) - norm_l2(u)) < 1e-12);

  // Oracle: analytic gradient of the sampled function.
  const VectorField du = sample_vector(g, [](const Vec3& x) {
    const Vec3 y = x - Vec3{0.1, 0, -0.2};
    const cplx gval = gaussian(y, 0.3);
    const cplx amp(1.0, 0.5 * x[0]);
    CVec3 out{};
    for (int d = 0; d < 3; ++d) out[d] = -amp * y[d] / 0.09 * gval;
    out[0] += cplx(0.0, 0.5) * gval;
    return out;
  });
  const double h1 = norm_sobolev_scl(u, 1.0, 1.0);
  const double oracle = std::sqrt(std::pow(norm_l2(u), 2) + std::pow(norm_l2(du), 2));
  CHECK(std::abs(h1 - oracle) / oracle < 1e-2);

  double prev = 0.0;
  for (double s : {-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0}) {
    const double v = norm_sobolev_scl(u, s, 0.2);
    CHECK(v >= prev);
    prev = v;
  }

  // Single periodic mode: the box is periodic with period n * spacing.
  const Grid p = make_cube_grid({0, 0, 0}, 1.0, 16);
  const double period = 16 * p.spacing[0];
  const Vec3 k0{2.0 * kPi * 3.0 / period, -2.0 * kPi / period, 0.0};
  const ScalarField mode = sample_scalar(p, [&](const Vec3& x) { return std::exp(kI * dot(k0, x)); });
  const double h = 0.1;
  const double expected = norm_l2(mode) / std::sqrt(1.0 + h * h * dot(k0, k0));
  CHECK(std::abs(norm_sobolev_scl(mode, -1.0, h) - expected) < 1e-12);

  ScalarField bad(p);
  bad[3] = cplx(std::nan(""), 0.0);
  CHECK_THROWS_AS(norm_sobolev_scl(bad, 1.0, 0.1), InvalidArgument);
}

TEST_CASE("interpolation reproduces polynomials") {
  const Grid g = make_cube_grid({0, 0, 0}, 1.0, 21);
  auto f = [](const Vec3& x) { return cplx(x[0] * x[0] * x[1] - x[2], 2.0 * x[1] * x[2]); };
  const ScalarField s = sample_scalar(g, f);
  for (const Vec3& x : {Vec3{0.13, -0.27, 0.41}, Vec3{-0.5, 0.33, 0.01}}) {
    CHECK(std::abs(interpolate_cubic(s, x) - f(x)) < 1e-12);
    CHECK(std::abs(interpolate_linear(s, x) - f(x)) < 0.02);
  }
  CHECK(interpolate_cubic(s, {2.0, 0.0, 0.0}) == cplx(0.0));
}

TEST_CASE("Hardy diagnostic is stable under refinement") {
  // 20 smooth functions compactly supported in the unit ball.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  std::uniform_real_distribution<double> w(0.3, 0.5);
  double worst_ratio = 0.0;
  double sup_coarse = 0.0, sup_fine = 0.0;
  for (int t = 0; t < 20; ++t) {
    const double s = w(rng);
    Vec3 x0{c(rng), c(rng), c(rng)};
    x0 = ((0.9 - s) * std::abs(c(rng)) / std::max(norm(x0), 1e-12)) * x0;
    auto f = [&](const Vec3& x) { return cplx(mollifier_profile((1.0 / s) * (x - x0)), 0.0); };
    double r[2];
    int i = 0;
    for (std::size_t res : {32, 64}) {
      const Domain d = build_ball_domain(1.0, res);
      r[i++] = hardy_ratio(sample_scalar(d.grid(), f), d);
    }
    CHECK(std::isfinite(r[0]));
    sup_coarse = std::max(sup_coarse, r[0]);
    sup_fine = std::max(sup_fine, r[1]);
    worst_ratio = std::max(worst_ratio, std::max(r[0] / r[1], r[1] / r[0]));
  }
  CHECK(std::max(sup_coarse / sup_fine, sup_fine / sup_coarse) <= 2.0);
  CHECK(worst_ratio <= 2.0);
}
