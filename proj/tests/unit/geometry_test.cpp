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

#include "doctest.h"
#include "mslab/geometry.hpp"

using namespace mslab;

TEST_CASE("ball domain basics") {
  const Domain d = build_ball_domain(1.0, 32);
  CHECK(d.rho({0, 0, 0}) == doctest::Approx(1.0));
  CHECK(norm(d.grad_rho({0.3, -0.2, 0.1})) == doctest::Approx(1.0));
  CHECK(std::abs(d.rho({1, 0, 0})) < 1e-15);
  const Vec3 nu = d.outward_normal({1, 0, 0});
  CHECK(nu[0] == doctest::Approx(1.0));
  CHECK(std::abs(nu[1]) < 1e-15);

  // two-cell margin around the bounding box
  const Grid& g = d.grid();
  CHECK(g.upper()[0] - 1.0 >= 2.0 * g.spacing[0] - 1e-12);
  CHECK(g.upper()[0] >= 1.25 - 1e-12);
}

TEST_CASE("ball domain rejects bad input") {
  CHECK_THROWS_AS(build_ball_domain(0.0, 32), InvalidArgument);
  CHECK_THROWS_AS(build_ball_domain(-1.0, 32), InvalidArgument);
  CHECK_THROWS_AS(build_ball_domain(1.0, 7), InvalidArgument);
}

TEST_CASE("voxel volume of a small ball") {
  const Domain d = build_ball_domain(0.5, 16);
  const double exact = 4.0 / 3.0 * kPi * 0.125;
  CHECK(std::abs(voxel_volume(d) - exact) / exact < 0.05);
}

TEST_CASE("volume weights integrate the ball") {
  const Domain d = build_ball_domain(1.0, 32);
  const auto w = volume_weights(d);
  double sum = 0.0;
  for (double x : w) sum += x;
  CHECK(std::abs(sum - d.volume()) / d.volume() < 2e-3);
}

TEST_CASE("sphere quadrature") {
  const Domain d = build_ball_domain(1.0, 16);
  const BoundaryMesh m8 = boundary_quadrature(d, 8);
  double area = 0.0, nu1 = 0.0, x1sq = 0.0;
  for (std::size_t i = 0; i < m8.nodes.size(); ++i) {
    area += m8.weights[i];
    nu1 += m8.weights[i] * m8.normals[i][0];
    x1sq += m8.weights[i] * m8.nodes[i][0] * m8.nodes[i][0];
  }
  CHECK(std::abs(area - 4.0 * kPi) < 1e-6);
  CHECK(std::abs(nu1) < 1e-10);
  // Oracle: x1^2 = 1/3 + (2/3) P2-type harmonic; the harmonic part integrates to 0.
  CHECK(std::abs(x1sq - 4.0 * kPi / 3.0) < 1e-6);
}

TEST_CASE("sphere quadrature exactness for polynomials") {
  const Domain d = build_ball_domain(1.0, 16);
  const BoundaryMesh m = boundary_quadrature(d, 16);
  // Integral of x1^a x2^b x3^c over S^2 for even exponents:
  // 2 G(b1) G(b2) G(b3) / G(b1 + b2 + b3), b = (e + 1) / 2.
  auto exact = [](int a, int b, int c) {
    if (a % 2 || b % 2 || c % 2) return 0.0;
    const double b1 = 0.5 * (a + 1), b2 = 0.5 * (b + 1), b3 = 0.5 * (c + 1);
    return 2.0 * std::tgamma(b1) * std::tgamma(b2) * std::tgamma(b3) / std::tgamma(b1 + b2 + b3);
  };
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 6 - a; ++b)
      for (int c = 0; c <= 6 - a - b; ++c) {
        double q = 0.0;
        for (std::size_t i = 0; i < m.nodes.size(); ++i)
          q += m.weights[i] * std::pow(m.nodes[i][0], a) * std::pow(m.nodes[i][1], b) *
               std::pow(m.nodes[i][2], c);
        CHECK(std::abs(q - exact(a, b, c)) < 1e-8);
      }
}

TEST_CASE("boundary nodes satisfy rho = 0 and grad rho = -nu") {
  const Domain d = build_ball_domain(1.0, 16);
  const BoundaryMesh m = boundary_quadrature(d);
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    CHECK(std::abs(d.rho(m.nodes[i])) < 1e-10);
    CHECK(std::abs(norm(m.normals[i]) - 1.0) < 1e-12);
    const Vec3 g = normalized(d.grad_rho(m.nodes[i]));
    CHECK(norm(g + m.normals[i]) < 1e-8);
  }
}

TEST_CASE("box quadrature and distance") {
  const Grid g = make_cube_grid({0, 0, 0}, 1.5, 16);
  const Domain box = Domain::box({-1, -0.5, -0.8}, {1, 0.5, 0.8}, g);
  const BoundaryMesh m = boundary_quadrature(box, 24);
  double area = 0.0;
  for (double w : m.weights) area += w;
  CHECK(std::abs(area - box.surface_area()) < 1e-10);

  // Min-over-nodes oracle. Nodes on each face have spacing well below 0.15.
  const Vec3 p{0.3, 0.1, -0.2};
  double brute = 1e300;
  for (const auto& b : m.nodes) brute = std::min(brute, norm(p - b));
  const double delta = distance_to_boundary(box, p);
  CHECK(delta <= brute + 1e-12);
  CHECK(brute - delta < 0.15);
}

TEST_CASE("distance to boundary on the ball") {
  const Domain d = build_ball_domain(1.0, 16);
  CHECK(distance_to_boundary(d, {0, 0, 0}) == doctest::Approx(1.0));
  CHECK(distance_to_boundary(d, {0.5, 0, 0}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(distance_to_boundary(d, {1.2, 0, 0}), InvalidArgument);
  const BoundaryMesh m = boundary_quadrature(d, 8);
  const Vec3 p{0.2, -0.3, 0.4};
  const double delta = distance_to_boundary(d, p);
  for (const auto& b : m.nodes) CHECK(delta <= norm(p - b) + 1e-12);
}

TEST_CASE("boundary crossing") {
  const Domain d = build_ball_domain(1.0, 16);
  const double t = d.boundary_crossing({0.5, 0, 0}, {1.5, 0, 0});
  CHECK(t == doctest::Approx(0.5));
  const Domain s = Domain::shell({0, 0, 0}, 0.5, 1.0, d.grid());
  CHECK(s.boundary_crossing({0.75, 0, 0}, {0.25, 0, 0}) == doctest::Approx(0.5));
  CHECK(s.outward_normal({0.5, 0, 0})[0] == doctest::Approx(-1.0));
}

TEST_CASE("gauss legendre") {
  const auto [x, w] = gauss_legendre(5);
  double s = 0.0, s4 = 0.0;
  for (int i = 0; i < 5; ++i) {
    s += w[i];
    s4 += w[i] * std::pow(x[i], 8);
  }
  CHECK(s == doctest::Approx(2.0));
  CHECK(s4 == doctest::Approx(2.0 / 9.0));
}
