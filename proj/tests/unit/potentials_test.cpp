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
#include "mslab/potentials.hpp"

using namespace mslab;

namespace {

PotentialModel mixed_model() {
  PotentialModel m;
  m.vector_terms.push_back({Family::RotationBump, {0.7, 0.2}, {0.1, -0.05, 0.0}, 0.22, {}});
  m.vector_terms.push_back({Family::GradientBump, {0.3, 0.0}, {-0.1, 0.1, 0.05}, 0.2, {}});
  m.vector_terms.push_back({Family::GaussianBump, {0.0, 0.4}, {0.0, 0.0, 0.1}, 0.25, {0.0, 1.0, 0.5}});
  m.scalar_terms.push_back({Family::GaussianBump, {1.0, -0.5}, {0.05, 0.0, -0.1}, 0.2, {}});
  return m;
}

}  // namespace

TEST_CASE("family names round trip") {
  for (Family f : {Family::Zero, Family::Constant, Family::GaussianBump, Family::RotationBump,
                   Family::GradientBump, Family::LocalConstant})
    CHECK(parse_family(family_name(f)) == f);
  CHECK_THROWS_AS(parse_family("nope"), InvalidArgument);
}

TEST_CASE("jets agree with finite differences") {
  const PotentialModel m = mixed_model();
  PotentialModel lc_model;
  const PotentialModel& lc = lc_model;
  lc_model.vector_terms.push_back({Family::LocalConstant, 2.0, {0.9, 0.0, 0.0}, 0.4, {0.0, 1.0, 0.0}});
  const Vec3 x{0.12, -0.07, 0.2};
  const double e = 1e-4;
  for (const PotentialModel* model : {&m, &lc}) {
    const Vec3 y = model == &m ? x : Vec3{0.7, 0.15, 0.05};
    const auto a = model->A_jet(y);
    for (int c = 0; c < 3; ++c) {
      CHECK(std::abs(a[c].v - model->A(y)[c]) < 1e-14);
      cplx lap = 0.0;
      for (int d = 0; d < 3; ++d) {
        Vec3 ed{};
        ed[d] = e;
        const cplx fp = model->A(y + ed)[c], fm = model->A(y - ed)[c], f0 = model->A(y)[c];
        const double e1 = 1e-6;
        const cplx gd = (model->A(y + (e1 / e) * ed)[c] - model->A(y - (e1 / e) * ed)[c]) / (2.0 * e1);
        CHECK(std::abs(a[c].g[d] - gd) < 1e-6);
        lap += (fp - 2.0 * f0 + fm) / (e * e);
      }
      CHECK(std::abs(a[c].lap - lap) < 1e-3);
    }
  }
}

TEST_CASE("Fourier transforms match direct quadrature") {
  const PotentialModel m = mixed_model();
  const Grid g = make_cube_grid({0, 0, 0}, 1.6, 81);
  const Vec3 xi{1.3, -0.4, 2.1};
  CVec3 quad{};
  cplx qq = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 x = g.point(n);
    const cplx ph = std::exp(kI * dot(x, xi)) * g.cell_volume();
    quad += ph * m.A(x);
    qq += ph * m.q(x);
  }
  const CVec3 ah = m.A_hat(xi);
  for (int d = 0; d < 3; ++d) CHECK(std::abs(ah[d] - quad[d]) < 1e-8);
  CHECK(std::abs(m.q_hat(xi) - qq) < 1e-8);

  PotentialModel c;
  c.scalar_terms.push_back({Family::Constant, 1.0, {}, 0.1, {}});
  CHECK_THROWS_AS(c.q_hat(xi), InvalidArgument);
}

TEST_CASE("model algebra") {
  const PotentialModel m = mixed_model();
  const Vec3 x{0.1, 0.2, -0.1};
  const PotentialModel z = difference(m, m);
  CHECK(norm(z.A(x)) < 1e-15);
  CHECK(std::abs(z.q(x)) < 1e-15);
  const PotentialModel cm = m.conjugated();
  CHECK(std::abs(cm.q(x) - std::conj(m.q(x))) < 1e-15);
  CHECK(norm(cm.A(x) - conj(m.A(x))) < 1e-15);
  CHECK(m.has_magnetic());
  CHECK_FALSE(PotentialModel{}.has_magnetic());
  CHECK(std::abs(m.div_A(x) - (m.A_jet(x)[0].g[0] + m.A_jet(x)[1].g[1] + m.A_jet(x)[2].g[2])) == 0.0);
}
