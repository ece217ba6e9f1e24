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

#pragma once

#include <array>
#include <functional>
#include <vector>

#include "mslab/geometry.hpp"
#include "mslab/types.hpp"

namespace mslab {

/// Complex scalar grid function.
struct ScalarField {
  Grid grid;
  std::vector<cplx> values;
  /// True when the field is known to vanish near the box boundary.
  bool compact = false;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, cplx fill = 0.0) : grid(g), values(g.size(), fill) {}

  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t n) { return values[n]; }
  const cplx& operator[](std::size_t n) const { return values[n]; }
  cplx& at(std::size_t i, std::size_t j, std::size_t k) { return values[grid.index(i, j, k)]; }
  const cplx& at(std::size_t i, std::size_t j, std::size_t k) const {
    return values[grid.index(i, j, k)];
  }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(cplx s);
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(cplx s, ScalarField a);
/// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);
ScalarField conj(const ScalarField& a);

/// Complex vector grid function, stored component-wise.
struct VectorField {
  Grid grid;
  std::array<std::vector<cplx>, 3> comp;
  bool compact = false;

  VectorField() = default;
  explicit VectorField(const Grid& g);

  std::size_t size() const { return grid.size(); }
  CVec3 at(std::size_t n) const { return {comp[0][n], comp[1][n], comp[2][n]}; }
  void set(std::size_t n, const CVec3& v) {
    for (int d = 0; d < 3; ++d) comp[d][n] = v[d];
  }
  ScalarField component(int d) const;

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(cplx s, VectorField a);
VectorField conj(const VectorField& a);
/// Bilinear contraction c·A, node by node.
ScalarField contract(const CVec3& c, const VectorField& a);

/// Two-form with components ordered (1,2), (1,3), (2,3).
struct TwoForm {
  Grid grid;
  std::array<std::vector<cplx>, 3> comp;

  TwoForm() = default;
  explicit TwoForm(const Grid& g);
};

struct MollifierSpec {
  double tau = 0.1;
};

ScalarField sample_scalar(const Grid& grid, const std::function<cplx(const Vec3&)>& fn);
VectorField sample_vector(const Grid& grid, const std::function<CVec3(const Vec3&)>& fn);

/// Zero outside the domain (rho <= 0).
ScalarField restrict_to(const ScalarField& f, const Domain& domain);

/// Layered nearest-neighbour fill of exterior nodes from interior values,
/// times a smooth cutoff that is 1 on the domain and 0 once rho < -0.2 R.
VectorField extend_by_cutoff(const VectorField& field, const Domain& domain);
ScalarField extend_by_cutoff(const ScalarField& field, const Domain& domain);
/// The cutoff itself as a function of rho and the domain scale R.
double extension_cutoff(double rho, double scale);

/// Unit-mass bump exp(-1/(1-|x|^2)) on |x| < 1, unnormalized.
double mollifier_profile(const Vec3& x);
/// Convolution with the discretized, unit-sum kernel Psi_tau. Throws when
/// tau spans fewer than 2 grid cells.
ScalarField mollify(const ScalarField& field, const MollifierSpec& spec);
VectorField mollify(const VectorField& field, const MollifierSpec& spec);

/// Second-order central difference along `axis`, one-sided (second order)
/// on the first and last planes.
ScalarField partial(const ScalarField& f, int axis);
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& a);
ScalarField laplacian(const ScalarField& f);
TwoForm curl(const VectorField& a);
/// A + grad psi with the same stencils as curl.
VectorField gauge_transform(const VectorField& a, const ScalarField& psi);

/// ||<hD>^s u||_{L^2} via the discrete Fourier transform of u zero-padded
/// by `padding` per axis (1 = periodic box).
double norm_sobolev_scl(const ScalarField& u, double s, double h, int padding = 1);

double norm_l2(const ScalarField& u);
double norm_l2(const VectorField& a);
double norm_l2(const TwoForm& w);
double norm_sup(const ScalarField& u);
double norm_sup(const VectorField& a);
double norm_sup(const TwoForm& w);

/// Tricubic (Catmull-Rom) interpolation; zero outside the grid.
cplx interpolate_cubic(const ScalarField& f, const Vec3& x);
/// Trilinear interpolation; zero outside the grid.
cplx interpolate_linear(const ScalarField& f, const Vec3& x);

/// ||f / delta||_{L^2(Omega)} / ||grad f||_{L^2(Omega)} over interior nodes.
double hardy_ratio(const ScalarField& f, const Domain& domain);

}  // namespace mslab
