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

#include <cstddef>
#include <functional>

#include "mslab/fields.hpp"
#include "mslab/types.hpp"

namespace mslab {

/// Orthonormal pair (a, b) spanning a lamina plane, zeta0 = a + i b.
struct LaminaFrame {
  Vec3 mu1{1.0, 0.0, 0.0};
  Vec3 mu2{0.0, 1.0, 0.0};
  CVec3 zeta0{1.0, kI, 0.0};

  /// zeta0 = mu1 + i mu2, or -mu1 + i mu2 when `flip_real` is set.
  static LaminaFrame make(const Vec3& mu1, const Vec3& mu2, bool flip_real = false);
  /// Frame with the given zeta0; Re and Im must be orthonormal.
  static LaminaFrame from_zeta(const CVec3& zeta0);

  Vec3 re() const { return real(zeta0); }
  Vec3 im() const { return imag(zeta0); }
  /// Unit normal re x im.
  Vec3 normal() const { return cross(re(), im()); }
};

struct ZetaPair {
  Vec3 xi{};
  LaminaFrame frame;
  double h = 0.1;
  CVec3 zeta1{};
  CVec3 zeta2{};
};

/// zeta1 = i h xi / 2 + mu1 + i sqrt(1 - h^2 |xi|^2 / 4) mu2,
/// zeta2 = -i h xi / 2 - mu1 + i sqrt(1 - h^2 |xi|^2 / 4) mu2.
ZetaPair make_zeta_pair(const Vec3& xi, const Vec3& mu1, const Vec3& mu2, double h);

struct CauchyOptions {
  double truncation_radius = 8.0;
  std::size_t plane_resolution = 256;
};

/// Phi = N^{-1} f, the solution of zeta0 . grad Phi = f given by
/// (1/2pi) int f(x - y1 Re zeta0 - y2 Im zeta0) / (y1 + i y2) dy. The plane
/// integral is a lattice sum with step 2 R_t / P computed by FFT convolution
/// slice by slice across the lamina; f is resampled tricubically.
/// Throws when supp f leaves the disc of radius R_t / 2 or when the plane
/// step exceeds twice the grid spacing.
ScalarField cauchy_inverse(const ScalarField& f, const CVec3& zeta0, const CauchyOptions& opt = {});
ScalarField cauchy_inverse(const ScalarField& f, const LaminaFrame& frame, const CauchyOptions& opt = {});

/// Direct polar quadrature of the same integral at one point,
/// (1/2pi) int_0^{2pi} int_0^{R_t} f(x - r e_theta) e^{-i theta} dr dtheta.
cplx cauchy_inverse_at(const std::function<cplx(const Vec3&)>& f, const CVec3& zeta0, const Vec3& x,
                       double truncation_radius, int radial_panels = 64, int angles = 128);

/// Phi# = N^{-1}(-i zeta0 . A#).
ScalarField transport_phase(const VectorField& a_sharp, const LaminaFrame& frame,
                            const CauchyOptions& opt = {});

/// N^{-1}_{mu1 + i mu2}(-i (mu1 + i mu2) . (A1 - A2)).
ScalarField phase_sum(const VectorField& a1, const VectorField& a2, const LaminaFrame& frame,
                      const CauchyOptions& opt = {});

/// zeta0 . grad Phi with grid central differences.
ScalarField directional_dbar(const ScalarField& phi, const CVec3& zeta0);

}  // namespace mslab
