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
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "mslab/cgo.hpp"
#include "mslab/fields.hpp"
#include "mslab/forward.hpp"
#include "mslab/geometry.hpp"
#include "mslab/potentials.hpp"

namespace mslab {

struct IdentityValue {
  cplx value{};
  /// Relative residuals ||L u|| / ||u|| at nodes with six interior neighbours.
  double residual1 = 0.0;
  double residual2 = 0.0;
  /// Non-empty when a residual exceeds the threshold.
  std::string warning;
};

/// int_Omega i (A1 - A2).(u1 grad conj u2 - conj u2 grad u1)
///   + (A1.A1 - A2.A2 + q1 - q2) u1 conj u2,
/// for u1 solving L_{A1,q1} u1 = 0 and u2 solving L_{conj A2, conj q2} u2 = 0.
IdentityValue integral_identity_lhs(const PotentialPair& p1, const PotentialPair& p2, const ScalarField& u1,
                                    const ScalarField& u2, const Domain& domain,
                                    double residual_threshold = 1e-6);

/// Lattice xi = step * n, n integer, |xi| <= xi_max, ordered lexicographically in n.
std::vector<Vec3> xi_lattice(double step, double xi_max);
/// pi over twice the half-width of the grid box.
double lattice_step(const Grid& grid);

struct Frame {
  Vec3 mu1;
  Vec3 mu2;
};

/// Gram-Schmidt against xi of the two coordinate axes least aligned with xi
/// (ties broken by lower index), in both orders. The two frames span the same
/// plane with opposite orientation.
std::array<Frame, 2> lattice_frames(const Vec3& xi);

struct ScatteringSample {
  Vec3 xi{};
  Vec3 mu1{};
  Vec3 mu2{};
  /// Extrapolated (mu1 + i mu2).int W e^{i x.xi} e^{Phi1 + conj Phi2}.
  cplx value{};
  double h_used = 0.0;
  double extrapolation_error = 0.0;
  /// Per-h values along the sweep.
  std::vector<double> h_sweep;
  std::vector<cplx> values;
};

struct ScatteringOptions {
  std::vector<double> h_sweep{0.2, 0.1, 0.05};
  CgoOptions cgo{};
  /// Richardson extrapolation in h over the last two entries; otherwise the
  /// value at the smallest h is reported.
  bool extrapolate = true;
  /// Worker threads for lattice jobs.
  int threads = 1;
};

/// (v_min, estimate of the limit, error estimate) from a strictly decreasing
/// sweep, assuming error linear in the parameter.
struct Extrapolation {
  cplx last{};
  cplx limit{};
  double error = 0.0;
};
Extrapolation richardson(const std::vector<double>& params, const std::vector<cplx>& values);

/// (i / 2) h times the first integral of the identity, evaluated with CGO
/// solutions u1 for (A1, q1) and u2 for (conj A2, conj q2). The growth factors
/// are combined analytically into e^{i x.xi}.
ScatteringSample scattering_transform(const PotentialPair& p1, const PotentialPair& p2, const Vec3& xi,
                                      const Vec3& mu1, const Vec3& mu2, const Domain& domain,
                                      const ScatteringOptions& options = {});

/// Samples over a lattice, two frames per xi (xi = 0 is skipped).
std::vector<ScatteringSample> scattering_samples(const PotentialPair& p1, const PotentialPair& p2,
                                                 const std::vector<Vec3>& lattice, const Domain& domain,
                                                 const ScatteringOptions& options = {});

/// Exact samples (mu1 + i mu2).W^(xi) from closed-form transforms.
std::vector<ScatteringSample> analytic_samples(const PotentialModel& w, const std::vector<Vec3>& lattice);

/// (mu1 + i mu2).int W e^{i x.xi} e^{phi} and the same without e^{phi}, with
/// phi = N^{-1}(-i (mu1 + i mu2).W); grid quadrature over the whole box.
std::pair<cplx, cplx> eskin_ralston_check(const VectorField& w, const Vec3& xi, const Vec3& mu1, const Vec3& mu2,
                                          const CauchyOptions& options = {});

/// Per lattice point the values xi_j W_k - xi_k W_j ordered (1,2), (1,3), (2,3).
struct CurlSpectrum {
  std::vector<Vec3> xi;
  std::vector<std::array<cplx, 3>> values;
  /// Lattice points dropped for rank deficiency.
  std::vector<Vec3> skipped;
};

CurlSpectrum recover_curl(const std::vector<ScatteringSample>& samples);
/// Closed-form xi_j W_k - xi_k W_j on the lattice.
CurlSpectrum analytic_curl(const PotentialModel& w, const std::vector<Vec3>& lattice);
/// sqrt(sum |a - b|^2 / sum |b|^2) over matching lattice points.
double relative_l2(const CurlSpectrum& a, const CurlSpectrum& b);
/// sqrt(sum |a|^2) over the lattice.
double spectrum_norm(const CurlSpectrum& a);
/// dW on the grid from the spectrum, (1 / 2L)^3 sum -i (xi_j W_k - xi_k W_j) e^{-i x.xi}.
TwoForm curl_field(const CurlSpectrum& s, const Grid& grid, double step);

struct GaugeClosure {
  ScalarField psi;
  /// ||grad psi - W|| / ||W||.
  double residual = 0.0;
  /// ||curl W|| / ||DW||.
  double curl_ratio = 0.0;
};

/// Least-squares psi for grad psi = W with central differences and psi = 0 on
/// the grid faces: div grad psi = div W, diagonalized by DST-I.
/// Throws InvalidArgument when the curl ratio exceeds `curl_tolerance`.
GaugeClosure close_gauge(const VectorField& w, double curl_tolerance = 0.1);

struct QRecovery {
  std::vector<Vec3> xi;
  std::vector<cplx> transform;
  std::vector<double> extrapolation_error;
  /// Band-limited q1 - q2 on the grid.
  ScalarField field;
};

/// Samples of int (q1 - q2) u1 conj u2 over the lattice |xi| <= xi_max and
/// their inverse transform. Requires A1 = A2.
QRecovery recover_q(const PotentialPair& p1, const PotentialPair& p2, double xi_max, const Domain& domain,
                    const ScatteringOptions& options = {});

/// (1 / 2L)^3 sum f^(xi) e^{-i x.xi}.
ScalarField inverse_lattice_transform(const std::vector<Vec3>& lattice, const std::vector<cplx>& values,
                                      const Grid& grid, double step);

}  // namespace mslab
