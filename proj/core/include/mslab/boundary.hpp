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
#include <vector>

#include "mslab/fields.hpp"
#include "mslab/forward.hpp"
#include "mslab/geometry.hpp"
#include "mslab/potentials.hpp"

namespace mslab {

/// Concentrated oscillating quasi-solution v0 = eta_M e^{N(i tau.x - rho)} at
/// a boundary point of a ball, with eta_M(x) = C b(M |x - x0|),
/// b(r) = exp(-1/(1 - r^2)) and C fixing int_{R^2} eta(x', 0)^2 dx' = 1.
/// N solves M^{-1} w(M^{-1}) = N^{-1} for the domain's modulus of continuity w.
struct BoundaryProbe {
  Vec3 x0{};
  Vec3 tau{};
  /// Outward unit normal at x0.
  Vec3 normal{};
  Vec3 center{};
  double radius = 1.0;
  double M = 8.0;
  double N = 64.0;
  double eta_constant = 1.0;

  double eta(const Vec3& x) const;
  double rho(const Vec3& x) const { return radius - norm(x - center); }
  cplx v0(const Vec3& x) const;
};

/// Throws InvalidArgument for non-ball domains, x0 off the boundary, tau not
/// a unit tangent, or a support radius 1/M above a quarter of the radius.
BoundaryProbe make_boundary_probe(const Domain& domain, const Vec3& x0, const Vec3& tau, double M);

/// Values, gradient and Laplacian of v0 at x.
struct ProbeJet {
  cplx value{};
  CVec3 grad{};
  cplx laplacian{};
};
ProbeJet probe_jet(const BoundaryProbe& probe, const Vec3& x);

/// M^{n-1} N int_Omega e^{-2 N rho} eta_M^2 dx, quadrature in the chart
/// (s, t) = (gnomonic tangent coordinates, rho).
double probe_normalization(const BoundaryProbe& probe);
/// ||v0||_{L^2(Omega)} M^{(n-1)/2} N^{1/2}.
double probe_l2_scaled(const BoundaryProbe& probe);
/// 2 N M^{n-1} int (tau.W) eta_M^2 e^{-2 N rho} dx with W interpolated from the grid.
cplx probe_main_term(const BoundaryProbe& probe, const VectorField& w);

/// A + grad psi with psi = rho (A.n) chi(rho), n = -grad rho, chi a cutoff
/// that is 1 for rho < R / 4 and 0 for rho > R / 2. Then psi = 0 and
/// (A + grad psi).nu = 0 on the boundary, up to differencing error.
PotentialPair normal_gauge(const PotentialPair& p, const Domain& domain);

struct BoundaryOptions {
  double points_per_wavelength = 4.0;
  double points_per_decay = 2.0;
  /// Patches above this node count are reported as unresolved.
  std::size_t max_patch_nodes = 150000;
  bool normalize_gauge = true;
  SolverOptions solver{};
};

struct BoundaryStep {
  double M = 0.0;
  double N = 0.0;
  bool resolved = false;
  std::size_t patch_nodes = 0;
  /// Closed-form term 2 N M^{n-1} int (tau.W) |v0|^2.
  cplx main{};
  /// Terms carrying the corrections w_j = u_j - v0, from the patch solve.
  cplx coupled{};
  cplx total{};
  double normalization = 0.0;
  double l2_scaled = 0.0;
  /// max_j ||w_j|| / ||v0|| over the patch.
  double correction_ratio = 0.0;
};

struct BoundaryRecovery {
  std::vector<BoundaryStep> steps;
  /// Richardson limit in 1/M over the last two resolved steps.
  cplx limit{};
  double extrapolation_error = 0.0;
  cplx value_at_largest{};
  double largest_resolved_M = 0.0;
};

/// I(M) = M^{n-1} int i (A1 - A2).(u1 grad conj u2 - conj u2 grad u1) with
/// u1 solving L_{A1,q1} u1 = 0, u2 solving L_{conj A2, conj q2} u2 = 0, both
/// equal to v0 on the boundary. u_j = v0 + w_j, where L_j w_j = -L_j v0 is
/// solved with zero data on a rotated local patch grid resolving 1/N; the
/// v0-v0 part is evaluated in closed form.
BoundaryRecovery boundary_tangential_recovery(const PotentialPair& p1, const PotentialPair& p2, const Vec3& x0,
                                              const Vec3& tau, const std::vector<double>& m_sweep,
                                              const Domain& domain, const BoundaryOptions& options = {});

}  // namespace mslab
