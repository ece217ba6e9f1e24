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

#ifndef MSLAB_CGO_HPP_
#define MSLAB_CGO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mslab/cauchy_transform.hpp"
#include "mslab/fields.hpp"
#include "mslab/geometry.hpp"
#include "mslab/jet.hpp"
#include "mslab/potentials.hpp"

namespace mslab {

/// How the conjugated operator e^{-x.zeta/h} h^2 L e^{x.zeta/h} is discretized.
///   expansion            central differences applied to the smooth factor in
///                        the expanded operator
///   discrete_similarity  E^{-1} (h^2 L_grid) E with E = diag(e^{x.zeta/h}),
///                        built from neighbour ratios e^{(x_j - x_i).zeta/h}
enum class ConjugationScheme { Expansion, DiscreteSimilarity };

ConjugationScheme parse_scheme(const std::string& name);
std::string scheme_name(ConjugationScheme s);

/// A complex frequency zeta = zeta0 + zeta1 with zeta1 = O(h). The frame
/// carries zeta0 for the transport equation.
struct CgoFrequency {
  CVec3 zeta{};
  LaminaFrame frame;
  double h = 0.1;

  const CVec3& zeta0() const { return frame.zeta0; }
  CVec3 zeta1() const { return zeta - frame.zeta0; }
};

/// Side 1 uses zeta1 with zeta0 = mu1 + i mu2; side 2 uses zeta2 with
/// zeta0 = -mu1 + i mu2.
CgoFrequency cgo_side(const ZetaPair& pair, int side);
/// zeta0 = zeta; zeta must have orthonormal real and imaginary parts.
CgoFrequency plain_frequency(const CVec3& zeta, double h);

/// e^{-x.zeta/h} h^2 L_{A,q} (e^{x.zeta/h} w) on every grid node. Any complex
/// zeta is accepted; the (zeta.zeta) w term is kept. With the similarity
/// scheme the outermost grid layer is set to zero.
ScalarField conjugated_apply(const PotentialPair& p, const ScalarField& w, const CVec3& zeta, double h,
                             ConjugationScheme scheme = ConjugationScheme::Expansion);
/// Pointwise closed-form version for a jet of w at x.
cplx conjugated_apply_at(const PotentialModel& m, const Jet& w, const CVec3& zeta, double h, const Vec3& x);

/// The two transport terms -2h zeta0.grad a - 2ih (zeta0.A#) a.
ScalarField transport_terms(const ScalarField& a, const VectorField& a_sharp, const CVec3& zeta0, double h);

/// g = -(-h^2 Lap a - 2i h^2 A.grad a - i h^2 (div A) a + h^2 (A.A + q) a)
///     + 2h zeta1.grad a + 2ih (zeta1.A) a + 2ih zeta0.(A - A#) a.
ScalarField cgo_rhs(const PotentialPair& p, const ScalarField& a, const CgoFrequency& f,
                    const VectorField& a_sharp);

struct RemainderOptions {
  ConjugationScheme scheme = ConjugationScheme::Expansion;
  double residual_tolerance = 1e-10;
  int max_iterations = 600;
  int restart = 120;
  /// Upper bound on h ||r||_{H^1_scl} / ||g||_{H^-1_scl}.
  double constant_cap = 1e3;
};

struct RemainderResult {
  ScalarField r;
  double residual = 0.0;
  int iterations = 0;
  double norm_h1 = 0.0;
  double norm_g = 0.0;
  /// h ||r||_{H^1_scl(Omega)} / ||g||_{H^-1_scl}.
  double empirical_constant = 0.0;
};

/// Solves the discrete conjugated equation P r = chi g on the grid torus with
/// a twisted-periodic r, where the coefficients of P are also multiplied by
/// chi, a cutoff that is 1 on the domain and 0 once rho < -0.15 R. The
/// constant-coefficient part is inverted by FFT, the potential terms by
/// GMRES. On the domain's nodes r solves P r = g.
RemainderResult solve_remainder(const PotentialPair& p, const ScalarField& g, const CgoFrequency& f,
                                const Domain& domain, const RemainderOptions& options = {});

/// ||u||_{H^1_scl(Omega)}: volume-weighted |u|^2 + h^2 |grad u|^2 over the domain.
double norm_h1_scl(const ScalarField& u, const Domain& domain, double h);
/// ||g||_{H^-1_scl} of the zero extension of g outside the domain.
double norm_hm1_scl(const ScalarField& g, const Domain& domain, double h);

struct CgoOptions {
  double sigma = 0.25;
  CauchyOptions cauchy{};
  RemainderOptions remainder{};
};

struct CgoDiagnostics {
  double norm_r = 0.0;
  double norm_g = 0.0;
  double solve_residual = 0.0;
  int iterations = 0;
  double empirical_constant = 0.0;
  /// ||P_h(a + r)|| / ||P_h a|| over the domain's nodes.
  double equation_residual = 0.0;
};

/// u = e^{x.zeta/h}(e^{Phi#} + r). The exponential is kept symbolic.
struct CgoSolution {
  CgoFrequency frequency;
  double sigma = 0.25;
  double tau = 0.0;
  ScalarField phase;
  ScalarField amplitude;
  ScalarField remainder;
  CgoDiagnostics diagnostics;

  double h() const { return frequency.h; }
  /// amplitude + remainder.
  ScalarField factor() const;
  /// e^{x.zeta/h} (amplitude + remainder); throws NumericalError on overflow.
  ScalarField u() const;
};

/// Throws NumericalError when |x.Re zeta| / h exceeds 600 on the grid.
void check_exponent_range(const Grid& grid, const CVec3& zeta, double h);

/// A# = mollify(extend(A), h^sigma).
VectorField sharp_potential(const VectorField& a, const Domain& domain, double h, double sigma);

CgoSolution build_cgo(const PotentialPair& p, const CgoFrequency& f, const Domain& domain,
                      const CgoOptions& options = {});

/// Weight phi = alpha.x and its convexification phi + (h / 2 eps) phi^2.
struct CarlemanProbe {
  Vec3 alpha{1.0, 0.0, 0.0};
  double epsilon = 0.25;
  double h = 0.1;

  double phi(const Vec3& x) const { return dot(alpha, x); }
  double phi_eps(const Vec3& x) const;
};

/// LHS / RHS of the Carleman estimate for u supported in the domain.
/// Without potentials: (h / sqrt eps) ||u||_{H^{s+2}} against
/// ||e^{phi_eps/h}(-h^2 Lap)e^{-phi_eps/h} u||_{H^s}. With potentials:
/// h ||u||_{H^1} against ||e^{phi/h}(h^2 L)e^{-phi/h} u||_{H^-1}.
/// Returns 0 for u = 0; throws NumericalError when the right side vanishes.
double carleman_ratio(const CarlemanProbe& probe, const ScalarField& u, double s,
                      const std::optional<PotentialPair>& magnetic = std::nullopt);

/// Seeded smooth bumps compactly supported inside the domain.
std::vector<ScalarField> carleman_test_family(const Domain& domain, std::size_t count, std::uint64_t seed);

}  // namespace mslab

#endif  // MSLAB_CGO_HPP_
