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

#include "mslab/cgo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "twisted_solver.hpp"

namespace mslab {

ConjugationScheme parse_scheme(const std::string& name) {
  if (name == "expansion") return ConjugationScheme::Expansion;
  if (name == "discrete_similarity") return ConjugationScheme::DiscreteSimilarity;
  throw InvalidArgument("unknown conjugation scheme '" + name + "'");
}

std::string scheme_name(ConjugationScheme s) {
  return s == ConjugationScheme::Expansion ? "expansion" : "discrete_similarity";
}

CgoFrequency cgo_side(const ZetaPair& pair, int side) {
  require(side == 1 || side == 2, "side must be 1 or 2");
  CgoFrequency f;
  f.h = pair.h;
  f.zeta = side == 1 ? pair.zeta1 : pair.zeta2;
  f.frame = LaminaFrame::make(pair.frame.mu1, pair.frame.mu2, side == 2);
  return f;
}

CgoFrequency plain_frequency(const CVec3& zeta, double h) {
  require(h > 0.0, "h must be positive");
  CgoFrequency f;
  f.h = h;
  f.zeta = zeta;
  f.frame = LaminaFrame::from_zeta(zeta);
  return f;
}

namespace {

using Stencil = detail::NodeStencil;

Stencil conjugated_stencil(const CVec3& a, cplx div_a, cplx q, const CVec3& zeta, double h, const Vec3& spacing,
                           ConjugationScheme scheme) {
  Stencil s{};
  const double h2 = h * h;
  if (scheme == ConjugationScheme::Expansion) {
    s.diag = -dot(zeta, zeta) - 2.0 * kI * h * dot(a, zeta) - kI * h2 * div_a + h2 * (dot(a, a) + q);
    for (int d = 0; d < 3; ++d) {
      const double dd = spacing[d];
      const cplx first = (2.0 * h * zeta[d] + 2.0 * kI * h2 * a[d]) / (2.0 * dd);
      s.diag += 2.0 * h2 / (dd * dd);
      s.nb[2 * d] = -h2 / (dd * dd) + first;
      s.nb[2 * d + 1] = -h2 / (dd * dd) - first;
    }
    return s;
  }
  s.diag = h2 * (-kI * div_a + dot(a, a) + q);
  for (int d = 0; d < 3; ++d) {
    const double dd = spacing[d];
    const cplx ratio = std::exp(dd * zeta[d] / h);
    s.diag += 2.0 * h2 / (dd * dd);
    s.nb[2 * d] = h2 * (-1.0 / (dd * dd) + kI * a[d] / dd) / ratio;
    s.nb[2 * d + 1] = h2 * (-1.0 / (dd * dd) - kI * a[d] / dd) * ratio;
  }
  return s;
}

bool on_outer_layer(const Grid& g, std::size_t idx) {
  const auto ijk = g.unravel(idx);
  for (int d = 0; d < 3; ++d)
    if (ijk[d] == 0 || ijk[d] + 1 == g.dims[d]) return true;
  return false;
}

}  // namespace

ScalarField conjugated_apply(const PotentialPair& p, const ScalarField& w, const CVec3& zeta, double h,
                             ConjugationScheme scheme) {
  require(h > 0.0, "h must be positive");
  const Grid& g = w.grid;
  if (!(p.grid() == g)) throw InvalidArgument("potentials and field live on different grids");
  const ScalarField div = divergence(p.A);
  ScalarField out(g);
  if (scheme == ConjugationScheme::Expansion) {
    const ScalarField lap = laplacian(w);
    const VectorField grad = gradient(w);
    for (std::size_t n = 0; n < g.size(); ++n) {
      const CVec3 a = p.A.at(n);
      const CVec3 dw = grad.at(n);
      out[n] = -h * h * lap[n] - 2.0 * h * dot(zeta, dw) - 2.0 * kI * h * h * dot(a, dw) +
               (-dot(zeta, zeta) - 2.0 * kI * h * dot(a, zeta) - kI * h * h * div[n] +
                h * h * (dot(a, a) + p.q[n])) *
                   w[n];
    }
    return out;
  }
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (on_outer_layer(g, n)) continue;
    const Stencil s = conjugated_stencil(p.A.at(n), div[n], p.q[n], zeta, h, g.spacing, scheme);
    cplx acc = s.diag * w[n];
    for (int d = 0; d < 3; ++d) {
      acc += s.nb[2 * d] * w[n - g.stride(d)];
      acc += s.nb[2 * d + 1] * w[n + g.stride(d)];
    }
    out[n] = acc;
  }
  return out;
}

cplx conjugated_apply_at(const PotentialModel& m, const Jet& w, const CVec3& zeta, double h, const Vec3& x) {
  const auto aj = m.A_jet(x);
  CVec3 a{};
  cplx div = 0.0, adw = 0.0, zdw = 0.0;
  for (int d = 0; d < 3; ++d) {
    a[d] = aj[d].v;
    div += aj[d].g[d];
    adw += a[d] * w.g[d];
    zdw += zeta[d] * w.g[d];
  }
  const double h2 = h * h;
  return -h2 * w.lap - 2.0 * h * zdw - 2.0 * kI * h2 * adw +
         (-dot(zeta, zeta) - 2.0 * kI * h * dot(a, zeta) - kI * h2 * div + h2 * (dot(a, a) + m.q(x))) * w.v;
}

ScalarField transport_terms(const ScalarField& a, const VectorField& a_sharp, const CVec3& zeta0, double h) {
  const VectorField grad = gradient(a);
  ScalarField out(a.grid);
  for (std::size_t n = 0; n < out.size(); ++n)
    out[n] = -2.0 * h * dot(zeta0, grad.at(n)) - 2.0 * kI * h * dot(zeta0, a_sharp.at(n)) * a[n];
  return out;
}

ScalarField cgo_rhs(const PotentialPair& p, const ScalarField& a, const CgoFrequency& f,
                    const VectorField& a_sharp) {
  const Grid& g = a.grid;
  if (!(p.grid() == g) || !(a_sharp.grid == g)) throw InvalidArgument("fields live on different grids");
  const double h = f.h, h2 = h * h;
  const ScalarField lap = laplacian(a);
  const VectorField grad = gradient(a);
  const ScalarField div = divergence(p.A);
  const CVec3 z0 = f.zeta0(), z1 = f.zeta1();
  ScalarField out(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const CVec3 A = p.A.at(n);
    const CVec3 da = grad.at(n);
    const cplx principal = -h2 * lap[n] - 2.0 * kI * h2 * dot(A, da) - kI * h2 * div[n] * a[n] +
                           h2 * (dot(A, A) + p.q[n]) * a[n];
    out[n] = -principal + 2.0 * h * dot(z1, da) + 2.0 * kI * h * dot(z1, A) * a[n] +
             2.0 * kI * h * dot(z0, A - a_sharp.at(n)) * a[n];
  }
  return out;
}

namespace {

double domain_scale(const Domain& domain) {
  if (domain.kind() != DomainKind::Box) return domain.radius();
  const Vec3 ext = domain.box_hi() - domain.box_lo();
  return 0.5 * std::min({ext[0], ext[1], ext[2]});
}

// 1 on the closed domain, 0 once rho < -0.15 R.
ScalarField remainder_cutoff(const Domain& domain) {
  const double scale = 0.75 * domain_scale(domain);
  return sample_scalar(domain.grid(), [&](const Vec3& x) { return cplx(extension_cutoff(domain.rho(x), scale)); });
}

}  // namespace

double norm_h1_scl(const ScalarField& u, const Domain& domain, double h) {
  if (!(u.grid == domain.grid())) throw InvalidArgument("field and domain use different grids");
  const auto w = volume_weights(domain);
  const VectorField grad = gradient(u);
  double acc = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    if (w[n] == 0.0) continue;
    const CVec3 du = grad.at(n);
    acc += w[n] * (std::norm(u[n]) + h * h * (std::norm(du[0]) + std::norm(du[1]) + std::norm(du[2])));
  }
  return std::sqrt(acc);
}

double norm_hm1_scl(const ScalarField& g, const Domain& domain, double h) {
  return norm_sobolev_scl(restrict_to(g, domain), -1.0, h);
}

RemainderResult solve_remainder(const PotentialPair& p, const ScalarField& g, const CgoFrequency& f,
                                const Domain& domain, const RemainderOptions& options) {
  const Grid& grid = domain.grid();
  if (!(g.grid == grid) || !(p.grid() == grid)) throw InvalidArgument("fields and domain use different grids");
  RemainderResult res;
  res.r = ScalarField(grid);
  res.norm_g = norm_hm1_scl(g, domain, f.h);
  bool zero = true;
  for (const auto& v : g.values) zero = zero && v == cplx(0.0);
  if (zero) return res;

  const ScalarField chi = remainder_cutoff(domain);
  const ScalarField div = divergence(p.A);
  const Stencil constant = conjugated_stencil({}, 0.0, 0.0, f.zeta, f.h, grid.spacing, options.scheme);
  std::vector<Stencil> variable(grid.size());
  ScalarField rhs(grid);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double c = chi[n].real();
    rhs[n] = c * g[n];
    if (c == 0.0) continue;
    Stencil s = conjugated_stencil(c * p.A.at(n), c * div[n], c * p.q[n], f.zeta, f.h, grid.spacing, options.scheme);
    s.diag -= constant.diag;
    for (int k = 0; k < 6; ++k) s.nb[k] -= constant.nb[k];
    variable[n] = s;
  }
  const detail::TwistedSolver solver(grid, constant, std::move(variable));
  detail::TwistedSolver::Report rep;
  res.r = solver.solve(rhs, options.residual_tolerance, options.max_iterations, options.restart, &rep);
  res.residual = rep.residual;
  res.iterations = rep.iterations;
  res.norm_h1 = norm_h1_scl(res.r, domain, f.h);
  res.empirical_constant = res.norm_g > 0.0 ? f.h * res.norm_h1 / res.norm_g : 0.0;
  if (res.empirical_constant > options.constant_cap) {
    std::ostringstream msg;
    msg << "remainder bound constant " << res.empirical_constant << " exceeds cap " << options.constant_cap
        << " at h = " << f.h << "; the grid under-resolves this h";
    throw NumericalError(msg.str());
  }
  return res;
}

void check_exponent_range(const Grid& grid, const CVec3& zeta, double h) {
  const Vec3 re = real(zeta);
  double worst = 0.0;
  for (int c = 0; c < 8; ++c) {
    Vec3 x{};
    for (int d = 0; d < 3; ++d)
      x[d] = grid.origin[d] + ((c >> d) & 1 ? grid.spacing[d] * static_cast<double>(grid.dims[d] - 1) : 0.0);
    worst = std::max(worst, std::abs(dot(x, re)) / h);
  }
  if (worst > 600.0) {
    std::ostringstream msg;
    msg << "exponent |x.Re zeta| / h reaches " << worst << " (limit 600)";
    throw NumericalError(msg.str());
  }
}

VectorField sharp_potential(const VectorField& a, const Domain& domain, double h, double sigma) {
  require(sigma > 0.0 && sigma < 0.5, "sigma must lie in (0, 1/2)");
  return mollify(extend_by_cutoff(a, domain), MollifierSpec{std::pow(h, sigma)});
}

ScalarField CgoSolution::factor() const { return amplitude + remainder; }

ScalarField CgoSolution::u() const {
  const Grid& g = amplitude.grid;
  check_exponent_range(g, frequency.zeta, frequency.h);
  ScalarField out = factor();
  for (std::size_t n = 0; n < g.size(); ++n) out[n] *= std::exp(dot(g.point(n), frequency.zeta) / frequency.h);
  return out;
}

CgoSolution build_cgo(const PotentialPair& p, const CgoFrequency& f, const Domain& domain,
                      const CgoOptions& options) {
  const Grid& grid = domain.grid();
  if (!(p.grid() == grid)) throw InvalidArgument("potentials and domain use different grids");
  check_exponent_range(grid, f.zeta, f.h);
  CgoSolution s;
  s.frequency = f;
  s.sigma = options.sigma;
  s.tau = std::pow(f.h, options.sigma);
  const VectorField a_sharp = sharp_potential(p.A, domain, f.h, options.sigma);
  s.phase = transport_phase(a_sharp, f.frame, options.cauchy);
  s.amplitude = ScalarField(grid);
  for (std::size_t n = 0; n < grid.size(); ++n) s.amplitude[n] = std::exp(s.phase[n]);

  const ScalarField g = cgo_rhs(p, s.amplitude, f, a_sharp);
  const ScalarField pa = conjugated_apply(p, s.amplitude, f.zeta, f.h, options.remainder.scheme);
  const RemainderResult rem = solve_remainder(p, (-1.0) * pa, f, domain, options.remainder);
  s.remainder = rem.r;

  CgoDiagnostics& dg = s.diagnostics;
  dg.norm_r = rem.norm_h1;
  dg.norm_g = norm_hm1_scl(g, domain, f.h);
  dg.solve_residual = rem.residual;
  dg.iterations = rem.iterations;
  dg.empirical_constant = dg.norm_g > 0.0 ? f.h * dg.norm_r / dg.norm_g : 0.0;
  const ScalarField full = conjugated_apply(p, s.factor(), f.zeta, f.h, options.remainder.scheme);
  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    if (!domain.contains(grid.point(n))) continue;
    num += std::norm(full[n]);
    den += std::norm(pa[n]);
  }
  dg.equation_residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  return s;
}

double CarlemanProbe::phi_eps(const Vec3& x) const {
  const double p = phi(x);
  return p + h / (2.0 * epsilon) * p * p;
}

double carleman_ratio(const CarlemanProbe& probe, const ScalarField& u, double s,
                      const std::optional<PotentialPair>& magnetic) {
  require(probe.h > 0.0 && probe.epsilon > 0.0, "h and epsilon must be positive");
  require(std::abs(norm(probe.alpha) - 1.0) < 1e-12, "alpha must be a unit vector");
  bool zero = true;
  for (const auto& v : u.values) zero = zero && v == cplx(0.0);
  if (zero) return 0.0;
  const double h = probe.h;
  double lhs = 0.0, rhs = 0.0;
  if (magnetic) {
    const ScalarField pu = conjugated_apply(*magnetic, u, complexify(-1.0 * probe.alpha), h);
    lhs = h * norm_sobolev_scl(u, 1.0, h);
    rhs = norm_sobolev_scl(pu, -1.0, h);
  } else {
    const Grid& g = u.grid;
    const ScalarField lap = laplacian(u);
    const VectorField grad = gradient(u);
    ScalarField pu(g);
    const double curv = h / probe.epsilon * dot(probe.alpha, probe.alpha);
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Vec3 dpsi = (1.0 + h / probe.epsilon * probe.phi(g.point(n))) * probe.alpha;
      const CVec3 du = grad.at(n);
      pu[n] = -h * h * lap[n] + 2.0 * h * (dpsi[0] * du[0] + dpsi[1] * du[1] + dpsi[2] * du[2]) +
              (h * curv - dot(dpsi, dpsi)) * u[n];
    }
    lhs = h / std::sqrt(probe.epsilon) * norm_sobolev_scl(u, s + 2.0, h);
    rhs = norm_sobolev_scl(pu, s, h);
  }
  if (!(rhs > 1e-14 * lhs)) throw NumericalError("Carleman right side vanishes for a nonzero u");
  return lhs / rhs;
}

std::vector<ScalarField> carleman_test_family(const Domain& domain, std::size_t count, std::uint64_t seed) {
  require(domain.kind() == DomainKind::Ball, "test family needs a ball domain");
  const double R = domain.radius();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> nd;
  std::vector<ScalarField> out;
  for (std::size_t k = 0; k < count; ++k) {
    const double support = R * (0.3 + 0.25 * uni(rng));
    Vec3 dir{nd(rng), nd(rng), nd(rng)};
    dir = normalized(dir);
    const Vec3 c = domain.center() + ((0.9 * R - support) * uni(rng)) * dir;
    Vec3 wave{nd(rng), nd(rng), nd(rng)};
    wave = (6.0 * uni(rng) / R) * normalized(wave);
    const double phase = 2.0 * kPi * uni(rng);
    const cplx amp = std::polar(1.0, 2.0 * kPi * uni(rng));
    out.push_back(sample_scalar(domain.grid(), [&](const Vec3& x) {
      return amp * mollifier_profile((1.0 / support) * (x - c)) * std::cos(dot(wave, x - c) + phase);
    }));
  }
  return out;
}

}  // namespace mslab
