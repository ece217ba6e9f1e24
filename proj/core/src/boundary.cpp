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

#include "mslab/boundary.hpp"

#include "mslab/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mslab {
namespace {

// b(r) = exp(-1/(1 - r^2)) and its first two derivatives; zero for r >= 1.
struct Bump {
  double b = 0.0, d1 = 0.0, d2 = 0.0;
  // b'(r) / r, finite at r = 0.
  double d1_over_r = 0.0;
};

Bump bump(double r) {
  Bump out;
  if (r >= 1.0) return out;
  const double s = 1.0 - r * r;
  out.b = std::exp(-1.0 / s);
  const double g1_over_r = -2.0 / (s * s);
  const double g1 = g1_over_r * r;
  const double g2 = -2.0 / (s * s) - 8.0 * r * r / (s * s * s);
  out.d1 = out.b * g1;
  out.d1_over_r = out.b * g1_over_r;
  out.d2 = out.b * (g1 * g1 + g2);
  return out;
}

double eta_normalizer() {
  static const double c = [] {
    const auto [x, w] = gauss_legendre(64);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = 0.5 * (x[i] + 1.0);
      const double b = bump(r).b;
      s += 0.5 * w[i] * b * b * r;
    }
    return 1.0 / std::sqrt(2.0 * kPi * s);
  }();
  return c;
}

Vec3 any_orthogonal(const Vec3& n, const Vec3& tau) { return cross(n, tau); }

// Sum of f(x) e^{-2 N rho} dV over the chart around x0: polar Gauss in the
// gnomonic tangent coordinates, panelled Gauss in u = 2 N rho.
template <typename T, typename F>
T chart_integral(const BoundaryProbe& p, const F& f) {
  const auto [gx, gw] = gauss_legendre(24);
  const double r_max = 1.1 / p.M;
  const int angles = 48;
  const Vec3 e1 = p.tau, e2 = any_orthogonal(p.normal, p.tau);
  const double R = p.radius;
  const double u_max = std::min(2.0 * p.N * std::min(1.0 / p.M, R), 60.0);
  const double breaks[] = {0.0, 1.0, 3.0, 8.0, 20.0, 60.0};
  T total{};
  for (int pi = 0; pi + 1 < 6; ++pi) {
    const double u0 = breaks[pi], u1 = std::min(breaks[pi + 1], u_max);
    if (u1 <= u0) break;
    for (std::size_t a = 0; a < gx.size(); ++a) {
      const double u = u0 + 0.5 * (u1 - u0) * (gx[a] + 1.0);
      const double wu = 0.5 * (u1 - u0) * gw[a];
      const double t = u / (2.0 * p.N);
      for (std::size_t b = 0; b < gx.size(); ++b) {
        const double rs = 0.5 * r_max * (gx[b] + 1.0);
        const double wr = 0.5 * r_max * gw[b] * rs;
        for (int k = 0; k < angles; ++k) {
          const double th = 2.0 * kPi * k / angles;
          const Vec3 s = rs * std::cos(th) * e1 + rs * std::sin(th) * e2;
          const Vec3 dir = R * p.normal + s;
          const double len = norm(dir);
          const Vec3 x = p.center + ((R - t) / len) * dir;
          const double jac = (R - t) * (R - t) * R / (len * len * len);
          const double weight = wu / (2.0 * p.N) * wr * (2.0 * kPi / angles) * jac * std::exp(-u);
          total += weight * f(x);
        }
      }
    }
  }
  return total;
}

}  // namespace

double BoundaryProbe::eta(const Vec3& x) const { return eta_constant * bump(M * norm(x - x0)).b; }

cplx BoundaryProbe::v0(const Vec3& x) const {
  const double e = eta(x);
  if (e == 0.0) return 0.0;
  return e * std::exp(N * (kI * dot(tau, x) - rho(x)));
}

BoundaryProbe make_boundary_probe(const Domain& domain, const Vec3& x0, const Vec3& tau, double M) {
  if (domain.kind() != DomainKind::Ball) throw InvalidArgument("boundary probes need a ball domain");
  const double R = domain.radius();
  require(std::abs(norm(x0 - domain.center()) - R) <= 1e-9 * R, "x0 must lie on the boundary");
  require(std::abs(norm(tau) - 1.0) <= 1e-10, "tau must be a unit vector");
  BoundaryProbe p;
  p.center = domain.center();
  p.radius = R;
  p.x0 = x0;
  p.normal = normalized(x0 - p.center);
  require(std::abs(dot(tau, p.normal)) <= 1e-10, "tau must be tangent at x0");
  require(M > 0.0 && 1.0 / M <= 0.25 * R, "probe support exceeds the local chart: need 1/M <= R/4");
  p.tau = tau;
  p.M = M;
  p.N = M / domain.modulus_of_continuity(1.0 / M);
  p.eta_constant = eta_normalizer();
  return p;
}

ProbeJet probe_jet(const BoundaryProbe& p, const Vec3& x) {
  ProbeJet out;
  const Vec3 d = x - p.x0;
  const double r = norm(d);
  const Bump b = bump(p.M * r);
  if (b.b == 0.0) return out;
  const double C = p.eta_constant, M = p.M, N = p.N;
  const double eta = C * b.b;
  const CVec3 grad_eta = complexify((C * M * M * b.d1_over_r) * d);
  const double lap_eta = C * M * M * (b.d2 + 2.0 * b.d1_over_r);
  const Vec3 n = normalized(x - p.center);
  const CVec3 grad_psi = kI * complexify(p.tau) + complexify(n);
  const double lap_psi = 2.0 / norm(x - p.center);
  const cplx psi_sq = 2.0 * kI * dot(p.tau, n);
  const cplx e = std::exp(N * (kI * dot(p.tau, x) - p.rho(x)));
  out.value = eta * e;
  out.grad = e * (grad_eta + (N * eta) * grad_psi);
  out.laplacian = e * (lap_eta + 2.0 * N * dot(grad_eta, grad_psi) + eta * (N * lap_psi + N * N * psi_sq));
  return out;
}

double probe_normalization(const BoundaryProbe& p) {
  const double s = chart_integral<double>(p, [&](const Vec3& x) {
    const double e = p.eta(x);
    return e * e;
  });
  return p.M * p.M * p.N * s;
}

double probe_l2_scaled(const BoundaryProbe& p) { return std::sqrt(probe_normalization(p)); }

cplx probe_main_term(const BoundaryProbe& p, const VectorField& w) {
  const ScalarField wt = contract(complexify(p.tau), w);
  const cplx s = chart_integral<cplx>(p, [&](const Vec3& x) {
    const double e = p.eta(x);
    if (e == 0.0) return cplx{};
    return e * e * interpolate_cubic(wt, x);
  });
  return 2.0 * p.N * p.M * p.M * s;
}

PotentialPair normal_gauge(const PotentialPair& p, const Domain& domain) {
  if (domain.kind() != DomainKind::Ball) throw InvalidArgument("normal gauge needs a ball domain");
  const Grid& g = p.grid();
  const double R = domain.radius();
  auto step = [](double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
  };
  ScalarField psi(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 x = g.point(n);
    const double rho = domain.rho(x);
    const double chi = 1.0 - step((rho - 0.25 * R) / (0.25 * R));
    if (chi == 0.0) continue;
    const Vec3 nu = normalized(x - domain.center());
    psi[n] = chi * rho * dot(p.A.at(n), complexify(nu));
  }
  return {gauge_transform(p.A, psi), p.q};
}

namespace {

struct Patch {
  Grid grid;
  // Columns tau, normal x tau, normal: x = center + Q y.
  std::array<Vec3, 3> q;
  std::size_t nodes = 0;
};

Vec3 to_global(const Patch& patch, const BoundaryProbe& p, const Vec3& y) {
  return p.center + y[0] * patch.q[0] + y[1] * patch.q[1] + y[2] * patch.q[2];
}

CVec3 to_local(const Patch& patch, const CVec3& v) {
  return {dot(complexify(patch.q[0]), v), dot(complexify(patch.q[1]), v), dot(complexify(patch.q[2]), v)};
}

Patch make_patch(const BoundaryProbe& p, const BoundaryOptions& o) {
  Patch patch;
  patch.q = {p.tau, any_orthogonal(p.normal, p.tau), p.normal};
  const double R = p.radius;
  const double ht = 2.0 * kPi / (p.N * o.points_per_wavelength);
  const double hn = 1.0 / (p.N * o.points_per_decay);
  const double lt = 1.0 / p.M + 6.0 / p.N;
  const auto half = static_cast<std::size_t>(std::ceil(lt / ht));
  const double z_min = std::sqrt(std::max(R * R - 2.0 * lt * lt, 0.0)) - 10.0 / p.N;
  const double z_max = R + 2.0 * hn;
  const auto nz = static_cast<std::size_t>(std::ceil((z_max - z_min) / hn)) + 1;
  patch.grid.dims = {2 * half + 1, 2 * half + 1, nz};
  patch.grid.spacing = {ht, ht, hn};
  patch.grid.origin = {-static_cast<double>(half) * ht, -static_cast<double>(half) * ht, z_min};
  patch.nodes = patch.grid.size();
  return patch;
}

PotentialPair patch_potentials(const Patch& patch, const BoundaryProbe& p, const PotentialPair& global) {
  const Grid& g = patch.grid;
  PotentialPair out{VectorField(g), ScalarField(g)};
  const std::array<ScalarField, 3> comps{global.A.component(0), global.A.component(1), global.A.component(2)};
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 x = to_global(patch, p, g.point(n));
    const CVec3 a{interpolate_cubic(comps[0], x), interpolate_cubic(comps[1], x), interpolate_cubic(comps[2], x)};
    out.A.set(n, to_local(patch, a));
    out.q[n] = interpolate_cubic(global.q, x);
  }
  return out;
}

struct Correction {
  ScalarField w;
  VectorField grad;
};

// w with L w = -L v0 in the patch, w = 0 on its boundary.
Correction solve_correction(const Patch& patch, const PotentialPair& local,
                            const Domain& dom, const std::vector<ProbeJet>& jets, const BoundaryOptions& o) {
  const DiscreteOperator op(local, dom, o.solver.shift, true);
  const ScalarField div = divergence(local.A);
  Eigen::VectorXcd b(static_cast<Eigen::Index>(op.rows()));
  for (std::size_t row = 0; row < op.rows(); ++row) {
    const std::size_t n = op.interior()[row];
    const ProbeJet& j = jets[n];
    const CVec3 a = local.A.at(n);
    const CVec3 grad = to_local(patch, j.grad);
    const cplx lv = -j.laplacian - 2.0 * kI * dot(a, grad) + (-kI * div[n] + dot(a, a) + local.q[n]) * j.value;
    b[static_cast<Eigen::Index>(row)] = -lv;
  }
  const DirichletSolver solver(op, o.solver);
  DirichletSolution sol;
  sol.u = op.scatter(solver.solve_rhs(b));
  sol.edge_values.assign(op.edges().size(), 0.0);
  Correction c;
  c.grad = boundary_aware_gradient(op, sol);
  c.w = std::move(sol.u);
  return c;
}

}  // namespace

BoundaryRecovery boundary_tangential_recovery(const PotentialPair& p1, const PotentialPair& p2, const Vec3& x0,
                                              const Vec3& tau, const std::vector<double>& m_sweep,
                                              const Domain& domain, const BoundaryOptions& options) {
  require(!m_sweep.empty(), "M sweep must be non-empty");
  for (std::size_t i = 1; i < m_sweep.size(); ++i) require(m_sweep[i] > m_sweep[i - 1], "M sweep must increase");
  require(p1.grid() == domain.grid() && p2.grid() == domain.grid(), "potentials must live on the domain grid");
  const PotentialPair g1 = options.normalize_gauge ? normal_gauge(p1, domain) : p1;
  const PotentialPair g2 = options.normalize_gauge ? normal_gauge(p2, domain) : p2;
  const VectorField w = g1.A - g2.A;
  const PotentialPair g2c = conjugated(g2);

  BoundaryRecovery out;
  std::vector<double> inv_m;
  std::vector<cplx> totals;
  for (double M : m_sweep) {
    const BoundaryProbe probe = make_boundary_probe(domain, x0, tau, M);
    BoundaryStep st;
    st.M = M;
    st.N = probe.N;
    st.normalization = probe_normalization(probe);
    st.l2_scaled = std::sqrt(st.normalization);
    st.main = probe_main_term(probe, w);
    const Patch patch = make_patch(probe, options);
    st.patch_nodes = patch.nodes;
    st.resolved = patch.nodes <= options.max_patch_nodes;
    if (st.resolved) {
      const Grid& g = patch.grid;
      const Domain dom = Domain::ball({0.0, 0.0, 0.0}, probe.radius, g);
      std::vector<ProbeJet> jets(g.size());
      for (std::size_t n = 0; n < g.size(); ++n) jets[n] = probe_jet(probe, to_global(patch, probe, g.point(n)));
      const PotentialPair l1 = patch_potentials(patch, probe, g1);
      const PotentialPair l2 = patch_potentials(patch, probe, g2);
      const PotentialPair l2c = patch_potentials(patch, probe, g2c);
      const Correction c1 = solve_correction(patch, l1, dom, jets, options);
      const Correction c2 = solve_correction(patch, l2c, dom, jets, options);
      const std::vector<double> weights = volume_weights(dom);
      cplx sum = 0.0;
      double wn1 = 0.0, wn2 = 0.0, vn = 0.0;
      for (std::size_t n = 0; n < g.size(); ++n) {
        const auto ijk = g.unravel(n);
        bool outer = false;
        for (int d = 0; d < 3; ++d) outer = outer || ijk[d] == 0 || ijk[d] + 1 == g.dims[d];
        if (outer || weights[n] == 0.0) continue;
        const cplx v = jets[n].value;
        const CVec3 gv = to_local(patch, jets[n].grad);
        const cplx w1 = c1.w[n], w2c = std::conj(c2.w[n]);
        const CVec3 gw1 = c1.grad.at(n), gw2c = conj(c2.grad.at(n));
        const CVec3 flux = v * gw2c - w2c * gv + w1 * conj(gv) - std::conj(v) * gw1 + w1 * gw2c - w2c * gw1;
        const CVec3 wl = l1.A.at(n) - l2.A.at(n);
        sum += weights[n] * kI * dot(wl, flux);
        wn1 += weights[n] * std::norm(w1);
        wn2 += weights[n] * std::norm(w2c);
        vn += weights[n] * std::norm(v);
      }
      st.coupled = M * M * sum;
      st.correction_ratio = vn > 0.0 ? std::sqrt(std::max(wn1, wn2) / vn) : 0.0;
      st.total = st.main + st.coupled;
      inv_m.push_back(1.0 / M);
      totals.push_back(st.total);
      out.value_at_largest = st.total;
      out.largest_resolved_M = M;
    } else {
      st.total = st.main;
    }
    out.steps.push_back(st);
  }
  if (totals.empty()) throw NumericalError("no M in the sweep fits the patch node budget");
  const Extrapolation e = richardson(inv_m, totals);
  out.limit = e.limit;
  out.extrapolation_error = e.error;
  return out;
}

}  // namespace mslab
