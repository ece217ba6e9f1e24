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

#include "mslab/forward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mslab/spherical_harmonics.hpp"
#include "sparse_lu.hpp"

namespace mslab {

namespace {

constexpr double kMinTheta = 1e-6;

}  // namespace

DiscreteOperator::DiscreteOperator(const PotentialPair& p, const Domain& domain, double shift, bool truncated)
    : domain_(domain), shift_(shift) {
  const Grid& g = domain.grid();
  if (!(p.A.grid == g) || !(p.q.grid == g)) throw InvalidArgument("potentials must live on the domain grid");
  const std::size_t n = g.size();
  slot_.assign(n, -1);
  for (std::size_t idx = 0; idx < n; ++idx) {
    if (domain.rho(g.point(idx)) > 0.0) {
      const auto ijk = g.unravel(idx);
      bool outer = false;
      for (int d = 0; d < 3; ++d) outer = outer || ijk[d] == 0 || ijk[d] + 1 == g.dims[d];
      if (outer && truncated) continue;
      if (outer) throw InvalidArgument("domain touches the grid boundary; enlarge the grid");
      slot_[idx] = static_cast<long>(interior_.size());
      interior_.push_back(idx);
    }
  }
  if (interior_.empty()) throw InvalidArgument("domain has no interior grid nodes");

  const ScalarField div = divergence(p.A);
  for (int d = 0; d < 3; ++d) a_[d].resize(interior_.size());
  zeroth_.resize(interior_.size());

  std::vector<Eigen::Triplet<cplx, int>> trip;
  trip.reserve(interior_.size() * 7);
  links_.resize(interior_.size());
  for (std::size_t row = 0; row < interior_.size(); ++row) {
    const std::size_t idx = interior_[row];
    const Vec3 x = g.point(idx);
    const CVec3 a = p.A.at(idx);
    for (int d = 0; d < 3; ++d) a_[d][row] = a[d];
    zeroth_[row] = -kI * div[idx] + dot(a, a) + p.q[idx] + kI * shift;
    cplx diag = zeroth_[row];
    for (int d = 0; d < 3; ++d) {
      const double h = g.spacing[d];
      const std::size_t s = g.stride(d);
      double hs[2];
      long nb[2];
      for (int side = 0; side < 2; ++side) {
        const std::size_t nidx = side ? idx + s : idx - s;
        if (slot_[nidx] >= 0) {
          hs[side] = h;
          nb[side] = 0;
        } else if (domain.rho(g.point(nidx)) > 0.0) {
          hs[side] = h;
          nb[side] = -1;
        } else {
          const double th = std::max(kMinTheta, domain.boundary_crossing(x, g.point(nidx)));
          hs[side] = th * h;
          nb[side] = -1;
        }
      }
      const double hl = hs[0], hr = hs[1];
      // second derivative and first derivative weights
      const double l2 = 2.0 / (hl * (hl + hr)), r2 = 2.0 / (hr * (hl + hr)), c2 = -2.0 / (hl * hr);
      const double l1 = -hr / (hl * (hl + hr)), r1 = hl / (hr * (hl + hr)), c1 = (hr - hl) / (hl * hr);
      const cplx ma = -2.0 * kI * a[d];
      const cplx wl = -l2 + ma * l1;
      const cplx wr = -r2 + ma * r1;
      diag += -c2 + ma * c1;
      for (int side = 0; side < 2; ++side) {
        const cplx w = side ? wr : wl;
        const std::size_t nidx = side ? idx + s : idx - s;
        if (nb[side] == 0) {
          const long col = slot_[nidx];
          trip.emplace_back(static_cast<int>(row), static_cast<int>(col), w);
          links_[row][2 * d + side] = col;
        } else {
          BoundaryEdge e;
          e.row = row;
          e.axis = d;
          e.side = side ? 1 : -1;
          e.theta = hs[side] / h;
          e.point = x + e.theta * (g.point(nidx) - x);
          e.coefficient = w;
          links_[row][2 * d + side] = -static_cast<long>(edges_.size()) - 1;
          edges_.push_back(e);
        }
      }
    }
    trip.emplace_back(static_cast<int>(row), static_cast<int>(row), diag);
  }
  matrix_.resize(static_cast<int>(interior_.size()), static_cast<int>(interior_.size()));
  matrix_.setFromTriplets(trip.begin(), trip.end());
  matrix_.makeCompressed();
}

Eigen::VectorXcd DiscreteOperator::boundary_rhs(const BoundaryFunction& f) const {
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(rows()));
  for (const auto& e : edges_) b[static_cast<Eigen::Index>(e.row)] -= e.coefficient * f(e.point);
  return b;
}

Eigen::VectorXcd DiscreteOperator::gather(const ScalarField& u) const {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(rows()));
  for (std::size_t r = 0; r < rows(); ++r) v[static_cast<Eigen::Index>(r)] = u[interior_[r]];
  return v;
}

ScalarField DiscreteOperator::scatter(const Eigen::VectorXcd& v) const {
  ScalarField u(grid());
  for (std::size_t r = 0; r < rows(); ++r) u[interior_[r]] = v[static_cast<Eigen::Index>(r)];
  return u;
}

ScalarField DiscreteOperator::apply(const ScalarField& u, const BoundaryFunction& boundary) const {
  const Eigen::VectorXcd y = matrix_ * gather(u) - boundary_rhs(boundary);
  return scatter(y);
}

ScalarField DiscreteOperator::apply_grid(const ScalarField& u) const {
  const Grid& g = grid();
  ScalarField out(g);
  for (std::size_t row = 0; row < rows(); ++row) {
    const std::size_t idx = interior_[row];
    cplx acc = zeroth_[row] * u[idx];
    for (int d = 0; d < 3; ++d) {
      const double h = g.spacing[d];
      const std::size_t s = g.stride(d);
      acc += -(u[idx + s] - 2.0 * u[idx] + u[idx - s]) / (h * h);
      acc += -2.0 * kI * a_[d][row] * (u[idx + s] - u[idx - s]) / (2.0 * h);
    }
    out[idx] = acc;
  }
  return out;
}

DiscreteOperator assemble_operator(const PotentialPair& p, const Domain& domain, double shift) {
  return DiscreteOperator(p, domain, shift);
}

struct DirichletSolver::Impl {
  explicit Impl(const SparseMatrixC& a) : lu(a) {}
  detail::SparseLu lu;
};

DirichletSolver::DirichletSolver(const DiscreteOperator& op, const SolverOptions& options)
    : op_(op), options_(options), impl_(std::make_unique<Impl>(op.matrix())) {
  condition_ = impl_->lu.condition_estimate(options.condition_probes, options.seed);
  if (!std::isfinite(condition_) || condition_ > options.condition_limit) {
    std::ostringstream msg;
    msg << "near-singular Dirichlet system (condition estimate " << condition_
        << "); retry with a spectral shift";
    throw NumericalError(msg.str());
  }
}

DirichletSolver::~DirichletSolver() = default;

Eigen::VectorXcd DirichletSolver::solve_rhs(const Eigen::VectorXcd& b, double* residual) const {
  return impl_->lu.solve(b, options_.residual_tolerance, residual);
}

DirichletSolution DirichletSolver::solve(const BoundaryFunction& f) const {
  std::vector<cplx> values;
  values.reserve(op_.edges().size());
  for (const auto& e : op_.edges()) values.push_back(f(e.point));
  return solve_edges(std::move(values));
}

DirichletSolution DirichletSolver::solve_edges(std::vector<cplx> edge_values) const {
  require(edge_values.size() == op_.edges().size(), "one boundary value per cut edge expected");
  DirichletSolution sol;
  sol.edge_values = std::move(edge_values);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(op_.rows()));
  for (std::size_t k = 0; k < op_.edges().size(); ++k)
    b[static_cast<Eigen::Index>(op_.edges()[k].row)] -= op_.edges()[k].coefficient * sol.edge_values[k];
  sol.u = op_.scatter(solve_rhs(b, &sol.residual));
  sol.condition_estimate = condition_;
  sol.shift = op_.shift();
  return sol;
}

DirichletSolution solve_dirichlet(const PotentialPair& p, const Domain& domain, const BoundaryFunction& f,
                                  const SolverOptions& options) {
  const DiscreteOperator op(p, domain, options.shift);
  const DirichletSolver solver(op, options);
  return solver.solve(f);
}

VectorField boundary_aware_gradient(const DiscreteOperator& op, const DirichletSolution& sol) {
  const Grid& g = op.grid();
  VectorField out(g);
  for (std::size_t row = 0; row < op.rows(); ++row) {
    const std::size_t idx = op.interior()[row];
    const cplx u0 = sol.u[idx];
    for (int d = 0; d < 3; ++d) {
      const double h = g.spacing[d];
      double hs[2];
      cplx us[2];
      for (int side = 0; side < 2; ++side) {
        const long l = op.link(row, d, side ? 1 : -1);
        if (l >= 0) {
          hs[side] = h;
          us[side] = sol.u[op.interior()[static_cast<std::size_t>(l)]];
        } else {
          const std::size_t e = static_cast<std::size_t>(-l - 1);
          hs[side] = op.edges()[e].theta * h;
          us[side] = sol.edge_values[e];
        }
      }
      const double hl = hs[0], hr = hs[1];
      out.comp[d][idx] = (hl * hl * us[1] - hr * hr * us[0] + (hr * hr - hl * hl) * u0) / (hl * hr * (hl + hr));
    }
  }
  return out;
}

namespace {

cplx pairing_sum(const ScalarField& u, const VectorField& du, const PotentialPair& p, const ScalarField& g,
                 const VectorField& dg, const std::vector<double>& w) {
  cplx acc = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    if (w[n] == 0.0) continue;
    const CVec3 a = p.A.at(n);
    const CVec3 gu = du.at(n);
    const CVec3 gg = dg.at(n);
    acc += w[n] * (dot(gu, gg) + kI * dot(a, u[n] * gg - g[n] * gu) + (dot(a, a) + p.q[n]) * u[n] * g[n]);
  }
  return acc;
}

}  // namespace

cplx neumann_trace(const ScalarField& u, const PotentialPair& p, const ScalarField& g, const Domain& domain) {
  const auto w = volume_weights(domain);
  return pairing_sum(u, gradient(u), p, g, gradient(g), w);
}

cplx neumann_trace(const DirichletSolution& u, const DiscreteOperator& op, const PotentialPair& p,
                   const ScalarField& g) {
  const auto w = volume_weights(op.domain());
  return pairing_sum(u.u, boundary_aware_gradient(op, u), p, g, gradient(g), w);
}

std::size_t HarmonicBasis::size() const { return harmonic_count(max_degree); }

std::vector<double> HarmonicBasis::values(const Vec3& x) const {
  const Vec3 y = x - center;
  const double r = norm(y);
  if (r == 0.0) return std::vector<double>(size(), 0.0);
  const Vec3 u = (1.0 / r) * y;
  std::vector<double> v = solid_harmonics<double>(u[0], u[1], u[2], max_degree);
  for (auto& s : v) s /= radius;
  return v;
}

double HarmonicBasis::value(std::size_t j, const Vec3& x) const { return values(x)[j]; }

ScalarField HarmonicBasis::extension(std::size_t j, const Grid& grid) const {
  require(j < size(), "basis index out of range");
  return extensions(grid)[j];
}

std::vector<ScalarField> HarmonicBasis::extensions(const Grid& grid) const {
  const std::size_t nb = size();
  std::vector<double> scale(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    int l = 0, m = 0;
    harmonic_index(j, l, m);
    scale[j] = std::pow(radius, -(l + 1));
  }
  std::vector<ScalarField> out(nb, ScalarField(grid));
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const Vec3 y = grid.point(n) - center;
    const auto v = solid_harmonics<double>(y[0], y[1], y[2], max_degree);
    for (std::size_t j = 0; j < nb; ++j) out[j][n] = v[j] * scale[j];
  }
  return out;
}

namespace {

// Row-blocked pairings: result(j, k) = pairing of solution k against test j.
Eigen::MatrixXcd pairing_matrix(const std::vector<ScalarField>& sols, const std::vector<VectorField>& dsols,
                                const std::vector<ScalarField>& tests, const PotentialPair& p,
                                const std::vector<double>& w) {
  std::vector<std::size_t> nodes;
  for (std::size_t n = 0; n < w.size(); ++n)
    if (w[n] != 0.0) nodes.push_back(n);
  const auto nn = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXcd U(4 * nn, static_cast<Eigen::Index>(sols.size()));
  for (std::size_t k = 0; k < sols.size(); ++k)
    for (Eigen::Index i = 0; i < nn; ++i) {
      const std::size_t n = nodes[static_cast<std::size_t>(i)];
      const CVec3 a = p.A.at(n);
      const cplx u = sols[k][n];
      const CVec3 du = dsols[k].at(n);
      const auto kk = static_cast<Eigen::Index>(k);
      for (int d = 0; d < 3; ++d) U(4 * i + d, kk) = w[n] * (du[d] + kI * a[d] * u);
      U(4 * i + 3, kk) = w[n] * (-kI * dot(a, du) + (dot(a, a) + p.q[n]) * u);
    }
  Eigen::MatrixXcd G(4 * nn, static_cast<Eigen::Index>(tests.size()));
  for (std::size_t j = 0; j < tests.size(); ++j) {
    const VectorField dg = gradient(tests[j]);
    for (Eigen::Index i = 0; i < nn; ++i) {
      const std::size_t n = nodes[static_cast<std::size_t>(i)];
      const auto jj = static_cast<Eigen::Index>(j);
      for (int d = 0; d < 3; ++d) G(4 * i + d, jj) = dg.comp[d][n];
      G(4 * i + 3, jj) = tests[j][n];
    }
  }
  return G.transpose() * U;
}

}  // namespace

CauchyDataMap cauchy_data_map(const PotentialPair& p, const Domain& domain, int max_degree,
                              const SolverOptions& options) {
  require(domain.kind() == DomainKind::Ball, "cauchy_data_map needs a ball domain");
  require(max_degree >= 0, "max_degree must be >= 0");
  CauchyDataMap out;
  out.basis = {max_degree, domain.center(), domain.radius()};
  const DiscreteOperator op(p, domain, options.shift);
  const DirichletSolver solver(op, options);
  const std::size_t nb = out.basis.size();
  std::vector<std::vector<double>> at_edges;
  for (const auto& e : op.edges()) at_edges.push_back(out.basis.values(e.point));
  std::vector<ScalarField> sols;
  std::vector<VectorField> dsols;
  for (std::size_t k = 0; k < nb; ++k) {
    std::vector<cplx> data(at_edges.size());
    for (std::size_t e = 0; e < data.size(); ++e) data[e] = at_edges[e][k];
    const DirichletSolution s = solver.solve_edges(std::move(data));
    out.residuals.push_back(s.residual);
    dsols.push_back(boundary_aware_gradient(op, s));
    sols.push_back(s.u);
  }
  const std::vector<ScalarField> tests = out.basis.extensions(domain.grid());
  out.matrix = pairing_matrix(sols, dsols, tests, p, volume_weights(domain));
  out.condition_estimate = solver.condition_estimate();
  out.shift = options.shift;
  return out;
}

CauchyDataMap glue_cauchy_data(const CauchyDataMap& omega_map, const PotentialPair& p_outside,
                               const Domain& ball_b, int max_degree, const SolverOptions& options) {
  require(ball_b.kind() == DomainKind::Ball, "glue_cauchy_data needs a ball B");
  const HarmonicBasis& inner = omega_map.basis;
  if (norm(inner.center - ball_b.center()) > 1e-12)
    throw InvalidArgument("Omega and B must be concentric");
  if (inner.radius > ball_b.radius() + 1e-12) throw InvalidArgument("Omega must lie inside B");
  if (!(p_outside.grid() == ball_b.grid())) throw InvalidArgument("potentials must live on B's grid");
  const int lb = max_degree < 0 ? inner.max_degree : max_degree;
  if (std::abs(inner.radius - ball_b.radius()) <= 1e-12 && lb == inner.max_degree) return omega_map;
  require(ball_b.radius() - inner.radius > 2.0 * ball_b.grid().spacing[0],
          "shell between Omega and B must span at least two grid cells");

  const HarmonicBasis outer{lb, ball_b.center(), ball_b.radius()};
  const Domain shell = Domain::shell(ball_b.center(), inner.radius, ball_b.radius(), ball_b.grid());
  const DiscreteOperator op(p_outside, shell, options.shift);
  const DirichletSolver solver(op, options);
  const double r0 = inner.radius, r1 = ball_b.radius();
  const double mid = 0.5 * (r0 + r1);
  const Grid& g = ball_b.grid();

  auto blend = [&](double r) {
    const double t = std::clamp((r - r0) / (r1 - r0), 0.0, 1.0);
    return 0.5 * (1.0 + std::cos(kPi * t));
  };
  const std::size_t ni = inner.size(), no = outer.size();
  std::vector<std::vector<double>> at_edges;
  for (const auto& e : op.edges()) {
    const bool on_inner = norm(e.point - ball_b.center()) < mid;
    std::vector<double> v(ni + no, 0.0);
    const auto b = on_inner ? inner.values(e.point) : outer.values(e.point);
    std::copy(b.begin(), b.end(), v.begin() + (on_inner ? 0 : static_cast<long>(ni)));
    at_edges.push_back(std::move(v));
  }
  std::vector<ScalarField> sols, tests(ni + no, ScalarField(g));
  std::vector<VectorField> dsols;
  std::vector<double> residuals;
  for (std::size_t k = 0; k < ni + no; ++k) {
    std::vector<cplx> data(at_edges.size());
    for (std::size_t e = 0; e < data.size(); ++e) data[e] = at_edges[e][k];
    const DirichletSolution s = solver.solve_edges(std::move(data));
    residuals.push_back(s.residual);
    dsols.push_back(boundary_aware_gradient(op, s));
    sols.push_back(s.u);
  }
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 x = g.point(n);
    const double r = norm(x - ball_b.center());
    if (r == 0.0) continue;
    const double c = blend(r);
    if (c != 0.0) {
      const auto v = inner.values(x);
      for (std::size_t j = 0; j < ni; ++j) tests[j][n] = c * v[j];
    }
    if (c != 1.0) {
      const auto v = outer.values(x);
      for (std::size_t j = 0; j < no; ++j) tests[ni + j][n] = (1.0 - c) * v[j];
    }
  }
  const Eigen::MatrixXcd T = pairing_matrix(sols, dsols, tests, p_outside, volume_weights(shell));
  const auto eni = static_cast<Eigen::Index>(ni), eno = static_cast<Eigen::Index>(no);
  const Eigen::MatrixXcd tii = T.topLeftCorner(eni, eni);
  const Eigen::MatrixXcd tio = T.topRightCorner(eni, eno);
  const Eigen::MatrixXcd toi = T.bottomLeftCorner(eno, eni);
  const Eigen::MatrixXcd too = T.bottomRightCorner(eno, eno);
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(tii + omega_map.matrix);
  CauchyDataMap out;
  out.basis = outer;
  out.matrix = too - toi * lu.solve(tio);
  out.residuals = residuals;
  out.condition_estimate = solver.condition_estimate();
  out.shift = options.shift;
  return out;
}

double relative_frobenius(const CauchyDataMap& a, const CauchyDataMap& b) {
  if (!(a.basis == b.basis) || a.matrix.rows() != b.matrix.rows() || a.matrix.cols() != b.matrix.cols())
    throw InvalidArgument("Cauchy data maps use different bases");
  const double nb = b.matrix.norm();
  const double diff = (a.matrix - b.matrix).norm();
  if (nb == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / nb;
}

}  // namespace mslab
