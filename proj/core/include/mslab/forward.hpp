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

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mslab/fields.hpp"
#include "mslab/geometry.hpp"
#include "mslab/potentials.hpp"

namespace mslab {

using SparseMatrixC = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;
using BoundaryFunction = std::function<cplx(const Vec3&)>;

/// A grid edge from an interior node to an exterior one, cut by the
/// boundary at fraction theta.
struct BoundaryEdge {
  std::size_t row = 0;
  int axis = 0;
  int side = 0;  // -1 or +1
  double theta = 1.0;
  Vec3 point{};
  /// Weight of the boundary value in the row of L.
  cplx coefficient{};
};

/// Finite-difference L_{A,q} = -Lap - 2i A.grad - i div A + A.A + q on the
/// interior nodes of a domain, Shortley-Weller at cut edges. With
/// `truncated`, in-domain nodes on the outermost grid layer become Dirichlet
/// nodes (edges with theta = 1) instead of raising.
class DiscreteOperator {
 public:
  DiscreteOperator(const PotentialPair& p, const Domain& domain, double shift = 0.0, bool truncated = false);

  const Domain& domain() const { return domain_; }
  const Grid& grid() const { return domain_.grid(); }
  std::size_t rows() const { return interior_.size(); }
  const std::vector<std::size_t>& interior() const { return interior_; }
  long row_of(std::size_t node) const { return slot_[node]; }
  const SparseMatrixC& matrix() const { return matrix_; }
  const std::vector<BoundaryEdge>& edges() const { return edges_; }
  double shift() const { return shift_; }

  /// Neighbour of a row along axis/side: >= 0 a row, < 0 encodes edge -(id + 1).
  long link(std::size_t row, int axis, int side) const { return links_[row][2 * axis + (side > 0)]; }

  /// -sum(coefficient * f(point)) per row.
  Eigen::VectorXcd boundary_rhs(const BoundaryFunction& f) const;
  Eigen::VectorXcd gather(const ScalarField& u) const;
  ScalarField scatter(const Eigen::VectorXcd& v) const;

  /// L u at interior nodes with boundary values taken from `boundary`;
  /// exterior nodes of the result are zero.
  ScalarField apply(const ScalarField& u, const BoundaryFunction& boundary) const;
  /// Plain seven-point action using grid values at every neighbour.
  ScalarField apply_grid(const ScalarField& u) const;

 private:
  Domain domain_;
  double shift_ = 0.0;
  std::vector<std::size_t> interior_;
  std::vector<long> slot_;
  std::vector<std::array<long, 6>> links_;
  std::vector<BoundaryEdge> edges_;
  SparseMatrixC matrix_;
  std::vector<cplx> a_[3];
  std::vector<cplx> zeroth_;
};

DiscreteOperator assemble_operator(const PotentialPair& p, const Domain& domain, double shift = 0.0);

struct SolverOptions {
  /// Spectral shift: q -> q + i shift.
  double shift = 0.0;
  /// Condition estimates above this raise NumericalError.
  double condition_limit = 1e12;
  double residual_tolerance = 1e-10;
  int condition_probes = 3;
  std::uint64_t seed = 1;
};

struct DirichletSolution {
  ScalarField u;
  /// Boundary value on each cut edge of the operator.
  std::vector<cplx> edge_values;
  double residual = 0.0;
  double condition_estimate = 0.0;
  double shift = 0.0;
};

/// Sparse LU factorization of an operator, reused across right-hand sides.
class DirichletSolver {
 public:
  explicit DirichletSolver(const DiscreteOperator& op, const SolverOptions& options = {});
  ~DirichletSolver();
  DirichletSolver(const DirichletSolver&) = delete;
  DirichletSolver& operator=(const DirichletSolver&) = delete;

  const DiscreteOperator& op() const { return op_; }
  double condition_estimate() const { return condition_; }

  DirichletSolution solve(const BoundaryFunction& f) const;
  /// Same, with the data given directly at op().edges().
  DirichletSolution solve_edges(std::vector<cplx> edge_values) const;
  /// Solves M x = b with one step of iterative refinement; returns the
  /// relative residual through `residual`.
  Eigen::VectorXcd solve_rhs(const Eigen::VectorXcd& b, double* residual = nullptr) const;

 private:
  const DiscreteOperator& op_;
  SolverOptions options_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double condition_ = 0.0;
};

/// Throws NumericalError if the system is near-singular; retry with
/// SolverOptions::shift > 0 to move off a Dirichlet eigenvalue.
DirichletSolution solve_dirichlet(const PotentialPair& p, const Domain& domain, const BoundaryFunction& f,
                                  const SolverOptions& options = {});

/// Gradient at interior nodes using the cut-edge boundary values.
VectorField boundary_aware_gradient(const DiscreteOperator& op, const DirichletSolution& sol);

/// int_Omega (grad u . grad g + i A.(u grad g - g grad u) + (A.A + q) u g),
/// quadrature with volume_weights. The first form differentiates u on the
/// grid, the second uses boundary_aware_gradient.
cplx neumann_trace(const ScalarField& u, const PotentialPair& p, const ScalarField& g, const Domain& domain);
cplx neumann_trace(const DirichletSolution& u, const DiscreteOperator& op, const PotentialPair& p,
                   const ScalarField& g);

/// Real spherical harmonics Y_lm((x - c)/|x - c|) / R, orthonormal on the
/// sphere of radius R.
struct HarmonicBasis {
  int max_degree = 6;
  Vec3 center{};
  double radius = 1.0;

  std::size_t size() const;
  /// All basis values at a point of the sphere (direction only is used).
  std::vector<double> values(const Vec3& x) const;
  double value(std::size_t j, const Vec3& x) const;
  /// Harmonic extension r^l Y_lm / R^{l+1} sampled on a grid.
  ScalarField extension(std::size_t j, const Grid& grid) const;
  std::vector<ScalarField> extensions(const Grid& grid) const;
  bool operator==(const HarmonicBasis&) const = default;
};

/// Discrete Cauchy data: column k holds the pairings <N u_k, g_j> of the
/// solution with Dirichlet data g_k against the basis; the Dirichlet
/// coefficient matrix is the identity.
struct CauchyDataMap {
  HarmonicBasis basis;
  Eigen::MatrixXcd matrix;
  std::vector<double> residuals;
  double condition_estimate = 0.0;
  double shift = 0.0;
};

CauchyDataMap cauchy_data_map(const PotentialPair& p, const Domain& domain, int max_degree,
                              const SolverOptions& options = {});

/// Cauchy data on the ball B from the data on an inner ball Omega and the
/// potentials on B \ Omega (p lives on B's grid). The shell B \ Omega is
/// solved directly and coupled through the Schur complement
/// T_oo - T_oi (T_ii + Lambda_Omega)^{-1} T_io.
CauchyDataMap glue_cauchy_data(const CauchyDataMap& omega_map, const PotentialPair& p_outside,
                               const Domain& ball_b, int max_degree = -1, const SolverOptions& options = {});

/// ||a - b||_F / ||b||_F; throws on basis mismatch.
double relative_frobenius(const CauchyDataMap& a, const CauchyDataMap& b);

}  // namespace mslab
