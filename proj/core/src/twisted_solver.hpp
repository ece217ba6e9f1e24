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

#ifndef MSLAB_SRC_TWISTED_SOLVER_HPP_
#define MSLAB_SRC_TWISTED_SOLVER_HPP_

#include <Eigen/Core>

#include <array>
#include <memory>
#include <vector>

#include "mslab/fields.hpp"
#include "mslab/geometry.hpp"
#include "mslab/types.hpp"

namespace mslab::detail {

// Seven-point row: nb[2d] couples x - e_d, nb[2d + 1] couples x + e_d.
struct NodeStencil {
  cplx diag{};
  std::array<cplx, 6> nb{};
};

// Solves (P0 + V) r = f for twisted-periodic r on the grid torus, i.e.
// r(x + N_d e_d) = e^{2 pi i s_d} r(x). P0 has the constant stencil and is
// inverted by FFT; V is the per-node remainder. The twist s is picked from
// {0, 1/4, 1/2, 3/4}^3 to maximize min |symbol of P0|. Right-preconditioned
// restarted GMRES handles V.
class TwistedSolver {
 public:
  TwistedSolver(const Grid& grid, const NodeStencil& constant, std::vector<NodeStencil> variable);
  ~TwistedSolver();

  const Vec3& twist() const { return twist_; }
  double min_symbol() const { return min_symbol_; }

  struct Report {
    int iterations = 0;
    double residual = 0.0;
  };
  ScalarField solve(const ScalarField& f, double tolerance, int max_iterations, int restart, Report* report) const;

  // Internal hooks for the GMRES operator; all act in the untwisted frame.
  void apply_p0_inverse(Eigen::VectorXcd& v) const;
  void apply_variable(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
  Eigen::Index size() const { return static_cast<Eigen::Index>(grid_.size()); }

 private:
  Grid grid_;
  NodeStencil constant_;
  std::vector<NodeStencil> variable_;
  Vec3 twist_{};
  double min_symbol_ = 0.0;
  std::array<cplx, 3> twist_phase_{};
  std::vector<cplx> inv_symbol_;
  struct FftState;
  std::unique_ptr<FftState> fft_;
};

}  // namespace mslab::detail

#endif  // MSLAB_SRC_TWISTED_SOLVER_HPP_
