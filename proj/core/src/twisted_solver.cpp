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

#include "twisted_solver.hpp"

#include <unsupported/Eigen/IterativeSolvers>

#include <cmath>
#include <limits>
#include <sstream>

#include "fft.hpp"

namespace mslab::detail {
class TwistedOperator;
}

namespace Eigen::internal {
template <>
struct traits<mslab::detail::TwistedOperator> : public traits<SparseMatrix<std::complex<double>>> {};
}  // namespace Eigen::internal

namespace mslab::detail {

// y -> y + V P0^{-1} y, the right-preconditioned system.
class TwistedOperator : public Eigen::EigenBase<TwistedOperator> {
 public:
  using Scalar = cplx;
  using RealScalar = double;
  using StorageIndex = int;
  enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic, IsRowMajor = false };

  explicit TwistedOperator(const TwistedSolver& s) : s_(s) {}
  Eigen::Index rows() const { return s_.size(); }
  Eigen::Index cols() const { return s_.size(); }

  template <typename Rhs>
  Eigen::Product<TwistedOperator, Rhs, Eigen::AliasFreeProduct> operator*(const Eigen::MatrixBase<Rhs>& x) const {
    return Eigen::Product<TwistedOperator, Rhs, Eigen::AliasFreeProduct>(*this, x.derived());
  }

  void apply(const Eigen::VectorXcd& y, Eigen::VectorXcd& out) const {
    Eigen::VectorXcd t = y;
    s_.apply_p0_inverse(t);
    s_.apply_variable(t, out);
    out += y;
  }

 private:
  const TwistedSolver& s_;
};

}  // namespace mslab::detail

namespace Eigen::internal {
template <typename Rhs>
struct generic_product_impl<mslab::detail::TwistedOperator, Rhs, SparseShape, DenseShape, GemvProduct>
    : generic_product_impl_base<mslab::detail::TwistedOperator, Rhs,
                                generic_product_impl<mslab::detail::TwistedOperator, Rhs>> {
  using Scalar = typename Product<mslab::detail::TwistedOperator, Rhs>::Scalar;
  template <typename Dest>
  static void scaleAndAddTo(Dest& dst, const mslab::detail::TwistedOperator& lhs, const Rhs& rhs,
                            const Scalar& alpha) {
    Eigen::VectorXcd out(rhs.rows());
    lhs.apply(rhs, out);
    dst.noalias() += alpha * out;
  }
};
}  // namespace Eigen::internal

namespace mslab::detail {

struct TwistedSolver::FftState {
  explicit FftState(const Grid& g) : buf(g.size()), fft({g.dims[0], g.dims[1], g.dims[2]}, buf.data()) {}
  std::vector<cplx> buf;
  Fft fft;
};

namespace {

// Per-axis symbol contributions of the constant stencil at twist s.
std::array<std::vector<cplx>, 3> axis_symbols(const Grid& g, const NodeStencil& c, const Vec3& s) {
  std::array<std::vector<cplx>, 3> out;
  for (int d = 0; d < 3; ++d) {
    const std::size_t n = g.dims[d];
    out[d].resize(n);
    for (std::size_t m = 0; m < n; ++m) {
      const double phi = 2.0 * kPi * (static_cast<double>(m) + s[d]) / static_cast<double>(n);
      out[d][m] = c.nb[2 * d] * std::polar(1.0, -phi) + c.nb[2 * d + 1] * std::polar(1.0, phi);
    }
  }
  return out;
}

}  // namespace

TwistedSolver::TwistedSolver(const Grid& grid, const NodeStencil& constant, std::vector<NodeStencil> variable)
    : grid_(grid), constant_(constant), variable_(std::move(variable)), fft_(std::make_unique<FftState>(grid)) {
  require(variable_.size() == grid.size(), "one stencil per grid node expected");
  const std::size_t n0 = grid.dims[0], n1 = grid.dims[1], n2 = grid.dims[2];
  min_symbol_ = -1.0;
  const double steps[4] = {0.0, 0.25, 0.5, 0.75};
  for (double s0 : steps)
    for (double s1 : steps)
      for (double s2 : steps) {
        const Vec3 s{s0, s1, s2};
        const auto ax = axis_symbols(grid, constant, s);
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n2; ++k)
          for (std::size_t j = 0; j < n1; ++j) {
            const cplx base = constant.diag + ax[1][j] + ax[2][k];
            for (std::size_t i = 0; i < n0; ++i) worst = std::min(worst, std::abs(base + ax[0][i]));
          }
        if (worst > min_symbol_) {
          min_symbol_ = worst;
          twist_ = s;
        }
      }
  if (!(min_symbol_ > 0.0)) throw NumericalError("conjugated symbol vanishes on every twisted lattice");
  const auto ax = axis_symbols(grid, constant, twist_);
  inv_symbol_.resize(grid.size());
  const double total = static_cast<double>(grid.size());
  for (std::size_t k = 0; k < n2; ++k)
    for (std::size_t j = 0; j < n1; ++j)
      for (std::size_t i = 0; i < n0; ++i)
        inv_symbol_[i + n0 * (j + n1 * k)] = 1.0 / ((constant.diag + ax[0][i] + ax[1][j] + ax[2][k]) * total);
  for (int d = 0; d < 3; ++d) twist_phase_[d] = std::polar(1.0, 2.0 * kPi * twist_[d] / static_cast<double>(grid.dims[d]));
}

TwistedSolver::~TwistedSolver() = default;

void TwistedSolver::apply_p0_inverse(Eigen::VectorXcd& v) const {
  auto& buf = fft_->buf;
  for (std::size_t n = 0; n < buf.size(); ++n) buf[n] = v[static_cast<Eigen::Index>(n)];
  fft_->fft.forward();
  for (std::size_t n = 0; n < buf.size(); ++n) buf[n] *= inv_symbol_[n];
  fft_->fft.backward();
  for (std::size_t n = 0; n < buf.size(); ++n) v[static_cast<Eigen::Index>(n)] = buf[n];
}

void TwistedSolver::apply_variable(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
  const Grid& g = grid_;
  out.resize(in.size());
  for (std::size_t k = 0; k < g.dims[2]; ++k)
    for (std::size_t j = 0; j < g.dims[1]; ++j)
      for (std::size_t i = 0; i < g.dims[0]; ++i) {
        const std::size_t n = g.index(i, j, k);
        const NodeStencil& s = variable_[n];
        const std::size_t ijk[3] = {i, j, k};
        cplx acc = s.diag * in[static_cast<Eigen::Index>(n)];
        for (int d = 0; d < 3; ++d) {
          const std::size_t st = g.stride(d), nd = g.dims[d];
          const std::size_t lo = ijk[d] == 0 ? n + (nd - 1) * st : n - st;
          const std::size_t hi = ijk[d] + 1 == nd ? n - (nd - 1) * st : n + st;
          acc += s.nb[2 * d] * std::conj(twist_phase_[d]) * in[static_cast<Eigen::Index>(lo)];
          acc += s.nb[2 * d + 1] * twist_phase_[d] * in[static_cast<Eigen::Index>(hi)];
        }
        out[static_cast<Eigen::Index>(n)] = acc;
      }
}

ScalarField TwistedSolver::solve(const ScalarField& f, double tolerance, int max_iterations, int restart,
                                 Report* report) const {
  require(f.grid == grid_, "right side lives on a different grid");
  const Grid& g = grid_;
  // Untwist: rho_n = e^{-i theta.n} f_n.
  auto phase = [&](std::size_t n) {
    const auto ijk = g.unravel(n);
    double t = 0.0;
    for (int d = 0; d < 3; ++d) t += 2.0 * kPi * twist_[d] * static_cast<double>(ijk[d]) / static_cast<double>(g.dims[d]);
    return std::polar(1.0, t);
  };
  Eigen::VectorXcd b(size());
  for (std::size_t n = 0; n < g.size(); ++n) b[static_cast<Eigen::Index>(n)] = std::conj(phase(n)) * f[n];
  ScalarField r(g);
  Report rep;
  if (b.norm() == 0.0) {
    if (report) *report = rep;
    return r;
  }
  const TwistedOperator op(*this);
  Eigen::GMRES<TwistedOperator, Eigen::IdentityPreconditioner> gmres;
  gmres.set_restart(restart);
  gmres.setTolerance(tolerance);
  gmres.setMaxIterations(max_iterations);
  gmres.compute(op);
  Eigen::VectorXcd y = gmres.solve(b);
  rep.iterations = static_cast<int>(gmres.iterations());
  apply_p0_inverse(y);
  Eigen::VectorXcd vr;
  apply_variable(y, vr);
  Eigen::VectorXcd p0r = y;
  {
    auto& buf = fft_->buf;
    for (std::size_t n = 0; n < buf.size(); ++n) buf[n] = y[static_cast<Eigen::Index>(n)];
    fft_->fft.forward();
    for (std::size_t n = 0; n < buf.size(); ++n) buf[n] /= inv_symbol_[n] * static_cast<double>(g.size()) * static_cast<double>(g.size());
    fft_->fft.backward();
    for (std::size_t n = 0; n < buf.size(); ++n) p0r[static_cast<Eigen::Index>(n)] = buf[n];
  }
  rep.residual = (p0r + vr - b).norm() / b.norm();
  if (report) *report = rep;
  if (!(rep.residual <= 10.0 * tolerance)) {
    std::ostringstream msg;
    msg << "twisted GMRES stalled: relative residual " << rep.residual << " after " << rep.iterations
        << " iterations";
    throw NumericalError(msg.str());
  }
  for (std::size_t n = 0; n < g.size(); ++n) r[n] = phase(n) * y[static_cast<Eigen::Index>(n)];
  return r;
}

}  // namespace mslab::detail
