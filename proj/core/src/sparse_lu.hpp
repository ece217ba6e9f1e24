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

#ifndef MSLAB_SRC_SPARSE_LU_HPP_
#define MSLAB_SRC_SPARSE_LU_HPP_

#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>

#include <cstdint>
#include <string>

#include "mslab/types.hpp"

namespace mslab::detail {

using SparseC = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;

// UMFPACK factorization with one optional refinement step per solve.
class SparseLu {
 public:
  explicit SparseLu(const SparseC& a) : a_(a) {
    lu_.umfpackControl()(UMFPACK_IRSTEP) = 0;
    lu_.compute(a);
    if (lu_.info() != Eigen::Success) {
      const int code = lu_.umfpackFactorizeReturncode();
      if (code == UMFPACK_ERROR_out_of_memory)
        throw NumericalError("sparse LU factorization ran out of memory");
      throw NumericalError("sparse LU factorization failed (status " + std::to_string(code) +
                           "); the operator is singular to working precision");
    }
  }

  // Relative residual in *residual; throws when it stays above `tolerance`.
  Eigen::VectorXcd solve(const Eigen::VectorXcd& b, double tolerance, double* residual) const;

  // ||A||_1 max_k ||A^{-1} v_k||_1 / ||v_k||_1 over seeded Gaussian probes.
  double condition_estimate(int probes, std::uint64_t seed) const;

 private:
  const SparseC& a_;
  Eigen::UmfPackLU<SparseC> lu_;
};

}  // namespace mslab::detail

#endif  // MSLAB_SRC_SPARSE_LU_HPP_
