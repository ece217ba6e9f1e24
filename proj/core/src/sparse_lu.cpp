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

#include "sparse_lu.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace mslab::detail {

Eigen::VectorXcd SparseLu::solve(const Eigen::VectorXcd& b, double tolerance, double* residual) const {
  const double bn = b.norm();
  if (bn == 0.0) {
    if (residual) *residual = 0.0;
    return Eigen::VectorXcd::Zero(b.size());
  }
  Eigen::VectorXcd x = lu_.solve(b);
  Eigen::VectorXcd r = b - a_ * x;
  double rel = r.norm() / bn;
  if (rel > tolerance) {
    x += lu_.solve(r);
    r = b - a_ * x;
    rel = r.norm() / bn;
  }
  if (residual) *residual = rel;
  if (!(rel <= tolerance)) {
    std::ostringstream msg;
    msg << "sparse solve residual " << rel << " exceeds " << tolerance;
    throw NumericalError(msg.str());
  }
  return x;
}

double SparseLu::condition_estimate(int probes, std::uint64_t seed) const {
  double anorm = 0.0;
  for (int c = 0; c < a_.outerSize(); ++c) {
    double col = 0.0;
    for (SparseC::InnerIterator it(a_, c); it; ++it) col += std::abs(it.value());
    anorm = std::max(anorm, col);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  double inv = 0.0;
  for (int k = 0; k < probes; ++k) {
    Eigen::VectorXcd v(a_.rows());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(nd(rng), nd(rng));
    const Eigen::VectorXcd x = lu_.solve(v);
    inv = std::max(inv, x.lpNorm<1>() / v.lpNorm<1>());
  }
  return anorm * inv;
}

}  // namespace mslab::detail
