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

#include <cmath>
#include <cstddef>
#include <vector>

#include "mslab/types.hpp"

namespace mslab {

/// Number of real spherical harmonics of degree <= max_degree.
inline std::size_t harmonic_count(int max_degree) {
  return static_cast<std::size_t>((max_degree + 1) * (max_degree + 1));
}

/// Degree and order of the j-th harmonic; ordering is l = 0, 1, ... and
/// m = -l..l within each degree.
inline void harmonic_index(std::size_t j, int& l, int& m) {
  l = static_cast<int>(std::floor(std::sqrt(static_cast<double>(j)) + 1e-12));
  m = static_cast<int>(j) - l * l - l;
}

/// Real solid harmonics r^l Y_lm(x / r) for all l <= L at y (relative to
/// the center), orthonormal on the unit sphere. T is double/cplx or Jet.
template <typename T>
std::vector<T> solid_harmonics(const T& x, const T& y, const T& z, int max_degree) {
  const std::size_t count = harmonic_count(max_degree);
  std::vector<T> out(count, T(0.0));
  const T r2 = x * x + y * y + z * z;
  // (x + i y)^m split into real and imaginary polynomials.
  std::vector<T> cm(max_degree + 1, T(0.0)), sm(max_degree + 1, T(0.0));
  cm[0] = T(1.0);
  for (int m = 1; m <= max_degree; ++m) {
    cm[m] = x * cm[m - 1] - y * sm[m - 1];
    sm[m] = x * sm[m - 1] + y * cm[m - 1];
  }
  for (int m = 0; m <= max_degree; ++m) {
    // Q_l^m: r^{l-m} P_l^m(z / r) / sin^m, built by the three-term recurrence.
    double dfact = 1.0;
    for (int k = 1; k <= 2 * m - 1; k += 2) dfact *= k;
    std::vector<T> q(max_degree + 1, T(0.0));
    q[m] = T(dfact);
    if (m + 1 <= max_degree) q[m + 1] = z * q[m] * static_cast<double>(2 * m + 1);
    for (int l = m + 2; l <= max_degree; ++l)
      q[l] = (z * q[l - 1] * static_cast<double>(2 * l - 1) - r2 * q[l - 2] * static_cast<double>(l + m - 1)) *
             (1.0 / static_cast<double>(l - m));
    for (int l = m; l <= max_degree; ++l) {
      double ratio = 1.0;  // (l - m)! / (l + m)!
      for (int k = l - m + 1; k <= l + m; ++k) ratio /= k;
      double nrm = std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) * ratio);
      if (m == 0) {
        out[static_cast<std::size_t>(l * l + l)] = q[l] * nrm;
      } else {
        nrm *= std::sqrt(2.0);
        out[static_cast<std::size_t>(l * l + l + m)] = q[l] * cm[m] * nrm;
        out[static_cast<std::size_t>(l * l + l - m)] = q[l] * sm[m] * nrm;
      }
    }
  }
  return out;
}

}  // namespace mslab
