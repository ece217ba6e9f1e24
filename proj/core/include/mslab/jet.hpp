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

#include <array>
#include <cmath>
#include <complex>

#include "mslab/types.hpp"

namespace mslab {

/// Second-order forward-mode jet in R^3: value, gradient and Laplacian of a
/// complex function. Enough to apply second-order differential operators
/// exactly to closed-form expressions.
struct Jet {
  cplx v{};
  std::array<cplx, 3> g{};
  cplx lap{};

  Jet() = default;
  Jet(cplx value) : v(value) {}  // NOLINT: constants promote implicitly
  Jet(double value) : v(value) {}  // NOLINT

  /// The coordinate function x_axis evaluated at `x`.
  static Jet variable(double x, int axis) {
    Jet j(x);
    j.g[axis] = 1.0;
    return j;
  }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    for (int d = 0; d < 3; ++d) g[d] += o.g[d];
    lap += o.lap;
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    for (int d = 0; d < 3; ++d) g[d] -= o.g[d];
    lap -= o.lap;
    return *this;
  }
  Jet& operator*=(cplx s) {
    v *= s;
    for (auto& x : g) x *= s;
    lap *= s;
    return *this;
  }
};

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }
inline Jet operator-(Jet a) { return a *= -1.0; }
inline Jet operator*(Jet a, cplx s) { return a *= s; }
inline Jet operator*(cplx s, Jet a) { return a *= s; }
inline Jet operator*(Jet a, double s) { return a *= s; }
inline Jet operator*(double s, Jet a) { return a *= s; }

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r;
  r.v = a.v * b.v;
  cplx cross = 0.0;
  for (int d = 0; d < 3; ++d) {
    r.g[d] = a.v * b.g[d] + b.v * a.g[d];
    cross += a.g[d] * b.g[d];
  }
  r.lap = a.v * b.lap + b.v * a.lap + 2.0 * cross;
  return r;
}

/// Chain rule for a scalar function with derivatives f1 = f'(u), f2 = f''(u).
inline Jet compose(const Jet& u, cplx f0, cplx f1, cplx f2) {
  Jet r;
  r.v = f0;
  cplx gg = 0.0;
  for (int d = 0; d < 3; ++d) {
    r.g[d] = f1 * u.g[d];
    gg += u.g[d] * u.g[d];
  }
  r.lap = f1 * u.lap + f2 * gg;
  return r;
}

inline Jet exp(const Jet& u) {
  const cplx e = std::exp(u.v);
  return compose(u, e, e, e);
}

inline Jet reciprocal(const Jet& u) {
  const cplx r = 1.0 / u.v;
  return compose(u, r, -r * r, 2.0 * r * r * r);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

inline Jet sin(const Jet& u) { return compose(u, std::sin(u.v), std::cos(u.v), -std::sin(u.v)); }
inline Jet cos(const Jet& u) { return compose(u, std::cos(u.v), -std::sin(u.v), -std::cos(u.v)); }

/// Jets for the three coordinate functions at x.
inline std::array<Jet, 3> coordinates(const Vec3& x) {
  return {Jet::variable(x[0], 0), Jet::variable(x[1], 1), Jet::variable(x[2], 2)};
}

}  // namespace mslab
