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
#include <stdexcept>
#include <string>

namespace mslab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

/// Fixed-size 3-vector over a scalar type. Only the handful of operations the
/// library needs; not a general linear-algebra type.
template <typename T>
struct Vec3T {
  std::array<T, 3> v{};

  constexpr Vec3T() = default;
  constexpr Vec3T(T x, T y, T z) : v{x, y, z} {}

  constexpr T& operator[](std::size_t i) { return v[i]; }
  constexpr const T& operator[](std::size_t i) const { return v[i]; }

  bool operator==(const Vec3T&) const = default;

  constexpr Vec3T& operator+=(const Vec3T& o) {
    for (int i = 0; i < 3; ++i) v[i] += o.v[i];
    return *this;
  }
  constexpr Vec3T& operator-=(const Vec3T& o) {
    for (int i = 0; i < 3; ++i) v[i] -= o.v[i];
    return *this;
  }
  template <typename S>
  constexpr Vec3T& operator*=(S s) {
    for (int i = 0; i < 3; ++i) v[i] *= s;
    return *this;
  }
};

using Vec3 = Vec3T<double>;
using CVec3 = Vec3T<cplx>;

template <typename T>
constexpr Vec3T<T> operator+(Vec3T<T> a, const Vec3T<T>& b) { return a += b; }
template <typename T>
constexpr Vec3T<T> operator-(Vec3T<T> a, const Vec3T<T>& b) { return a -= b; }
template <typename T>
constexpr Vec3T<T> operator-(Vec3T<T> a) {
  for (int i = 0; i < 3; ++i) a[i] = -a[i];
  return a;
}
template <typename T, typename S>
constexpr auto operator*(S s, const Vec3T<T>& a) {
  using R = decltype(s * a[0]);
  return Vec3T<R>{s * a[0], s * a[1], s * a[2]};
}
template <typename T, typename S>
constexpr auto operator*(const Vec3T<T>& a, S s) { return s * a; }

/// Bilinear dot product (no conjugation), as in ζ·ζ.
template <typename T, typename U>
constexpr auto dot(const Vec3T<T>& a, const Vec3T<U>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double norm(const CVec3& a) {
  return std::sqrt(std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]));
}
inline Vec3 normalized(const Vec3& a) { return (1.0 / norm(a)) * a; }

inline CVec3 complexify(const Vec3& a) { return {a[0], a[1], a[2]}; }
inline CVec3 conj(const CVec3& a) { return {std::conj(a[0]), std::conj(a[1]), std::conj(a[2])}; }
inline Vec3 real(const CVec3& a) { return {a[0].real(), a[1].real(), a[2].real()}; }
inline Vec3 imag(const CVec3& a) { return {a[0].imag(), a[1].imag(), a[2].imag()}; }

/// Invalid input: bad parameters, violated preconditions, malformed files.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that could not deliver a trustworthy result: singular
/// systems, unresolved kernels, diverging extrapolations.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

}  // namespace mslab
