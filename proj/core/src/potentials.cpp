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

#include "mslab/potentials.hpp"

#include <cmath>

namespace mslab {

Family parse_family(const std::string& name) {
  if (name == "zero") return Family::Zero;
  if (name == "constants" || name == "constant") return Family::Constant;
  if (name == "gaussian_bump") return Family::GaussianBump;
  if (name == "rotation_bump") return Family::RotationBump;
  if (name == "gradient_bump") return Family::GradientBump;
  if (name == "local_constant") return Family::LocalConstant;
  throw InvalidArgument("unknown potential family '" + name + "'");
}

std::string family_name(Family f) {
  switch (f) {
    case Family::Zero: return "zero";
    case Family::Constant: return "constants";
    case Family::GaussianBump: return "gaussian_bump";
    case Family::RotationBump: return "rotation_bump";
    case Family::GradientBump: return "gradient_bump";
    case Family::LocalConstant: return "local_constant";
  }
  return "zero";
}

namespace {

template <typename T>
std::array<T, 3> shifted(const TermSpec& t, const std::array<T, 3>& x) {
  return {x[0] - T(t.center[0]), x[1] - T(t.center[1]), x[2] - T(t.center[2])};
}

template <typename T>
T gauss(const TermSpec& t, const std::array<T, 3>& y) {
  using std::exp;
  const T r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
  return exp(r2 * cplx(-0.5 / (t.width * t.width)));
}

cplx real_part(const cplx& v) { return v.real(); }
cplx real_part(const Jet& j) { return j.v.real(); }

template <typename T>
T smooth_step_core(const T& s) {
  using std::exp;
  // exp(-1/s) for s > 0.
  return exp(-(T(1.0) / s));
}

// Plateau P(r) as a function of r^2: 1 for r^2 <= 1/4, 0 for r^2 >= 1.
template <typename T>
T plateau(const TermSpec& t, const std::array<T, 3>& y) {
  const T r2 = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]) * cplx(1.0 / (t.width * t.width));
  const T s = (T(1.0) - r2) * cplx(1.0 / 0.75);
  const double sv = real_part(s).real();
  if (sv >= 1.0) return T(1.0);
  if (sv <= 0.0) return T(0.0);
  const T a = smooth_step_core(s);
  const T b = smooth_step_core(T(1.0) - s);
  return a / (a + b);
}

template <typename T>
T scalar_term_impl(const TermSpec& t, const std::array<T, 3>& x) {
  switch (t.family) {
    case Family::Zero:
      return T(0.0);
    case Family::Constant:
      return T(t.amplitude);
    case Family::GaussianBump:
      return gauss(t, shifted(t, x)) * t.amplitude;
    case Family::LocalConstant:
      return plateau(t, shifted(t, x)) * t.amplitude;
    case Family::RotationBump:
    case Family::GradientBump:
      break;
  }
  throw InvalidArgument("family '" + family_name(t.family) + "' is not a scalar potential");
}

template <typename T>
std::array<T, 3> vector_term_impl(const TermSpec& t, const std::array<T, 3>& x) {
  const auto y = shifted(t, x);
  switch (t.family) {
    case Family::Zero:
      return {T(0.0), T(0.0), T(0.0)};
    case Family::Constant:
      return {T(t.amplitude * t.direction[0]), T(t.amplitude * t.direction[1]),
              T(t.amplitude * t.direction[2])};
    case Family::GaussianBump: {
      const T g = gauss(t, y);
      return {g * (t.amplitude * t.direction[0]), g * (t.amplitude * t.direction[1]),
              g * (t.amplitude * t.direction[2])};
    }
    case Family::LocalConstant: {
      const T p = plateau(t, y);
      return {p * (t.amplitude * t.direction[0]), p * (t.amplitude * t.direction[1]),
              p * (t.amplitude * t.direction[2])};
    }
    case Family::RotationBump: {
      const T g = gauss(t, y) * t.amplitude;
      return {-(y[1] * g), y[0] * g, T(0.0)};
    }
    case Family::GradientBump: {
      const T g = gauss(t, y) * (-t.amplitude / (t.width * t.width));
      return {y[0] * g, y[1] * g, y[2] * g};
    }
  }
  return {T(0.0), T(0.0), T(0.0)};
}

cplx gauss_hat(const TermSpec& t, const Vec3& xi) {
  const double s = t.width;
  return std::exp(kI * dot(t.center, xi)) * std::pow(2.0 * kPi, 1.5) * s * s * s *
         std::exp(-0.5 * s * s * dot(xi, xi));
}

}  // namespace

cplx scalar_term(const TermSpec& t, const Vec3& x) {
  return scalar_term_impl<cplx>(t, {x[0], x[1], x[2]});
}
Jet scalar_term(const TermSpec& t, const std::array<Jet, 3>& x) { return scalar_term_impl<Jet>(t, x); }

CVec3 vector_term(const TermSpec& t, const Vec3& x) {
  const auto v = vector_term_impl<cplx>(t, {x[0], x[1], x[2]});
  return {v[0], v[1], v[2]};
}
std::array<Jet, 3> vector_term(const TermSpec& t, const std::array<Jet, 3>& x) {
  return vector_term_impl<Jet>(t, x);
}

cplx scalar_term_hat(const TermSpec& t, const Vec3& xi) {
  switch (t.family) {
    case Family::Zero:
      return 0.0;
    case Family::GaussianBump:
      return t.amplitude * gauss_hat(t, xi);
    default:
      break;
  }
  throw InvalidArgument("no closed-form Fourier transform for scalar family '" + family_name(t.family) + "'");
}

CVec3 vector_term_hat(const TermSpec& t, const Vec3& xi) {
  const double s2 = t.width * t.width;
  switch (t.family) {
    case Family::Zero:
      return {};
    case Family::GaussianBump:
      return (t.amplitude * gauss_hat(t, xi)) * t.direction;
    case Family::RotationBump: {
      const cplx f = t.amplitude * kI * s2 * gauss_hat(t, xi);
      return {-f * xi[1], f * xi[0], 0.0};
    }
    case Family::GradientBump: {
      const cplx f = -kI * t.amplitude * gauss_hat(t, xi);
      return f * complexify(xi);
    }
    default:
      break;
  }
  throw InvalidArgument("no closed-form Fourier transform for vector family '" + family_name(t.family) + "'");
}

CVec3 PotentialModel::A(const Vec3& x) const {
  CVec3 out{};
  for (const auto& t : vector_terms) out += vector_term(t, x);
  return out;
}

cplx PotentialModel::q(const Vec3& x) const {
  cplx out = 0.0;
  for (const auto& t : scalar_terms) out += scalar_term(t, x);
  return out;
}

std::array<Jet, 3> PotentialModel::A_jet(const Vec3& x) const {
  const auto c = coordinates(x);
  std::array<Jet, 3> out{};
  for (const auto& t : vector_terms) {
    const auto v = vector_term(t, c);
    for (int d = 0; d < 3; ++d) out[d] += v[d];
  }
  return out;
}

Jet PotentialModel::q_jet(const Vec3& x) const {
  const auto c = coordinates(x);
  Jet out;
  for (const auto& t : scalar_terms) out += scalar_term(t, c);
  return out;
}

cplx PotentialModel::div_A(const Vec3& x) const {
  const auto a = A_jet(x);
  return a[0].g[0] + a[1].g[1] + a[2].g[2];
}

CVec3 PotentialModel::A_hat(const Vec3& xi) const {
  CVec3 out{};
  for (const auto& t : vector_terms) out += vector_term_hat(t, xi);
  return out;
}

cplx PotentialModel::q_hat(const Vec3& xi) const {
  cplx out = 0.0;
  for (const auto& t : scalar_terms) out += scalar_term_hat(t, xi);
  return out;
}

PotentialModel PotentialModel::conjugated() const {
  PotentialModel out = *this;
  for (auto& t : out.vector_terms) {
    t.amplitude = std::conj(t.amplitude);
    t.direction = mslab::conj(t.direction);
  }
  for (auto& t : out.scalar_terms) t.amplitude = std::conj(t.amplitude);
  return out;
}

bool PotentialModel::has_magnetic() const {
  for (const auto& t : vector_terms)
    if (t.family != Family::Zero && t.amplitude != 0.0) return true;
  return false;
}

PotentialModel difference(const PotentialModel& a, const PotentialModel& b) {
  PotentialModel out = a;
  for (auto t : b.vector_terms) {
    t.amplitude = -t.amplitude;
    out.vector_terms.push_back(t);
  }
  for (auto t : b.scalar_terms) {
    t.amplitude = -t.amplitude;
    out.scalar_terms.push_back(t);
  }
  return out;
}

PotentialModel sum(const PotentialModel& a, const PotentialModel& b) {
  PotentialModel out = a;
  out.vector_terms.insert(out.vector_terms.end(), b.vector_terms.begin(), b.vector_terms.end());
  out.scalar_terms.insert(out.scalar_terms.end(), b.scalar_terms.begin(), b.scalar_terms.end());
  return out;
}

PotentialPair sample_potentials(const PotentialModel& model, const Grid& grid) {
  PotentialPair p{sample_vector(grid, [&](const Vec3& x) { return model.A(x); }),
                  sample_scalar(grid, [&](const Vec3& x) { return model.q(x); })};
  return p;
}

PotentialPair zero_potentials(const Grid& grid) { return {VectorField(grid), ScalarField(grid)}; }

PotentialPair conjugated(const PotentialPair& p) { return {conj(p.A), conj(p.q)}; }

}  // namespace mslab
