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
#include <string>
#include <vector>

#include "mslab/fields.hpp"
#include "mslab/jet.hpp"
#include "mslab/types.hpp"

namespace mslab {

/// Closed-form potential families. With G(x) = exp(-|x - c|^2 / (2 s^2)):
///   gaussian_bump   scalar a G, vector a d G
///   rotation_bump   vector a (-(x2 - c2), x1 - c1, 0) G
///   gradient_bump   vector a grad G
///   constants       scalar a, vector a d
///   local_constant  a d P(|x - c| / s), P = 1 for r <= 1/2 and 0 for r >= 1
enum class Family { Zero, Constant, GaussianBump, RotationBump, GradientBump, LocalConstant };

Family parse_family(const std::string& name);
std::string family_name(Family f);

struct TermSpec {
  Family family = Family::Zero;
  cplx amplitude{1.0, 0.0};
  Vec3 center{};
  double width = 0.25;
  CVec3 direction{1.0, 0.0, 0.0};

  bool operator==(const TermSpec&) const = default;
};

/// A magnetic and an electric potential, each a sum of closed-form terms.
struct PotentialModel {
  std::vector<TermSpec> vector_terms;
  std::vector<TermSpec> scalar_terms;

  CVec3 A(const Vec3& x) const;
  cplx q(const Vec3& x) const;
  std::array<Jet, 3> A_jet(const Vec3& x) const;
  Jet q_jet(const Vec3& x) const;
  cplx div_A(const Vec3& x) const;

  /// Fourier transforms with the convention f^(xi) = int f(x) e^{i x.xi} dx.
  /// Throw InvalidArgument for families without compact decay.
  CVec3 A_hat(const Vec3& xi) const;
  cplx q_hat(const Vec3& xi) const;

  PotentialModel conjugated() const;
  bool has_magnetic() const;

  bool operator==(const PotentialModel&) const = default;
};

/// a - b, termwise.
PotentialModel difference(const PotentialModel& a, const PotentialModel& b);
PotentialModel sum(const PotentialModel& a, const PotentialModel& b);

/// Closed-form scalar term value and its jet.
cplx scalar_term(const TermSpec& t, const Vec3& x);
Jet scalar_term(const TermSpec& t, const std::array<Jet, 3>& x);
CVec3 vector_term(const TermSpec& t, const Vec3& x);
std::array<Jet, 3> vector_term(const TermSpec& t, const std::array<Jet, 3>& x);
cplx scalar_term_hat(const TermSpec& t, const Vec3& xi);
CVec3 vector_term_hat(const TermSpec& t, const Vec3& xi);

/// Gridded potentials: A on every grid node, q likewise.
struct PotentialPair {
  VectorField A;
  ScalarField q;

  const Grid& grid() const { return A.grid; }
};

PotentialPair sample_potentials(const PotentialModel& model, const Grid& grid);
PotentialPair zero_potentials(const Grid& grid);
/// (conj A, conj q).
PotentialPair conjugated(const PotentialPair& p);

}  // namespace mslab
