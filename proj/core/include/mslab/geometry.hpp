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
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "mslab/types.hpp"

namespace mslab {

/// Uniform Cartesian grid, nodes at origin + (i, j, k) * spacing. Linear
/// index runs x fastest.
struct Grid {
  std::array<std::size_t, 3> dims{0, 0, 0};
  Vec3 spacing{1.0, 1.0, 1.0};
  Vec3 origin{0.0, 0.0, 0.0};

  std::size_t size() const { return dims[0] * dims[1] * dims[2]; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return i + dims[0] * (j + dims[1] * k);
  }
  std::array<std::size_t, 3> unravel(std::size_t n) const {
    return {n % dims[0], (n / dims[0]) % dims[1], n / (dims[0] * dims[1])};
  }
  Vec3 point(std::size_t i, std::size_t j, std::size_t k) const {
    return {origin[0] + static_cast<double>(i) * spacing[0],
            origin[1] + static_cast<double>(j) * spacing[1],
            origin[2] + static_cast<double>(k) * spacing[2]};
  }
  Vec3 point(std::size_t n) const {
    auto [i, j, k] = unravel(n);
    return point(i, j, k);
  }
  Vec3 upper() const { return point(dims[0] - 1, dims[1] - 1, dims[2] - 1); }
  double cell_volume() const { return spacing[0] * spacing[1] * spacing[2]; }
  /// Axis-stride of the linear index.
  std::size_t stride(int axis) const {
    return axis == 0 ? 1 : (axis == 1 ? dims[0] : dims[0] * dims[1]);
  }

  /// Throws InvalidArgument unless dims >= 8 per axis and spacing > 0.
  void validate() const;

  bool operator==(const Grid&) const = default;
};

/// Cubic grid with `resolution` nodes per axis covering [center - half, center + half]^3.
Grid make_cube_grid(const Vec3& center, double half_width, std::size_t resolution);

enum class DomainKind { Ball, Box, Shell };

struct BoundingBox {
  Vec3 lo;
  Vec3 hi;
};

/// A smooth (or piecewise flat) bounded domain with its defining function
/// rho (> 0 inside, = 0 on the boundary, grad rho = -nu there) and the grid
/// it is discretized on. Immutable after construction.
class Domain {
 public:
  static Domain ball(const Vec3& center, double radius, const Grid& grid);
  static Domain box(const Vec3& lo, const Vec3& hi, const Grid& grid);
  /// Spherical shell r_in < |x - c| < r_out; used for gluing Cauchy data.
  static Domain shell(const Vec3& center, double r_in, double r_out, const Grid& grid);

  DomainKind kind() const { return kind_; }
  const Grid& grid() const { return grid_; }
  const Vec3& center() const { return center_; }
  double radius() const { return radius_; }
  double inner_radius() const { return inner_radius_; }
  const Vec3& box_lo() const { return lo_; }
  const Vec3& box_hi() const { return hi_; }

  double rho(const Vec3& x) const;
  Vec3 grad_rho(const Vec3& x) const;
  bool contains(const Vec3& x) const { return rho(x) > 0.0; }

  /// Unit outward normal at (or nearest to) x on the boundary.
  Vec3 outward_normal(const Vec3& x) const;
  /// Nearest boundary point.
  Vec3 project_to_boundary(const Vec3& x) const;
  /// Modulus of continuity of grad rho. Smooth domains here are Lipschitz: w(t) = t.
  double modulus_of_continuity(double t) const { return t; }

  BoundingBox bounding_box() const;
  double volume() const;
  double surface_area() const;

  /// For `inside` in the domain and `outside` not, the fraction t in (0, 1]
  /// along the segment where rho changes sign.
  double boundary_crossing(const Vec3& inside, const Vec3& outside) const;

 private:
  Domain() = default;
  DomainKind kind_{DomainKind::Ball};
  Vec3 center_{};
  double radius_{1.0};
  double inner_radius_{0.0};
  Vec3 lo_{};
  Vec3 hi_{};
  Grid grid_{};
};

/// Unit-center-free ball domain with rho(x) = radius - |x|. The grid spans
/// [-1.25 radius, 1.25 radius]^3, widened when needed to keep a two-cell margin.
Domain build_ball_domain(double radius, std::size_t resolution);

struct BoundaryMesh {
  std::vector<Vec3> nodes;
  std::vector<Vec3> normals;
  std::vector<double> weights;
};

/// Product Gauss quadrature: Gauss-Legendre in cos(theta) with `order` points
/// times 2*order equispaced azimuths per sphere; Gauss-Legendre tensor rules
/// on each box face. Exact for polynomials of degree <= 2*order - 1.
BoundaryMesh boundary_quadrature(const Domain& domain, int order = 16);

/// delta(x): distance from an interior point to the boundary.
double distance_to_boundary(const Domain& domain, const Vec3& point);

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// Volume quadrature weights over the domain, one per grid node. Only
/// interior nodes (rho > 0) carry weight; boundary voxel fractions are
/// resolved by sub-sampling and attached to the nearest interior node so
/// the weights sum to vol(domain) up to sub-sampling error.
std::vector<double> volume_weights(const Domain& domain, int subsamples = 4);

/// Plain voxel count: number of interior nodes times the cell volume.
double voxel_volume(const Domain& domain);

}  // namespace mslab
