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

#include "mslab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mslab {

void Grid::validate() const {
  for (int d = 0; d < 3; ++d) {
    require(dims[d] >= 8, "grid needs at least 8 nodes per axis, got " + std::to_string(dims[d]));
    require(spacing[d] > 0.0 && std::isfinite(spacing[d]), "grid spacing must be positive");
  }
}

Grid make_cube_grid(const Vec3& center, double half_width, std::size_t resolution) {
  require(resolution >= 8, "resolution must be >= 8");
  require(half_width > 0.0, "half width must be positive");
  Grid g;
  g.dims = {resolution, resolution, resolution};
  const double h = 2.0 * half_width / static_cast<double>(resolution - 1);
  g.spacing = {h, h, h};
  g.origin = {center[0] - half_width, center[1] - half_width, center[2] - half_width};
  return g;
}

Domain Domain::ball(const Vec3& center, double radius, const Grid& grid) {
  require(radius > 0.0, "ball radius must be positive");
  grid.validate();
  Domain d;
  d.kind_ = DomainKind::Ball;
  d.center_ = center;
  d.radius_ = radius;
  d.grid_ = grid;
  return d;
}

Domain Domain::box(const Vec3& lo, const Vec3& hi, const Grid& grid) {
  for (int i = 0; i < 3; ++i) require(hi[i] > lo[i], "box must have positive extent");
  grid.validate();
  Domain d;
  d.kind_ = DomainKind::Box;
  d.lo_ = lo;
  d.hi_ = hi;
  d.center_ = 0.5 * (lo + hi);
  d.grid_ = grid;
  return d;
}

Domain Domain::shell(const Vec3& center, double r_in, double r_out, const Grid& grid) {
  require(r_in > 0.0 && r_out > r_in, "shell needs 0 < r_in < r_out");
  grid.validate();
  Domain d;
  d.kind_ = DomainKind::Shell;
  d.center_ = center;
  d.radius_ = r_out;
  d.inner_radius_ = r_in;
  d.grid_ = grid;
  return d;
}

double Domain::rho(const Vec3& x) const {
  switch (kind_) {
    case DomainKind::Ball:
      return radius_ - norm(x - center_);
    case DomainKind::Shell: {
      const double r = norm(x - center_);
      return std::min(r - inner_radius_, radius_ - r);
    }
    case DomainKind::Box: {
      double m = std::numeric_limits<double>::infinity();
      for (int i = 0; i < 3; ++i) m = std::min({m, x[i] - lo_[i], hi_[i] - x[i]});
      return m;
    }
  }
  return 0.0;
}

Vec3 Domain::grad_rho(const Vec3& x) const {
  switch (kind_) {
    case DomainKind::Ball: {
      const Vec3 d = x - center_;
      const double r = norm(d);
      return r > 0.0 ? (-1.0 / r) * d : Vec3{};
    }
    case DomainKind::Shell: {
      const Vec3 d = x - center_;
      const double r = norm(d);
      if (r == 0.0) return {};
      return (r - inner_radius_ < radius_ - r) ? (1.0 / r) * d : (-1.0 / r) * d;
    }
    case DomainKind::Box: {
      int best_axis = 0;
      double best = std::numeric_limits<double>::infinity();
      double sign = 1.0;
      for (int i = 0; i < 3; ++i) {
        if (x[i] - lo_[i] < best) { best = x[i] - lo_[i]; best_axis = i; sign = 1.0; }
        if (hi_[i] - x[i] < best) { best = hi_[i] - x[i]; best_axis = i; sign = -1.0; }
      }
      Vec3 g{};
      g[best_axis] = sign;
      return g;
    }
  }
  return {};
}

Vec3 Domain::outward_normal(const Vec3& x) const { return -normalized(grad_rho(x)); }

Vec3 Domain::project_to_boundary(const Vec3& x) const {
  switch (kind_) {
    case DomainKind::Ball: {
      const Vec3 d = x - center_;
      const double r = norm(d);
      if (r == 0.0) return center_ + Vec3{radius_, 0.0, 0.0};
      return center_ + (radius_ / r) * d;
    }
    case DomainKind::Shell: {
      const Vec3 d = x - center_;
      const double r = norm(d);
      const Vec3 dir = r == 0.0 ? Vec3{1.0, 0.0, 0.0} : (1.0 / r) * d;
      const double target = std::abs(r - inner_radius_) < std::abs(radius_ - r) ? inner_radius_ : radius_;
      return center_ + target * dir;
    }
    case DomainKind::Box: {
      Vec3 p{};
      for (int i = 0; i < 3; ++i) p[i] = std::clamp(x[i], lo_[i], hi_[i]);
      if (rho(p) > 0.0) {
        // Interior point: push to the nearest face.
        int best_axis = 0;
        double best = std::numeric_limits<double>::infinity();
        double target = 0.0;
        for (int i = 0; i < 3; ++i) {
          if (p[i] - lo_[i] < best) { best = p[i] - lo_[i]; best_axis = i; target = lo_[i]; }
          if (hi_[i] - p[i] < best) { best = hi_[i] - p[i]; best_axis = i; target = hi_[i]; }
        }
        p[best_axis] = target;
      }
      return p;
    }
  }
  return x;
}

BoundingBox Domain::bounding_box() const {
  if (kind_ == DomainKind::Box) return {lo_, hi_};
  const Vec3 r{radius_, radius_, radius_};
  return {center_ - r, center_ + r};
}

double Domain::volume() const {
  switch (kind_) {
    case DomainKind::Ball:
      return 4.0 / 3.0 * kPi * radius_ * radius_ * radius_;
    case DomainKind::Shell:
      return 4.0 / 3.0 * kPi * (std::pow(radius_, 3) - std::pow(inner_radius_, 3));
    case DomainKind::Box:
      return (hi_[0] - lo_[0]) * (hi_[1] - lo_[1]) * (hi_[2] - lo_[2]);
  }
  return 0.0;
}

double Domain::surface_area() const {
  switch (kind_) {
    case DomainKind::Ball:
      return 4.0 * kPi * radius_ * radius_;
    case DomainKind::Shell:
      return 4.0 * kPi * (radius_ * radius_ + inner_radius_ * inner_radius_);
    case DomainKind::Box: {
      const Vec3 e = hi_ - lo_;
      return 2.0 * (e[0] * e[1] + e[0] * e[2] + e[1] * e[2]);
    }
  }
  return 0.0;
}

namespace {

// Smallest t in (0, 1] with |a + t (b - a) - c| = r, or a negative value.
double sphere_hit(const Vec3& a, const Vec3& b, const Vec3& c, double r) {
  const Vec3 d = b - a;
  const Vec3 f = a - c;
  const double qa = dot(d, d);
  const double qb = 2.0 * dot(f, d);
  const double qc = dot(f, f) - r * r;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return -1.0;
  const double s = std::sqrt(disc);
  double best = -1.0;
  for (double t : {(-qb - s) / (2.0 * qa), (-qb + s) / (2.0 * qa)}) {
    if (t > 0.0 && t <= 1.0 + 1e-12 && (best < 0.0 || t < best)) best = std::min(t, 1.0);
  }
  return best;
}

}  // namespace

double Domain::boundary_crossing(const Vec3& inside, const Vec3& outside) const {
  switch (kind_) {
    case DomainKind::Ball: {
      const double t = sphere_hit(inside, outside, center_, radius_);
      if (t > 0.0) return t;
      break;
    }
    case DomainKind::Shell: {
      double best = 2.0;
      for (double r : {inner_radius_, radius_}) {
        const double t = sphere_hit(inside, outside, center_, r);
        if (t > 0.0) best = std::min(best, t);
      }
      if (best <= 1.0) return best;
      break;
    }
    case DomainKind::Box: {
      double best = 1.0;
      const Vec3 d = outside - inside;
      for (int i = 0; i < 3; ++i) {
        if (d[i] > 0.0 && outside[i] >= hi_[i]) best = std::min(best, (hi_[i] - inside[i]) / d[i]);
        if (d[i] < 0.0 && outside[i] <= lo_[i]) best = std::min(best, (lo_[i] - inside[i]) / d[i]);
      }
      return std::clamp(best, 1e-300, 1.0);
    }
  }
  // Fallback: bisection on rho.
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (rho(inside + mid * (outside - inside)) > 0.0) lo = mid; else hi = mid;
  }
  return hi;
}

Domain build_ball_domain(double radius, std::size_t resolution) {
  require(radius > 0.0, "radius must be positive");
  require(resolution >= 8, "resolution must be >= 8");
  const double n1 = static_cast<double>(resolution - 1);
  // Two-cell margin: half = R + 2 * (2 half / n1).
  const double half = std::max(1.25 * radius, radius * n1 / (n1 - 4.0));
  return Domain::ball({0.0, 0.0, 0.0}, radius, make_cube_grid({0.0, 0.0, 0.0}, half, resolution));
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  require(n >= 1, "Gauss-Legendre order must be >= 1");
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute derivative at the converged root.
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

namespace {

void append_sphere(BoundaryMesh& mesh, const Vec3& c, double r, int order, double normal_sign) {
  const auto [ct, wt] = gauss_legendre(order);
  const int nphi = 2 * order;
  const double dphi = 2.0 * kPi / nphi;
  for (int i = 0; i < order; ++i) {
    const double st = std::sqrt(1.0 - ct[i] * ct[i]);
    for (int j = 0; j < nphi; ++j) {
      const double phi = (j + 0.5) * dphi;
      const Vec3 u{st * std::cos(phi), st * std::sin(phi), ct[i]};
      mesh.nodes.push_back(c + r * u);
      mesh.normals.push_back(normal_sign * u);
      mesh.weights.push_back(r * r * wt[i] * dphi);
    }
  }
}

}  // namespace

BoundaryMesh boundary_quadrature(const Domain& domain, int order) {
  require(order >= 1, "quadrature order must be >= 1");
  BoundaryMesh mesh;
  switch (domain.kind()) {
    case DomainKind::Ball:
      append_sphere(mesh, domain.center(), domain.radius(), order, 1.0);
      break;
    case DomainKind::Shell:
      append_sphere(mesh, domain.center(), domain.radius(), order, 1.0);
      append_sphere(mesh, domain.center(), domain.inner_radius(), order, -1.0);
      break;
    case DomainKind::Box: {
      const auto [gx, gw] = gauss_legendre(order);
      const Vec3 lo = domain.box_lo();
      const Vec3 hi = domain.box_hi();
      for (int axis = 0; axis < 3; ++axis) {
        const int a = (axis + 1) % 3;
        const int b = (axis + 2) % 3;
        const double ha = 0.5 * (hi[a] - lo[a]);
        const double hb = 0.5 * (hi[b] - lo[b]);
        for (double side : {-1.0, 1.0}) {
          for (int i = 0; i < order; ++i) {
            for (int j = 0; j < order; ++j) {
              Vec3 p{};
              p[axis] = side < 0.0 ? lo[axis] : hi[axis];
              p[a] = lo[a] + ha * (gx[i] + 1.0);
              p[b] = lo[b] + hb * (gx[j] + 1.0);
              Vec3 nrm{};
              nrm[axis] = side;
              mesh.nodes.push_back(p);
              mesh.normals.push_back(nrm);
              mesh.weights.push_back(ha * hb * gw[i] * gw[j]);
            }
          }
        }
      }
      break;
    }
  }
  return mesh;
}

double distance_to_boundary(const Domain& domain, const Vec3& point) {
  const double r = domain.rho(point);
  if (r < 0.0) throw InvalidArgument("distance_to_boundary: point lies outside the domain");
  // Ball, shell and box defining functions are exact distance functions inside.
  return r;
}

std::vector<double> volume_weights(const Domain& domain, int subsamples) {
  require(subsamples >= 1, "subsamples must be >= 1");
  const Grid& g = domain.grid();
  const std::size_t n = g.size();
  std::vector<double> w(n, 0.0);
  const double cell = g.cell_volume();
  const double half_diag = 0.5 * norm(g.spacing);
  const double sub_cell = cell / std::pow(static_cast<double>(subsamples), 3);

  for (std::size_t idx = 0; idx < n; ++idx) {
    const Vec3 x = g.point(idx);
    const double r = domain.rho(x);
    if (r > half_diag) {
      w[idx] += cell;
      continue;
    }
    if (r < -half_diag) continue;
    const auto [i, j, k] = g.unravel(idx);
    for (int a = 0; a < subsamples; ++a) {
      for (int b = 0; b < subsamples; ++b) {
        for (int c = 0; c < subsamples; ++c) {
          const Vec3 off{((a + 0.5) / subsamples - 0.5) * g.spacing[0],
                         ((b + 0.5) / subsamples - 0.5) * g.spacing[1],
                         ((c + 0.5) / subsamples - 0.5) * g.spacing[2]};
          const Vec3 p = x + off;
          if (domain.rho(p) <= 0.0) continue;
          if (r > 0.0) {
            w[idx] += sub_cell;
            continue;
          }
          // Attach to the nearest interior neighbour.
          double best = std::numeric_limits<double>::infinity();
          std::size_t target = n;
          for (int di = -1; di <= 1; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
              for (int dk = -1; dk <= 1; ++dk) {
                const long ii = static_cast<long>(i) + di;
                const long jj = static_cast<long>(j) + dj;
                const long kk = static_cast<long>(k) + dk;
                if (ii < 0 || jj < 0 || kk < 0 || ii >= static_cast<long>(g.dims[0]) ||
                    jj >= static_cast<long>(g.dims[1]) || kk >= static_cast<long>(g.dims[2]))
                  continue;
                const Vec3 q = g.point(ii, jj, kk);
                if (domain.rho(q) <= 0.0) continue;
                const double dist = norm(q - p);
                if (dist < best) {
                  best = dist;
                  target = g.index(ii, jj, kk);
                }
              }
            }
          }
          if (target < n) w[target] += sub_cell;
        }
      }
    }
  }
  return w;
}

double voxel_volume(const Domain& domain) {
  const Grid& g = domain.grid();
  std::size_t count = 0;
  for (std::size_t idx = 0; idx < g.size(); ++idx)
    if (domain.rho(g.point(idx)) > 0.0) ++count;
  return static_cast<double>(count) * g.cell_volume();
}

}  // namespace mslab
