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

#include "mslab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fft.hpp"

namespace mslab {

namespace {

void check_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw InvalidArgument("fields live on different grids");
}

}  // namespace

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  check_same_grid(grid, o.grid);
  for (std::size_t n = 0; n < values.size(); ++n) values[n] += o.values[n];
  compact = compact && o.compact;
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  check_same_grid(grid, o.grid);
  for (std::size_t n = 0; n < values.size(); ++n) values[n] -= o.values[n];
  compact = compact && o.compact;
  return *this;
}

ScalarField& ScalarField::operator*=(cplx s) {
  for (auto& v : values) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(cplx s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  check_same_grid(a.grid, b.grid);
  ScalarField out(a.grid);
  for (std::size_t n = 0; n < a.size(); ++n) out[n] = a[n] * b[n];
  out.compact = a.compact || b.compact;
  return out;
}

ScalarField conj(const ScalarField& a) {
  ScalarField out = a;
  for (auto& v : out.values) v = std::conj(v);
  return out;
}

VectorField::VectorField(const Grid& g) : grid(g) {
  for (auto& c : comp) c.assign(g.size(), 0.0);
}

ScalarField VectorField::component(int d) const {
  ScalarField out(grid);
  out.values = comp[d];
  out.compact = compact;
  return out;
}

VectorField& VectorField::operator+=(const VectorField& o) {
  check_same_grid(grid, o.grid);
  for (int d = 0; d < 3; ++d)
    for (std::size_t n = 0; n < size(); ++n) comp[d][n] += o.comp[d][n];
  compact = compact && o.compact;
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  check_same_grid(grid, o.grid);
  for (int d = 0; d < 3; ++d)
    for (std::size_t n = 0; n < size(); ++n) comp[d][n] -= o.comp[d][n];
  compact = compact && o.compact;
  return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(cplx s, VectorField a) {
  for (auto& c : a.comp)
    for (auto& v : c) v *= s;
  return a;
}

VectorField conj(const VectorField& a) {
  VectorField out = a;
  for (auto& c : out.comp)
    for (auto& v : c) v = std::conj(v);
  return out;
}

ScalarField contract(const CVec3& c, const VectorField& a) {
  ScalarField out(a.grid);
  for (std::size_t n = 0; n < a.size(); ++n)
    out[n] = c[0] * a.comp[0][n] + c[1] * a.comp[1][n] + c[2] * a.comp[2][n];
  out.compact = a.compact;
  return out;
}

TwoForm::TwoForm(const Grid& g) : grid(g) {
  for (auto& c : comp) c.assign(g.size(), 0.0);
}

ScalarField sample_scalar(const Grid& grid, const std::function<cplx(const Vec3&)>& fn) {
  ScalarField out(grid);
  for (std::size_t n = 0; n < grid.size(); ++n) out[n] = fn(grid.point(n));
  return out;
}

VectorField sample_vector(const Grid& grid, const std::function<CVec3(const Vec3&)>& fn) {
  VectorField out(grid);
  for (std::size_t n = 0; n < grid.size(); ++n) out.set(n, fn(grid.point(n)));
  return out;
}

ScalarField restrict_to(const ScalarField& f, const Domain& domain) {
  ScalarField out = f;
  for (std::size_t n = 0; n < f.size(); ++n)
    if (domain.rho(f.grid.point(n)) <= 0.0) out[n] = 0.0;
  out.compact = true;
  return out;
}

double extension_cutoff(double rho, double scale) {
  if (rho >= 0.0) return 1.0;
  const double t = -rho / (0.2 * scale);
  if (t >= 1.0) return 0.0;
  auto f = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  return f(1.0 - t) / (f(1.0 - t) + f(t));
}

namespace {

double domain_scale(const Domain& domain) {
  if (domain.kind() == DomainKind::Box) {
    const Vec3 e = domain.box_hi() - domain.box_lo();
    return 0.5 * std::min({e[0], e[1], e[2]});
  }
  return domain.radius();
}

// Fills exterior nodes layer by layer with the mean of already-known
// 6-neighbours, then applies the cutoff.
void extend_component(std::vector<cplx>& v, const Grid& g, const Domain& domain) {
  const std::size_t n = g.size();
  std::vector<char> known(n, 0);
  std::vector<double> rho(n);
  std::size_t known_count = 0;
  for (std::size_t idx = 0; idx < n; ++idx) {
    rho[idx] = domain.rho(g.point(idx));
    if (rho[idx] > 0.0) {
      known[idx] = 1;
      ++known_count;
    }
  }
  if (known_count == 0) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  std::vector<std::size_t> frontier;
  std::vector<cplx> staged;
  while (known_count < n) {
    frontier.clear();
    staged.clear();
    for (std::size_t idx = 0; idx < n; ++idx) {
      if (known[idx]) continue;
      const auto ijk = g.unravel(idx);
      cplx sum = 0.0;
      int cnt = 0;
      for (int d = 0; d < 3; ++d) {
        const std::size_t s = g.stride(d);
        if (ijk[d] > 0 && known[idx - s]) { sum += v[idx - s]; ++cnt; }
        if (ijk[d] + 1 < g.dims[d] && known[idx + s]) { sum += v[idx + s]; ++cnt; }
      }
      if (cnt > 0) {
        frontier.push_back(idx);
        staged.push_back(sum / static_cast<double>(cnt));
      }
    }
    if (frontier.empty()) break;
    for (std::size_t m = 0; m < frontier.size(); ++m) {
      v[frontier[m]] = staged[m];
      known[frontier[m]] = 1;
    }
    known_count += frontier.size();
  }
  const double scale = domain_scale(domain);
  for (std::size_t idx = 0; idx < n; ++idx) v[idx] *= extension_cutoff(rho[idx], scale);
}

}  // namespace

VectorField extend_by_cutoff(const VectorField& field, const Domain& domain) {
  check_same_grid(field.grid, domain.grid());
  VectorField out = field;
  for (auto& c : out.comp) extend_component(c, out.grid, domain);
  out.compact = true;
  return out;
}

ScalarField extend_by_cutoff(const ScalarField& field, const Domain& domain) {
  check_same_grid(field.grid, domain.grid());
  ScalarField out = field;
  extend_component(out.values, out.grid, domain);
  out.compact = true;
  return out;
}

double mollifier_profile(const Vec3& x) {
  const double r2 = dot(x, x);
  return r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
}

namespace {

void mollify_component(std::vector<cplx>& v, const Grid& g, double tau) {
  std::array<long, 3> r{};
  for (int d = 0; d < 3; ++d) r[d] = static_cast<long>(std::ceil(tau / g.spacing[d]));
  std::array<std::size_t, 3> m{};
  for (int d = 0; d < 3; ++d) m[d] = g.dims[d] + static_cast<std::size_t>(r[d]) + 1;
  const std::size_t total = m[0] * m[1] * m[2];
  auto pidx = [&](std::size_t i, std::size_t j, std::size_t k) { return i + m[0] * (j + m[1] * k); };

  std::vector<cplx> kernel(total, 0.0);
  double mass = 0.0;
  for (long k = -r[2]; k <= r[2]; ++k)
    for (long j = -r[1]; j <= r[1]; ++j)
      for (long i = -r[0]; i <= r[0]; ++i) {
        const double w = mollifier_profile(
            {i * g.spacing[0] / tau, j * g.spacing[1] / tau, k * g.spacing[2] / tau});
        if (w == 0.0) continue;
        mass += w;
        const auto wi = static_cast<std::size_t>((i + static_cast<long>(m[0])) % static_cast<long>(m[0]));
        const auto wj = static_cast<std::size_t>((j + static_cast<long>(m[1])) % static_cast<long>(m[1]));
        const auto wk = static_cast<std::size_t>((k + static_cast<long>(m[2])) % static_cast<long>(m[2]));
        kernel[pidx(wi, wj, wk)] = w;
      }
  for (auto& w : kernel) w /= mass;

  std::vector<cplx> buf(total, 0.0);
  for (std::size_t k = 0; k < g.dims[2]; ++k)
    for (std::size_t j = 0; j < g.dims[1]; ++j)
      for (std::size_t i = 0; i < g.dims[0]; ++i) buf[pidx(i, j, k)] = v[g.index(i, j, k)];

  detail::Fft fk({m[0], m[1], m[2]}, kernel.data());
  fk.forward();
  detail::Fft fb({m[0], m[1], m[2]}, buf.data());
  fb.forward();
  for (std::size_t n = 0; n < total; ++n) buf[n] *= kernel[n] / static_cast<double>(total);
  fb.backward();
  for (std::size_t k = 0; k < g.dims[2]; ++k)
    for (std::size_t j = 0; j < g.dims[1]; ++j)
      for (std::size_t i = 0; i < g.dims[0]; ++i) v[g.index(i, j, k)] = buf[pidx(i, j, k)];
}

void check_tau(const Grid& g, double tau) {
  require(tau > 0.0 && std::isfinite(tau), "mollifier tau must be positive");
  for (int d = 0; d < 3; ++d)
    if (tau < 2.0 * g.spacing[d])
      throw InvalidArgument("mollifier tau under-resolved: needs at least 2 grid cells");
}

}  // namespace

ScalarField mollify(const ScalarField& field, const MollifierSpec& spec) {
  check_tau(field.grid, spec.tau);
  ScalarField out = field;
  mollify_component(out.values, out.grid, spec.tau);
  return out;
}

VectorField mollify(const VectorField& field, const MollifierSpec& spec) {
  check_tau(field.grid, spec.tau);
  VectorField out = field;
  for (auto& c : out.comp) mollify_component(c, out.grid, spec.tau);
  return out;
}

ScalarField partial(const ScalarField& f, int axis) {
  require(axis >= 0 && axis < 3, "axis must be 0, 1 or 2");
  const Grid& g = f.grid;
  ScalarField out(g);
  out.compact = f.compact;
  const std::size_t s = g.stride(axis);
  const std::size_t n = g.dims[axis];
  const double inv = 1.0 / (2.0 * g.spacing[axis]);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const std::size_t c = g.unravel(idx)[axis];
    if (c == 0) {
      out[idx] = (-3.0 * f[idx] + 4.0 * f[idx + s] - f[idx + 2 * s]) * inv;
    } else if (c + 1 == n) {
      out[idx] = (3.0 * f[idx] - 4.0 * f[idx - s] + f[idx - 2 * s]) * inv;
    } else {
      out[idx] = (f[idx + s] - f[idx - s]) * inv;
    }
  }
  return out;
}

VectorField gradient(const ScalarField& f) {
  VectorField out(f.grid);
  for (int d = 0; d < 3; ++d) out.comp[d] = partial(f, d).values;
  out.compact = f.compact;
  return out;
}

ScalarField divergence(const VectorField& a) {
  ScalarField out(a.grid);
  for (int d = 0; d < 3; ++d) out += partial(a.component(d), d);
  out.compact = a.compact;
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    const auto ijk = g.unravel(idx);
    cplx acc = 0.0;
    for (int d = 0; d < 3; ++d) {
      const std::size_t s = g.stride(d);
      const double h2 = g.spacing[d] * g.spacing[d];
      const std::size_t c = ijk[d];
      if (c == 0) {
        acc += (2.0 * f[idx] - 5.0 * f[idx + s] + 4.0 * f[idx + 2 * s] - f[idx + 3 * s]) / h2;
      } else if (c + 1 == g.dims[d]) {
        acc += (2.0 * f[idx] - 5.0 * f[idx - s] + 4.0 * f[idx - 2 * s] - f[idx - 3 * s]) / h2;
      } else {
        acc += (f[idx + s] - 2.0 * f[idx] + f[idx - s]) / h2;
      }
    }
    out[idx] = acc;
  }
  out.compact = f.compact;
  return out;
}

TwoForm curl(const VectorField& a) {
  TwoForm out(a.grid);
  constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (int p = 0; p < 3; ++p) {
    const int j = pairs[p][0];
    const int k = pairs[p][1];
    const ScalarField dj_ak = partial(a.component(k), j);
    const ScalarField dk_aj = partial(a.component(j), k);
    for (std::size_t n = 0; n < a.size(); ++n) out.comp[p][n] = dj_ak[n] - dk_aj[n];
  }
  return out;
}

VectorField gauge_transform(const VectorField& a, const ScalarField& psi) {
  check_same_grid(a.grid, psi.grid);
  return a + gradient(psi);
}

double norm_sobolev_scl(const ScalarField& u, double s, double h, int padding) {
  require(h > 0.0, "semiclassical parameter h must be positive");
  require(padding >= 1, "padding must be >= 1");
  const Grid& g = u.grid;
  for (const auto& v : u.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InvalidArgument("norm_sobolev_scl: non-finite field values");
  std::array<std::size_t, 3> m{};
  for (int d = 0; d < 3; ++d) m[d] = g.dims[d] * static_cast<std::size_t>(padding);
  const std::size_t total = m[0] * m[1] * m[2];
  std::vector<cplx> buf(total, 0.0);
  for (std::size_t k = 0; k < g.dims[2]; ++k)
    for (std::size_t j = 0; j < g.dims[1]; ++j)
      for (std::size_t i = 0; i < g.dims[0]; ++i)
        buf[i + m[0] * (j + m[1] * k)] = u.at(i, j, k);
  if (s == 0.0) {
    double acc = 0.0;
    for (const auto& v : buf) acc += std::norm(v);
    return std::sqrt(acc * g.cell_volume());
  }
  detail::Fft fft({m[0], m[1], m[2]}, buf.data());
  fft.forward();
  std::array<std::vector<double>, 3> k2;
  for (int d = 0; d < 3; ++d) {
    k2[d].resize(m[d]);
    const double base = 2.0 * kPi / (static_cast<double>(m[d]) * g.spacing[d]);
    for (std::size_t q = 0; q < m[d]; ++q) {
      const double kk = base * static_cast<double>(detail::wrap_frequency(q, m[d]));
      k2[d][q] = kk * kk;
    }
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < m[2]; ++k)
    for (std::size_t j = 0; j < m[1]; ++j)
      for (std::size_t i = 0; i < m[0]; ++i) {
        const double mult = std::pow(1.0 + h * h * (k2[0][i] + k2[1][j] + k2[2][k]), s);
        acc += mult * std::norm(buf[i + m[0] * (j + m[1] * k)]);
      }
  return std::sqrt(acc * g.cell_volume() / static_cast<double>(total));
}

double norm_l2(const ScalarField& u) {
  double acc = 0.0;
  for (const auto& v : u.values) acc += std::norm(v);
  return std::sqrt(acc * u.grid.cell_volume());
}

double norm_l2(const VectorField& a) {
  double acc = 0.0;
  for (const auto& c : a.comp)
    for (const auto& v : c) acc += std::norm(v);
  return std::sqrt(acc * a.grid.cell_volume());
}

double norm_l2(const TwoForm& w) {
  double acc = 0.0;
  for (const auto& c : w.comp)
    for (const auto& v : c) acc += std::norm(v);
  return std::sqrt(acc * w.grid.cell_volume());
}

double norm_sup(const ScalarField& u) {
  double m = 0.0;
  for (const auto& v : u.values) m = std::max(m, std::abs(v));
  return m;
}

double norm_sup(const VectorField& a) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, norm(a.at(n)));
  return m;
}

double norm_sup(const TwoForm& w) {
  double m = 0.0;
  for (const auto& c : w.comp)
    for (const auto& v : c) m = std::max(m, std::abs(v));
  return m;
}

namespace {

inline void catmull_rom(double t, double w[4]) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
  w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
  w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

}  // namespace

cplx interpolate_cubic(const ScalarField& f, const Vec3& x) {
  const Grid& g = f.grid;
  long base[3];
  double w[3][4];
  for (int d = 0; d < 3; ++d) {
    const double t = (x[d] - g.origin[d]) / g.spacing[d];
    if (t < 0.0 || t > static_cast<double>(g.dims[d] - 1)) return 0.0;
    const double fl = std::floor(t);
    base[d] = static_cast<long>(fl) - 1;
    catmull_rom(t - fl, w[d]);
  }
  cplx acc = 0.0;
  for (int c = 0; c < 4; ++c) {
    const long k = base[2] + c;
    if (k < 0 || k >= static_cast<long>(g.dims[2]) || w[2][c] == 0.0) continue;
    for (int b = 0; b < 4; ++b) {
      const long j = base[1] + b;
      if (j < 0 || j >= static_cast<long>(g.dims[1]) || w[1][b] == 0.0) continue;
      const double wjk = w[1][b] * w[2][c];
      for (int a = 0; a < 4; ++a) {
        const long i = base[0] + a;
        if (i < 0 || i >= static_cast<long>(g.dims[0])) continue;
        acc += wjk * w[0][a] * f.at(i, j, k);
      }
    }
  }
  return acc;
}

cplx interpolate_linear(const ScalarField& f, const Vec3& x) {
  const Grid& g = f.grid;
  long base[3];
  double fr[3];
  for (int d = 0; d < 3; ++d) {
    const double t = (x[d] - g.origin[d]) / g.spacing[d];
    if (t < 0.0 || t > static_cast<double>(g.dims[d] - 1)) return 0.0;
    base[d] = std::min(static_cast<long>(std::floor(t)), static_cast<long>(g.dims[d]) - 2);
    fr[d] = t - static_cast<double>(base[d]);
  }
  cplx acc = 0.0;
  for (int c = 0; c < 2; ++c)
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) {
        const double w = (a ? fr[0] : 1.0 - fr[0]) * (b ? fr[1] : 1.0 - fr[1]) * (c ? fr[2] : 1.0 - fr[2]);
        acc += w * f.at(base[0] + a, base[1] + b, base[2] + c);
      }
  return acc;
}

double hardy_ratio(const ScalarField& f, const Domain& domain) {
  const VectorField grad = gradient(f);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t n = 0; n < f.size(); ++n) {
    const double delta = domain.rho(f.grid.point(n));
    if (delta <= 0.0) continue;
    num += std::norm(f[n]) / (delta * delta);
    den += std::norm(grad.comp[0][n]) + std::norm(grad.comp[1][n]) + std::norm(grad.comp[2][n]);
  }
  if (den == 0.0) throw NumericalError("hardy_ratio: gradient vanishes");
  return std::sqrt(num / den);
}

}  // namespace mslab
