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

#include "mslab/cauchy_transform.hpp"

#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "mslab/geometry.hpp"

namespace mslab {

namespace {

void check_orthonormal(const Vec3& a, const Vec3& b) {
  if (std::abs(norm(a) - 1.0) > 1e-10 || std::abs(norm(b) - 1.0) > 1e-10 || std::abs(dot(a, b)) > 1e-10)
    throw InvalidArgument("lamina frame vectors must be orthonormal");
}

std::size_t next_fast_size(std::size_t n) {
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

inline void catmull_rom(double t, double w[4]) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
  w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
  w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
  w[3] = 0.5 * (t3 - t2);
}

}  // namespace

LaminaFrame LaminaFrame::make(const Vec3& mu1, const Vec3& mu2, bool flip_real) {
  check_orthonormal(mu1, mu2);
  LaminaFrame f;
  f.mu1 = mu1;
  f.mu2 = mu2;
  const double s = flip_real ? -1.0 : 1.0;
  f.zeta0 = {s * mu1[0] + kI * mu2[0], s * mu1[1] + kI * mu2[1], s * mu1[2] + kI * mu2[2]};
  return f;
}

LaminaFrame LaminaFrame::from_zeta(const CVec3& zeta0) {
  LaminaFrame f;
  f.mu1 = real(zeta0);
  f.mu2 = imag(zeta0);
  check_orthonormal(f.mu1, f.mu2);
  f.zeta0 = zeta0;
  return f;
}

ZetaPair make_zeta_pair(const Vec3& xi, const Vec3& mu1, const Vec3& mu2, double h) {
  require(h > 0.0, "h must be positive");
  check_orthonormal(mu1, mu2);
  const double scale = std::max(1.0, norm(xi));
  if (std::abs(dot(mu1, xi)) > 1e-10 * scale || std::abs(dot(mu2, xi)) > 1e-10 * scale)
    throw InvalidArgument("mu1 and mu2 must be orthogonal to xi");
  const double hx = h * norm(xi);
  if (hx >= 2.0) throw InvalidArgument("make_zeta_pair requires h |xi| < 2");
  const double root = std::sqrt(1.0 - 0.25 * hx * hx);
  ZetaPair z;
  z.xi = xi;
  z.frame = LaminaFrame::make(mu1, mu2);
  z.h = h;
  for (int d = 0; d < 3; ++d) {
    z.zeta1[d] = 0.5 * kI * h * xi[d] + mu1[d] + kI * root * mu2[d];
    z.zeta2[d] = -0.5 * kI * h * xi[d] - mu1[d] + kI * root * mu2[d];
  }
  return z;
}

ScalarField cauchy_inverse(const ScalarField& f, const LaminaFrame& frame, const CauchyOptions& opt) {
  return cauchy_inverse(f, frame.zeta0, opt);
}

ScalarField cauchy_inverse(const ScalarField& f, const CVec3& zeta0, const CauchyOptions& opt) {
  const Vec3 a = real(zeta0);
  const Vec3 b = imag(zeta0);
  check_orthonormal(a, b);
  const Vec3 nrm = cross(a, b);
  const double rt = opt.truncation_radius;
  const std::size_t P = opt.plane_resolution;
  require(rt > 0.0, "truncation radius must be positive");
  require(P >= 16, "plane resolution must be >= 16");
  const Grid& g = f.grid;
  const double hmin = std::min({g.spacing[0], g.spacing[1], g.spacing[2]});
  const double step = 2.0 * rt / static_cast<double>(P);
  if (step > 2.0 * hmin)
    throw InvalidArgument("cauchy_inverse: plane quadrature under-resolved (step exceeds twice the grid spacing)");

  ScalarField out(g);
  double support = -1.0;
  for (std::size_t n = 0; n < g.size(); ++n)
    if (f[n] != 0.0) support = std::max(support, norm(g.point(n)));
  if (support < 0.0) return out;
  if (support > 0.5 * rt)
    throw InvalidArgument("cauchy_inverse: support of f exceeds half the truncation radius");

  // Largest |x| over the box bounds every in-plane and normal coordinate.
  double extent = 0.0;
  const Vec3 lo = g.origin;
  const Vec3 hi = g.upper();
  for (int c = 0; c < 8; ++c) {
    const Vec3 corner{(c & 1) ? hi[0] : lo[0], (c & 2) ? hi[1] : lo[1], (c & 4) ? hi[2] : lo[2]};
    extent = std::max(extent, norm(corner));
  }

  const double center = 0.5 * static_cast<double>(P - 1);
  const double reach = (extent + 2.0 * step) / step;
  const long lo_idx = std::max(0L, static_cast<long>(std::ceil(center - reach)));
  const long hi_idx = static_cast<long>(P) - 1 - lo_idx;
  const std::size_t m = static_cast<std::size_t>(hi_idx - lo_idx + 1);
  std::vector<double> s(m);
  for (std::size_t i = 0; i < m; ++i) s[i] = (static_cast<double>(lo_idx + static_cast<long>(i)) - center) * step;

  const double dt = hmin;
  const std::size_t nt = 2 * static_cast<std::size_t>(std::ceil((extent + 2.0 * dt) / dt)) + 1;
  const double tcenter = 0.5 * static_cast<double>(nt - 1);

  const std::size_t L = next_fast_size(2 * m - 1);
  std::vector<cplx> kernel(L * L, 0.0);
  const long span = static_cast<long>(m) - 1;
  for (long d2 = -span; d2 <= span; ++d2)
    for (long d1 = -span; d1 <= span; ++d1) {
      if (d1 == 0 && d2 == 0) continue;
      const double y1 = static_cast<double>(d1) * step;
      const double y2 = static_cast<double>(d2) * step;
      if (y1 * y1 + y2 * y2 > rt * rt) continue;
      const std::size_t i1 = static_cast<std::size_t>((d1 + static_cast<long>(L)) % static_cast<long>(L));
      const std::size_t i2 = static_cast<std::size_t>((d2 + static_cast<long>(L)) % static_cast<long>(L));
      kernel[i1 + L * i2] = step * step / (2.0 * kPi * cplx(y1, y2)) / static_cast<double>(L * L);
    }
  {
    detail::Fft fk({L, L}, kernel.data());
    fk.forward();
  }

  std::vector<cplx> planes(nt * m * m, 0.0);
  std::vector<char> active(nt, 0);
  std::vector<cplx> buf(L * L);
  detail::Fft fft({L, L}, buf.data());
  for (std::size_t k = 0; k < nt; ++k) {
    const double t = (static_cast<double>(k) - tcenter) * dt;
    if (std::abs(t) > support + 2.0 * hmin) continue;
    std::fill(buf.begin(), buf.end(), 0.0);
    bool any = false;
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < m; ++i) {
        if (s[i] * s[i] + s[j] * s[j] > (support + 2.0 * hmin) * (support + 2.0 * hmin)) continue;
        const Vec3 x = s[i] * a + s[j] * b + t * nrm;
        const cplx v = interpolate_cubic(f, x);
        if (v != 0.0) {
          buf[i + L * j] = v;
          any = true;
        }
      }
    if (!any) continue;
    cplx* plane = planes.data() + k * m * m;
    // Excluded singular cell: int_cell f(s - y) / (2 pi y) ~ -step^2 (d1 f - i d2 f) / (4 pi).
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < m; ++i) {
        const cplx fe = i + 1 < m ? buf[i + 1 + L * j] : 0.0;
        const cplx fw = i > 0 ? buf[i - 1 + L * j] : 0.0;
        const cplx fn = j + 1 < m ? buf[i + L * (j + 1)] : 0.0;
        const cplx fs = j > 0 ? buf[i + L * (j - 1)] : 0.0;
        plane[i + m * j] = -step * (fe - fw - kI * (fn - fs)) / (8.0 * kPi);
      }
    fft.forward();
    for (std::size_t n = 0; n < L * L; ++n) buf[n] *= kernel[n];
    fft.backward();
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < m; ++i) plane[i + m * j] += buf[i + L * j];
    active[k] = 1;
  }

  const double off = center - static_cast<double>(lo_idx);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3 x = g.point(n);
    const double u = dot(x, a) / step + off;
    const double v = dot(x, b) / step + off;
    const double w = dot(x, nrm) / dt + tcenter;
    const long iu = static_cast<long>(std::floor(u));
    const long iv = static_cast<long>(std::floor(v));
    const long iw = static_cast<long>(std::floor(w));
    double wu[4], wv[4], ww[4];
    catmull_rom(u - static_cast<double>(iu), wu);
    catmull_rom(v - static_cast<double>(iv), wv);
    catmull_rom(w - static_cast<double>(iw), ww);
    cplx acc = 0.0;
    for (int c = 0; c < 4; ++c) {
      const long kk = iw - 1 + c;
      if (kk < 0 || kk >= static_cast<long>(nt) || !active[kk]) continue;
      const cplx* plane = planes.data() + static_cast<std::size_t>(kk) * m * m;
      for (int bb = 0; bb < 4; ++bb) {
        const long jj = iv - 1 + bb;
        if (jj < 0 || jj >= static_cast<long>(m)) continue;
        const double wjk = wv[bb] * ww[c];
        for (int aa = 0; aa < 4; ++aa) {
          const long ii = iu - 1 + aa;
          if (ii < 0 || ii >= static_cast<long>(m)) continue;
          acc += wjk * wu[aa] * plane[ii + static_cast<long>(m) * jj];
        }
      }
    }
    out[n] = acc;
  }
  return out;
}

cplx cauchy_inverse_at(const std::function<cplx(const Vec3&)>& f, const CVec3& zeta0, const Vec3& x,
                       double truncation_radius, int radial_panels, int angles) {
  const Vec3 a = real(zeta0);
  const Vec3 b = imag(zeta0);
  check_orthonormal(a, b);
  require(radial_panels >= 1 && angles >= 4, "quadrature sizes too small");
  const auto [gx, gw] = gauss_legendre(8);
  const double dr = truncation_radius / radial_panels;
  const double dth = 2.0 * kPi / angles;
  cplx acc = 0.0;
  for (int t = 0; t < angles; ++t) {
    const double th = t * dth;
    const Vec3 e = std::cos(th) * a + std::sin(th) * b;
    cplx ray = 0.0;
    for (int p = 0; p < radial_panels; ++p)
      for (int q = 0; q < 8; ++q) {
        const double r = (p + 0.5 * (gx[q] + 1.0)) * dr;
        ray += 0.5 * dr * gw[q] * f(x - r * e);
      }
    acc += ray * std::exp(-kI * th) * dth;
  }
  return acc / (2.0 * kPi);
}

ScalarField transport_phase(const VectorField& a_sharp, const LaminaFrame& frame, const CauchyOptions& opt) {
  ScalarField rhs = contract(frame.zeta0, a_sharp);
  rhs *= -kI;
  return cauchy_inverse(rhs, frame.zeta0, opt);
}

ScalarField phase_sum(const VectorField& a1, const VectorField& a2, const LaminaFrame& frame,
                      const CauchyOptions& opt) {
  return transport_phase(a1 - a2, frame, opt);
}

ScalarField directional_dbar(const ScalarField& phi, const CVec3& zeta0) {
  ScalarField out(phi.grid);
  for (int d = 0; d < 3; ++d) {
    if (zeta0[d] == 0.0) continue;
    out += zeta0[d] * partial(phi, d);
  }
  return out;
}

}  // namespace mslab
