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

#include "mslab/recovery.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "fft.hpp"

namespace mslab {
namespace {

// Interior nodes whose six neighbours are interior too.
std::vector<std::size_t> deep_nodes(const Domain& domain) {
  const Grid& g = domain.grid();
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto ijk = g.unravel(n);
    bool ok = domain.contains(g.point(n));
    for (int d = 0; d < 3 && ok; ++d) {
      if (ijk[d] == 0 || ijk[d] + 1 == g.dims[d]) {
        ok = false;
        break;
      }
      ok = domain.contains(g.point(n + g.stride(d))) && domain.contains(g.point(n - g.stride(d)));
    }
    if (ok) out.push_back(n);
  }
  return out;
}

double equation_residual(const PotentialPair& p, const ScalarField& u, const std::vector<std::size_t>& nodes) {
  const ScalarField lap = laplacian(u);
  const VectorField grad = gradient(u);
  const ScalarField div = divergence(p.A);
  double num = 0.0, den = 0.0;
  for (std::size_t n : nodes) {
    const CVec3 a = p.A.at(n);
    const cplx lu = -lap[n] - 2.0 * kI * dot(a, grad.at(n)) + (-kI * div[n] + dot(a, a) + p.q[n]) * u[n];
    num += std::norm(lu);
    den += std::norm(u[n]);
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

// Runs job(i) for i < count on up to `threads` workers; rethrows the first error.
template <typename Job>
void parallel_for(std::size_t count, int threads, const Job& job) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

IdentityValue integral_identity_lhs(const PotentialPair& p1, const PotentialPair& p2, const ScalarField& u1,
                                    const ScalarField& u2, const Domain& domain, double residual_threshold) {
  const Grid& g = domain.grid();
  require(p1.grid() == g && p2.grid() == g && u1.grid == g && u2.grid == g, "all fields must share the domain grid");
  const std::vector<double> w = volume_weights(domain);
  const ScalarField u2c = conj(u2);
  const VectorField g1 = gradient(u1);
  const VectorField g2 = gradient(u2c);
  IdentityValue out;
  cplx sum = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (w[n] == 0.0) continue;
    const CVec3 a1 = p1.A.at(n), a2 = p2.A.at(n);
    const CVec3 flux = u1[n] * g2.at(n) - u2c[n] * g1.at(n);
    const cplx first = kI * dot(a1 - a2, flux);
    const cplx second = (dot(a1, a1) - dot(a2, a2) + p1.q[n] - p2.q[n]) * u1[n] * u2c[n];
    sum += w[n] * (first + second);
  }
  out.value = sum;
  const auto nodes = deep_nodes(domain);
  out.residual1 = equation_residual(p1, u1, nodes);
  out.residual2 = equation_residual(conjugated(p2), u2, nodes);
  if (out.residual1 > residual_threshold || out.residual2 > residual_threshold) {
    out.warning = "solution residuals " + std::to_string(out.residual1) + ", " + std::to_string(out.residual2) +
                  " exceed " + std::to_string(residual_threshold);
  }
  return out;
}

std::vector<Vec3> xi_lattice(double step, double xi_max) {
  require(step > 0.0 && xi_max >= 0.0, "lattice step must be positive and xi_max non-negative");
  const long m = static_cast<long>(std::floor(xi_max / step));
  std::vector<Vec3> out;
  for (long i = -m; i <= m; ++i)
    for (long j = -m; j <= m; ++j)
      for (long k = -m; k <= m; ++k) {
        const Vec3 xi{step * static_cast<double>(i), step * static_cast<double>(j), step * static_cast<double>(k)};
        if (norm(xi) <= xi_max * (1.0 + 1e-12)) out.push_back(xi);
      }
  return out;
}

double lattice_step(const Grid& grid) {
  double half = 0.0;
  for (int d = 0; d < 3; ++d)
    half = std::max(half, 0.5 * static_cast<double>(grid.dims[d] - 1) * grid.spacing[d]);
  return kPi / (2.0 * half);
}

std::array<Frame, 2> lattice_frames(const Vec3& xi) {
  std::array<int, 3> axes{0, 1, 2};
  std::stable_sort(axes.begin(), axes.end(), [&](int a, int b) { return std::abs(xi[a]) < std::abs(xi[b]); });
  int a = axes[0], b = axes[1];
  if (a > b && std::abs(xi[a]) == std::abs(xi[b])) std::swap(a, b);
  const double len = norm(xi);
  const Vec3 xh = len > 0.0 ? (1.0 / len) * xi : Vec3{};
  auto gram_schmidt = [&](int first, int second) {
    Vec3 e1{}, e2{};
    e1[first] = 1.0;
    e2[second] = 1.0;
    const Vec3 m1 = normalized(e1 - dot(e1, xh) * xh);
    const Vec3 m2 = normalized(e2 - dot(e2, xh) * xh - dot(e2, m1) * m1);
    return Frame{m1, m2};
  };
  return {gram_schmidt(a, b), gram_schmidt(b, a)};
}

Extrapolation richardson(const std::vector<double>& params, const std::vector<cplx>& values) {
  require(!params.empty() && params.size() == values.size(), "sweep and values must match and be non-empty");
  for (std::size_t i = 1; i < params.size(); ++i)
    require(params[i] < params[i - 1] && params[i] > 0.0, "sweep must be strictly decreasing and positive");
  Extrapolation e;
  e.last = values.back();
  e.limit = e.last;
  if (params.size() < 2) return e;
  const std::size_t n = params.size();
  const double rho = params[n - 2] / params[n - 1];
  e.limit = (rho * values[n - 1] - values[n - 2]) / (rho - 1.0);
  e.error = std::abs(e.limit - e.last);
  return e;
}

namespace {

void check_frame(const Vec3& xi, const Vec3& mu1, const Vec3& mu2) {
  const double scale = std::max(1.0, norm(xi));
  require(std::abs(norm(mu1) - 1.0) < 1e-10 && std::abs(norm(mu2) - 1.0) < 1e-10, "mu1 and mu2 must be unit vectors");
  require(std::abs(dot(mu1, mu2)) < 1e-10 && std::abs(dot(mu1, xi)) < 1e-10 * scale &&
              std::abs(dot(mu2, xi)) < 1e-10 * scale,
          "mu1, mu2 and xi must be mutually orthogonal");
}

struct CgoPair {
  CgoSolution s1;
  CgoSolution s2;
};

CgoPair cgo_pair(const PotentialPair& p1, const PotentialPair& p2, const Vec3& xi, const Frame& fr, double h,
                 const Domain& domain, const CgoOptions& options) {
  const ZetaPair pair = make_zeta_pair(xi, fr.mu1, fr.mu2, h);
  return {build_cgo(p1, cgo_side(pair, 1), domain, options),
          build_cgo(conjugated(p2), cgo_side(pair, 2), domain, options)};
}

// (i / 2) h int i W.[(conj zeta2 - zeta1) F1 conj F2 + h (F1 grad conj F2 - conj F2 grad F1)] e^{i x.xi}.
cplx magnetic_sample(const VectorField& w, const CgoPair& c, const Vec3& xi, const std::vector<double>& weights) {
  const Grid& g = w.grid;
  const double h = c.s1.h();
  const ScalarField f1 = c.s1.factor();
  const ScalarField f2c = conj(c.s2.factor());
  const VectorField g1 = gradient(f1);
  const VectorField g2 = gradient(f2c);
  const CVec3 dz = conj(c.s2.frequency.zeta) - c.s1.frequency.zeta;
  cplx sum = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (weights[n] == 0.0) continue;
    const CVec3 bracket = (f1[n] * f2c[n]) * dz + h * (f1[n] * g2.at(n) - f2c[n] * g1.at(n));
    sum += weights[n] * kI * dot(w.at(n), bracket) * std::exp(kI * dot(g.point(n), xi));
  }
  return 0.5 * kI * sum;
}

}  // namespace

ScatteringSample scattering_transform(const PotentialPair& p1, const PotentialPair& p2, const Vec3& xi,
                                      const Vec3& mu1, const Vec3& mu2, const Domain& domain,
                                      const ScatteringOptions& options) {
  check_frame(xi, mu1, mu2);
  require(!options.h_sweep.empty(), "h sweep must be non-empty");
  const Grid& g = domain.grid();
  require(p1.grid() == g && p2.grid() == g, "potentials must live on the domain grid");
  const VectorField w = p1.A - p2.A;
  const std::vector<double> weights = volume_weights(domain);
  ScatteringSample s;
  s.xi = xi;
  s.mu1 = mu1;
  s.mu2 = mu2;
  s.h_sweep = options.h_sweep;
  for (double h : options.h_sweep) {
    const CgoPair c = cgo_pair(p1, p2, xi, {mu1, mu2}, h, domain, options.cgo);
    s.values.push_back(magnetic_sample(w, c, xi, weights));
  }
  const Extrapolation e = richardson(s.h_sweep, s.values);
  s.value = options.extrapolate ? e.limit : e.last;
  s.h_used = options.h_sweep.back();
  s.extrapolation_error = e.error;
  return s;
}

std::vector<ScatteringSample> scattering_samples(const PotentialPair& p1, const PotentialPair& p2,
                                                 const std::vector<Vec3>& lattice, const Domain& domain,
                                                 const ScatteringOptions& options) {
  std::vector<std::pair<Vec3, Frame>> jobs;
  for (const Vec3& xi : lattice) {
    if (norm(xi) == 0.0) continue;
    for (const Frame& f : lattice_frames(xi)) jobs.emplace_back(xi, f);
  }
  std::vector<ScatteringSample> out(jobs.size());
  parallel_for(jobs.size(), options.threads, [&](std::size_t i) {
    out[i] = scattering_transform(p1, p2, jobs[i].first, jobs[i].second.mu1, jobs[i].second.mu2, domain, options);
  });
  return out;
}

std::vector<ScatteringSample> analytic_samples(const PotentialModel& w, const std::vector<Vec3>& lattice) {
  std::vector<ScatteringSample> out;
  for (const Vec3& xi : lattice) {
    if (norm(xi) == 0.0) continue;
    const CVec3 what = w.A_hat(xi);
    for (const Frame& f : lattice_frames(xi)) {
      ScatteringSample s;
      s.xi = xi;
      s.mu1 = f.mu1;
      s.mu2 = f.mu2;
      s.value = dot(complexify(f.mu1) + kI * complexify(f.mu2), what);
      out.push_back(s);
    }
  }
  return out;
}

std::pair<cplx, cplx> eskin_ralston_check(const VectorField& w, const Vec3& xi, const Vec3& mu1, const Vec3& mu2,
                                          const CauchyOptions& options) {
  check_frame(xi, mu1, mu2);
  const LaminaFrame frame = LaminaFrame::make(mu1, mu2);
  const ScalarField f = (-kI) * contract(frame.zeta0, w);
  const ScalarField phi = cauchy_inverse(f, frame, options);
  const Grid& g = w.grid;
  cplx lhs = 0.0, rhs = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const cplx zw = dot(frame.zeta0, w.at(n));
    if (zw == 0.0) continue;
    const cplx e = std::exp(kI * dot(g.point(n), xi));
    lhs += zw * e * std::exp(phi[n]);
    rhs += zw * e;
  }
  return {lhs * g.cell_volume(), rhs * g.cell_volume()};
}

namespace {

std::array<cplx, 3> curl_components(const Vec3& xi, const CVec3& w) {
  return {xi[0] * w[1] - xi[1] * w[0], xi[0] * w[2] - xi[2] * w[0], xi[1] * w[2] - xi[2] * w[1]};
}

}  // namespace

CurlSpectrum recover_curl(const std::vector<ScatteringSample>& samples) {
  std::vector<Vec3> order;
  std::vector<std::vector<const ScatteringSample*>> groups;
  for (const auto& s : samples) {
    auto it = std::find(order.begin(), order.end(), s.xi);
    if (it == order.end()) {
      order.push_back(s.xi);
      groups.push_back({&s});
    } else {
      groups[static_cast<std::size_t>(it - order.begin())].push_back(&s);
    }
  }
  CurlSpectrum out;
  for (std::size_t gi = 0; gi < order.size(); ++gi) {
    const Vec3& xi = order[gi];
    if (norm(xi) == 0.0) {
      out.xi.push_back(xi);
      out.values.push_back({});
      continue;
    }
    const auto& group = groups[gi];
    const Vec3 t1 = group.front()->mu1, t2 = group.front()->mu2;
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(group.size()), 2);
    Eigen::VectorXcd b(static_cast<Eigen::Index>(group.size()));
    for (std::size_t k = 0; k < group.size(); ++k) {
      const auto& s = *group[k];
      const auto r = static_cast<Eigen::Index>(k);
      m(r, 0) = cplx(dot(s.mu1, t1), dot(s.mu2, t1));
      m(r, 1) = cplx(dot(s.mu1, t2), dot(s.mu2, t2));
      b[r] = s.value;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto sv = svd.singularValues();
    if (sv.size() < 2 || sv[1] <= 1e-8 * sv[0]) {
      out.skipped.push_back(xi);
      continue;
    }
    const Eigen::VectorXcd ab = svd.solve(b);
    const CVec3 wt = ab[0] * complexify(t1) + ab[1] * complexify(t2);
    out.xi.push_back(xi);
    out.values.push_back(curl_components(xi, wt));
  }
  return out;
}

CurlSpectrum analytic_curl(const PotentialModel& w, const std::vector<Vec3>& lattice) {
  CurlSpectrum out;
  for (const Vec3& xi : lattice) {
    out.xi.push_back(xi);
    out.values.push_back(curl_components(xi, w.A_hat(xi)));
  }
  return out;
}

double relative_l2(const CurlSpectrum& a, const CurlSpectrum& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < b.xi.size(); ++j) {
    auto it = std::find(a.xi.begin(), a.xi.end(), b.xi[j]);
    if (it == a.xi.end()) continue;
    const auto& va = a.values[static_cast<std::size_t>(it - a.xi.begin())];
    for (int c = 0; c < 3; ++c) {
      num += std::norm(va[c] - b.values[j][c]);
      den += std::norm(b.values[j][c]);
    }
  }
  if (den == 0.0) throw InvalidArgument("reference spectrum is zero on the common lattice");
  return std::sqrt(num / den);
}

double spectrum_norm(const CurlSpectrum& a) {
  double s = 0.0;
  for (const auto& v : a.values)
    for (const auto& c : v) s += std::norm(c);
  return std::sqrt(s);
}

ScalarField inverse_lattice_transform(const std::vector<Vec3>& lattice, const std::vector<cplx>& values,
                                      const Grid& grid, double step) {
  require(lattice.size() == values.size(), "lattice and values must match");
  const double scale = std::pow(step / (2.0 * kPi), 3);
  ScalarField out(grid);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const Vec3 x = grid.point(n);
    cplx s = 0.0;
    for (std::size_t j = 0; j < lattice.size(); ++j) s += values[j] * std::exp(-kI * dot(x, lattice[j]));
    out[n] = scale * s;
  }
  return out;
}

TwoForm curl_field(const CurlSpectrum& s, const Grid& grid, double step) {
  TwoForm out(grid);
  for (int c = 0; c < 3; ++c) {
    std::vector<cplx> v;
    for (const auto& val : s.values) v.push_back(-kI * val[c]);
    out.comp[c] = inverse_lattice_transform(s.xi, v, grid, step).values;
  }
  return out;
}

GaugeClosure close_gauge(const VectorField& w, double curl_tolerance) {
  const Grid& g = w.grid;
  g.validate();
  GaugeClosure out;
  out.psi = ScalarField(g);
  double dw = 0.0;
  for (int d = 0; d < 3; ++d) {
    const ScalarField c = w.component(d);
    for (int e = 0; e < 3; ++e) dw += std::pow(norm_l2(partial(c, e)), 2);
  }
  dw = std::sqrt(dw);
  if (dw == 0.0) return out;
  out.curl_ratio = norm_l2(curl(w)) / dw;
  if (out.curl_ratio > curl_tolerance)
    throw InvalidArgument("field is not closed: curl ratio " + std::to_string(out.curl_ratio) + " exceeds " +
                          std::to_string(curl_tolerance));

  const ScalarField div = divergence(w);
  const std::array<std::size_t, 3> m{g.dims[0] - 2, g.dims[1] - 2, g.dims[2] - 2};
  const std::size_t total = m[0] * m[1] * m[2];
  std::vector<double> buf(total);
  detail::Dst3 dst(m, buf.data());
  std::vector<double> lambda(total);
  for (std::size_t k = 0; k < m[2]; ++k)
    for (std::size_t j = 0; j < m[1]; ++j)
      for (std::size_t i = 0; i < m[0]; ++i) {
        const std::size_t idx[3] = {i, j, k};
        double l = 0.0;
        for (int d = 0; d < 3; ++d) {
          const double t = kPi * static_cast<double>(idx[d] + 1) / static_cast<double>(m[d] + 1);
          l += std::pow(std::sin(t) / g.spacing[d], 2);
        }
        lambda[i + m[0] * (j + m[1] * k)] = l;
      }
  const double norm_factor = 8.0 * static_cast<double>((m[0] + 1) * (m[1] + 1) * (m[2] + 1));
  for (int part = 0; part < 2; ++part) {
    for (std::size_t k = 0; k < m[2]; ++k)
      for (std::size_t j = 0; j < m[1]; ++j)
        for (std::size_t i = 0; i < m[0]; ++i) {
          const cplx v = div.at(i + 1, j + 1, k + 1);
          buf[i + m[0] * (j + m[1] * k)] = part == 0 ? v.real() : v.imag();
        }
    dst.execute();
    for (std::size_t n = 0; n < total; ++n) buf[n] *= -1.0 / (lambda[n] * norm_factor);
    dst.execute();
    for (std::size_t k = 0; k < m[2]; ++k)
      for (std::size_t j = 0; j < m[1]; ++j)
        for (std::size_t i = 0; i < m[0]; ++i)
          out.psi.at(i + 1, j + 1, k + 1) += (part == 0 ? cplx(1.0, 0.0) : kI) * buf[i + m[0] * (j + m[1] * k)];
  }
  const VectorField r = gradient(out.psi) - w;
  out.residual = norm_l2(r) / norm_l2(w);
  return out;
}

QRecovery recover_q(const PotentialPair& p1, const PotentialPair& p2, double xi_max, const Domain& domain,
                    const ScatteringOptions& options) {
  const Grid& g = domain.grid();
  require(p1.grid() == g && p2.grid() == g, "potentials must live on the domain grid");
  const double a_scale = std::max(norm_l2(p1.A), 1.0);
  if (norm_l2(p1.A - p2.A) > 1e-12 * a_scale)
    throw InvalidArgument("gauge precondition unmet: the magnetic potentials differ");
  const double step = lattice_step(g);
  QRecovery out;
  out.xi = xi_lattice(step, xi_max);
  out.transform.resize(out.xi.size());
  out.extrapolation_error.resize(out.xi.size());
  const std::vector<double> weights = volume_weights(domain);
  const ScalarField dq = p1.q - p2.q;
  parallel_for(out.xi.size(), options.threads, [&](std::size_t j) {
    const Vec3& xi = out.xi[j];
    const Frame fr = lattice_frames(xi)[0];
    std::vector<cplx> values;
    for (double h : options.h_sweep) {
      const CgoPair c = cgo_pair(p1, p2, xi, fr, h, domain, options.cgo);
      const ScalarField f1 = c.s1.factor();
      const ScalarField f2 = c.s2.factor();
      cplx sum = 0.0;
      for (std::size_t n = 0; n < g.size(); ++n) {
        if (weights[n] == 0.0 || dq[n] == 0.0) continue;
        sum += weights[n] * dq[n] * f1[n] * std::conj(f2[n]) * std::exp(kI * dot(g.point(n), xi));
      }
      values.push_back(sum);
    }
    const Extrapolation e = richardson(options.h_sweep, values);
    out.transform[j] = options.extrapolate ? e.limit : e.last;
    out.extrapolation_error[j] = e.error;
  });
  out.field = inverse_lattice_transform(out.xi, out.transform, g, step);
  return out;
}

}  // namespace mslab
