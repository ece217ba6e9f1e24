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

#include <fftw3.h>

#include <array>
#include <cstddef>
#include <mutex>
#include <vector>

#include "mslab/types.hpp"

namespace mslab::detail {

// FFTW planning is not thread-safe; execution is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// In-place complex DFT over an x-fastest array. Unnormalized both ways.
class Fft {
 public:
  // dims[0] is the fastest-varying axis; rank is 2 or 3.
  Fft(std::vector<std::size_t> dims, cplx* buffer) {
    std::vector<int> n(dims.rbegin(), dims.rend());
    auto* p = reinterpret_cast<fftw_complex*>(buffer);
    std::lock_guard lock(planner_mutex());
    fwd_ = fftw_plan_dft(static_cast<int>(n.size()), n.data(), p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft(static_cast<int>(n.size()), n.data(), p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  void forward() { fftw_execute(fwd_); }
  void backward() { fftw_execute(bwd_); }

 private:
  fftw_plan fwd_{};
  fftw_plan bwd_{};
};

// In-place 3-D DST-I (RODFT00) on a real x-fastest array. Applying it twice
// multiplies by prod(2 (n_d + 1)).
class Dst3 {
 public:
  Dst3(std::array<std::size_t, 3> dims, double* buffer) {
    const int n[3] = {static_cast<int>(dims[2]), static_cast<int>(dims[1]), static_cast<int>(dims[0])};
    const fftw_r2r_kind kinds[3] = {FFTW_RODFT00, FFTW_RODFT00, FFTW_RODFT00};
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_r2r(3, n, buffer, buffer, kinds, FFTW_ESTIMATE);
  }
  ~Dst3() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Dst3(const Dst3&) = delete;
  Dst3& operator=(const Dst3&) = delete;

  void execute() { fftw_execute(plan_); }

 private:
  fftw_plan plan_{};
};

// Signed integer frequency of DFT bin m out of n.
inline long wrap_frequency(std::size_t m, std::size_t n) {
  const long mm = static_cast<long>(m);
  const long nn = static_cast<long>(n);
  return mm <= nn / 2 ? mm : mm - nn;
}

}  // namespace mslab::detail
