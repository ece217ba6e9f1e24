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

#include <benchmark/benchmark.h>

#include <cmath>

#include "mslab/cauchy_transform.hpp"
#include "mslab/cgo.hpp"
#include "mslab/forward.hpp"

using namespace mslab;

namespace {

ScalarField bump_field(const Grid& g) {
  return sample_scalar(g, [](const Vec3& x) { return cplx(std::exp(-dot(x, x) / 0.18)); });
}

PotentialModel bump_model() {
  PotentialModel m;
  m.vector_terms.push_back({Family::GaussianBump, {1.0, 0.0}, {0.1, 0.0, 0.0}, 0.3, {0.3, 0.6, -0.4}});
  m.scalar_terms.push_back({Family::GaussianBump, {1.0, 0.0}, {0.0, 0.1, 0.0}, 0.3, {1.0, 0.0, 0.0}});
  return m;
}

void BM_CauchyInverse(benchmark::State& state) {
  const Grid g = build_ball_domain(1.0, static_cast<std::size_t>(state.range(0))).grid();
  const ScalarField f = bump_field(g);
  const CauchyOptions opt{8.0, static_cast<std::size_t>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(cauchy_inverse(f, CVec3{1.0, kI, 0.0}, opt));
}
BENCHMARK(BM_CauchyInverse)->Args({32, 256})->Args({32, 512})->Args({48, 512})->Unit(benchmark::kMillisecond);

void BM_DirichletFactorize(benchmark::State& state) {
  const Domain d = build_ball_domain(1.0, static_cast<std::size_t>(state.range(0)));
  const PotentialPair p = sample_potentials(bump_model(), d.grid());
  const DiscreteOperator op(p, d);
  for (auto _ : state) {
    DirichletSolver solver(op);
    benchmark::DoNotOptimize(solver.condition_estimate());
  }
  state.counters["unknowns"] = static_cast<double>(op.rows());
}
BENCHMARK(BM_DirichletFactorize)->Arg(24)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_DirichletSolve(benchmark::State& state) {
  const Domain d = build_ball_domain(1.0, static_cast<std::size_t>(state.range(0)));
  const PotentialPair p = sample_potentials(bump_model(), d.grid());
  const DiscreteOperator op(p, d);
  const DirichletSolver solver(op);
  const BoundaryFunction f = [](const Vec3& x) { return cplx(x[0] * x[1], x[2]); };
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(f));
  state.counters["unknowns"] = static_cast<double>(op.rows());
}
BENCHMARK(BM_DirichletSolve)->Arg(24)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

void BM_ConjugatedApply(benchmark::State& state) {
  const Domain d = build_ball_domain(1.0, static_cast<std::size_t>(state.range(0)));
  const PotentialPair p = sample_potentials(bump_model(), d.grid());
  const ScalarField w = bump_field(d.grid());
  const CVec3 zeta{1.0, kI, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(conjugated_apply(p, w, zeta, 0.1));
}
BENCHMARK(BM_ConjugatedApply)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
