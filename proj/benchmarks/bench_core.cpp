// Copyright 2026 The iongate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "iongate/analytic.hpp"
#include "iongate/dynamics.hpp"
#include "iongate/hilbert.hpp"
#include "iongate/modes.hpp"

namespace {

using namespace iongate;

TrapParams fig3b() {
  TrapParams p;
  p.detuning = 0.95;
  p.lamb_dicke = 0.1;
  p.rabi_freq = 0.177;
  return p;
}

void BM_HamiltonianApply(benchmark::State& state) {
  const hilbert::FockSpace fock(static_cast<int>(state.range(0)));
  const dynamics::Hamiltonian h({dynamics::Variant::Full, fig3b()}, fock);
  CMatrix x = CMatrix::Random(h.dim(), 1), out(h.dim(), 1);
  double t = 0.0;
  for (auto _ : state) {
    h.apply(t, x, out);
    t += 0.01;
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * h.dim());
}
BENCHMARK(BM_HamiltonianApply)->Arg(20)->Arg(60)->Arg(120);

void BM_SchrodingerGate(benchmark::State& state) {
  const hilbert::FockSpace fock(30);
  const auto psi = hilbert::StateVector::basis(2, fock, 0, 2);
  const double tau = analytic::gate_schedule(fig3b(), 2).tau;
  dynamics::IntegratorOptions opt;
  opt.convergence_gate = false;
  for (auto _ : state) {
    auto tr = dynamics::evolve_schrodinger({dynamics::Variant::XP, fig3b()}, psi, {tau}, opt);
    benchmark::DoNotOptimize(tr.states.back().amplitudes().data());
  }
}
BENCHMARK(BM_SchrodingerGate)->Unit(benchmark::kMillisecond);

void BM_DisplacementMatrix(benchmark::State& state) {
  const hilbert::FockSpace fock(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto d = hilbert::displacement_matrix(fock, cplx(0.0, 0.1414));
    benchmark::DoNotOptimize(d.data());
  }
}
BENCHMARK(BM_DisplacementMatrix)->Arg(30)->Arg(100);

void BM_SolveChain(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto m = modes::solve_chain(n);
    benchmark::DoNotOptimize(m.freqs.data());
  }
}
BENCHMARK(BM_SolveChain)->DenseRange(2, 10, 4);

void BM_DensityElements(benchmark::State& state) {
  const auto dist = hilbert::thermal_dist(2.0, hilbert::thermal_cutoff(2.0));
  for (auto _ : state) {
    auto r = analytic::density_elements(fig3b(), 251.327, dist);
    benchmark::DoNotOptimize(r.data());
  }
}
BENCHMARK(BM_DensityElements);

}  // namespace

BENCHMARK_MAIN();
