// Copyright 2026 The jchaos Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include <benchmark/benchmark.h>

#include <cmath>

#include "jchaos/chimera.hpp"
#include "jchaos/instance.hpp"
#include "jchaos/qac.hpp"
#include "jchaos/solvers.hpp"

namespace {

using namespace jchaos;

// Hole-free physical instance; the complexity fit uses n = L with cost
// L^2 2^(4L).
void BM_DpExact(benchmark::State &state) {
    const int L = static_cast<int>(state.range(0));
    const IsingInstance inst = generate_instance(GraphKind::physical, build_chimera(L, 4), 11);
    for (auto _ : state) benchmark::DoNotOptimize(solve_dp_exact(inst));
    state.SetComplexityN(L);
    state.counters["frontier_bits"] = plan_dp(inst).peak_frontier_bits;
}
BENCHMARK(BM_DpExact)
    ->DenseRange(1, 5)
    ->Unit(benchmark::kMillisecond)
    ->Complexity([](benchmark::IterationCount n) {
        const double L = static_cast<double>(n);
        return L * L * std::exp2(4.0 * L);
    });

void BM_DpLogical(benchmark::State &state) {
    const LogicalGraph lg(build_chimera(static_cast<int>(state.range(0)), 4));
    const IsingInstance inst = generate_instance(lg, 11);
    for (auto _ : state) benchmark::DoNotOptimize(solve_dp_exact(inst));
}
BENCHMARK(BM_DpLogical)->DenseRange(2, 16, 2)->Unit(benchmark::kMillisecond);

void BM_SimulatedAnnealing(benchmark::State &state) {
    const LogicalGraph lg(build_chimera(static_cast<int>(state.range(0)), 4));
    const QacEncoding enc = encode(generate_instance(lg, 3), 0.2, 1.0, lg);
    const BetaSchedule schedule = linear_beta_schedule(0.1, 3.0, 1000);
    for (auto _ : state) benchmark::DoNotOptimize(solve_sa(enc.physical, schedule, 10, 7));
    state.SetItemsProcessed(state.iterations() * 10 * 1000 * static_cast<std::int64_t>(enc.physical.graph().active_count()));
}
BENCHMARK(BM_SimulatedAnnealing)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Pticm(benchmark::State &state) {
    const LogicalGraph lg(build_chimera(static_cast<int>(state.range(0)), 4));
    const IsingInstance inst = generate_instance(lg, 5);
    PticmParams p = default_pticm_params(inst);
    p.sweeps = 500;
    for (auto _ : state) benchmark::DoNotOptimize(solve_pticm(inst, p, 9));
}
BENCHMARK(BM_Pticm)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace
