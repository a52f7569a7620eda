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
#include <vector>

#include "jchaos/collapse.hpp"
#include "jchaos/stats.hpp"

namespace {

using namespace jchaos;

void BM_BayesianBootstrap(benchmark::State &state) {
    GaugeCounts c;
    for (int g = 0; g < state.range(0); ++g) c.gauges.push_back({static_cast<std::uint64_t>(400 + 37 * g), 1000});
    for (auto _ : state) benchmark::DoNotOptimize(bootstrap_success(c, 10000, 1));
}
BENCHMARK(BM_BayesianBootstrap)->Arg(5)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_MedianCi(benchmark::State &state) {
    std::vector<double> v(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(std::sin(static_cast<double>(i)));
    for (auto _ : state) benchmark::DoNotOptimize(median_ci(v, 1000, 2));
}
BENCHMARK(BM_MedianCi)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_CollapseFit(benchmark::State &state) {
    std::vector<CollapsePoint> pts;
    for (int L = 2; L <= 16; ++L)
        for (double eta : {0.0, 0.03, 0.05, 0.07, 0.10, 0.15}) {
            const double log10_r = 0.392 * std::pow(eta * eta + 0.069 * 0.069, 0.486) * std::pow(L, 1.73);
            pts.push_back({static_cast<double>(L), eta, std::pow(10.0, log10_r), std::nullopt});
        }
    for (auto _ : state) benchmark::DoNotOptimize(fit_collapse(pts, TrialFormId::g1));
}
BENCHMARK(BM_CollapseFit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
