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

#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "adjacency.hpp"
#include "jchaos/error.hpp"
#include "jchaos/solvers.hpp"

namespace jchaos {

BetaSchedule linear_beta_schedule(double beta0, double beta1, int sweeps) {
    if (sweeps < 1) throw InputError("schedule needs at least one sweep");
    BetaSchedule s(static_cast<std::size_t>(sweeps));
    for (int k = 0; k < sweeps; ++k)
        s[k] = sweeps == 1 ? beta1 : beta0 + (beta1 - beta0) * k / static_cast<double>(sweeps - 1);
    return s;
}

namespace {

std::string describe(const BetaSchedule &s) {
    std::ostringstream out;
    out << "beta:" << format_real(s.front()) << ".." << format_real(s.back()) << "/" << s.size();
    return out.str();
}

void anneal_one(const detail::Adjacency &adj, const BetaSchedule &schedule, Rng &rng, Config &s) {
    for (QubitIndex q : adj.sites) s[q] = (rng() >> 63) ? 1 : -1;
    for (double beta : schedule) {
        for (QubitIndex q : adj.sites) {
            const double dE = -2.0 * s[q] * adj.local_field(s.data(), q);
            if (dE <= 0.0 || uniform01(rng) < std::exp(-beta * dE)) s[q] = static_cast<Spin>(-s[q]);
        }
    }
}

}  // namespace

SampleSet solve_sa(const IsingInstance &inst, const BetaSchedule &schedule, int n_reads, Seed seed, int threads) {
    if (schedule.empty()) throw InputError("annealing schedule is empty");
    if (n_reads < 1) throw InputError("n_reads must be positive");
    for (std::size_t k = 1; k < schedule.size(); ++k)
        if (schedule[k] < schedule[k - 1]) throw InputError("beta schedule must be non-decreasing");

    const auto t0 = std::chrono::steady_clock::now();
    const detail::Adjacency adj(inst);
    SampleSet out;
    out.readouts.assign(static_cast<std::size_t>(n_reads), Config(inst.size(), 0));
    out.energies.assign(static_cast<std::size_t>(n_reads), 0.0);
    out.solver = {"sa", static_cast<int>(schedule.size()), describe(schedule), seed};

    auto work = [&](int first, int stride) {
        for (int k = first; k < n_reads; k += stride) {
            Rng rng = make_rng(derive_seed(seed, SeedTag::read, {static_cast<std::uint64_t>(k)}));
            anneal_one(adj, schedule, rng, out.readouts[k]);
            out.energies[k] = energy(inst, out.readouts[k]).value;
        }
    };
    threads = std::max(1, std::min(threads, n_reads));
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    }
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

SimulatedAnnealingSampler::SimulatedAnnealingSampler(SaParams params, int threads)
    : params_(params), threads_(threads) {
    if (params_.sweeps < 1) throw ValidationError("sa sweeps must be positive");
    if (!(params_.beta0 >= 0.0) || params_.beta1 < params_.beta0) throw ValidationError("sa needs 0 <= beta0 <= beta1");
}

SampleSet SimulatedAnnealingSampler::sample(const IsingInstance &inst, int n_reads, Seed seed) const {
    return solve_sa(inst, linear_beta_schedule(params_.beta0, params_.beta1, params_.sweeps), n_reads, seed, threads_);
}

std::unique_ptr<Sampler> make_sampler(const std::string &name, const SaParams &params, int threads) {
    if (name == "sa") return std::make_unique<SimulatedAnnealingSampler>(params, threads);
    throw ValidationError("unknown sampler backend '" + name + "'");
}

double max_energy_discrepancy(const SampleSet &samples, const IsingInstance &inst) {
    if (samples.energies.size() != samples.readouts.size()) throw InputError("sample set energies/readouts mismatch");
    double worst = 0.0;
    for (std::size_t k = 0; k < samples.readouts.size(); ++k)
        worst = std::max(worst, std::abs(energy(inst, samples.readouts[k]).value - samples.energies[k]));
    return worst;
}

}  // namespace jchaos
