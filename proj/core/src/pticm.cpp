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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "adjacency.hpp"
#include "jchaos/error.hpp"
#include "jchaos/solvers.hpp"

namespace jchaos {

BetaSchedule geometric_ladder(double beta_min, double beta_max, int count) {
    if (count < 2 || !(beta_min > 0.0) || !(beta_max > beta_min)) throw InputError("ladder needs 0 < beta_min < beta_max and >= 2 rungs");
    BetaSchedule b(static_cast<std::size_t>(count));
    const double ratio = std::pow(beta_max / beta_min, 1.0 / (count - 1));
    for (int k = 0; k < count; ++k) b[k] = beta_min * std::pow(ratio, k);
    return b;
}

PticmParams default_pticm_params(const IsingInstance &inst) {
    double jmax = 0.0;
    for (const Coupler &c : inst.couplers()) jmax = std::max(jmax, std::abs(c.value));
    for (double h : inst.fields()) jmax = std::max(jmax, std::abs(h));
    if (jmax == 0.0) jmax = 1.0;
    PticmParams p;
    p.betas = geometric_ladder(0.1 / jmax, 10.0 / jmax, 16);
    return p;
}

namespace {

std::size_t houdayer_impl(const detail::Adjacency &adj, Config &a, Config &b, Rng &rng, std::vector<QubitIndex> &stack,
                          std::vector<std::uint8_t> &seen) {
    std::vector<QubitIndex> disagree;
    for (QubitIndex q : adj.sites)
        if (a[q] != b[q]) disagree.push_back(q);
    if (disagree.empty()) return 0;
    const QubitIndex root = disagree[rng() % disagree.size()];
    std::fill(seen.begin(), seen.end(), 0);
    stack.clear();
    stack.push_back(root);
    seen[root] = 1;
    std::size_t size = 0;
    while (!stack.empty()) {
        const QubitIndex q = stack.back();
        stack.pop_back();
        a[q] = static_cast<Spin>(-a[q]);
        b[q] = static_cast<Spin>(-b[q]);
        ++size;
        for (std::uint32_t k = adj.start[q]; k < adj.start[q + 1]; ++k) {
            const QubitIndex n = adj.nbr[k];
            if (!seen[n] && a[n] != b[n] && adj.weight[k] != 0.0) {
                seen[n] = 1;
                stack.push_back(n);
            }
        }
    }
    return size;
}

}  // namespace

std::size_t houdayer_move(const IsingInstance &inst, Config &a, Config &b, Rng &rng) {
    if (a.size() != inst.size() || b.size() != inst.size()) throw InputError("replica size mismatch");
    const detail::Adjacency adj(inst);
    std::vector<QubitIndex> stack;
    std::vector<std::uint8_t> seen(inst.size(), 0);
    return houdayer_impl(adj, a, b, rng, stack, seen);
}

PticmResult solve_pticm(const IsingInstance &inst, const PticmParams &params, Seed seed) {
    if (params.replicas_per_beta < 2) throw InputError("cluster moves need at least two replicas per temperature");
    if (params.betas.size() < 2) throw InputError("beta ladder needs at least two temperatures");
    for (std::size_t k = 1; k < params.betas.size(); ++k)
        if (!(params.betas[k] > params.betas[k - 1])) throw InputError("beta ladder must be strictly increasing");
    if (params.sweeps < 1 || params.icm_period < 1) throw InputError("sweeps and icm_period must be positive");

    const auto t0 = std::chrono::steady_clock::now();
    const detail::Adjacency adj(inst);
    const std::size_t nb = params.betas.size();
    const std::size_t chains = static_cast<std::size_t>(params.replicas_per_beta);
    Rng rng = make_rng(seed);

    // replica[c][t]: chain c at temperature t; replica exchange swaps within a chain.
    std::vector<std::vector<Config>> replica(chains, std::vector<Config>(nb, Config(inst.size(), 0)));
    std::vector<std::vector<double>> E(chains, std::vector<double>(nb, 0.0));
    for (std::size_t c = 0; c < chains; ++c) {
        for (std::size_t t = 0; t < nb; ++t) {
            for (QubitIndex q : adj.sites) replica[c][t][q] = (rng() >> 63) ? 1 : -1;
            E[c][t] = adj.energy(replica[c][t].data());
        }
    }

    PticmResult result;
    double best = std::numeric_limits<double>::infinity();
    Config best_config;
    auto consider = [&](const Config &s, double e) {
        if (e < best - 1e-12) {
            best = e;
            best_config = s;
        }
    };

    std::vector<QubitIndex> stack;
    std::vector<std::uint8_t> seen(inst.size(), 0);
    for (int sweep = 1; sweep <= params.sweeps; ++sweep) {
        for (std::size_t c = 0; c < chains; ++c) {
            for (std::size_t t = 0; t < nb; ++t) {
                Config &s = replica[c][t];
                const double beta = params.betas[t];
                for (QubitIndex q : adj.sites) {
                    const double dE = -2.0 * s[q] * adj.local_field(s.data(), q);
                    if (dE <= 0.0 || uniform01(rng) < std::exp(-beta * dE)) {
                        s[q] = static_cast<Spin>(-s[q]);
                        E[c][t] += dE;
                    }
                }
                consider(s, E[c][t]);
            }
        }

        if (sweep % params.icm_period == 0) {
            for (std::size_t t = 0; t < nb; ++t) {
                for (std::size_t c = 0; c + 1 < chains; c += 2) {
                    Config &a = replica[c][t];
                    Config &b = replica[c + 1][t];
                    std::optional<Energy> before_a, before_b;
                    if (params.check_moves) {
                        before_a = energy(inst, a);
                        before_b = energy(inst, b);
                    }
                    const std::size_t moved = houdayer_impl(adj, a, b, rng, stack, seen);
                    if (!moved) continue;
                    ++result.cluster_moves;
                    E[c][t] = adj.energy(a.data());
                    E[c + 1][t] = adj.energy(b.data());
                    if (params.check_moves) {
                        const Energy ea = energy(inst, a), eb = energy(inst, b);
                        const bool ok = ea.units ? (*ea.units + *eb.units == *before_a->units + *before_b->units)
                                                 : std::abs(ea.value + eb.value - before_a->value - before_b->value) <= 1e-9;
                        if (!ok) throw Error("cluster move changed the replica-pair energy");
                    }
                    consider(a, E[c][t]);
                    consider(b, E[c + 1][t]);
                }
            }
        }

        for (std::size_t c = 0; c < chains; ++c) {
            for (std::size_t t = 0; t + 1 < nb; ++t) {
                const double delta = (params.betas[t + 1] - params.betas[t]) * (E[c][t + 1] - E[c][t]);
                if (delta >= 0.0 || uniform01(rng) < std::exp(delta)) {
                    std::swap(replica[c][t], replica[c][t + 1]);
                    std::swap(E[c][t], E[c][t + 1]);
                }
            }
        }
    }

    result.certificate.witness = best_config;
    result.certificate.method = CertMethod::pticm;
    const Energy e = energy(inst, best_config);
    result.certificate.energy = e.value;
    result.certificate.energy_units = e.units;
    result.certificate.scale = inst.exact_scale().value_or(0);

    result.samples.solver = {"pticm", params.sweeps, "ladder:" + format_real(params.betas.front()) + ".." +
                                                         format_real(params.betas.back()) + "/" +
                                                         std::to_string(nb),
                             seed};
    for (std::size_t c = 0; c < chains; ++c) {
        result.samples.readouts.push_back(replica[c][nb - 1]);
        result.samples.energies.push_back(energy(inst, replica[c][nb - 1]).value);
    }
    result.samples.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace jchaos
