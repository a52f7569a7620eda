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

#include "jchaos/qac.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <fstream>
#include <sstream>

#include "jchaos/error.hpp"
#include "jchaos/solvers.hpp"

namespace jchaos {

namespace {

// Smallest multiplier D such that alpha * D and gamma * scale * D are
// integers, so the encoding stays exact at scale * D.
std::optional<std::int64_t> exact_multiplier(double alpha, double gamma, int scale) {
    auto integral = [](double x) { return std::abs(x - std::round(x)) <= 1e-9 * std::max(1.0, std::abs(x)); };
    for (std::int64_t D = 1; D <= 1000; ++D)
        if (integral(alpha * D) && integral(gamma * scale * D)) return D;
    return std::nullopt;
}

}  // namespace

QacEncoding encode(const IsingInstance &logical, double gamma, double alpha, const LogicalGraph &lg) {
    if (logical.kind() != GraphKind::logical) throw InputError("encode expects a logical instance");
    if (!(logical.graph() == lg.as_chimera())) throw InputError("logical instance does not live on this code graph");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw RangeError("penalty strength gamma must lie in [0, 1]");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw RangeError("problem scale alpha must lie in (0, 1]");

    std::optional<std::int64_t> D;
    if (logical.exact()) D = exact_multiplier(alpha, gamma, *logical.exact_scale());
    std::optional<int> scale;
    if (D) scale = static_cast<int>(*logical.exact_scale() * *D);

    QacEncoding enc{gamma, alpha, IsingInstance(GraphKind::physical, lg.physical(), scale), {}, 0};
    enc.physical.provenance = logical.provenance;

    auto checked = [](double v) {
        if (!(std::abs(v) <= 1.0)) throw RangeError("encoded value " + format_real(v) + " outside [-1, 1]");
        return v;
    };
    const std::int64_t alpha_units = D ? std::llround(alpha * static_cast<double>(*D)) : 0;
    const std::int64_t gamma_units = scale ? std::llround(gamma * static_cast<double>(*scale)) : 0;

    const auto h = logical.fields();
    for (QubitIndex i = 0; i < h.size(); ++i) {
        if (!logical.active(i) || h[i] == 0.0) continue;
        for (QubitIndex d : lg.qubits()[i].data) {
            checked(alpha * h[i]);
            if (scale) enc.physical.set_field_units(d, alpha_units * logical.field_units()[i]);
            else enc.physical.set_field(d, alpha * h[i]);
        }
    }
    const auto J = logical.couplers();
    for (std::size_t k = 0; k < J.size(); ++k) {
        const Coupler &c = J[k];
        const LogicalEdge *le = lg.find_edge(c.u, c.v);
        if (!le) throw InputError("logical coupler has no physical realization");
        for (const Edge &e : le->backing) {
            checked(alpha * c.value);
            if (scale) enc.physical.set_coupler_units(e.u, e.v, alpha_units * logical.coupler_units()[k]);
            else enc.physical.set_coupler(e.u, e.v, alpha * c.value);
        }
        enc.backing_multiplicity.push_back(static_cast<int>(le->backing.size()));
    }
    if (gamma > 0.0) {
        for (const LogicalQubit &q : lg.qubits()) {
            if (q.status != LogicalStatus::operational) continue;
            for (QubitIndex d : q.data) {
                if (scale) enc.physical.set_coupler_units(q.penalty, d, -gamma_units);
                else enc.physical.set_coupler(q.penalty, d, checked(-gamma));
                ++enc.penalty_coupler_count;
            }
        }
    }
    return enc;
}

DecodedSet decode_majority(const SampleSet &samples, const LogicalGraph &lg) {
    const ChimeraGraph &phys = lg.physical();
    const std::size_t nlog = lg.qubits().size();
    DecodedSet out;
    out.configs.reserve(samples.readouts.size());
    out.info.reserve(samples.readouts.size());
    for (std::size_t r = 0; r < samples.readouts.size(); ++r) {
        const Config &s = samples.readouts[r];
        if (s.size() != phys.qubit_count()) throw InputError("readout does not cover the physical graph");
        Config logical(nlog, 0);
        DecodeInfo info;
        for (QubitIndex i = 0; i < nlog; ++i) {
            const LogicalQubit &lq = lg.qubits()[i];
            int votes = 0, sum = 0;
            for (QubitIndex d : lq.data) {
                if (!phys.active(d)) continue;
                if (s[d] != 1 && s[d] != -1) throw InputError("readout is missing an active data qubit");
                ++votes;
                sum += s[d];
            }
            if (votes == 3 || (votes == 2 && sum != 0)) {
                logical[i] = sum > 0 ? 1 : -1;
            } else if (votes == 2) {
                const Seed ts = derive_seed(samples.solver.seed, SeedTag::tie_break, {r, i});
                logical[i] = (splitmix64(ts) >> 63) ? 1 : -1;
                ++info.two_vote_ties;
            } else {
                ++info.unresolved;
                if (lq.status != LogicalStatus::inactive) out.usable = false;
            }
        }
        out.configs.push_back(std::move(logical));
        out.info.push_back(info);
    }
    return out;
}

Config broadcast_logical(std::span<const Spin> logical, const LogicalGraph &lg) {
    if (logical.size() != lg.qubits().size()) throw InputError("logical configuration size mismatch");
    const ChimeraGraph &phys = lg.physical();
    Config out(phys.qubit_count(), 0);
    for (QubitIndex i = 0; i < logical.size(); ++i) {
        const LogicalQubit &lq = lg.qubits()[i];
        if (logical[i] == 0) continue;
        for (QubitIndex d : lq.data)
            if (phys.active(d)) out[d] = logical[i];
        if (phys.active(lq.penalty)) out[lq.penalty] = logical[i];
    }
    // Physical qubits outside any logical qubit's role stay free; give them +1.
    for (QubitIndex q = 0; q < out.size(); ++q)
        if (phys.active(q) && out[q] == 0) out[q] = 1;
    return out;
}

double c_strategy_success(double p, int k) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("probability outside [0, 1]");
    if (k < 1) throw InputError("copy count must be positive");
    return 1.0 - std::pow(1.0 - p, k);
}

PenaltyChoice optimal_penalty(const std::map<double, double> &success_by_gamma) {
    if (success_by_gamma.empty()) throw InputError("optimal_penalty needs at least one gamma");
    PenaltyChoice best;
    // std::map iterates gamma ascending, so strict > keeps the smaller gamma on ties.
    for (const auto &[gamma, p] : success_by_gamma) {
        if (p > best.success) {
            best.success = p;
            best.gamma = gamma;
        }
    }
    return best;
}

std::string format_qac_mapping(const LogicalGraph &lg) {
    std::ostringstream out;
    out << "# logical data0 data1 data2 penalty status\n";
    for (QubitIndex i = 0; i < lg.qubits().size(); ++i) {
        const LogicalQubit &q = lg.qubits()[i];
        out << i << ' ' << q.data[0] << ' ' << q.data[1] << ' ' << q.data[2] << ' ' << q.penalty << ' '
            << to_string(q.status) << '\n';
    }
    return out.str();
}

void write_qac_mapping(const std::filesystem::path &path, const LogicalGraph &lg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << format_qac_mapping(lg);
}

}  // namespace jchaos
