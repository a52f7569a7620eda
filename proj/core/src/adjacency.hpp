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

#pragma once

#include <cstdint>
#include <vector>

#include "jchaos/instance.hpp"

namespace jchaos::detail {

//! Compressed adjacency of an instance; `sites` lists active qubits in
//! index order.
struct Adjacency {
    std::vector<QubitIndex> sites;
    std::vector<std::uint32_t> start;  // size() + 1 entries, indexed by qubit
    std::vector<QubitIndex> nbr;
    std::vector<double> weight;
    std::vector<double> field;

    explicit Adjacency(const IsingInstance &inst) {
        const std::size_t n = inst.size();
        std::vector<std::uint32_t> degree(n, 0);
        for (const Coupler &c : inst.couplers()) {
            ++degree[c.u];
            ++degree[c.v];
        }
        start.assign(n + 1, 0);
        for (std::size_t q = 0; q < n; ++q) start[q + 1] = start[q] + degree[q];
        nbr.resize(start[n]);
        weight.resize(start[n]);
        std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
        for (const Coupler &c : inst.couplers()) {
            nbr[fill[c.u]] = c.v;
            weight[fill[c.u]++] = c.value;
            nbr[fill[c.v]] = c.u;
            weight[fill[c.v]++] = c.value;
        }
        field.assign(inst.fields().begin(), inst.fields().end());
        for (QubitIndex q = 0; q < n; ++q)
            if (inst.active(q)) sites.push_back(q);
    }

    double local_field(const Spin *s, QubitIndex q) const {
        double f = field[q];
        for (std::uint32_t k = start[q]; k < start[q + 1]; ++k) f += weight[k] * s[nbr[k]];
        return f;
    }

    double energy(const Spin *s) const {
        double e = 0.0;
        for (QubitIndex q : sites) {
            double pair = 0.0;
            for (std::uint32_t k = start[q]; k < start[q + 1]; ++k)
                if (nbr[k] > q) pair += weight[k] * s[nbr[k]];
            e += s[q] * (field[q] + pair);
        }
        return e;
    }
};

}  // namespace jchaos::detail
