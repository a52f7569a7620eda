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

#include "jchaos/chimera.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "jchaos/error.hpp"

namespace jchaos {

ChimeraGraph::ChimeraGraph(int L, int r, std::span<const QubitIndex> holes) : L_(L), r_(r) {
    if (L < 1 || r < 1) throw InputError("chimera graph needs L >= 1 and r >= 1");
    const std::size_t n = 2ull * r * L * L;
    active_.assign(n, 1);
    for (QubitIndex q : holes) {
        if (q >= n) throw InputError("hole index " + std::to_string(q) + " out of range [0, " + std::to_string(n) + ")");
        active_[q] = 0;
    }

    auto keep = [&](QubitIndex a, QubitIndex b) {
        if (active_[a] && active_[b]) edges_.push_back(make_edge(a, b));
    };
    for (int row = 0; row < L; ++row) {
        for (int col = 0; col < L; ++col) {
            for (int i = 0; i < r; ++i) {
                const QubitIndex a = index({row, col, 0, i});
                for (int j = 0; j < r; ++j) keep(a, index({row, col, 1, j}));
                if (row + 1 < L) keep(a, index({row + 1, col, 0, i}));
                if (col + 1 < L) keep(index({row, col, 1, i}), index({row, col + 1, 1, i}));
            }
        }
    }
    std::sort(edges_.begin(), edges_.end());
}

std::size_t ChimeraGraph::active_count() const {
    return static_cast<std::size_t>(std::count(active_.begin(), active_.end(), std::uint8_t{1}));
}

std::vector<QubitIndex> ChimeraGraph::holes() const {
    std::vector<QubitIndex> out;
    for (QubitIndex q = 0; q < active_.size(); ++q)
        if (!active_[q]) out.push_back(q);
    return out;
}

QubitIndex ChimeraGraph::index(const QubitCoord &c) const {
    return static_cast<QubitIndex>(((c.row * L_ + c.col) * 2 + c.side) * r_ + c.offset);
}

QubitCoord ChimeraGraph::coord(QubitIndex q) const {
    if (q >= active_.size()) throw InputError("qubit index out of range");
    const int offset = static_cast<int>(q % r_);
    q /= r_;
    const int side = static_cast<int>(q % 2);
    q /= 2;
    return {static_cast<int>(q / L_), static_cast<int>(q % L_), side, offset};
}

bool ChimeraGraph::geometric_adjacent(QubitIndex a, QubitIndex b) const {
    if (a >= active_.size() || b >= active_.size() || a == b) return false;
    const QubitCoord x = coord(a), y = coord(b);
    if (x.row == y.row && x.col == y.col) return x.side != y.side;
    if (x.side != y.side || x.offset != y.offset) return false;
    if (x.side == 0) return x.col == y.col && std::abs(x.row - y.row) == 1;
    return x.row == y.row && std::abs(x.col - y.col) == 1;
}

bool ChimeraGraph::adjacent(QubitIndex a, QubitIndex b) const {
    return geometric_adjacent(a, b) && active_[a] && active_[b];
}

ChimeraGraph ChimeraGraph::top_left(int sub) const {
    if (sub < 1 || sub > L_) throw InputError("sub-grid size must lie in [1, L]");
    ChimeraGraph tmp(sub, r_, {});
    std::vector<QubitIndex> sub_holes;
    for (QubitIndex q = 0; q < tmp.qubit_count(); ++q) {
        if (!active_[index(tmp.coord(q))]) sub_holes.push_back(q);
    }
    return ChimeraGraph(sub, r_, sub_holes);
}

ChimeraGraph build_chimera(int L, int r, std::span<const QubitIndex> holes) { return ChimeraGraph(L, r, holes); }

const char *to_string(LogicalStatus s) {
    switch (s) {
    case LogicalStatus::operational: return "operational";
    case LogicalStatus::penalty_missing: return "penalty-missing";
    case LogicalStatus::inactive: return "inactive";
    }
    return "?";
}

namespace {

LogicalQubit make_logical(const ChimeraGraph &g, int row, int col, int slot) {
    LogicalQubit lq{};
    const int data_side = slot;
    const int penalty_side = 1 - slot;
    for (int l = 0; l < 3; ++l) lq.data[l] = g.index({row, col, data_side, l});
    lq.penalty = g.index({row, col, penalty_side, 3});
    const bool data_ok = std::all_of(lq.data.begin(), lq.data.end(), [&](QubitIndex q) { return g.active(q); });
    if (!data_ok) lq.status = LogicalStatus::inactive;
    else if (!g.active(lq.penalty)) lq.status = LogicalStatus::penalty_missing;
    else lq.status = LogicalStatus::operational;
    return lq;
}

std::vector<QubitIndex> inactive_slots(const std::vector<LogicalQubit> &qs) {
    std::vector<QubitIndex> out;
    for (QubitIndex i = 0; i < qs.size(); ++i)
        if (qs[i].status == LogicalStatus::inactive) out.push_back(i);
    return out;
}

}  // namespace

LogicalGraph::LogicalGraph(ChimeraGraph physical) : physical_(std::move(physical)), quotient_(1, 1, {}) {
    if (physical_.r() != 4) throw UnsupportedError("the [3,1,3] code graph needs r = 4 (got r = " + std::to_string(physical_.r()) + ")");
    const int L = physical_.L();
    qubits_.reserve(2ull * L * L);
    for (int row = 0; row < L; ++row)
        for (int col = 0; col < L; ++col)
            for (int slot = 0; slot < 2; ++slot) qubits_.push_back(make_logical(physical_, row, col, slot));

    quotient_ = ChimeraGraph(L, 1, inactive_slots(qubits_));

    for (const Edge &e : quotient_.edges()) {
        const QubitCoord a = quotient_.coord(e.u), b = quotient_.coord(e.v);
        LogicalEdge le{e.u, e.v, {}};
        for (int l = 0; l < 3; ++l) {
            // Copy l of each endpoint; the physical side equals the logical slot.
            const QubitIndex pa = physical_.index({a.row, a.col, a.side, l});
            const QubitIndex pb = physical_.index({b.row, b.col, b.side, l});
            if (physical_.adjacent(pa, pb)) le.backing.push_back(make_edge(pa, pb));
        }
        if (!le.backing.empty()) edges_.push_back(std::move(le));
    }
}

std::size_t LogicalGraph::operational_count() const {
    return static_cast<std::size_t>(std::count_if(qubits_.begin(), qubits_.end(), [](const LogicalQubit &q) {
        return q.status == LogicalStatus::operational;
    }));
}

std::size_t LogicalGraph::usable_count() const {
    return static_cast<std::size_t>(std::count_if(qubits_.begin(), qubits_.end(), [](const LogicalQubit &q) {
        return q.status != LogicalStatus::inactive;
    }));
}

const LogicalEdge *LogicalGraph::find_edge(QubitIndex a, QubitIndex b) const {
    const Edge key = make_edge(a, b);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), key, [](const LogicalEdge &le, const Edge &k) {
        return Edge{le.u, le.v} < k;
    });
    if (it == edges_.end() || it->u != key.u || it->v != key.v) return nullptr;
    return &*it;
}

LogicalGraph build_logical_graph(const ChimeraGraph &g) { return LogicalGraph(g); }

std::uint64_t ideal_logical_coupler_count(int L) {
    if (L < 1) throw InputError("L must be positive");
    const auto l = static_cast<std::uint64_t>(L);
    return l * (3 * l - 2);
}

double effective_L(std::uint64_t actual_coupler_count) {
    if (actual_coupler_count == 0) return 0.0;
    // 3x^2 - 2x - n = 0
    const double n = static_cast<double>(actual_coupler_count);
    return (2.0 + std::sqrt(4.0 + 12.0 * n)) / 6.0;
}

HoleMask parse_hole_mask(const std::string &text) {
    std::istringstream in(text);
    HoleMask mask;
    std::string line;
    int lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (!header) {
            if (!(ls >> mask.L >> mask.r) || mask.L < 1 || mask.r < 1)
                throw ParseError("hole mask line " + std::to_string(lineno) + ": expected 'L r' header");
            header = true;
            continue;
        }
        long long q = -1;
        std::string rest;
        if (!(ls >> q) || (ls >> rest) || q < 0)
            throw ParseError("hole mask line " + std::to_string(lineno) + ": expected one qubit index");
        mask.holes.push_back(static_cast<QubitIndex>(q));
    }
    if (!header) throw ParseError("hole mask: missing 'L r' header");
    std::sort(mask.holes.begin(), mask.holes.end());
    if (std::adjacent_find(mask.holes.begin(), mask.holes.end()) != mask.holes.end())
        throw ParseError("hole mask: duplicate qubit index");
    const std::size_t n = 2ull * mask.r * mask.L * mask.L;
    if (!mask.holes.empty() && mask.holes.back() >= n) throw InputError("hole mask: index out of range");
    return mask;
}

std::string format_hole_mask(const HoleMask &mask) {
    std::vector<QubitIndex> holes = mask.holes;
    std::sort(holes.begin(), holes.end());
    holes.erase(std::unique(holes.begin(), holes.end()), holes.end());
    std::ostringstream out;
    out << mask.L << ' ' << mask.r << '\n';
    for (QubitIndex q : holes) out << q << '\n';
    return out.str();
}

HoleMask read_hole_mask(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw DependencyError("cannot open hole mask " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_hole_mask(ss.str());
}

void write_hole_mask(const std::filesystem::path &path, const HoleMask &mask) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << format_hole_mask(mask);
}

}  // namespace jchaos
