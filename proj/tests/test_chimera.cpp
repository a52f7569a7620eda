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

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "jchaos/chimera.hpp"
#include "jchaos/error.hpp"
#include "oracles.hpp"

using namespace jchaos;

TEST(Chimera, EdgeSetMatchesCellPicture) {
    for (int L = 1; L <= 4; ++L)
        for (int r : {1, 2, 4}) {
            const ChimeraGraph g = build_chimera(L, r);
            const auto want = oracle::chimera_edges(L, r, std::vector<bool>(g.qubit_count(), true));
            std::set<std::pair<QubitIndex, QubitIndex>> got;
            for (const Edge &e : g.edges()) got.insert({e.u, e.v});
            EXPECT_EQ(got, want) << "L=" << L << " r=" << r;
        }
}

TEST(Chimera, HoleFreeEdgeCount) {
    for (int L = 1; L <= 16; ++L) {
        const ChimeraGraph g = build_chimera(L, 4);
        EXPECT_EQ(g.qubit_count(), static_cast<std::size_t>(8 * L * L));
        EXPECT_EQ(g.edges().size(), static_cast<std::size_t>(24 * L * L - 8 * L));
    }
}

TEST(Chimera, IndexCoordRoundTrip) {
    const ChimeraGraph g = build_chimera(3, 4);
    for (QubitIndex q = 0; q < g.qubit_count(); ++q) {
        const QubitCoord c = g.coord(q);
        EXPECT_EQ(g.index(c), q);
        const auto o = oracle::coord(3, 4, q);
        EXPECT_EQ(c.row, o.row);
        EXPECT_EQ(c.col, o.col);
        EXPECT_EQ(c.side, o.side);
        EXPECT_EQ(c.offset, o.k);
    }
}

TEST(Chimera, HolesRemoveIncidentEdges) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const int L = 1 + static_cast<int>(rng() % 3);
        std::vector<QubitIndex> holes;
        std::vector<bool> active(8 * L * L, true);
        for (QubitIndex q = 0; q < active.size(); ++q)
            if (rng() % 7 == 0) {
                holes.push_back(q);
                active[q] = false;
            }
        const ChimeraGraph g = build_chimera(L, 4, holes);
        std::set<std::pair<QubitIndex, QubitIndex>> got;
        for (const Edge &e : g.edges()) got.insert({e.u, e.v});
        EXPECT_EQ(got, oracle::chimera_edges(L, 4, active));
        EXPECT_EQ(g.active_count(), active.size() - holes.size());
        EXPECT_EQ(g.holes(), holes);
    }
}

TEST(Chimera, RejectsBadArguments) {
    EXPECT_THROW(build_chimera(0, 4), InputError);
    const std::vector<QubitIndex> bad{8};
    EXPECT_THROW(build_chimera(1, 4, bad), InputError);
}

TEST(Chimera, TopLeftKeepsInteriorHoles) {
    // 3 in cell (0,0), 20 in cell (0,2), 41 in cell (1,1), 100 in cell (3,0)
    const std::vector<QubitIndex> holes{3, 20, 41, 100};
    const ChimeraGraph g = build_chimera(4, 4, holes);
    const ChimeraGraph sub = g.top_left(2);
    EXPECT_EQ(sub.L(), 2);
    EXPECT_EQ(sub.holes(), (std::vector<QubitIndex>{3, 25}));
    EXPECT_THROW(g.top_left(5), InputError);
}

TEST(LogicalGraph, CouplerCountMatchesClosedForm) {
    for (int L = 1; L <= 16; ++L) {
        const LogicalGraph lg(build_chimera(L, 4));
        EXPECT_EQ(lg.edges().size(), ideal_logical_coupler_count(L));
        EXPECT_EQ(ideal_logical_coupler_count(L), static_cast<std::uint64_t>(L) * (3 * L - 2));
        EXPECT_EQ(lg.qubits().size(), static_cast<std::size_t>(2 * L * L));
        EXPECT_EQ(lg.operational_count(), static_cast<std::size_t>(2 * L * L));
        for (const LogicalEdge &e : lg.edges()) EXPECT_EQ(e.backing.size(), 3u);
    }
}

TEST(LogicalGraph, QubitsPartitionTheirCells) {
    const ChimeraGraph g = build_chimera(3, 4);
    const LogicalGraph lg(g);
    std::set<QubitIndex> used;
    for (const LogicalQubit &q : lg.qubits()) {
        for (QubitIndex d : q.data) EXPECT_TRUE(used.insert(d).second);
        EXPECT_TRUE(used.insert(q.penalty).second);
        for (QubitIndex d : q.data) EXPECT_TRUE(g.adjacent(d, q.penalty));
    }
    EXPECT_EQ(used.size(), g.qubit_count());
}

TEST(LogicalGraph, BackingCouplersAreDeviceEdgesBetweenMatchingCopies) {
    const ChimeraGraph g = build_chimera(3, 4);
    const LogicalGraph lg(g);
    for (const LogicalEdge &e : lg.edges()) {
        const LogicalQubit &a = lg.qubits()[e.u], &b = lg.qubits()[e.v];
        for (int l = 0; l < 3; ++l) {
            const Edge want = make_edge(a.data[l], b.data[l]);
            EXPECT_EQ(e.backing[l], want);
            EXPECT_TRUE(g.adjacent(want.u, want.v));
        }
    }
}

TEST(LogicalGraph, QuotientIsAnR1Chimera) {
    for (int L = 1; L <= 5; ++L) {
        const LogicalGraph lg(build_chimera(L, 4));
        const ChimeraGraph &q = lg.as_chimera();
        EXPECT_EQ(q.r(), 1);
        std::set<std::pair<QubitIndex, QubitIndex>> got, want;
        for (const LogicalEdge &e : lg.edges()) got.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
        for (const Edge &e : q.edges()) want.insert({e.u, e.v});
        EXPECT_EQ(got, want);
    }
}

TEST(LogicalGraph, StatusFollowsHoles) {
    const ChimeraGraph full = build_chimera(2, 4);
    // slot 0 of cell (0,0): data side 0 offsets 0..2 (indices 0..2), penalty side 1 offset 3 (index 7)
    const std::vector<QubitIndex> penalty_hole{7};
    const LogicalGraph a(build_chimera(2, 4, penalty_hole));
    EXPECT_EQ(a.qubits()[0].status, LogicalStatus::penalty_missing);
    EXPECT_EQ(a.usable_count(), 8u);
    EXPECT_EQ(a.operational_count(), 7u);

    const std::vector<QubitIndex> data_hole{1};
    const LogicalGraph b(build_chimera(2, 4, data_hole));
    EXPECT_EQ(b.qubits()[0].status, LogicalStatus::inactive);
    EXPECT_EQ(b.usable_count(), 7u);
    EXPECT_FALSE(b.as_chimera().active(0));
    for (const LogicalEdge &e : b.edges()) EXPECT_TRUE(e.u != 0 && e.v != 0);
    EXPECT_STREQ(to_string(LogicalStatus::penalty_missing), "penalty-missing");
    (void)full;
}

TEST(LogicalGraph, NeedsFourQubitSides) { EXPECT_THROW(LogicalGraph(build_chimera(2, 2)), UnsupportedError); }

TEST(EffectiveL, InvertsTheIdealCount) {
    for (int L = 1; L <= 16; ++L) EXPECT_NEAR(effective_L(ideal_logical_coupler_count(L)), L, 1e-12);
    EXPECT_EQ(effective_L(0), 0.0);
    // positive root of x(3x - 2) = 7
    EXPECT_NEAR(effective_L(7), 1.8968052532744766, 1e-15);
}

TEST(HoleMask, RoundTripAndErrors) {
    HoleMask m{3, 4, {5, 17, 60}};
    const HoleMask back = parse_hole_mask(format_hole_mask(m));
    EXPECT_EQ(back.L, 3);
    EXPECT_EQ(back.r, 4);
    EXPECT_EQ(back.holes, m.holes);
    EXPECT_THROW(parse_hole_mask("3 4\n5\n5\n"), ParseError);
    EXPECT_THROW(parse_hole_mask("5\n"), ParseError);
    EXPECT_THROW(parse_hole_mask("1 4\n9\n"), InputError);
}
