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

#include <cmath>

#include "jchaos/error.hpp"
#include "jchaos/qac.hpp"
#include "jchaos/solvers.hpp"

using namespace jchaos;

namespace {

Config random_logical(std::size_t n, Rng &rng) {
    Config s(n);
    for (auto &x : s) x = (rng() & 1u) ? 1 : -1;
    return s;
}

}  // namespace

TEST(Encode, CopiesAndPenalties) {
    const LogicalGraph lg(build_chimera(2, 4));
    IsingInstance logical = generate_instance(lg, 1);
    const QacEncoding enc = encode(logical, 0.3, 0.8, lg);
    const IsingInstance &phys = enc.physical;
    EXPECT_EQ(phys.kind(), GraphKind::physical);
    EXPECT_EQ(enc.penalty_coupler_count, 3u * lg.qubits().size());
    ASSERT_EQ(enc.backing_multiplicity.size(), logical.couplers().size());
    for (std::size_t k = 0; k < logical.couplers().size(); ++k) {
        const Coupler &c = logical.couplers()[k];
        EXPECT_EQ(enc.backing_multiplicity[k], 3);
        for (const Edge &e : lg.find_edge(c.u, c.v)->backing) {
            const auto pos = phys.find_coupler(e.u, e.v);
            ASSERT_GE(pos, 0);
            EXPECT_DOUBLE_EQ(phys.couplers()[pos].value, 0.8 * c.value);
        }
    }
    for (const LogicalQubit &q : lg.qubits())
        for (QubitIndex d : q.data) {
            const auto pos = phys.find_coupler(q.penalty, d);
            ASSERT_GE(pos, 0);
            EXPECT_EQ(phys.couplers()[pos].value, -0.3);
        }
    EXPECT_EQ(phys.couplers().size(), 3 * logical.couplers().size() + enc.penalty_coupler_count);
}

TEST(Encode, FieldsGoOnEveryDataQubit) {
    const LogicalGraph lg(build_chimera(1, 4));
    IsingInstance logical(GraphKind::logical, lg.as_chimera());
    logical.set_field(1, 0.25);
    const QacEncoding enc = encode(logical, 0.0, 1.0, lg);
    for (QubitIndex d : lg.qubits()[1].data) EXPECT_EQ(enc.physical.fields()[d], 0.25);
    EXPECT_EQ(enc.physical.fields()[lg.qubits()[1].penalty], 0.0);
    EXPECT_EQ(enc.penalty_coupler_count, 0u);
}

TEST(Encode, PenaltyMissingQubitsAreUnpenalized) {
    const std::vector<QubitIndex> holes{7};  // penalty of logical qubit 0
    const LogicalGraph lg(build_chimera(2, 4, holes));
    const IsingInstance logical = generate_instance(lg, 2);
    const QacEncoding enc = encode(logical, 0.5, 1.0, lg);
    EXPECT_EQ(enc.penalty_coupler_count, 3u * 7u);
    for (QubitIndex d : lg.qubits()[0].data) EXPECT_LT(enc.physical.find_coupler(7, d), 0);
    // logical qubit 0 still carries its problem couplers
    bool touches = false;
    for (const Coupler &c : logical.couplers()) touches |= (c.u == 0 || c.v == 0);
    EXPECT_TRUE(touches);
}

TEST(Encode, GammaZeroScalesEnergyByThreeAlpha) {
    const LogicalGraph lg(build_chimera(3, 4));
    const IsingInstance logical = generate_instance(lg, 3);
    const double alpha = 0.5;
    const QacEncoding enc = encode(logical, 0.0, alpha, lg);
    ASSERT_EQ(enc.physical.exact_scale(), 12);
    Rng rng(4);
    for (int k = 0; k < 50; ++k) {
        const Config s = random_logical(lg.qubits().size(), rng);
        const Config p = broadcast_logical(s, lg);
        // numerators at scale 12 = 2 * 6: 3 * alpha * E_logical * 12 = 3 * E_logical * 6
        EXPECT_EQ(*energy(enc.physical, p).units, 3 * *energy(logical, s).units);
        EXPECT_EQ(energy(enc.physical, p).value, 3.0 * alpha * energy(logical, s).value);
    }
}

TEST(Encode, ExactScaleFollowsAlphaAndGamma) {
    const LogicalGraph lg(build_chimera(2, 4));
    const IsingInstance logical = generate_instance(lg, 9);
    EXPECT_EQ(encode(logical, 0.1, 1.0, lg).physical.exact_scale(), 30);
    EXPECT_EQ(encode(logical, 0.5, 1.0, lg).physical.exact_scale(), 6);
    EXPECT_EQ(encode(logical, 0.3, 0.8, lg).physical.exact_scale(), 30);
    EXPECT_FALSE(encode(logical, 0.1, 1.0 / std::sqrt(2.0), lg).physical.exact());
    const QacEncoding a = encode(logical, 0.3, 0.8, lg);
    for (const Coupler &c : logical.couplers())
        for (const Edge &e : lg.find_edge(c.u, c.v)->backing)
            EXPECT_NEAR(a.physical.couplers()[a.physical.find_coupler(e.u, e.v)].value, 0.8 * c.value, 1e-15);
    const auto &q = lg.qubits()[0];
    EXPECT_NEAR(a.physical.couplers()[a.physical.find_coupler(q.penalty, q.data[0])].value, -0.3, 1e-15);
}

TEST(Encode, Errors) {
    const LogicalGraph lg(build_chimera(2, 4));
    const IsingInstance logical = generate_instance(lg, 5);
    EXPECT_THROW(encode(logical, 1.2, 1.0, lg), RangeError);
    EXPECT_THROW(encode(logical, -0.1, 1.0, lg), RangeError);
    EXPECT_THROW(encode(logical, 0.1, 0.0, lg), RangeError);
    const IsingInstance physical = generate_instance(GraphKind::physical, build_chimera(2, 4), 6);
    EXPECT_THROW(encode(physical, 0.1, 1.0, lg), InputError);
    const LogicalGraph other(build_chimera(3, 4));
    EXPECT_THROW(encode(logical, 0.1, 1.0, other), InputError);
}

TEST(Decode, BroadcastGroundStateRoundTrips) {
    const LogicalGraph lg(build_chimera(3, 4));
    const IsingInstance logical = generate_instance(lg, 7);
    const GroundCertificate cert = solve_dp_exact(logical);
    const QacEncoding enc = encode(logical, 0.2, 1.0, lg);
    SampleSet set;
    set.readouts.push_back(broadcast_logical(cert.witness, lg));
    set.energies.push_back(energy(enc.physical, set.readouts[0]).value);
    const DecodedSet dec = decode_majority(set, lg);
    ASSERT_EQ(dec.size(), 1u);
    EXPECT_EQ(dec.configs[0], cert.witness);
    EXPECT_TRUE(dec.usable);
    EXPECT_EQ(dec.info[0].two_vote_ties, 0);
}

TEST(Decode, MajorityVote) {
    const LogicalGraph lg(build_chimera(1, 4));
    Config p(8, 1);
    const auto &d0 = lg.qubits()[0].data;
    p[d0[0]] = -1;
    p[d0[1]] = -1;  // qubit 0: two of three say -1
    SampleSet set;
    set.readouts.push_back(p);
    const DecodedSet dec = decode_majority(set, lg);
    EXPECT_EQ(dec.configs[0][0], -1);
    EXPECT_EQ(dec.configs[0][1], 1);
}

TEST(Decode, TwoVoteTiesAreSeededAndUnresolvedIsFlagged) {
    // one data qubit of logical 0 missing: logical 0 becomes inactive
    const std::vector<QubitIndex> holes{0};
    const LogicalGraph lg(build_chimera(1, 4, holes));
    EXPECT_EQ(lg.qubits()[0].status, LogicalStatus::inactive);
    Config p(8, 1);
    p[0] = 0;
    p[1] = -1;  // remaining votes (+1, -1 at data 1, 2) tie
    SampleSet set;
    set.solver.seed = 11;
    for (int k = 0; k < 8; ++k) set.readouts.push_back(p);
    const DecodedSet a = decode_majority(set, lg), b = decode_majority(set, lg);
    EXPECT_EQ(a.configs, b.configs);
    EXPECT_EQ(a.info[0].two_vote_ties, 1);
    EXPECT_TRUE(a.usable);

    const std::vector<QubitIndex> two{0, 1};
    const LogicalGraph lg2(build_chimera(1, 4, two));
    Config q(8, 1);
    q[0] = q[1] = 0;
    SampleSet s2;
    s2.readouts.push_back(q);
    const DecodedSet c = decode_majority(s2, lg2);
    EXPECT_EQ(c.info[0].unresolved, 1);
    EXPECT_TRUE(c.usable);  // the unresolved qubit is inactive, so it is not part of any problem
}

TEST(CStrategy, FormulaAndMonotonicity) {
    EXPECT_DOUBLE_EQ(c_strategy_success(0.5), 1.0 - 0.0625);
    EXPECT_DOUBLE_EQ(c_strategy_success(0.0), 0.0);
    EXPECT_DOUBLE_EQ(c_strategy_success(1.0), 1.0);
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double v = c_strategy_success(i / 100.0);
        EXPECT_GE(v, prev);
        prev = v;
    }
    for (int k = 1; k < 8; ++k) EXPECT_LE(c_strategy_success(0.3, k), c_strategy_success(0.3, k + 1));
    EXPECT_THROW(c_strategy_success(1.1), InputError);
    EXPECT_THROW(c_strategy_success(0.5, 0), InputError);
}

TEST(OptimalPenalty, ArgmaxTiesAndFail) {
    EXPECT_EQ(*optimal_penalty({{0.1, 0.2}, {0.3, 0.5}, {0.5, 0.4}}).gamma, 0.3);
    EXPECT_EQ(*optimal_penalty({{0.1, 0.4}, {0.2, 0.4}}).gamma, 0.1);
    EXPECT_TRUE(optimal_penalty({{0.1, 0.0}, {0.2, 0.0}}).failed());
    EXPECT_THROW(optimal_penalty({}), InputError);
}

TEST(EffectiveNoise, MeanOfThreeCopiesShrinksByRootThree) {
    // Noise drawn on an encoded logical coupler's three physical copies.
    const LogicalGraph lg(build_chimera(1, 4));
    const IsingInstance logical = generate_instance(lg, 8);
    const QacEncoding enc = encode(logical, 0.0, 1.0, lg);
    const LogicalEdge &le = lg.edges().front();
    const double eta = 0.1;
    double sum = 0.0, sq = 0.0;
    const int draws = 100000;
    for (int k = 0; k < draws; ++k) {
        const NoiseDraw d = draw_noise(enc.physical, eta, derive_seed(9, SeedTag::noise, {static_cast<std::uint64_t>(k)}));
        double m = 0.0;
        for (const auto &[e, delta] : d.dJ)
            if (std::find(le.backing.begin(), le.backing.end(), e) != le.backing.end()) m += delta;
        m /= 3.0;
        sum += m;
        sq += m * m;
    }
    const double mean = sum / draws;
    EXPECT_NEAR(std::sqrt(sq / draws - mean * mean) / (eta / std::sqrt(3.0)), 1.0, 0.05);
}

TEST(Mapping, ListsEveryLogicalQubit) {
    const LogicalGraph lg(build_chimera(2, 4));
    const std::string text = format_qac_mapping(lg);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + static_cast<long>(lg.qubits().size()));
    EXPECT_NE(text.find("0 0 1 2 7 operational"), std::string::npos);
}
