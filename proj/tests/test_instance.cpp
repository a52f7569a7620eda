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

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <map>

#include "jchaos/error.hpp"
#include "jchaos/instance.hpp"
#include "oracles.hpp"

using namespace jchaos;

namespace {

IsingInstance pair_instance(double J, double h0 = 0.0) {
    // qubits 0 (side 0) and 4 (side 1) of a single r=4 cell are adjacent
    IsingInstance inst(GraphKind::physical, build_chimera(1, 4));
    inst.set_coupler(0, 4, J);
    if (h0 != 0.0) inst.set_field(0, h0);
    return inst;
}

Config random_config(const IsingInstance &inst, Rng &rng) {
    Config s(inst.size(), 0);
    for (QubitIndex q = 0; q < s.size(); ++q)
        if (inst.active(q)) s[q] = (rng() & 1u) ? 1 : -1;
    return s;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST(Instance, GeneratedValuesComeFromTheSixLevelSet) {
    const ChimeraGraph g = build_chimera(3, 4);
    const IsingInstance inst = generate_instance(GraphKind::physical, g, 42);
    ASSERT_EQ(inst.exact_scale(), 6);
    EXPECT_EQ(inst.couplers().size(), g.edges().size());
    for (double h : inst.fields()) EXPECT_EQ(h, 0.0);
    for (std::size_t k = 0; k < inst.couplers().size(); ++k) {
        const std::int64_t u = inst.coupler_units()[k];
        EXPECT_TRUE(u != 0 && std::llabs(u) <= 3);
        EXPECT_EQ(inst.couplers()[k].value, static_cast<double>(u) / 6.0);
    }
}

TEST(Instance, GenerationIsDeterministic) {
    const ChimeraGraph g = build_chimera(2, 4);
    EXPECT_EQ(generate_instance(GraphKind::physical, g, 7), generate_instance(GraphKind::physical, g, 7));
    EXPECT_FALSE(generate_instance(GraphKind::physical, g, 7) == generate_instance(GraphKind::physical, g, 8));
}

TEST(Instance, ValueFrequenciesAreUniform) {
    const ChimeraGraph g = build_chimera(16, 4);  // 5,888 couplers per instance
    std::map<std::int64_t, std::size_t> count;
    std::size_t total = 0;
    for (Seed s = 0; total < 100000; ++s) {
        const IsingInstance inst = generate_instance(GraphKind::physical, g, derive_seed(s, SeedTag::instance));
        for (std::int64_t u : inst.coupler_units()) ++count[u];
        total += inst.coupler_units().size();
    }
    ASSERT_EQ(count.size(), 6u);
    for (const auto &[u, n] : count) EXPECT_NEAR(static_cast<double>(n) / total, 1.0 / 6.0, 0.01) << u;
}

TEST(Instance, EmptyGraphIsRejected) {
    const std::vector<QubitIndex> all{0, 1, 2, 3};
    EXPECT_THROW(generate_instance(GraphKind::physical, build_chimera(1, 4, all), 1), InputError);
}

TEST(Instance, SettersEnforceInvariants) {
    IsingInstance inst(GraphKind::physical, build_chimera(1, 4));
    EXPECT_THROW(inst.set_coupler(0, 4, 1.5), RangeError);
    EXPECT_THROW(inst.set_coupler(0, 1, 0.5), InputError);  // same side: not an edge
    EXPECT_THROW(inst.set_field(9, 0.5), InputError);
    IsingInstance exact(GraphKind::physical, build_chimera(1, 4), 6);
    EXPECT_THROW(exact.set_coupler(0, 4, 0.5), InputError);
    EXPECT_THROW(exact.set_coupler_units(0, 4, 7), RangeError);
}

TEST(Energy, FerromagneticPair) {
    const IsingInstance inst = pair_instance(-0.5);
    Config s(8, 1);
    EXPECT_DOUBLE_EQ(energy(inst, s).value, -0.5);
    s[5] = -1;  // qubit 5 has no coupler: flipping it changes nothing
    EXPECT_DOUBLE_EQ(energy(inst, s).value, -0.5);
    s[0] = -1;
    EXPECT_DOUBLE_EQ(energy(inst, s).value, 0.5);
}

TEST(Energy, MissingSpinIsRejected) {
    const IsingInstance inst = pair_instance(-0.5);
    Config s(8, 1);
    s[3] = 0;
    EXPECT_THROW(energy(inst, s), InputError);
    EXPECT_THROW(energy(inst, Config(7, 1)), InputError);
}

TEST(Energy, AgreesWithIndependentSummation) {
    const IsingInstance inst = generate_instance(GraphKind::physical, build_chimera(1, 4), 99);
    Rng rng(5);
    for (int k = 0; k < 1000; ++k) {
        const Config s = random_config(inst, rng);
        const Energy e = energy(inst, s);
        ASSERT_TRUE(e.units.has_value());
        EXPECT_EQ(*e.units, oracle::energy_units(inst, oracle::to_int(s)));
        EXPECT_NEAR(e.value, oracle::energy(inst, oracle::to_int(s)), 1e-12);
    }
}

TEST(Energy, FlipDeltaMatchesDifference) {
    const IsingInstance inst = perturb(generate_instance(GraphKind::physical, build_chimera(2, 4), 3), 0.1, 4).first;
    Rng rng(6);
    for (int k = 0; k < 50; ++k) {
        Config s = random_config(inst, rng);
        const QubitIndex q = static_cast<QubitIndex>(rng() % s.size());
        const double before = energy(inst, s).value;
        const double delta = flip_delta(inst, s, q);
        s[q] = static_cast<Spin>(-s[q]);
        EXPECT_NEAR(energy(inst, s).value - before, delta, 1e-12);
    }
}

TEST(Noise, ZeroEtaIsAnExactCopy) {
    const IsingInstance inst = generate_instance(GraphKind::physical, build_chimera(2, 4), 1);
    auto [out, draw] = perturb(inst, 0.0, 2);
    EXPECT_EQ(draw.truncation_count, 0u);
    EXPECT_EQ(out, inst);
    EXPECT_TRUE(out.exact());
}

TEST(Noise, PerturbedInstanceIsRealValued) {
    const IsingInstance inst = generate_instance(GraphKind::physical, build_chimera(2, 4), 1);
    const IsingInstance out = perturb(inst, 0.05, 2).first;
    EXPECT_FALSE(out.exact());
    EXPECT_EQ(out.provenance.eta, 0.05);
    EXPECT_EQ(out.couplers().size(), inst.couplers().size());
}

TEST(Noise, ClippingIsCounted) {
    const IsingInstance inst = pair_instance(0.5);
    NoiseDraw draw;
    draw.eta = 0.15;
    draw.dJ = {{Edge{0, 4}, 0.7}};
    const IsingInstance out = apply_noise(inst, draw);
    EXPECT_EQ(out.couplers()[0].value, 1.0);
    EXPECT_EQ(draw.truncation_count, 1u);
    EXPECT_EQ(draw.dJ[0].second, 0.7);  // recorded before truncation

    NoiseDraw down;
    down.eta = 0.15;
    down.dJ = {{Edge{0, 4}, -0.2}};
    EXPECT_DOUBLE_EQ(apply_noise(inst, down).couplers()[0].value, 0.3);
    EXPECT_EQ(down.truncation_count, 0u);
}

TEST(Noise, TruncationCountMatchesRecount) {
    const IsingInstance inst = generate_instance(GraphKind::physical, build_chimera(4, 4), 8);
    auto [out, draw] = perturb(inst, 0.6, 9);
    std::size_t clipped = 0;
    for (std::size_t k = 0; k < inst.couplers().size(); ++k) {
        const double raw = inst.couplers()[k].value + draw.dJ[k].second;
        if (raw > 1.0 || raw < -1.0) ++clipped;
        EXPECT_DOUBLE_EQ(out.couplers()[k].value, std::clamp(raw, -1.0, 1.0));
    }
    for (const auto &[q, d] : draw.dh) {
        if (d > 1.0 || d < -1.0) ++clipped;
        EXPECT_DOUBLE_EQ(out.fields()[q], std::clamp(d, -1.0, 1.0));
    }
    EXPECT_GT(clipped, 0u);
    EXPECT_EQ(draw.truncation_count, clipped);
}

TEST(Noise, EmpiricalStandardDeviation) {
    const IsingInstance inst = generate_instance(GraphKind::physical, build_chimera(16, 4), 10);
    double sum = 0.0, sq = 0.0;
    std::size_t n = 0;
    for (Seed s = 0; n < 100000; ++s) {
        auto [out, draw] = perturb(inst, 0.1, derive_seed(s, SeedTag::noise));
        for (std::size_t k = 0; k < out.couplers().size(); ++k) {
            const double d = out.couplers()[k].value - inst.couplers()[k].value;
            if (std::abs(out.couplers()[k].value) == 1.0) continue;
            sum += d;
            sq += d * d;
            ++n;
        }
    }
    const double mean = sum / n;
    EXPECT_NEAR(std::sqrt(sq / n - mean * mean), 0.1, 0.002);
}

TEST(Noise, TruncationIsRareAtDeskEta) {
    const IsingInstance inst = generate_instance(GraphKind::physical, build_chimera(16, 4), 11);
    std::size_t clipped = 0, total = 0;
    for (Seed s = 0; s < 20; ++s) {
        NoiseDraw draw = draw_noise(inst, 0.15, s);
        apply_noise(inst, draw);
        clipped += draw.truncation_count;
        total += draw.dJ.size();
    }
    EXPECT_LT(static_cast<double>(clipped) / total, 1e-3);
}

TEST(Noise, FieldNoiseCoversEveryActiveQubit) {
    const std::vector<QubitIndex> holes{2, 6};
    IsingInstance inst(GraphKind::physical, build_chimera(1, 4, holes));
    inst.set_coupler(0, 4, -0.5);
    inst.set_field(0, 1.0 / 6.0);
    const NoiseDraw draw = draw_noise(inst, 0.1, 1);
    std::vector<QubitIndex> sites;
    for (const auto &[q, d] : draw.dh) sites.push_back(q);
    EXPECT_EQ(sites, (std::vector<QubitIndex>{0, 1, 3, 4, 5, 7}));
    NoiseDraw copy = draw;
    const IsingInstance out = apply_noise(inst, copy);
    for (const auto &[q, d] : draw.dh) EXPECT_DOUBLE_EQ(out.fields()[q], inst.fields()[q] + d);

    const NoiseDraw couplers_only = draw_noise(inst, 0.1, 1, {.fields = false});
    EXPECT_TRUE(couplers_only.dh.empty());
    EXPECT_EQ(couplers_only.dJ, draw.dJ);
    EXPECT_THROW(draw_noise(inst, -0.1, 1), InputError);
}

TEST(Gauge, IdentityAndGlobalFlip) {
    const IsingInstance inst = pair_instance(-0.5, 1.0 / 3.0);
    EXPECT_EQ(apply_gauge(inst, identity_gauge(inst)), inst);
    Gauge all = identity_gauge(inst);
    for (auto &a : all.a) a = -1;
    const IsingInstance flipped = apply_gauge(inst, all);
    EXPECT_EQ(flipped.couplers()[0].value, -0.5);
    EXPECT_EQ(flipped.fields()[0], -1.0 / 3.0);
}

TEST(Gauge, AppliedTwiceIsIdentity) {
    const IsingInstance exact = generate_instance(GraphKind::physical, build_chimera(3, 4), 12);
    const IsingInstance real = perturb(exact, 0.1, 13).first;
    for (Seed s = 0; s < 10; ++s) {
        const Gauge g = random_gauge(exact, s);
        EXPECT_EQ(apply_gauge(apply_gauge(exact, g), g), exact);
        EXPECT_EQ(apply_gauge(apply_gauge(real, g), g), real);
    }
}

TEST(Gauge, EnergyIsPreservedUnderUngauge) {
    const IsingInstance inst = generate_instance(GraphKind::physical, build_chimera(2, 4), 14);
    Rng rng(15);
    for (int k = 0; k < 100; ++k) {
        const Gauge g = random_gauge(inst, rng());
        const IsingInstance gauged = apply_gauge(inst, g);
        const Config s = random_config(inst, rng);
        EXPECT_EQ(*energy(gauged, s).units, *energy(inst, ungauge_readout(s, g)).units);
    }
}

TEST(Gauge, DomainMismatch) {
    const IsingInstance inst = pair_instance(-0.5);
    Gauge g;
    g.a.assign(3, 1);
    EXPECT_THROW(apply_gauge(inst, g), InputError);
    EXPECT_THROW(ungauge_readout(Config(8, 1), g), InputError);
}

TEST(Gauge, PerturbCommutesInDistribution) {
    const IsingInstance inst = generate_instance(GraphKind::physical, build_chimera(1, 4), 16);
    const Gauge g = random_gauge(inst, 17);
    const IsingInstance gauged = apply_gauge(inst, g);
    std::vector<double> a, b;
    const std::size_t per = inst.couplers().size();
    for (Seed s = 0; a.size() < 100000; ++s) {
        const IsingInstance x = perturb(gauged, 0.1, derive_seed(s, SeedTag::noise, {0})).first;
        const IsingInstance y = apply_gauge(perturb(inst, 0.1, derive_seed(s, SeedTag::noise, {1})).first, g);
        for (std::size_t k = 0; k < per; ++k) {
            a.push_back(x.couplers()[k].value);
            b.push_back(y.couplers()[k].value);
        }
    }
    // Asymptotic two-sample critical value at significance 0.01.
    const double n = static_cast<double>(a.size());
    EXPECT_LT(ks_statistic(a, b), 1.628 * std::sqrt(2.0 / n));
}

TEST(InstanceFile, RoundTrip) {
    const std::vector<QubitIndex> holes{2, 19};
    IsingInstance exact = generate_instance(GraphKind::physical, build_chimera(2, 4, holes), 20);
    exact.provenance.parent = "L2-i000";
    EXPECT_EQ(parse_instance(format_instance(exact)), exact);

    IsingInstance real = perturb(exact, 0.07, 21).first;
    real.set_field(5, -0.123456789012345);
    EXPECT_EQ(parse_instance(format_instance(real)), real);

    const auto path = std::filesystem::temp_directory_path() / "jchaos_test_roundtrip.ising";
    write_instance(path, real);
    EXPECT_EQ(read_instance(path), real);
    std::filesystem::remove(path);
    EXPECT_THROW(read_instance(path), DependencyError);
}

TEST(InstanceFile, Errors) {
    const std::string head = "# kind=physical\n# L=1\n# r=4\n# scale=none\n";
    EXPECT_THROW(parse_instance(head + "0 4 1.5\n"), RangeError);
    EXPECT_THROW(parse_instance(head + "0 4 0.5\n4 0 0.25\n"), ParseError);
    EXPECT_THROW(parse_instance(head + "0 4 abc\n"), ParseError);
    EXPECT_THROW(parse_instance(head + "0 40 0.5\n"), InputError);
    EXPECT_THROW(parse_instance(head + "0 4\n"), ParseError);
    EXPECT_THROW(parse_instance("# kind=physical\n0 4 0.5\n"), ParseError);
    EXPECT_THROW(parse_instance("# kind=physical\n# L=1\n# r=4\n# scale=6\n0 4 7\n"), RangeError);
}
