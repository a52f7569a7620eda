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
#include <cmath>
#include <limits>

#include "jchaos/chimera.hpp"
#include "jchaos/collapse.hpp"
#include "jchaos/error.hpp"

using namespace jchaos;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const std::vector<double> kEtas{0.0, 0.03, 0.05, 0.07, 0.10, 0.15};

// Reference fit parameters {a, b, c, d} for the two strategies.
const std::vector<double> kQac{0.392, 0.069, 0.486, 1.73};
const std::vector<double> kC{8.01, 0.134, 1.61, 2.12};

// Direct transcription of the g1 exponent.
double g1_exponent(const std::vector<double> &p, double L, double eta) {
    return p[0] * std::pow(eta * eta + p[1] * p[1], p[2]) * std::pow(L, p[3]);
}

std::vector<CollapsePoint> planted(const std::vector<double> &p, int Lmax) {
    std::vector<CollapsePoint> out;
    for (int L = 2; L <= Lmax; ++L)
        for (double eta : kEtas) out.push_back({double(L), eta, std::pow(10.0, g1_exponent(p, L, eta)), std::nullopt});
    return out;
}

}  // namespace

TEST(TrialForm, ParameterCountsAndNames) {
    EXPECT_EQ(parameter_count(TrialFormId::g1), 4u);
    for (TrialFormId id : {TrialFormId::g2, TrialFormId::g3a, TrialFormId::g3b, TrialFormId::g3c})
        EXPECT_EQ(parameter_count(id), 5u);
    EXPECT_EQ(parse_trial_form("g3b"), TrialFormId::g3b);
    EXPECT_THROW(parse_trial_form("g4"), ParseError);
}

TEST(TrialForm, G1TableValues) {
    // high-precision references (40 significant digits, rounded)
    EXPECT_NEAR(log10_trial({TrialFormId::g1, kC}, 1.0, 0.0), 0.0123853979939176915, 1e-15);
    const double v = eval_trial({TrialFormId::g1, kQac}, 8.0, 0.1);
    EXPECT_NEAR(v / 69.8649631077937214343, 1.0, 1e-10);
    EXPECT_DOUBLE_EQ(eval_trial({TrialFormId::g1, {0.0, 0.1, 0.5, 2.0}}, 7.0, 0.15), 1.0);
}

TEST(TrialForm, OtherForms) {
    const double L = 3.0, eta = 0.05;
    const double x = eta * eta + 0.1 * 0.1;
    // g2 adds log10 e to the g1 exponent
    EXPECT_NEAR(log10_trial({TrialFormId::g2, {0.5, 0.1, 0.7, 1.8, 4.0}}, L, eta),
                0.5 * std::pow(x, 0.7) * std::pow(L, 1.8) + std::log10(4.0), 1e-12);
    // g3 variants: aL + c x^{d1} L^{d2} + log10(e L^2)
    const std::vector<double> p{0.2, 0.1, 1.5, 1.3, 2.0};
    const double tail = std::log10(2.0 * L * L);
    EXPECT_NEAR(log10_trial({TrialFormId::g3a, p}, L, eta), 0.2 * L + 1.5 * std::pow(x, 0.5) * L * L + tail, 1e-12);
    EXPECT_NEAR(log10_trial({TrialFormId::g3b, p}, L, eta), 0.2 * L + 1.5 * std::pow(x, 1.3) * L * L + tail, 1e-12);
    EXPECT_NEAR(log10_trial({TrialFormId::g3c, p}, L, eta),
                0.2 * L + 1.5 * std::pow(x, 0.5) * std::pow(L, 1.3) + tail, 1e-12);
}

TEST(TrialForm, Errors) {
    EXPECT_THROW(log10_trial({TrialFormId::g1, {1.0, kInf, 1.0, 1.0}}, 2.0, 0.1), InputError);
    EXPECT_THROW(log10_trial({TrialFormId::g1, {1.0, std::nan(""), 1.0, 1.0}}, 2.0, 0.1), InputError);
    EXPECT_THROW(log10_trial({TrialFormId::g1, {1.0, 1.0}}, 2.0, 0.1), InputError);
    EXPECT_THROW(log10_trial({TrialFormId::g1, kQac}, 0.0, 0.1), RangeError);
    EXPECT_THROW(log10_trial({TrialFormId::g1, kQac}, 2.0, -0.1), RangeError);
}

TEST(NelderMead, Rosenbrock) {
    auto f = [](std::span<const double> x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    const std::vector<double> step{0.5, 0.5};
    const SimplexResult r = nelder_mead(f, {-1.2, 1.0}, step, 10000, 1e-20);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.x[0], 1.0, 1e-4);
    EXPECT_NEAR(r.x[1], 1.0, 1e-4);
}

TEST(Fit, RecoversNoiselessQacRow) {
    const auto data = planted(kQac, 16);
    const ScalingFit fit = fit_collapse(data, TrialFormId::g1, {.seed = 1});
    EXPECT_NEAR(fit.form.params[3], 1.73, 1e-4);
    EXPECT_LT(fit.residual, 1e-8);
    EXPECT_TRUE(fit.accepted);
    EXPECT_EQ(fit.points, data.size());
    for (double p : fit.form.params) EXPECT_GE(p, 0.0);
}

TEST(Fit, RecoversNoiselessCRow) {
    const ScalingFit fit = fit_collapse(planted(kC, 12), TrialFormId::g1, {.seed = 2});
    EXPECT_NEAR(fit.form.params[3], 2.12, 1e-4);
    EXPECT_LT(fit.residual, 1e-8);
}

TEST(Fit, PermutationInvariantAndDeterministic) {
    auto data = planted(kQac, 10);
    const ScalingFit a = fit_collapse(data, TrialFormId::g1, {.seed = 3});
    const ScalingFit b = fit_collapse(data, TrialFormId::g1, {.seed = 3});
    EXPECT_EQ(a.form.params, b.form.params);
    EXPECT_EQ(a.residual, b.residual);
    std::reverse(data.begin(), data.end());
    std::rotate(data.begin(), data.begin() + 7, data.end());
    const ScalingFit c = fit_collapse(data, TrialFormId::g1, {.seed = 3});
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(c.form.params[i], a.form.params[i], 1e-6);
}

TEST(Fit, UnsolvedPointsAreExcluded) {
    auto data = planted(kQac, 6);
    data.push_back({7.0, 0.15, kInf, std::nullopt});
    const ScalingFit fit = fit_collapse(data, TrialFormId::g1, {.seed = 4});
    EXPECT_EQ(fit.excluded_unsolved, 1u);
    EXPECT_EQ(fit.points, data.size() - 1);
}

TEST(Fit, InsufficientData) {
    const std::vector<CollapsePoint> one{{2.0, 0.1, 10.0, std::nullopt}};
    EXPECT_THROW(fit_collapse(one, TrialFormId::g1), InputError);
    auto five = planted(kQac, 2);
    five.resize(5);
    EXPECT_THROW(fit_collapse(five, TrialFormId::g1), InputError);  // g1 needs 6
}

TEST(Fit, EffectiveLNeedsCouplerCounts) {
    auto data = planted(kQac, 6);
    EXPECT_THROW(fit_collapse(data, TrialFormId::g1, {.use_effective_L = true}), InputError);
    for (auto &p : data) p.logical_couplers = ideal_logical_coupler_count(static_cast<int>(p.L));
    const ScalingFit fit = fit_collapse(data, TrialFormId::g1, {.seed = 5, .use_effective_L = true});
    EXPECT_NEAR(fit.form.params[3], 1.73, 1e-3);
}

TEST(Fit, G3RawRejectsNegativeA) {
    // data decreasing in L forces a < 0 in the linear term
    std::vector<CollapsePoint> data;
    for (int L = 2; L <= 9; ++L)
        for (double eta : {0.0, 0.05, 0.1}) data.push_back({double(L), eta, 2.0 * L * L * std::pow(10.0, -0.3 * L), std::nullopt});
    const ScalingFit raw = fit_collapse(data, TrialFormId::g3a, {.positivity = Positivity::raw, .seed = 6});
    EXPECT_LT(raw.form.params[0], 0.0);
    EXPECT_FALSE(raw.accepted);
    const ScalingFit sq = fit_collapse(data, TrialFormId::g3a, {.positivity = Positivity::squared, .seed = 6});
    EXPECT_TRUE(sq.accepted);
    EXPECT_GE(sq.form.params[0], 0.0);
}

TEST(DBounds, EqualSeriesCollapseToTheMedianFit) {
    std::vector<BoundPoint> pts;
    for (const CollapsePoint &p : planted(kQac, 12)) pts.push_back({p.L, p.eta, p.runs, p.runs, std::nullopt});
    const DBounds b = fit_d_bounds(pts, kQac[0], kQac[1], kQac[2], {.resamples = 200});
    EXPECT_NEAR(b.minus.d, 1.73, 1e-6);
    EXPECT_NEAR(b.plus.d, 1.73, 1e-6);
    EXPECT_EQ(b.classification, DClass::below_two);
}

TEST(DBounds, WidenedBoundsBracketD) {
    std::vector<BoundPoint> pts;
    for (const CollapsePoint &p : planted(kC, 12)) {
        const double y = std::log10(p.runs);
        pts.push_back({p.L, p.eta, std::pow(10.0, 0.9 * y), std::pow(10.0, 1.1 * y), std::nullopt});
    }
    const DBounds b = fit_d_bounds(pts, kC[0], kC[1], kC[2], {.resamples = 200});
    EXPECT_LT(b.minus.d, 2.12);
    EXPECT_GT(b.plus.d, 2.12);
    EXPECT_LE(b.range.lo, b.minus.d);
    EXPECT_GE(b.range.hi, b.plus.d);
}

TEST(DBounds, Errors) {
    const std::vector<BoundPoint> two{{2, 0, 1, 2, std::nullopt}, {3, 0, 1, 2, std::nullopt}};
    EXPECT_THROW(fit_d_bounds(two, 1, 1, 1), InputError);
    EXPECT_THROW(fit_d_bounds(two, kInf, 1, 1), InputError);
}

TEST(Bounds, ClassicalCurveFixtures) {
    EXPECT_NEAR(classical_bound(2, 0), std::log10(1024.0), 1e-12);
    EXPECT_NEAR(classical_bound(1, 0), std::log10(16.0), 1e-12);
    for (double L : {1.0, 4.0, 16.0})
        for (double alpha : {0.3, 1.0})
            for (int k = 0; k < 30; ++k)
                EXPECT_LE(classical_bound(L, k * 0.01, alpha), classical_bound(L, (k + 1) * 0.01, alpha));
    // the bound lies above the QAC scaling prediction at the largest size and noise
    EXPECT_GT(classical_bound(16, 0.15), log10_trial({TrialFormId::g1, kQac}, 16, 0.15));
    EXPECT_NEAR(random_guess_bound(2, 0), 32 * std::log10(2.0), 1e-12);
    EXPECT_THROW(classical_bound(0.5, 0), RangeError);
    EXPECT_THROW(classical_bound(2, 0, 1.5), RangeError);
}

TEST(Speedup, RatiosAndOmissions) {
    const std::vector<SeriesPoint> same{{2, 0.1, 5}, {3, 0.1, 50}};
    for (const SeriesPoint &p : speedup_ratio(same, same).ratios) EXPECT_EQ(p.runs, 1.0);

    const std::vector<SeriesPoint> c{{2, 0.1, 100}, {3, 0.1, kInf}, {4, 0.1, 10}};
    const std::vector<SeriesPoint> q{{2, 0.1, 10}, {3, 0.1, 20}, {5, 0.1, 1}};
    const SpeedupSeries s = speedup_ratio(c, q);
    ASSERT_EQ(s.ratios.size(), 1u);
    EXPECT_EQ(s.ratios[0].runs, 10.0);
    EXPECT_EQ(s.omitted_unsolved, 1u);

    const std::vector<SeriesPoint> none{{9, 0.1, 1}};
    EXPECT_THROW(speedup_ratio(c, none), InputError);
}

TEST(Speedup, LogSlopeIsPositiveWhenCGrowsFaster) {
    std::vector<SeriesPoint> c, q;
    for (int L = 2; L <= 12; ++L) {
        c.push_back({double(L), 0.1, std::pow(10.0, g1_exponent({0.4, 0.07, 0.5, 2.1}, L, 0.1))});
        q.push_back({double(L), 0.1, std::pow(10.0, g1_exponent({0.4, 0.07, 0.5, 1.7}, L, 0.1))});
    }
    const SpeedupSeries s = speedup_ratio(c, q);
    for (std::size_t i = 1; i < s.ratios.size(); ++i) EXPECT_GT(std::log10(s.ratios[i].runs), std::log10(s.ratios[i - 1].runs));
}

TEST(Report, ContainsParametersAndDigest) {
    const auto data = planted(kQac, 6);
    const ScalingFit fit = fit_collapse(data, TrialFormId::g1, {.seed = 7});
    const std::string text = format_fit_report(fit, data);
    EXPECT_NE(text.find("form=g1\n"), std::string::npos);
    EXPECT_NE(text.find("positivity=squared\n"), std::string::npos);
    EXPECT_NE(text.find("d="), std::string::npos);
    char digest[9];
    std::snprintf(digest, sizeof digest, "%08x", data_digest(data));
    EXPECT_NE(text.find(std::string("data_crc32=") + digest), std::string::npos);
    auto changed = data;
    changed[0].runs *= 2;
    EXPECT_NE(data_digest(data), data_digest(changed));
}
