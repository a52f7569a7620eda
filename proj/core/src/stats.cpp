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

#include "jchaos/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/distributions/students_t.hpp>

#include "jchaos/error.hpp"

namespace jchaos {

namespace {

// Nearest-rank quantile of a sorted sample.
double sorted_quantile(const std::vector<double> &sorted, double q) {
    const auto n = sorted.size();
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, n);
    return sorted[rank - 1];
}

Estimate summarize(std::vector<double> &draws) {
    Estimate e;
    e.mean = std::accumulate(draws.begin(), draws.end(), 0.0) / static_cast<double>(draws.size());
    std::sort(draws.begin(), draws.end());
    e.ci95 = {sorted_quantile(draws, 0.025), sorted_quantile(draws, 0.975)};
    return e;
}

}  // namespace

SuccessEstimate bootstrap_success(const GaugeCounts &counts, const BootstrapOptions &opts, Seed seed) {
    if (counts.size() == 0) throw InputError("bootstrap needs at least one gauge");
    if (opts.n_resamples < 1) throw InputError("bootstrap needs at least one resample");
    for (const GaugeCount &c : counts.gauges) {
        if (c.readouts == 0) throw InputError("gauge with zero readouts");
        if (c.successes > c.readouts) throw InputError("more successes than readouts");
    }
    const std::size_t g = counts.size();
    Rng rng = make_rng(derive_seed(seed, SeedTag::bootstrap));
    std::vector<std::gamma_distribution<double>> alpha, beta;
    for (const GaugeCount &c : counts.gauges) {
        alpha.emplace_back(static_cast<double>(c.successes) + 1.0, 1.0);
        beta.emplace_back(static_cast<double>(c.readouts - c.successes) + 1.0, 1.0);
    }
    std::exponential_distribution<double> unit_gamma(1.0);

    std::vector<double> mus(opts.n_resamples), sigmas(opts.n_resamples), ratios(opts.n_resamples);
    std::vector<double> B(g), D(g);
    for (std::size_t k = 0; k < opts.n_resamples; ++k) {
        for (std::size_t i = 0; i < g; ++i) {
            const double x = alpha[i](rng), y = beta[i](rng);
            B[i] = x / (x + y);
            if (opts.transform) B[i] = opts.transform(B[i]);
        }
        double total = 0.0;
        for (std::size_t i = 0; i < g; ++i) total += D[i] = unit_gamma(rng);
        double mu = 0.0;
        for (std::size_t i = 0; i < g; ++i) mu += (D[i] /= total) * B[i];
        double var = 0.0;
        for (std::size_t i = 0; i < g; ++i) var += D[i] * (B[i] - mu) * (B[i] - mu);
        mus[k] = mu;
        sigmas[k] = std::sqrt(var);
        ratios[k] = mu > 0.0 ? sigmas[k] / mu : 0.0;
    }
    SuccessEstimate out;
    out.n_resamples = opts.n_resamples;
    out.mu = summarize(mus);
    out.sigma = summarize(sigmas);
    out.chaoticity = summarize(ratios);
    return out;
}

SuccessEstimate bootstrap_success(const GaugeCounts &counts, std::size_t n_resamples, Seed seed) {
    BootstrapOptions opts;
    opts.n_resamples = n_resamples;
    return bootstrap_success(counts, opts, seed);
}

TtsResult tts(double p, double t_f) {
    if (!(p >= 0.0 && p <= 1.0)) throw RangeError("success probability outside [0, 1]");
    TtsResult r;
    r.p_success = p;
    r.t_f = t_f;
    if (p == 0.0) return r;
    if (p >= 0.99) {
        r.runs = 1.0;
        return r;
    }
    r.runs = std::max(1.0, std::ceil(std::log(0.01) / std::log1p(-p)));
    return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InputError("correlation needs equal-length series");
    if (x.size() < 2) throw InputError("correlation needs at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw InputError("correlation undefined for a constant series");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> rank(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
        i = j + 1;
    }
    return rank;
}

RankCorrelation spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InputError("correlation needs equal-length series");
    RankCorrelation out;
    out.n = x.size();
    const auto rx = average_ranks(x), ry = average_ranks(y);
    out.rho = pearson(rx, ry);
    if (out.n < 3) return out;
    const double dof = static_cast<double>(out.n) - 2.0;
    const double denom = 1.0 - out.rho * out.rho;
    if (denom <= 0.0) {
        out.p_value = 0.0;
        return out;
    }
    const double t = out.rho * std::sqrt(dof / denom);
    const boost::math::students_t dist(dof);
    out.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) throw InputError("median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    const double a = values[n / 2 - 1], b = values[n / 2];
    return std::isinf(b) ? b : 0.5 * (a + b);
}

MedianCi median_ci(std::span<const double> values, std::size_t n_resamples, Seed seed) {
    if (values.empty()) throw InputError("median of an empty set");
    if (n_resamples < 1) throw InputError("bootstrap needs at least one resample");
    MedianCi out;
    out.median = median({values.begin(), values.end()});
    Rng rng = make_rng(derive_seed(seed, SeedTag::bootstrap));
    std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
    std::vector<double> draws(n_resamples), sample(values.size());
    for (std::size_t k = 0; k < n_resamples; ++k) {
        for (double &v : sample) v = values[pick(rng)];
        draws[k] = median(sample);
    }
    std::sort(draws.begin(), draws.end());
    out.ci95 = {sorted_quantile(draws, 0.025), sorted_quantile(draws, 0.975)};
    return out;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty()) throw InputError("percentile of an empty set");
    if (!(p > 0.0 && p <= 100.0)) throw RangeError("percentile must lie in (0, 100]");
    std::sort(values.begin(), values.end());
    return sorted_quantile(values, p / 100.0);
}

}  // namespace jchaos
