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
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "jchaos/rng.hpp"

namespace jchaos {

struct GaugeCount {
    std::uint64_t successes = 0;
    std::uint64_t readouts = 0;
};

//! Success counts of one instance, one entry per gauge.
struct GaugeCounts {
    std::vector<GaugeCount> gauges;
    std::size_t size() const { return gauges.size(); }
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

//! Bootstrap mean and central 95% interval of one statistic.
struct Estimate {
    double mean = 0.0;
    Interval ci95;
};

struct SuccessEstimate {
    Estimate mu;          //!< success probability across gauges
    Estimate sigma;       //!< spread across gauges
    Estimate chaoticity;  //!< sigma / mu
    std::size_t n_resamples = 0;
};

struct BootstrapOptions {
    std::size_t n_resamples = 10000;
    //! Applied to every per-gauge draw B_i before it is weighted, e.g. to
    //! turn a single-copy success into a best-of-k success.
    std::function<double(double)> transform;
};

//! Bayesian bootstrap over gauges. Every resample draws
//! B_i ~ Beta(s_i + 1, M_i - s_i + 1) and D ~ Dirichlet(1, ..., 1), then
//! mu = sum D_i B_i and sigma^2 = sum D_i (B_i - mu)^2.
SuccessEstimate bootstrap_success(const GaugeCounts &counts, const BootstrapOptions &opts, Seed seed);
SuccessEstimate bootstrap_success(const GaugeCounts &counts, std::size_t n_resamples, Seed seed);

//! Runs needed to see the ground state at least once with 99% confidence.
struct TtsResult {
    std::optional<double> runs;  //!< integer >= 1; empty when unsolved
    double p_success = 0.0;
    double t_f = 0.0;            //!< nominal anneal time, metadata only
    bool solved() const { return runs.has_value(); }
};

TtsResult tts(double p_success, double t_f = 0.0);

//! +inf for unsolved, the run count otherwise.
inline double tts_sort_key(const TtsResult &r) {
    return r.runs ? *r.runs : std::numeric_limits<double>::infinity();
}

double pearson(std::span<const double> x, std::span<const double> y);

struct RankCorrelation {
    double rho = 0.0;
    double p_value = 1.0;  //!< two-sided, t approximation with n - 2 dof
    std::size_t n = 0;
};

//! Spearman rank correlation; ties receive average ranks.
RankCorrelation spearman(std::span<const double> x, std::span<const double> y);

//! Ascending ranks starting at 1, ties averaged.
std::vector<double> average_ranks(std::span<const double> x);

//! Median; +inf entries stand for unsolved and sort last. An even count
//! averages the two middle values.
double median(std::vector<double> values);

struct MedianCi {
    double median = 0.0;  //!< +inf when unsolved
    Interval ci95;
};

//! Median with a percentile bootstrap interval over the entries.
MedianCi median_ci(std::span<const double> values, std::size_t n_resamples, Seed seed);

//! Nearest-rank percentile, 0 < p <= 100.
double percentile(std::vector<double> values, double p);

}  // namespace jchaos
