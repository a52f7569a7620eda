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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jchaos/rng.hpp"
#include "jchaos/stats.hpp"

namespace jchaos {

//! Trial collapse forms for log10 of the runs-to-solution, with
//! x = eta^2 + b^2:
//!   g1  = a x^c L^d                              {a, b, c, d}
//!   g2  = g1 + log10(e)                          {a, b, c, d, e}
//!   g3* = a L + c x^d1 L^d2 + log10(e L^2)       {a, b, c, d, e}
//! with (d1, d2) = (1/2, 2) for g3a, (d, 2) for g3b and (1/2, d) for g3c.
//! In g3a the d slot is carried but unused. In g2 the constant log10(e) is
//! only weakly separable from a when the data span few L values.
enum class TrialFormId { g1, g2, g3a, g3b, g3c };

const char *to_string(TrialFormId id);
TrialFormId parse_trial_form(const std::string &s);
std::size_t parameter_count(TrialFormId id);

enum class Positivity { raw, squared };
const char *to_string(Positivity p);

struct TrialForm {
    TrialFormId id = TrialFormId::g1;
    std::vector<double> params;  //!< effective values, in the order listed above
};

//! log10 of the trial runs-to-solution.
double log10_trial(const TrialForm &form, double L, double eta);
//! 10^log10_trial.
double eval_trial(const TrialForm &form, double L, double eta);

struct CollapsePoint {
    double L = 0.0;
    double eta = 0.0;
    double runs = 0.0;  //!< +inf when unsolved
    //! Logical coupler count of the graph the point came from; needed for
    //! effective-L fits.
    std::optional<std::uint64_t> logical_couplers;
};

struct FitOptions {
    Positivity positivity = Positivity::squared;
    int restarts = 32;
    Seed seed = 0;
    bool use_effective_L = false;
    int max_evaluations = 20000;  //!< per simplex run
    double tolerance = 1e-15;     //!< relative spread of simplex values at convergence
};

struct ScalingFit {
    TrialForm form;
    Positivity positivity = Positivity::squared;
    double residual = 0.0;  //!< sum of squared log10 errors
    std::size_t points = 0;
    std::size_t excluded_unsolved = 0;
    int best_restart = -1;
    int converged_restarts = 0;
    //! False for g3 fits with a < 0 in raw mode.
    bool accepted = true;
};

//! Least squares in log10 space by a seeded Nelder-Mead simplex with random
//! restarts and a final polish from the best vertex. Throws InputError with
//! fewer than (parameters + 2) finite points and FitError when no restart
//! converges.
ScalingFit fit_collapse(std::span<const CollapsePoint> data, TrialFormId form, const FitOptions &opts = {});

//! Unconstrained Nelder-Mead minimizer (standard coefficients 1, 2, 1/2, 1/2).
struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};
SimplexResult nelder_mead(const std::function<double(std::span<const double>)> &f, std::vector<double> start,
                          std::span<const double> step, int max_evaluations, double tolerance);

struct BoundPoint {
    double L = 0.0;
    double eta = 0.0;
    double lower = 0.0;  //!< lower end of the runs interval
    double upper = 0.0;  //!< upper end; +inf when unsolved
    std::optional<std::uint64_t> logical_couplers;
};

struct DEstimate {
    double d = 0.0;
    Interval ci95;  //!< bootstrap over data points
};

enum class DClass { below_two, above_two, inconclusive };
const char *to_string(DClass c);

struct DBounds {
    DEstimate minus;  //!< fitted to the lower series
    DEstimate plus;   //!< fitted to the upper series
    //! [d- - dd-, d+ + dd+], with dd from the bootstrap intervals.
    Interval range;
    DClass classification = DClass::inconclusive;
    std::size_t resamples = 0;
};

struct DBoundOptions {
    std::size_t resamples = 2000;
    Seed seed = 0;
    bool use_effective_L = false;
    double d_min = 0.0;
    double d_max = 6.0;
};

//! One-parameter fits of d in g1 with (a, b, c) held fixed.
DBounds fit_d_bounds(std::span<const BoundPoint> data, double a, double b, double c, const DBoundOptions &opts = {});

//! log10 of the frontier-DP cost L^2 2^(4L) scaled by the probability of
//! being handed the intended instance, e^(8 eta^alpha L^2).
double classical_bound(double L, double eta, double alpha = 1.0);
//! log10 of the random-guess cost 2^N e^(8 eta^alpha L^2) with N = 8 L^2
//! physical spins.
double random_guess_bound(double L, double eta, double alpha = 1.0);

struct SeriesPoint {
    double L = 0.0;
    double eta = 0.0;
    double runs = 0.0;  //!< +inf when unsolved
};

struct SpeedupSeries {
    std::vector<SeriesPoint> ratios;  //!< runs field holds R_C / R_QAC
    std::size_t omitted_unsolved = 0;
};

//! Elementwise R_C / R_QAC over matching (L, eta) keys.
SpeedupSeries speedup_ratio(std::span<const SeriesPoint> c, std::span<const SeriesPoint> qac);

//! crc32 over the canonical text of the data rows.
std::uint32_t data_digest(std::span<const CollapsePoint> data);

//! Key=value text report of a fit.
std::string format_fit_report(const ScalingFit &fit, std::span<const CollapsePoint> data,
                              const std::optional<DBounds> &bounds = std::nullopt);

}  // namespace jchaos
