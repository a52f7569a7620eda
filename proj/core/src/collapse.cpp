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

#include "jchaos/collapse.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/tools/minima.hpp>

#include "jchaos/chimera.hpp"
#include "jchaos/error.hpp"
#include "jchaos/instance.hpp"

namespace jchaos {

namespace {

const double kLog10e = std::log10(std::exp(1.0));

double point_L(double L, const std::optional<std::uint64_t> &couplers, bool effective) {
    if (!effective) return L;
    if (!couplers) throw InputError("effective-L fit needs the logical coupler count of every point");
    return effective_L(*couplers);
}

struct Prepared {
    double L, logL, eta2, y;
};

// log10 trial value on prepared data; NaN for parameter points outside the
// form's domain.
double trial_prepared(TrialFormId id, std::span<const double> p, const Prepared &q) {
    const double logx = std::log(q.eta2 + p[1] * p[1]);
    switch (id) {
    case TrialFormId::g1: return p[0] * std::exp(p[2] * logx + p[3] * q.logL);
    case TrialFormId::g2: return p[0] * std::exp(p[2] * logx + p[3] * q.logL) + std::log10(p[4]);
    case TrialFormId::g3a:
        return p[0] * q.L + p[2] * std::exp(0.5 * logx + 2.0 * q.logL) + std::log10(p[4] * q.L * q.L);
    case TrialFormId::g3b:
        return p[0] * q.L + p[2] * std::exp(p[3] * logx + 2.0 * q.logL) + std::log10(p[4] * q.L * q.L);
    case TrialFormId::g3c:
        return p[0] * q.L + p[2] * std::exp(0.5 * logx + p[3] * q.logL) + std::log10(p[4] * q.L * q.L);
    }
    return std::nan("");
}

double residual(TrialFormId id, std::span<const double> p, const std::vector<Prepared> &data) {
    double r = 0.0;
    for (const Prepared &q : data) {
        const double diff = q.y - trial_prepared(id, p, q);
        r += diff * diff;
    }
    return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
}

bool is_g3(TrialFormId id) { return id == TrialFormId::g3a || id == TrialFormId::g3b || id == TrialFormId::g3c; }

// Effective starting values; wide enough to cover both slow and fast
// growing data.
std::vector<double> random_start(TrialFormId id, Rng &rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, u(rng)); };
    std::vector<double> p(parameter_count(id));
    p[0] = log_uniform(0.01, 20.0);
    p[1] = 0.5 * u(rng);
    p[2] = is_g3(id) ? log_uniform(0.01, 20.0) : 0.1 + 2.9 * u(rng);
    p[3] = 0.5 + 2.5 * u(rng);
    if (p.size() > 4) p[4] = log_uniform(0.1, 10.0);
    return p;
}

}  // namespace

const char *to_string(TrialFormId id) {
    switch (id) {
    case TrialFormId::g1: return "g1";
    case TrialFormId::g2: return "g2";
    case TrialFormId::g3a: return "g3a";
    case TrialFormId::g3b: return "g3b";
    case TrialFormId::g3c: return "g3c";
    }
    return "?";
}

TrialFormId parse_trial_form(const std::string &s) {
    for (TrialFormId id : {TrialFormId::g1, TrialFormId::g2, TrialFormId::g3a, TrialFormId::g3b, TrialFormId::g3c})
        if (s == to_string(id)) return id;
    throw ParseError("unknown trial form '" + s + "'");
}

std::size_t parameter_count(TrialFormId id) { return id == TrialFormId::g1 ? 4 : 5; }

const char *to_string(Positivity p) { return p == Positivity::raw ? "raw" : "squared"; }

const char *to_string(DClass c) {
    switch (c) {
    case DClass::below_two: return "d<2";
    case DClass::above_two: return "d>2";
    case DClass::inconclusive: return "inconclusive";
    }
    return "?";
}

double log10_trial(const TrialForm &form, double L, double eta) {
    if (form.params.size() != parameter_count(form.id)) throw InputError("wrong parameter count for trial form");
    for (double v : form.params)
        if (!std::isfinite(v)) throw InputError("non-finite trial parameter");
    if (!(L > 0.0) || !(eta >= 0.0)) throw RangeError("trial form needs L > 0 and eta >= 0");
    const Prepared q{L, std::log(L), eta * eta, 0.0};
    return trial_prepared(form.id, form.params, q);
}

double eval_trial(const TrialForm &form, double L, double eta) { return std::pow(10.0, log10_trial(form, L, eta)); }

SimplexResult nelder_mead(const std::function<double(std::span<const double>)> &f, std::vector<double> start,
                          std::span<const double> step, int max_evaluations, double tolerance) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> x(n + 1, start);
    std::vector<double> fx(n + 1);
    for (std::size_t i = 0; i < n; ++i) x[i + 1][i] += step[i];
    SimplexResult out;
    for (std::size_t i = 0; i <= n; ++i) fx[i] = f(x[i]);
    out.evaluations = static_cast<int>(n + 1);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    auto at = [&](const std::vector<double> &from, double t, std::vector<double> &to) {
        for (std::size_t j = 0; j < n; ++j) to[j] = centroid[j] + t * (from[j] - centroid[j]);
    };
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        const double fb = fx[order[0]], fw = fx[order[n]];
        if (std::isfinite(fw) && fw - fb <= tolerance * std::abs(fb) + 1e-300) {
            out.converged = true;
            break;
        }
        if (out.evaluations >= max_evaluations) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += x[order[i]][j] / static_cast<double>(n);
        const std::vector<double> &worst = x[order[n]];
        at(worst, -1.0, xr);
        const double fr = f(xr);
        ++out.evaluations;
        if (fr < fb) {
            at(worst, -2.0, xe);
            const double fe = f(xe);
            ++out.evaluations;
            if (fe < fr) {
                x[order[n]] = xe;
                fx[order[n]] = fe;
            } else {
                x[order[n]] = xr;
                fx[order[n]] = fr;
            }
            continue;
        }
        if (fr < fx[order[n - 1]]) {
            x[order[n]] = xr;
            fx[order[n]] = fr;
            continue;
        }
        const bool outside = fr < fw;
        at(worst, outside ? -0.5 : 0.5, xc);
        const double fc = f(xc);
        ++out.evaluations;
        if (fc < (outside ? fr : fw)) {
            x[order[n]] = xc;
            fx[order[n]] = fc;
            continue;
        }
        const std::vector<double> best = x[order[0]];
        for (std::size_t i = 1; i <= n; ++i) {
            auto &v = x[order[i]];
            for (std::size_t j = 0; j < n; ++j) v[j] = best[j] + 0.5 * (v[j] - best[j]);
            fx[order[i]] = f(v);
        }
        out.evaluations += static_cast<int>(n);
    }
    const std::size_t b = static_cast<std::size_t>(std::min_element(fx.begin(), fx.end()) - fx.begin());
    out.x = x[b];
    out.value = fx[b];
    return out;
}

ScalingFit fit_collapse(std::span<const CollapsePoint> data, TrialFormId id, const FitOptions &opts) {
    const std::size_t np = parameter_count(id);
    std::vector<Prepared> pts;
    ScalingFit fit;
    fit.form.id = id;
    fit.positivity = opts.positivity;
    for (const CollapsePoint &c : data) {
        if (!std::isfinite(c.runs)) {
            ++fit.excluded_unsolved;
            continue;
        }
        if (!(c.runs > 0.0)) throw InputError("runs must be positive");
        const double L = point_L(c.L, c.logical_couplers, opts.use_effective_L);
        if (!(L > 0.0) || !(c.eta >= 0.0)) throw RangeError("collapse point needs L > 0 and eta >= 0");
        pts.push_back({L, std::log(L), c.eta * c.eta, std::log10(c.runs)});
    }
    fit.points = pts.size();
    if (pts.size() < np + 2)
        throw InputError("fit needs at least " + std::to_string(np + 2) + " solved points, got " +
                         std::to_string(pts.size()));
    if (opts.restarts < 1) throw InputError("fit needs at least one restart");

    const bool squared = opts.positivity == Positivity::squared;
    std::vector<double> eff(np);
    auto to_effective = [&](std::span<const double> p) {
        for (std::size_t i = 0; i < np; ++i) eff[i] = squared ? p[i] * p[i] : p[i];
        return std::span<const double>(eff);
    };
    auto objective = [&](std::span<const double> p) { return residual(id, to_effective(p), pts); };
    auto steps_for = [&](const std::vector<double> &p) {
        std::vector<double> s(np);
        for (std::size_t i = 0; i < np; ++i) s[i] = 0.25 * std::abs(p[i]) + 0.05;
        return s;
    };

    SimplexResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (int k = 0; k < opts.restarts; ++k) {
        Rng rng = make_rng(derive_seed(opts.seed, SeedTag::fit, {static_cast<std::uint64_t>(k)}));
        std::vector<double> start = random_start(id, rng);
        if (squared)
            for (double &v : start) v = std::sqrt(v);
        const SimplexResult r = nelder_mead(objective, start, steps_for(start), opts.max_evaluations, opts.tolerance);
        if (r.converged) ++fit.converged_restarts;
        if (r.value < best.value) {
            best = r;
            fit.best_restart = k;
        }
    }
    if (fit.best_restart < 0 || fit.converged_restarts == 0)
        throw FitError(std::string("no restart of the ") + to_string(id) + " fit converged; best residual " +
                       format_real(best.value) + " after " + std::to_string(opts.restarts) + " restarts");

    // Polish: restart the simplex around the incumbent until it stops improving.
    for (int round = 0; round < 8; ++round) {
        const SimplexResult r = nelder_mead(objective, best.x, steps_for(best.x), opts.max_evaluations, opts.tolerance);
        const bool improved = r.value < best.value * (1.0 - 1e-12) - 1e-300;
        if (r.value < best.value) best = r;
        if (!improved) break;
    }
    fit.residual = best.value;
    to_effective(best.x);
    fit.form.params = eff;
    if (is_g3(id) && !squared && fit.form.params[0] < 0.0) fit.accepted = false;
    return fit;
}

namespace {

struct BoundPrepared {
    double logL, eta2, lower, upper;
};

double fit_d(const std::vector<BoundPrepared> &pts, std::span<const std::size_t> idx, double a, double b, double c,
             bool upper, double d_min, double d_max) {
    auto f = [&](double d) {
        double r = 0.0;
        for (std::size_t i : idx) {
            const BoundPrepared &q = pts[i];
            const double g = a * std::exp(c * std::log(q.eta2 + b * b) + d * q.logL);
            const double diff = (upper ? q.upper : q.lower) - g;
            r += diff * diff;
        }
        return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
    };
    constexpr int kGrid = 60;
    const double h = (d_max - d_min) / kGrid;
    int best = 0;
    double fbest = f(d_min);
    for (int k = 1; k <= kGrid; ++k) {
        const double v = f(d_min + k * h);
        if (v < fbest) {
            fbest = v;
            best = k;
        }
    }
    const double lo = std::max(d_min, d_min + (best - 1) * h), hi = std::min(d_max, d_min + (best + 1) * h);
    return boost::math::tools::brent_find_minima(f, lo, hi, 50).first;
}

}  // namespace

DBounds fit_d_bounds(std::span<const BoundPoint> data, double a, double b, double c, const DBoundOptions &opts) {
    for (double v : {a, b, c})
        if (!std::isfinite(v)) throw InputError("non-finite fixed parameter");
    if (!(opts.d_max > opts.d_min)) throw InputError("empty d search interval");
    std::vector<BoundPrepared> pts;
    for (const BoundPoint &p : data) {
        if (!std::isfinite(p.upper) || !std::isfinite(p.lower)) continue;
        if (!(p.lower > 0.0) || p.upper < p.lower) throw InputError("bound point needs 0 < lower <= upper");
        const double L = point_L(p.L, p.logical_couplers, opts.use_effective_L);
        pts.push_back({std::log(L), p.eta * p.eta, std::log10(p.lower), std::log10(p.upper)});
    }
    if (pts.size() < 3) throw InputError("d bounds need at least three finite points");
    if (opts.resamples < 1) throw InputError("d bounds need at least one resample");

    std::vector<std::size_t> all(pts.size());
    std::iota(all.begin(), all.end(), 0);
    DBounds out;
    out.resamples = opts.resamples;
    out.minus.d = fit_d(pts, all, a, b, c, false, opts.d_min, opts.d_max);
    out.plus.d = fit_d(pts, all, a, b, c, true, opts.d_min, opts.d_max);

    Rng rng = make_rng(derive_seed(opts.seed, SeedTag::bootstrap));
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    std::vector<double> dm(opts.resamples), dp(opts.resamples);
    std::vector<std::size_t> idx(pts.size());
    for (std::size_t k = 0; k < opts.resamples; ++k) {
        for (auto &i : idx) i = pick(rng);
        dm[k] = fit_d(pts, idx, a, b, c, false, opts.d_min, opts.d_max);
        dp[k] = fit_d(pts, idx, a, b, c, true, opts.d_min, opts.d_max);
    }
    auto interval = [](const std::vector<double> &v) { return Interval{percentile(v, 2.5), percentile(v, 97.5)}; };
    out.minus.ci95 = interval(dm);
    out.plus.ci95 = interval(dp);
    const double dd_minus = std::max(0.0, out.minus.d - out.minus.ci95.lo);
    const double dd_plus = std::max(0.0, out.plus.ci95.hi - out.plus.d);
    out.range = {out.minus.d - dd_minus, out.plus.d + dd_plus};
    if (out.range.hi < 2.0) out.classification = DClass::below_two;
    else if (out.range.lo > 2.0) out.classification = DClass::above_two;
    return out;
}

double classical_bound(double L, double eta, double alpha) {
    if (!(L >= 1.0) || !(eta >= 0.0) || !(alpha > 0.0 && alpha <= 1.0))
        throw RangeError("classical bound needs L >= 1, eta >= 0, 0 < alpha <= 1");
    return 2.0 * std::log10(L) + 4.0 * L * std::log10(2.0) + 8.0 * std::pow(eta, alpha) * L * L * kLog10e;
}

double random_guess_bound(double L, double eta, double alpha) {
    if (!(L >= 1.0) || !(eta >= 0.0) || !(alpha > 0.0 && alpha <= 1.0))
        throw RangeError("random-guess bound needs L >= 1, eta >= 0, 0 < alpha <= 1");
    return 8.0 * L * L * std::log10(2.0) + 8.0 * std::pow(eta, alpha) * L * L * kLog10e;
}

SpeedupSeries speedup_ratio(std::span<const SeriesPoint> c, std::span<const SeriesPoint> qac) {
    std::map<std::pair<double, double>, double> q;
    for (const SeriesPoint &p : qac) q[{p.L, p.eta}] = p.runs;
    SpeedupSeries out;
    std::size_t overlap = 0;
    for (const SeriesPoint &p : c) {
        auto it = q.find({p.L, p.eta});
        if (it == q.end()) continue;
        ++overlap;
        if (!std::isfinite(p.runs) || !std::isfinite(it->second)) {
            ++out.omitted_unsolved;
            continue;
        }
        out.ratios.push_back({p.L, p.eta, p.runs / it->second});
    }
    if (overlap == 0) throw InputError("speedup ratio: no matching (L, eta) keys");
    return out;
}

std::uint32_t data_digest(std::span<const CollapsePoint> data) {
    std::ostringstream text;
    for (const CollapsePoint &p : data) {
        text << format_real(p.L) << ' ' << format_real(p.eta) << ' ' << format_real(p.runs) << ' ';
        if (p.logical_couplers) text << *p.logical_couplers;
        else text << '-';
        text << '\n';
    }
    const std::string s = text.str();
    return static_cast<std::uint32_t>(crc32(0L, reinterpret_cast<const Bytef *>(s.data()), static_cast<uInt>(s.size())));
}

std::string format_fit_report(const ScalingFit &fit, std::span<const CollapsePoint> data,
                              const std::optional<DBounds> &bounds) {
    static const char *names[] = {"a", "b", "c", "d", "e"};
    std::ostringstream out;
    out << "form=" << to_string(fit.form.id) << '\n' << "positivity=" << to_string(fit.positivity) << '\n';
    for (std::size_t i = 0; i < fit.form.params.size(); ++i) out << names[i] << '=' << format_real(fit.form.params[i]) << '\n';
    out << "residual=" << format_real(fit.residual) << '\n'
        << "points=" << fit.points << '\n'
        << "excluded_unsolved=" << fit.excluded_unsolved << '\n'
        << "best_restart=" << fit.best_restart << '\n'
        << "converged_restarts=" << fit.converged_restarts << '\n'
        << "accepted=" << (fit.accepted ? "true" : "false") << '\n';
    if (bounds) {
        out << "d_minus=" << format_real(bounds->minus.d) << '\n'
            << "d_minus_ci95=" << format_real(bounds->minus.ci95.lo) << ',' << format_real(bounds->minus.ci95.hi) << '\n'
            << "d_plus=" << format_real(bounds->plus.d) << '\n'
            << "d_plus_ci95=" << format_real(bounds->plus.ci95.lo) << ',' << format_real(bounds->plus.ci95.hi) << '\n'
            << "d_range=" << format_real(bounds->range.lo) << ',' << format_real(bounds->range.hi) << '\n'
            << "d_class=" << to_string(bounds->classification) << '\n';
    }
    char digest[9];
    std::snprintf(digest, sizeof digest, "%08x", data_digest(data));
    out << "data_crc32=" << digest << '\n';
    return out.str();
}

}  // namespace jchaos
