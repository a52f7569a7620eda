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

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "jchaos/error.hpp"
#include "jchaos/solvers.hpp"

namespace jchaos {

std::vector<QubitIndex> chimera_sweep_order(const ChimeraGraph &g) {
    std::vector<QubitIndex> order;
    order.reserve(g.active_count());
    for (int col = 0; col < g.L(); ++col)
        for (int row = 0; row < g.L(); ++row)
            for (int side = 0; side < 2; ++side)
                for (int k = 0; k < g.r(); ++k) {
                    const QubitIndex q = g.index({row, col, side, k});
                    if (g.active(q)) order.push_back(q);
                }
    return order;
}

namespace {

// The frontier DP is a sequence of table operations. The table is indexed by
// an assignment of the frontier spins (bit i <-> frontier[i], 1 <-> +1) and
// holds the minimum energy of all terms seen so far over the eliminated spins.
enum class OpKind {
    grow,     // append v as a new top bit
    replace,  // v takes the bit of u, minimizing over u
    fold,     // v has no unseen neighbours: add its terms minimized over v
    shrink,   // minimize over u and drop its bit
};

struct Op {
    OpKind kind;
    QubitIndex v = 0;          // incoming spin (grow/replace/fold)
    QubitIndex u = 0;          // eliminated spin (replace/shrink)
    int bit = 0;               // bit of v (grow/replace) or of u (shrink)
    int coupling_uv = 0;       // index into weights for J_uv (replace), -1 if none
    std::vector<std::pair<int, int>> terms;  // (frontier bit, weight index) of v's other neighbours
    int field = -1;            // weight index of h_v, or -1
    int frontier_after = 0;    // frontier size after the op
    std::vector<QubitIndex> frontier;  // frontier after the op (for backtracking)
};

struct Program {
    std::vector<Op> ops;
    int peak = 0;
    std::uint64_t decision_bits = 0;
    // Weight table referenced by the ops: couplers first, then fields.
    std::vector<std::size_t> coupler_of_weight;
};

Program compile(const IsingInstance &inst) {
    const ChimeraGraph &g = inst.graph();
    const std::vector<QubitIndex> order = chimera_sweep_order(g);
    const std::size_t n = inst.size();
    constexpr std::size_t kUnseen = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> ord(n, kUnseen);
    for (std::size_t t = 0; t < order.size(); ++t) ord[order[t]] = t;

    std::vector<std::vector<std::pair<QubitIndex, int>>> nbrs(n);
    const auto J = inst.couplers();
    for (std::size_t k = 0; k < J.size(); ++k) {
        nbrs[J[k].u].emplace_back(J[k].v, static_cast<int>(k));
        nbrs[J[k].v].emplace_back(J[k].u, static_cast<int>(k));
    }
    std::vector<std::size_t> elim(n, 0);
    for (QubitIndex q : order) {
        elim[q] = ord[q];
        for (auto [m, w] : nbrs[q]) elim[q] = std::max(elim[q], ord[m]);
    }

    Program prog;
    std::vector<QubitIndex> frontier;
    std::vector<int> bit_of(n, -1);
    auto renumber = [&] {
        for (std::size_t b = 0; b < frontier.size(); ++b) bit_of[frontier[b]] = static_cast<int>(b);
    };
    const int field_base = static_cast<int>(J.size());

    for (std::size_t t = 0; t < order.size(); ++t) {
        const QubitIndex v = order[t];
        Op op;
        op.v = v;
        op.field = inst.fields()[v] != 0.0 ? field_base + static_cast<int>(v) : -1;

        std::vector<QubitIndex> done;
        for (QubitIndex f : frontier)
            if (elim[f] == t) done.push_back(f);

        auto collect_terms = [&](QubitIndex skip) {
            for (auto [m, w] : nbrs[v]) {
                if (ord[m] >= t) continue;  // not yet seen
                if (m == skip) {
                    op.coupling_uv = w;
                    continue;
                }
                op.terms.emplace_back(bit_of[m], w);
            }
        };

        if (elim[v] == t) {
            op.kind = OpKind::fold;
            op.coupling_uv = -1;
            collect_terms(std::numeric_limits<QubitIndex>::max());
            prog.decision_bits += std::uint64_t{1} << frontier.size();
        } else if (!done.empty()) {
            const QubitIndex u = done.front();
            done.erase(done.begin());
            op.kind = OpKind::replace;
            op.u = u;
            op.bit = bit_of[u];
            op.coupling_uv = -1;
            collect_terms(u);
            frontier[op.bit] = v;
            bit_of[u] = -1;
            bit_of[v] = op.bit;
            prog.decision_bits += std::uint64_t{1} << frontier.size();
        } else {
            op.kind = OpKind::grow;
            op.coupling_uv = -1;
            collect_terms(std::numeric_limits<QubitIndex>::max());
            op.bit = static_cast<int>(frontier.size());
            frontier.push_back(v);
            bit_of[v] = op.bit;
        }
        op.frontier_after = static_cast<int>(frontier.size());
        op.frontier = frontier;
        prog.peak = std::max(prog.peak, op.frontier_after);
        prog.ops.push_back(std::move(op));

        for (QubitIndex u : done) {
            Op sh;
            sh.kind = OpKind::shrink;
            sh.u = u;
            sh.bit = bit_of[u];
            frontier.erase(frontier.begin() + sh.bit);
            bit_of[u] = -1;
            renumber();
            sh.frontier_after = static_cast<int>(frontier.size());
            sh.frontier = frontier;
            prog.decision_bits += std::uint64_t{1} << frontier.size();
            prog.ops.push_back(std::move(sh));
        }
    }
    return prog;
}

class BitSet {
  public:
    explicit BitSet(std::uint64_t n) : words_((n + 63) / 64, 0) {}
    void set(std::uint64_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    bool test(std::uint64_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }

  private:
    std::vector<std::uint64_t> words_;
};

template <typename V>
struct Weights {
    std::vector<V> w;  // couplers, then one field entry per site
};

template <typename V>
Weights<V> make_weights(const IsingInstance &inst) {
    Weights<V> out;
    const auto J = inst.couplers();
    const auto h = inst.fields();
    out.w.resize(J.size() + h.size());
    for (std::size_t k = 0; k < J.size(); ++k) {
        if constexpr (std::is_integral_v<V>) out.w[k] = static_cast<V>(inst.coupler_units()[k]);
        else out.w[k] = J[k].value;
    }
    for (std::size_t q = 0; q < h.size(); ++q) {
        if constexpr (std::is_integral_v<V>) out.w[J.size() + q] = static_cast<V>(inst.field_units()[q]);
        else out.w[J.size() + q] = h[q];
    }
    return out;
}

template <typename V>
V frontier_field(const Op &op, const Weights<V> &W, std::uint64_t x) {
    V lf = op.field >= 0 ? W.w[op.field] : V{0};
    for (auto [b, k] : op.terms) lf += ((x >> b) & 1u) ? W.w[k] : -W.w[k];
    return lf;
}

template <typename V>
std::pair<V, Config> run(const IsingInstance &inst, const Program &prog) {
    const Weights<V> W = make_weights<V>(inst);
    std::vector<V> T(std::size_t{1} << prog.peak, V{0});
    std::vector<BitSet> decisions;
    decisions.reserve(prog.ops.size());
    int F = 0;

    for (const Op &op : prog.ops) {
        switch (op.kind) {
        case OpKind::grow: {
            const std::uint64_t half = std::uint64_t{1} << F;
            for (std::uint64_t x = 0; x < half; ++x) {
                const V lf = frontier_field(op, W, x);
                const V base = T[x];
                T[x] = base - lf;
                T[x | half] = base + lf;
            }
            decisions.emplace_back(0);
            ++F;
            break;
        }
        case OpKind::replace: {
            BitSet d(std::uint64_t{1} << F);
            const std::uint64_t bit = std::uint64_t{1} << op.bit;
            const V juv = op.coupling_uv >= 0 ? W.w[op.coupling_uv] : V{0};
            for (std::uint64_t x = 0; x < (std::uint64_t{1} << F); ++x) {
                if (x & bit) continue;
                const V lf = frontier_field(op, W, x);
                const V t0 = T[x], t1 = T[x | bit];  // u = -1, u = +1
                // v = -1
                const V a0 = t0 - (lf - juv), a1 = t1 - (lf + juv);
                // v = +1
                const V b0 = t0 + (lf - juv), b1 = t1 + (lf + juv);
                if (a1 < a0) d.set(x);
                if (b1 < b0) d.set(x | bit);
                T[x] = std::min(a0, a1);
                T[x | bit] = std::min(b0, b1);
            }
            decisions.push_back(std::move(d));
            break;
        }
        case OpKind::fold: {
            BitSet d(std::uint64_t{1} << F);
            for (std::uint64_t x = 0; x < (std::uint64_t{1} << F); ++x) {
                const V lf = frontier_field(op, W, x);
                // s_v * lf is minimized by s_v = -sign(lf); s_v = -1 on ties.
                if (lf < V{0}) {
                    d.set(x);
                    T[x] += lf;
                } else {
                    T[x] -= lf;
                }
            }
            decisions.push_back(std::move(d));
            break;
        }
        case OpKind::shrink: {
            const std::uint64_t out_size = std::uint64_t{1} << (F - 1);
            BitSet d(out_size);
            const std::uint64_t low = (std::uint64_t{1} << op.bit) - 1;
            for (std::uint64_t y = 0; y < out_size; ++y) {
                const std::uint64_t x0 = ((y & ~low) << 1) | (y & low);
                const std::uint64_t x1 = x0 | (std::uint64_t{1} << op.bit);
                if (T[x1] < T[x0]) {
                    d.set(y);
                    T[y] = T[x1];
                } else {
                    T[y] = T[x0];
                }
            }
            decisions.push_back(std::move(d));
            --F;
            break;
        }
        }
    }
    const V best = F == 0 ? T[0] : V{0};

    Config s(inst.size(), 0);
    auto index_of = [&](const std::vector<QubitIndex> &frontier) {
        std::uint64_t x = 0;
        for (std::size_t b = 0; b < frontier.size(); ++b)
            if (s[frontier[b]] > 0) x |= std::uint64_t{1} << b;
        return x;
    };
    for (std::size_t k = prog.ops.size(); k-- > 0;) {
        const Op &op = prog.ops[k];
        const std::uint64_t x = index_of(op.frontier);
        switch (op.kind) {
        case OpKind::grow: break;
        case OpKind::replace: s[op.u] = decisions[k].test(x) ? 1 : -1; break;
        case OpKind::fold: s[op.v] = decisions[k].test(x) ? 1 : -1; break;
        case OpKind::shrink: s[op.u] = decisions[k].test(x) ? 1 : -1; break;
        }
    }
    return {best, s};
}

}  // namespace

DpPlan plan_dp(const IsingInstance &inst) {
    const Program prog = compile(inst);
    DpPlan plan;
    plan.peak_frontier_bits = prog.peak;
    plan.table_bytes = (std::uint64_t{1} << prog.peak) * (inst.exact() ? sizeof(std::int32_t) : sizeof(double));
    plan.decision_bytes = prog.decision_bits / 8;
    return plan;
}

GroundCertificate solve_dp_exact(const IsingInstance &inst, const DpOptions &opts) {
    const Program prog = compile(inst);
    if (prog.peak > opts.max_frontier_bits) {
        const std::uint64_t table = (std::uint64_t{1} << prog.peak) * (inst.exact() ? 4 : 8);
        const double gib = static_cast<double>(table + prog.decision_bits / 8) / (1024.0 * 1024.0 * 1024.0);
        throw ResourceError("frontier of " + std::to_string(prog.peak) + " spins exceeds the cap of " +
                            std::to_string(opts.max_frontier_bits) + " (would need about " + format_real(std::round(gib * 100) / 100) +
                            " GiB)");
    }
    GroundCertificate cert;
    cert.method = CertMethod::dp_exact;
    if (inst.exact()) {
        std::int64_t bound = 0;
        for (auto u : inst.coupler_units()) bound += std::llabs(u);
        for (auto u : inst.field_units()) bound += std::llabs(u);
        if (bound > std::numeric_limits<std::int32_t>::max() / 2) throw ResourceError("exact energies overflow 32-bit tables");
        auto [best, witness] = run<std::int32_t>(inst, prog);
        cert.witness = std::move(witness);
        const Energy e = energy(inst, cert.witness);
        if (!e.units || *e.units != best) throw Error("dp witness does not reproduce the table minimum");
        cert.energy = e.value;
        cert.energy_units = e.units;
        cert.scale = *inst.exact_scale();
    } else {
        auto [best, witness] = run<double>(inst, prog);
        cert.witness = std::move(witness);
        const Energy e = energy(inst, cert.witness);
        if (std::abs(e.value - best) > 1e-9) throw Error("dp witness does not reproduce the table minimum");
        cert.energy = e.value;
        cert.scale = 0;
    }
    return cert;
}

namespace {

template <typename V>
BruteForceResult enumerate(const IsingInstance &inst, const std::vector<QubitIndex> &sites) {
    const Weights<V> W = make_weights<V>(inst);
    const std::size_t n = inst.size();
    const std::size_t field_base = inst.couplers().size();
    std::vector<std::vector<std::pair<QubitIndex, std::size_t>>> nbrs(n);
    const auto J = inst.couplers();
    for (std::size_t k = 0; k < J.size(); ++k) {
        nbrs[J[k].u].emplace_back(J[k].v, k);
        nbrs[J[k].v].emplace_back(J[k].u, k);
    }
    Config s(n, 0);
    for (QubitIndex q : sites) s[q] = -1;

    auto full_energy = [&] {
        V e{0};
        for (QubitIndex q : sites) e += W.w[field_base + q] * s[q];
        for (std::size_t k = 0; k < J.size(); ++k) e += W.w[k] * s[J[k].u] * s[J[k].v];
        return e;
    };
    constexpr double kTol = 1e-12;
    auto below = [&](V a, V b) {
        if constexpr (std::is_integral_v<V>) return a < b;
        else return a < b - kTol;
    };
    auto tied = [&](V a, V b) {
        if constexpr (std::is_integral_v<V>) return a == b;
        else return std::abs(a - b) <= 1e-9;
    };

    V e = full_energy();
    V best = e;
    std::vector<Config> candidates{s};
    const std::uint64_t count = std::uint64_t{1} << sites.size();
    for (std::uint64_t i = 1; i < count; ++i) {
        const QubitIndex q = sites[static_cast<std::size_t>(std::countr_zero(i))];
        V lf = W.w[field_base + q];
        for (auto [m, k] : nbrs[q]) lf += W.w[k] * s[m];
        e -= 2 * s[q] * lf;
        s[q] = static_cast<Spin>(-s[q]);
        if (below(e, best)) {
            best = e;
            candidates.clear();
            candidates.push_back(s);
        } else if (tied(e, best)) {
            candidates.push_back(s);
        }
    }

    BruteForceResult out;
    // Candidates were collected on a running sum; settle them on exact
    // re-evaluation so that float drift cannot decide membership.
    double exact_best = std::numeric_limits<double>::infinity();
    std::vector<Energy> es;
    for (const Config &c : candidates) {
        es.push_back(energy(inst, c));
        exact_best = std::min(exact_best, es.back().value);
    }
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const bool keep = es[k].units ? es[k].value == exact_best : es[k].value <= exact_best + kTol;
        if (keep) out.ground_set.push_back(candidates[k]);
    }
    std::sort(out.ground_set.begin(), out.ground_set.end());
    out.certificate.method = CertMethod::brute_force;
    out.certificate.witness = out.ground_set.front();
    const Energy eb = energy(inst, out.certificate.witness);
    out.certificate.energy = eb.value;
    out.certificate.energy_units = eb.units;
    out.certificate.scale = inst.exact_scale().value_or(0);
    return out;
}

}  // namespace

BruteForceResult brute_force(const IsingInstance &inst, int max_spins) {
    std::vector<QubitIndex> sites;
    for (QubitIndex q = 0; q < inst.size(); ++q)
        if (inst.active(q)) sites.push_back(q);
    if (static_cast<int>(sites.size()) > max_spins || sites.size() > 40)
        throw ResourceError("brute force over " + std::to_string(sites.size()) + " spins exceeds the limit of " +
                            std::to_string(max_spins));
    if (sites.empty()) throw InputError("instance has no active spins");
    return inst.exact() ? enumerate<std::int64_t>(inst, sites) : enumerate<double>(inst, sites);
}

const char *to_string(CertMethod m) {
    switch (m) {
    case CertMethod::dp_exact: return "dp-exact";
    case CertMethod::brute_force: return "brute-force";
    case CertMethod::pticm: return "pticm";
    }
    return "?";
}

CertMethod parse_cert_method(const std::string &s) {
    if (s == "dp-exact") return CertMethod::dp_exact;
    if (s == "brute-force") return CertMethod::brute_force;
    if (s == "pticm") return CertMethod::pticm;
    throw ParseError("unknown certificate method '" + s + "'");
}

bool certificate_consistent(const GroundCertificate &cert, const IsingInstance &inst) {
    const Energy e = energy(inst, cert.witness);
    if (cert.energy_units && e.units) return *cert.energy_units == *e.units;
    return std::abs(e.value - cert.energy) <= 1e-9;
}

bool same_energy(const GroundCertificate &a, const GroundCertificate &b) {
    if (a.energy_units && b.energy_units && a.scale == b.scale) return *a.energy_units == *b.energy_units;
    return std::abs(a.energy - b.energy) <= 1e-9;
}

SuccessCount adjudicate_success(std::span<const Config> readouts, const IsingInstance &intended,
                                const GroundCertificate &cert) {
    SuccessCount out;
    for (const Config &s : readouts) {
        if (s.size() != intended.size()) throw InputError("readout does not match the intended instance's graph");
        const Energy e = energy(intended, s);
        const bool hit = (e.units && cert.energy_units) ? *e.units == *cert.energy_units
                                                        : std::abs(e.value - cert.energy) <= 1e-9;
        out.successes += hit ? 1 : 0;
        ++out.total;
    }
    return out;
}

SuccessCount adjudicate_success(const SampleSet &samples, const IsingInstance &intended, const GroundCertificate &cert) {
    return adjudicate_success(std::span<const Config>(samples.readouts), intended, cert);
}

}  // namespace jchaos
