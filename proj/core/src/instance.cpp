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

#include "jchaos/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "jchaos/error.hpp"

namespace jchaos {

const char *to_string(GraphKind k) { return k == GraphKind::logical ? "logical" : "physical"; }

GraphKind parse_graph_kind(const std::string &s) {
    if (s == "logical") return GraphKind::logical;
    if (s == "physical") return GraphKind::physical;
    throw ParseError("unknown graph kind '" + s + "'");
}

IsingInstance::IsingInstance(GraphKind kind, ChimeraGraph graph, std::optional<int> exact_scale)
    : kind_(kind), graph_(std::move(graph)), scale_(exact_scale), h_(graph_.qubit_count(), 0.0) {
    if (scale_ && *scale_ < 1) throw InputError("exact scale must be a positive integer");
    if (scale_) h_units_.assign(h_.size(), 0);
}

void IsingInstance::check_site(QubitIndex q) const {
    if (q >= size()) throw InputError("qubit index " + std::to_string(q) + " out of range");
    if (!graph_.active(q)) throw InputError("qubit " + std::to_string(q) + " is inactive");
}

static void check_range(double value) {
    if (!std::isfinite(value) || value < -1.0 || value > 1.0)
        throw RangeError("value " + format_real(value) + " outside [-1, 1]");
}

std::size_t IsingInstance::insert_slot(QubitIndex u, QubitIndex v, double value) {
    const Edge e = make_edge(u, v);
    if (!graph_.adjacent(e.u, e.v))
        throw InputError("(" + std::to_string(e.u) + ", " + std::to_string(e.v) + ") is not an edge of the graph");
    auto it = std::lower_bound(J_.begin(), J_.end(), e, [](const Coupler &c, const Edge &k) {
        return Edge{c.u, c.v} < k;
    });
    const auto pos = static_cast<std::size_t>(it - J_.begin());
    if (it != J_.end() && it->u == e.u && it->v == e.v) {
        it->value = value;
    } else {
        J_.insert(it, Coupler{e.u, e.v, value});
        if (scale_) J_units_.insert(J_units_.begin() + static_cast<std::ptrdiff_t>(pos), 0);
    }
    return pos;
}

void IsingInstance::set_field(QubitIndex q, double value) {
    if (scale_) throw InputError("exact instance: use set_field_units");
    check_site(q);
    check_range(value);
    h_[q] = value;
}

void IsingInstance::set_coupler(QubitIndex u, QubitIndex v, double value) {
    if (scale_) throw InputError("exact instance: use set_coupler_units");
    check_site(u);
    check_site(v);
    check_range(value);
    insert_slot(u, v, value);
}

void IsingInstance::set_field_units(QubitIndex q, std::int64_t numerator) {
    if (!scale_) throw InputError("instance has no exact scale");
    check_site(q);
    if (std::llabs(numerator) > *scale_) throw RangeError("field numerator outside [-scale, scale]");
    h_units_[q] = numerator;
    h_[q] = static_cast<double>(numerator) / *scale_;
}

void IsingInstance::set_coupler_units(QubitIndex u, QubitIndex v, std::int64_t numerator) {
    if (!scale_) throw InputError("instance has no exact scale");
    check_site(u);
    check_site(v);
    if (std::llabs(numerator) > *scale_) throw RangeError("coupler numerator outside [-scale, scale]");
    const std::size_t pos = insert_slot(u, v, static_cast<double>(numerator) / *scale_);
    J_units_[pos] = numerator;
}

std::ptrdiff_t IsingInstance::find_coupler(QubitIndex u, QubitIndex v) const {
    const Edge e = make_edge(u, v);
    auto it = std::lower_bound(J_.begin(), J_.end(), e, [](const Coupler &c, const Edge &k) {
        return Edge{c.u, c.v} < k;
    });
    if (it == J_.end() || it->u != e.u || it->v != e.v) return -1;
    return it - J_.begin();
}

void IsingInstance::drop_exact() {
    scale_.reset();
    h_units_.clear();
    J_units_.clear();
}

bool operator==(const IsingInstance &a, const IsingInstance &b) {
    if (a.kind_ != b.kind_ || !(a.graph_ == b.graph_) || a.scale_ != b.scale_ || a.h_ != b.h_) return false;
    if (a.h_units_ != b.h_units_ || a.J_units_ != b.J_units_ || a.J_.size() != b.J_.size()) return false;
    for (std::size_t i = 0; i < a.J_.size(); ++i) {
        if (a.J_[i].u != b.J_[i].u || a.J_[i].v != b.J_[i].v || a.J_[i].value != b.J_[i].value) return false;
    }
    return a.provenance.seed == b.provenance.seed && a.provenance.eta == b.provenance.eta &&
           a.provenance.parent == b.provenance.parent;
}

IsingInstance generate_instance(GraphKind kind, const ChimeraGraph &graph, Seed seed) {
    if (graph.edges().empty()) throw InputError("cannot generate an instance on a graph without edges");
    static constexpr std::int64_t kChoices[6] = {-3, -2, -1, 1, 2, 3};
    IsingInstance inst(kind, graph, 6);
    Rng rng = make_rng(seed);
    for (const Edge &e : graph.edges()) {
        // rng() % 6 has a bias below 2^-61; irrelevant here.
        inst.set_coupler_units(e.u, e.v, kChoices[rng() % 6]);
    }
    inst.provenance.seed = seed;
    return inst;
}

IsingInstance generate_instance(const LogicalGraph &graph, Seed seed) {
    return generate_instance(GraphKind::logical, graph.as_chimera(), seed);
}

NoiseDraw draw_noise(const IsingInstance &inst, double eta, Seed seed, PerturbOptions opts) {
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw InputError("noise strength eta must be non-negative");
    NoiseDraw draw;
    draw.eta = eta;
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto sample = [&] { return eta == 0.0 ? 0.0 : eta * normal(rng); };
    draw.dJ.reserve(inst.couplers().size());
    for (const Coupler &c : inst.couplers()) draw.dJ.emplace_back(Edge{c.u, c.v}, sample());
    if (opts.fields) {
        const auto h = inst.fields();
        for (QubitIndex q = 0; q < h.size(); ++q) {
            if (inst.active(q)) draw.dh.emplace_back(q, sample());
        }
    }
    return draw;
}

static double clip(double x, std::size_t &count) {
    if (x > 1.0) {
        ++count;
        return 1.0;
    }
    if (x < -1.0) {
        ++count;
        return -1.0;
    }
    return x;
}

IsingInstance apply_noise(const IsingInstance &inst, NoiseDraw &draw) {
    if (draw.eta == 0.0) {
        draw.truncation_count = 0;
        IsingInstance copy = inst;
        copy.provenance.eta = 0.0;
        return copy;
    }
    IsingInstance out(inst.kind(), inst.graph());
    out.provenance = inst.provenance;
    out.provenance.eta = draw.eta;
    std::size_t clipped = 0;

    auto dh = draw.dh.begin();
    const auto h = inst.fields();
    for (QubitIndex q = 0; q < h.size(); ++q) {
        if (!inst.active(q)) continue;
        while (dh != draw.dh.end() && dh->first < q) ++dh;
        const double delta = (dh != draw.dh.end() && dh->first == q) ? dh->second : 0.0;
        if (h[q] != 0.0 || delta != 0.0) out.set_field(q, clip(h[q] + delta, clipped));
    }

    auto dj = draw.dJ.begin();
    for (const Coupler &c : inst.couplers()) {
        const Edge e{c.u, c.v};
        while (dj != draw.dJ.end() && dj->first < e) ++dj;
        if (dj == draw.dJ.end() || !(dj->first == e))
            throw InputError("noise draw has no delta for coupler (" + std::to_string(c.u) + ", " + std::to_string(c.v) + ")");
        out.set_coupler(c.u, c.v, clip(c.value + dj->second, clipped));
    }
    draw.truncation_count = clipped;
    return out;
}

std::pair<IsingInstance, NoiseDraw> perturb(const IsingInstance &inst, double eta, Seed seed, PerturbOptions opts) {
    NoiseDraw draw = draw_noise(inst, eta, seed, opts);
    IsingInstance out = apply_noise(inst, draw);
    return {std::move(out), std::move(draw)};
}

Gauge identity_gauge(const IsingInstance &inst) {
    Gauge g;
    g.a.resize(inst.size());
    for (QubitIndex q = 0; q < inst.size(); ++q) g.a[q] = inst.active(q) ? 1 : 0;
    return g;
}

Gauge random_gauge(const IsingInstance &inst, Seed seed) {
    Gauge g = identity_gauge(inst);
    Rng rng = make_rng(seed);
    for (auto &a : g.a) {
        const bool flip = (rng() >> 63) != 0;
        if (a != 0 && flip) a = -1;
    }
    return g;
}

static void check_gauge(const IsingInstance &inst, const Gauge &g) {
    if (g.a.size() != inst.size()) throw InputError("gauge size does not match the instance");
    for (QubitIndex q = 0; q < inst.size(); ++q) {
        if (inst.active(q) && g.a[q] != 1 && g.a[q] != -1) throw InputError("gauge is not +-1 on an active site");
    }
}

IsingInstance apply_gauge(const IsingInstance &inst, const Gauge &g) {
    check_gauge(inst, g);
    IsingInstance out(inst.kind(), inst.graph(), inst.exact_scale());
    out.provenance = inst.provenance;
    const auto h = inst.fields();
    for (QubitIndex q = 0; q < h.size(); ++q) {
        if (!inst.active(q)) continue;
        if (inst.exact()) {
            if (inst.field_units()[q] != 0) out.set_field_units(q, g.a[q] * inst.field_units()[q]);
        } else if (h[q] != 0.0) {
            out.set_field(q, g.a[q] * h[q]);
        }
    }
    const auto J = inst.couplers();
    for (std::size_t k = 0; k < J.size(); ++k) {
        const int sign = g.a[J[k].u] * g.a[J[k].v];
        if (inst.exact()) out.set_coupler_units(J[k].u, J[k].v, sign * inst.coupler_units()[k]);
        else out.set_coupler(J[k].u, J[k].v, sign * J[k].value);
    }
    return out;
}

Config ungauge_readout(std::span<const Spin> spins, const Gauge &g) {
    if (spins.size() != g.a.size()) throw InputError("gauge size does not match the readout");
    Config out(spins.size());
    for (std::size_t i = 0; i < spins.size(); ++i) out[i] = static_cast<Spin>(spins[i] * (g.a[i] == 0 ? 1 : g.a[i]));
    return out;
}

Energy energy(const IsingInstance &inst, std::span<const Spin> spins) {
    if (spins.size() != inst.size()) throw InputError("spin configuration size does not match the instance");
    for (QubitIndex q = 0; q < spins.size(); ++q) {
        if (inst.active(q) && spins[q] != 1 && spins[q] != -1)
            throw InputError("missing spin at active qubit " + std::to_string(q));
    }
    Energy e;
    const auto h = inst.fields();
    const auto J = inst.couplers();
    if (inst.exact()) {
        std::int64_t units = 0;
        const auto hu = inst.field_units();
        const auto Ju = inst.coupler_units();
        for (QubitIndex q = 0; q < h.size(); ++q)
            if (inst.active(q)) units += hu[q] * spins[q];
        for (std::size_t k = 0; k < J.size(); ++k) units += Ju[k] * spins[J[k].u] * spins[J[k].v];
        e.units = units;
        e.value = static_cast<double>(units) / *inst.exact_scale();
        return e;
    }
    double total = 0.0;
    for (QubitIndex q = 0; q < h.size(); ++q)
        if (inst.active(q)) total += h[q] * spins[q];
    for (const Coupler &c : J) total += c.value * spins[c.u] * spins[c.v];
    e.value = total;
    return e;
}

double flip_delta(const IsingInstance &inst, std::span<const Spin> spins, QubitIndex q) {
    double local = inst.fields()[q];
    for (const Coupler &c : inst.couplers()) {
        if (c.u == q) local += c.value * spins[c.v];
        else if (c.v == q) local += c.value * spins[c.u];
    }
    return -2.0 * spins[q] * local;
}

std::string format_real(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_instance(const IsingInstance &inst) {
    std::ostringstream out;
    out << "# kind=" << to_string(inst.kind()) << '\n';
    out << "# L=" << inst.graph().L() << '\n';
    out << "# r=" << inst.graph().r() << '\n';
    out << "# scale=" << (inst.exact() ? std::to_string(*inst.exact_scale()) : std::string("none")) << '\n';
    out << "# seed=" << inst.provenance.seed << '\n';
    out << "# eta=" << format_real(inst.provenance.eta) << '\n';
    out << "# parent=" << inst.provenance.parent << '\n';
    out << "# inactive=";
    bool first = true;
    for (QubitIndex q : inst.graph().holes()) {
        out << (first ? "" : ",") << q;
        first = false;
    }
    out << '\n';
    const auto h = inst.fields();
    for (QubitIndex q = 0; q < h.size(); ++q) {
        if (!inst.active(q) || h[q] == 0.0) continue;
        out << q << ' ' << q << ' ';
        if (inst.exact()) out << inst.field_units()[q];
        else out << format_real(h[q]);
        out << '\n';
    }
    const auto J = inst.couplers();
    for (std::size_t k = 0; k < J.size(); ++k) {
        out << J[k].u << ' ' << J[k].v << ' ';
        if (inst.exact()) out << inst.coupler_units()[k];
        else out << format_real(J[k].value);
        out << '\n';
    }
    return out.str();
}

namespace {

template <typename T>
T parse_number(const std::string &tok, int lineno) {
    T value{};
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw ParseError("instance line " + std::to_string(lineno) + ": bad number '" + tok + "'");
    return value;
}

std::vector<QubitIndex> parse_index_list(const std::string &s, int lineno) {
    std::vector<QubitIndex> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (!tok.empty()) out.push_back(parse_number<QubitIndex>(tok, lineno));
    }
    return out;
}

}  // namespace

IsingInstance parse_instance(const std::string &text) {
    std::map<std::string, std::string> header;
    std::vector<std::pair<int, std::string>> body;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            header[key] = line.substr(eq + 1);
            continue;
        }
        body.emplace_back(lineno, line);
    }
    for (const char *key : {"kind", "L", "r", "scale"}) {
        if (!header.count(key)) throw ParseError(std::string("instance header is missing '") + key + "'");
    }
    const GraphKind kind = parse_graph_kind(header["kind"]);
    const int L = parse_number<int>(header["L"], 0);
    const int r = parse_number<int>(header["r"], 0);
    std::optional<int> scale;
    if (header["scale"] != "none") scale = parse_number<int>(header["scale"], 0);
    const auto holes = parse_index_list(header.count("inactive") ? header["inactive"] : "", 0);
    IsingInstance inst(kind, ChimeraGraph(L, r, holes), scale);
    if (header.count("seed")) inst.provenance.seed = parse_number<Seed>(header["seed"], 0);
    if (header.count("eta")) inst.provenance.eta = parse_number<double>(header["eta"], 0);
    if (header.count("parent")) inst.provenance.parent = header["parent"];

    std::vector<Edge> seen_edges;
    std::vector<QubitIndex> seen_fields;
    for (const auto &[no, text_line] : body) {
        std::istringstream ls(text_line);
        std::string ti, tj, tv, extra;
        if (!(ls >> ti >> tj >> tv) || (ls >> extra))
            throw ParseError("instance line " + std::to_string(no) + ": expected 'i j value'");
        const auto i = parse_number<QubitIndex>(ti, no);
        const auto j = parse_number<QubitIndex>(tj, no);
        if (i >= inst.size() || j >= inst.size() || !inst.active(i) || !inst.active(j))
            throw InputError("instance line " + std::to_string(no) + ": unknown qubit index");
        if (i == j) {
            if (std::find(seen_fields.begin(), seen_fields.end(), i) != seen_fields.end())
                throw ParseError("instance line " + std::to_string(no) + ": duplicate field");
            seen_fields.push_back(i);
        } else {
            const Edge e = make_edge(i, j);
            if (std::find(seen_edges.begin(), seen_edges.end(), e) != seen_edges.end())
                throw ParseError("instance line " + std::to_string(no) + ": duplicate edge");
            seen_edges.push_back(e);
        }
        if (scale) {
            const auto n = parse_number<std::int64_t>(tv, no);
            if (i == j) inst.set_field_units(i, n);
            else inst.set_coupler_units(i, j, n);
        } else {
            const auto x = parse_number<double>(tv, no);
            if (i == j) inst.set_field(i, x);
            else inst.set_coupler(i, j, x);
        }
    }
    return inst;
}

void write_instance(const std::filesystem::path &path, const IsingInstance &inst) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << format_instance(inst);
}

IsingInstance read_instance(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DependencyError("cannot open instance file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_instance(ss.str());
}

}  // namespace jchaos
