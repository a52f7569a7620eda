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

#include "jchaos/harness.hpp"

#include <zlib.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "jchaos/collapse.hpp"
#include "jchaos/error.hpp"
#include "jchaos/stats.hpp"

namespace jchaos {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DependencyError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path &path, const std::string &text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp.string());
        out << text;
        if (!out.flush()) throw Error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::uint32_t file_crc32(const fs::path &path) {
    const std::string bytes = slurp(path);
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef *>(bytes.data()), static_cast<uInt>(bytes.size())));
}

std::string pad3(int k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03d", k);
    return buf;
}

std::string num(double x) {
    if (std::isinf(x)) return x > 0 ? "unsolved" : "-inf";
    if (std::isnan(x)) return "NA";
    return format_real(x);
}

template <typename T>
T get_or(const json &j, const char *key, T fallback) {
    auto it = j.find(key);
    return it == j.end() ? fallback : it->get<T>();
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
    if (L.empty()) throw ValidationError("config: L list is empty");
    for (int l : L)
        if (l < 1 || l > 16) throw ValidationError("config: L must lie in [1, 16]");
    if (eta.empty()) throw ValidationError("config: eta list is empty");
    for (double e : eta)
        if (!(e >= 0.0) || !std::isfinite(e)) throw ValidationError("config: eta must be finite and >= 0");
    if (gamma.empty()) throw ValidationError("config: gamma grid is empty");
    for (double g : gamma)
        if (!(g >= 0.0 && g <= 1.0)) throw ValidationError("config: gamma must lie in [0, 1]");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("config: alpha must lie in (0, 1]");
    if (instances < 1 || gauges < 1 || reads < 1) throw ValidationError("config: instances, gauges and reads must be positive");
    if (bootstrap_resamples < 1000) throw ValidationError("config: bootstrap_resamples must be at least 1000");
    if (pticm_replicas < 2 || pticm_sweeps < 1) throw ValidationError("config: pticm needs >= 2 replicas and >= 1 sweep");
    if (dp_max_frontier_bits < 1 || dp_max_frontier_bits > 34) throw ValidationError("config: dp_max_frontier_bits out of range");
    make_sampler(solver, sa, 1);  // throws ValidationError for an unknown backend
    auto sorted_unique = [](auto v) {
        std::sort(v.begin(), v.end());
        return std::adjacent_find(v.begin(), v.end()) == v.end();
    };
    if (!sorted_unique(L) || !sorted_unique(eta) || !sorted_unique(gamma))
        throw ValidationError("config: L, eta and gamma lists must not repeat values");
}

ExperimentConfig parse_config(const std::string &text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config: top level must be an object");
    static const std::set<std::string> known{"L",     "eta",    "instances",   "gauges",          "reads",
                                             "gamma", "alpha",  "solver",      "seed",            "device",
                                             "noise_per_gauge", "perturb_fields", "dp_max_frontier_bits",
                                             "pticm", "bootstrap_resamples", "t_f", "out",     "profile"};
    for (const auto &[k, v] : j.items())
        if (!known.count(k)) throw ValidationError("config: unknown key '" + k + "'");

    ExperimentConfig c;
    try {
        const std::string profile = get_or<std::string>(j, "profile", "desk");
        if (profile == "full") {
            c.L.clear();
            for (int l = 1; l <= 16; ++l) c.L.push_back(l);
            c.instances = 100;
            c.reads = 10000;
        } else if (profile != "desk") {
            throw ValidationError("config: profile must be 'desk' or 'full'");
        }
        c.L = get_or(j, "L", c.L);
        c.eta = get_or(j, "eta", c.eta);
        c.instances = get_or(j, "instances", c.instances);
        c.gauges = get_or(j, "gauges", c.gauges);
        c.reads = get_or(j, "reads", c.reads);
        c.gamma = get_or(j, "gamma", c.gamma);
        c.alpha = get_or(j, "alpha", c.alpha);
        c.seed = get_or<Seed>(j, "seed", c.seed);
        c.device = get_or<std::string>(j, "device", c.device.string());
        c.noise_per_gauge = get_or(j, "noise_per_gauge", c.noise_per_gauge);
        c.perturb_fields = get_or(j, "perturb_fields", c.perturb_fields);
        c.dp_max_frontier_bits = get_or(j, "dp_max_frontier_bits", c.dp_max_frontier_bits);
        c.bootstrap_resamples = get_or<std::size_t>(j, "bootstrap_resamples", c.bootstrap_resamples);
        c.t_f = get_or(j, "t_f", c.t_f);
        c.out = get_or<std::string>(j, "out", c.out.string());
        if (auto it = j.find("solver"); it != j.end()) {
            if (it->is_string()) {
                c.solver = it->get<std::string>();
            } else {
                c.solver = get_or<std::string>(*it, "name", c.solver);
                c.sa.beta0 = get_or(*it, "beta0", c.sa.beta0);
                c.sa.beta1 = get_or(*it, "beta1", c.sa.beta1);
                c.sa.sweeps = get_or(*it, "sweeps", c.sa.sweeps);
            }
        }
        if (auto it = j.find("pticm"); it != j.end()) {
            c.pticm_sweeps = get_or(*it, "sweeps", c.pticm_sweeps);
            c.pticm_replicas = get_or(*it, "replicas", c.pticm_replicas);
        }
    } catch (const json::exception &e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig read_config(const fs::path &path) { return parse_config(slurp(path)); }

std::string format_config(const ExperimentConfig &c) {
    json j;
    j["L"] = c.L;
    j["eta"] = c.eta;
    j["instances"] = c.instances;
    j["gauges"] = c.gauges;
    j["reads"] = c.reads;
    j["gamma"] = c.gamma;
    j["alpha"] = c.alpha;
    j["solver"] = {{"name", c.solver}, {"beta0", c.sa.beta0}, {"beta1", c.sa.beta1}, {"sweeps", c.sa.sweeps}};
    j["seed"] = c.seed;
    j["device"] = c.device.string();
    j["noise_per_gauge"] = c.noise_per_gauge;
    j["perturb_fields"] = c.perturb_fields;
    j["dp_max_frontier_bits"] = c.dp_max_frontier_bits;
    j["pticm"] = {{"sweeps", c.pticm_sweeps}, {"replicas", c.pticm_replicas}};
    j["bootstrap_resamples"] = c.bootstrap_resamples;
    j["t_f"] = c.t_f;
    j["out"] = c.out.string();
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Records and layout

const char *to_string(Strategy s) { return s == Strategy::C ? "C" : "QAC"; }

std::string RecordKey::id(const ExperimentConfig &cfg) const {
    std::string s = "L" + std::to_string(L) + "-i" + pad3(instance) + "-eta" + format_real(cfg.eta.at(eta_index)) + "-" +
                    to_string(strategy);
    if (strategy == Strategy::QAC) s += "-gamma" + format_real(cfg.gamma.at(gamma_index));
    return s + "-gauge" + std::to_string(gauge);
}

std::string format_record(const RunRecord &r) {
    json j;
    j["L"] = r.key.L;
    j["instance"] = r.key.instance;
    j["eta_index"] = r.key.eta_index;
    j["eta"] = r.eta;
    j["strategy"] = to_string(r.key.strategy);
    j["gamma_index"] = r.key.gamma_index;
    j["gamma"] = r.gamma ? json(*r.gamma) : json(nullptr);
    j["gauge"] = r.key.gauge;
    j["noise_seed"] = r.noise_seed;
    j["gauge_seed"] = r.gauge_seed;
    j["solver_seed"] = r.solver_seed;
    j["status"] = r.status;
    j["successes"] = r.successes;
    j["reads"] = r.reads;
    j["truncations"] = r.truncations;
    j["two_vote_ties"] = r.two_vote_ties;
    j["archive"] = r.archive;
    j["archive_crc32"] = r.archive_crc32;
    return j.dump();
}

RunRecord parse_record(const std::string &text) {
    try {
        const json j = json::parse(text);
        RunRecord r;
        r.key.L = j.at("L");
        r.key.instance = j.at("instance");
        r.key.eta_index = j.at("eta_index");
        r.eta = j.at("eta");
        const std::string s = j.at("strategy");
        if (s != "C" && s != "QAC") throw ParseError("record: bad strategy '" + s + "'");
        r.key.strategy = s == "C" ? Strategy::C : Strategy::QAC;
        r.key.gamma_index = j.at("gamma_index");
        if (!j.at("gamma").is_null()) r.gamma = j.at("gamma").get<double>();
        r.key.gauge = j.at("gauge");
        r.noise_seed = j.at("noise_seed");
        r.gauge_seed = j.at("gauge_seed");
        r.solver_seed = j.at("solver_seed");
        r.status = j.at("status");
        r.successes = j.at("successes");
        r.reads = j.at("reads");
        r.truncations = j.at("truncations");
        r.two_vote_ties = j.at("two_vote_ties");
        r.archive = j.at("archive");
        r.archive_crc32 = j.at("archive_crc32");
        return r;
    } catch (const json::exception &e) {
        throw ParseError(std::string("record: ") + e.what());
    }
}

fs::path RunLayout::instance(int L, int k) const {
    return root / "instances" / ("L" + std::to_string(L)) / ("i" + pad3(k) + ".ising");
}
fs::path RunLayout::certificate(int L, int k) const {
    return root / "certificates" / ("L" + std::to_string(L)) / ("i" + pad3(k) + ".cert");
}
fs::path RunLayout::encoded(int L, int k, double gamma) const {
    return root / "encoded" / ("L" + std::to_string(L)) / ("i" + pad3(k) + "-gamma" + format_real(gamma) + ".ising");
}
fs::path RunLayout::mapping(int L) const { return root / "graphs" / ("L" + std::to_string(L) + ".qacmap"); }
fs::path RunLayout::samples(const std::string &id) const { return root / "samples" / (id + ".samples.gz"); }
fs::path RunLayout::record(const std::string &id) const { return root / "records" / (id + ".json"); }
fs::path RunLayout::index() const { return root / "records" / "index.jsonl"; }
fs::path RunLayout::flagged() const { return root / "flagged.txt"; }
fs::path RunLayout::analysis() const { return root / "analysis"; }
fs::path RunLayout::collapse() const { return root / "collapse"; }

ChimeraGraph device_graph(const ExperimentConfig &cfg) {
    const int lmax = *std::max_element(cfg.L.begin(), cfg.L.end());
    if (cfg.device.empty()) return build_chimera(lmax, 4);
    const HoleMask mask = read_hole_mask(cfg.device);
    if (mask.r != 4) throw ValidationError("device mask must describe K_{4,4} cells");
    if (mask.L < lmax) throw ValidationError("device of size " + std::to_string(mask.L) + " cannot host L = " + std::to_string(lmax));
    return build_chimera(mask.L, mask.r, mask.holes);
}

LogicalGraph logical_graph(const ExperimentConfig &cfg, int L) { return LogicalGraph(device_graph(cfg).top_left(L)); }

Seed instance_seed(const ExperimentConfig &cfg, int L, int k) {
    return derive_seed(cfg.seed, SeedTag::instance, {static_cast<std::uint64_t>(L), static_cast<std::uint64_t>(k)});
}

namespace {

std::uint64_t key_path_gamma(const RecordKey &k) { return static_cast<std::uint64_t>(k.gamma_index + 1); }

Seed noise_seed(const ExperimentConfig &cfg, const RecordKey &k) {
    const std::uint64_t g = cfg.noise_per_gauge ? static_cast<std::uint64_t>(k.gauge) + 1 : 0;
    return derive_seed(instance_seed(cfg, k.L, k.instance), SeedTag::noise, {static_cast<std::uint64_t>(k.eta_index), g});
}

Seed gauge_seed(const ExperimentConfig &cfg, const RecordKey &k) {
    return derive_seed(instance_seed(cfg, k.L, k.instance), SeedTag::gauge,
                       {static_cast<std::uint64_t>(k.eta_index), static_cast<std::uint64_t>(k.strategy), key_path_gamma(k),
                        static_cast<std::uint64_t>(k.gauge)});
}

Seed solver_seed(const ExperimentConfig &cfg, const RecordKey &k) {
    return derive_seed(instance_seed(cfg, k.L, k.instance), SeedTag::solver,
                       {static_cast<std::uint64_t>(k.eta_index), static_cast<std::uint64_t>(k.strategy), key_path_gamma(k),
                        static_cast<std::uint64_t>(k.gauge)});
}

std::vector<RecordKey> all_keys(const ExperimentConfig &cfg) {
    std::vector<RecordKey> keys;
    for (int L : cfg.L)
        for (int k = 0; k < cfg.instances; ++k)
            for (int j = 0; j < static_cast<int>(cfg.eta.size()); ++j) {
                for (int g = 0; g < cfg.gauges; ++g) keys.push_back({L, k, j, Strategy::C, -1, g});
                for (int gi = 0; gi < static_cast<int>(cfg.gamma.size()); ++gi)
                    for (int g = 0; g < cfg.gauges; ++g) keys.push_back({L, k, j, Strategy::QAC, gi, g});
            }
    std::sort(keys.begin(), keys.end());
    return keys;
}

std::string instance_id(int L, int k) { return "L" + std::to_string(L) + "-i" + pad3(k); }

std::set<std::string> read_flagged(const RunLayout &lay) {
    std::set<std::string> out;
    if (!fs::exists(lay.flagged())) return out;
    std::istringstream in(slurp(lay.flagged()));
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') out.insert(line.substr(0, line.find(' ')));
    return out;
}

}  // namespace

PerturbedPair perturbed_problem(const ExperimentConfig &cfg, const LogicalGraph &lg, const IsingInstance &intended,
                                const RecordKey &key) {
    const double eta = cfg.eta.at(key.eta_index);
    // Every physical coupler the encoding can carry (gamma = 1 switches on all
    // penalty couplers), so one draw serves every gamma of the grid.
    const IsingInstance full = encode(intended, 1.0, cfg.alpha, lg).physical;
    PerturbOptions popts;
    popts.fields = cfg.perturb_fields;
    const NoiseDraw draw = draw_noise(full, eta, noise_seed(cfg, key), popts);

    NoiseDraw logical_draw;
    logical_draw.eta = eta;
    auto delta_of = [&](const Edge &e) {
        auto it = std::lower_bound(draw.dJ.begin(), draw.dJ.end(), e,
                                   [](const std::pair<Edge, double> &a, const Edge &b) { return a.first < b; });
        if (it == draw.dJ.end() || !(it->first == e)) throw Error("noise draw misses a backing coupler");
        return it->second;
    };
    for (const Coupler &c : intended.couplers()) {
        const LogicalEdge *le = lg.find_edge(c.u, c.v);
        if (!le || le->backing.empty()) throw InputError("logical coupler without physical backing");
        logical_draw.dJ.emplace_back(make_edge(c.u, c.v), delta_of(le->backing.front()));
    }
    for (const auto &[site, d] : draw.dh) {
        for (QubitIndex i = 0; i < lg.qubits().size(); ++i)
            if (lg.qubits()[i].data[0] == site) logical_draw.dh.emplace_back(i, d);
    }
    std::sort(logical_draw.dh.begin(), logical_draw.dh.end());

    PerturbedPair out{apply_noise(intended, logical_draw), std::nullopt, 0};
    out.truncations = logical_draw.truncation_count;
    if (key.strategy == Strategy::QAC) {
        NoiseDraw d = draw;
        out.physical = apply_noise(encode(intended, cfg.gamma.at(key.gamma_index), cfg.alpha, lg).physical, d);
        out.truncations = d.truncation_count;
    }
    return out;
}

// ---------------------------------------------------------------------------
// generate

GenerateSummary cmd_generate(const ExperimentConfig &cfg) {
    cfg.validate();
    const RunLayout lay{cfg.out};
    fs::create_directories(lay.root);
    spit(lay.root / "config.json", format_config(cfg));
    GenerateSummary sum;
    std::ostringstream flagged;
    flagged << "# instances whose certificates disagree between oracles\n";
    for (int L : cfg.L) {
        const LogicalGraph lg = logical_graph(cfg, L);
        if (lg.usable_count() == 0) throw ValidationError("L = " + std::to_string(L) + " has no usable logical qubits");
        spit(lay.mapping(L), format_qac_mapping(lg));
        for (int k = 0; k < cfg.instances; ++k) {
            const Seed seed = instance_seed(cfg, L, k);
            IsingInstance inst = generate_instance(lg, seed);
            inst.provenance = {seed, 0.0, instance_id(L, k)};
            spit(lay.instance(L, k), format_instance(inst));
            ++sum.instances;

            PticmParams pp = default_pticm_params(inst);
            pp.sweeps = cfg.pticm_sweeps;
            pp.replicas_per_beta = cfg.pticm_replicas;
            const PticmResult pt = solve_pticm(inst, pp, derive_seed(seed, SeedTag::oracle));

            GroundCertificate cert;
            bool agree = true;
            if (plan_dp(inst).peak_frontier_bits <= cfg.dp_max_frontier_bits) {
                DpOptions dopts;
                dopts.max_frontier_bits = cfg.dp_max_frontier_bits;
                cert = solve_dp_exact(inst, dopts);
                agree = same_energy(cert, pt.certificate);
                cert.agrees_with_pticm = agree;
                if (inst.graph().active_count() <= 16) cert.agrees_with_brute_force = same_energy(cert, brute_force(inst, 16).certificate);
                if (cert.agrees_with_brute_force == false) agree = false;
            } else {
                cert = pt.certificate;
            }
            spit(lay.certificate(L, k), format_certificate(cert));
            if (agree) ++sum.certified;
            else {
                sum.flagged.push_back(instance_id(L, k));
                flagged << instance_id(L, k) << " dp=" << format_real(cert.energy)
                        << " pticm=" << format_real(pt.certificate.energy) << '\n';
            }
            for (double g : cfg.gamma) spit(lay.encoded(L, k, g), format_instance(encode(inst, g, cfg.alpha, lg).physical));
        }
    }
    spit(lay.flagged(), flagged.str());
    return sum;
}

// ---------------------------------------------------------------------------
// run

namespace {

struct Problem {
    LogicalGraph lg;
    IsingInstance intended;
    GroundCertificate cert;
};

using ProblemMap = std::map<std::pair<int, int>, Problem>;

ProblemMap load_problems(const ExperimentConfig &cfg, const RunLayout &lay) {
    ProblemMap out;
    for (int L : cfg.L) {
        const LogicalGraph lg = logical_graph(cfg, L);
        for (int k = 0; k < cfg.instances; ++k) {
            const fs::path ip = lay.instance(L, k), cp = lay.certificate(L, k);
            if (!fs::exists(ip)) throw DependencyError("missing instance " + ip.string() + " (run generate first)");
            if (!fs::exists(cp)) throw DependencyError("missing certificate " + cp.string() + " (run generate first)");
            IsingInstance inst = read_instance(ip);
            if (!(inst.graph() == lg.as_chimera())) throw DependencyError(ip.string() + " does not match the configured device");
            GroundCertificate cert = read_certificate(cp);
            if (!certificate_consistent(cert, inst)) throw DependencyError(cp.string() + " does not certify its instance");
            out.emplace(std::make_pair(L, k), Problem{lg, std::move(inst), std::move(cert)});
        }
    }
    return out;
}

std::set<std::string> read_index(const RunLayout &lay) {
    std::set<std::string> done;
    if (!fs::exists(lay.index())) return done;
    std::istringstream in(slurp(lay.index()));
    std::string line;
    while (std::getline(in, line)) {
        try {
            const json j = json::parse(line);
            const std::string id = j.at("id");
            if (fs::exists(lay.record(id))) done.insert(id);
        } catch (const json::exception &) {
            // A torn final line from an interrupted writer; that record is redone.
        }
    }
    return done;
}

struct Outcome {
    RunRecord record;
    SampleSet samples;
};

Outcome run_one(const ExperimentConfig &cfg, const Problem &p, const RecordKey &key, const Sampler &sampler) {
    Outcome o;
    RunRecord &r = o.record;
    r.key = key;
    r.eta = cfg.eta.at(key.eta_index);
    if (key.strategy == Strategy::QAC) r.gamma = cfg.gamma.at(key.gamma_index);
    r.noise_seed = noise_seed(cfg, key);
    r.gauge_seed = gauge_seed(cfg, key);
    r.solver_seed = solver_seed(cfg, key);

    const PerturbedPair pp = perturbed_problem(cfg, p.lg, p.intended, key);
    const IsingInstance &problem = key.strategy == Strategy::QAC ? *pp.physical : pp.logical;
    r.truncations = pp.truncations;
    const Gauge gauge = random_gauge(problem, r.gauge_seed);
    o.samples = sampler.sample(apply_gauge(problem, gauge), cfg.reads, r.solver_seed);
    for (Config &s : o.samples.readouts) s = ungauge_readout(s, gauge);
    o.samples.gauge_id = key.gauge;

    r.status = "complete";
    if (key.strategy == Strategy::QAC) {
        const DecodedSet dec = decode_majority(o.samples, p.lg);
        for (const DecodeInfo &i : dec.info) r.two_vote_ties += i.two_vote_ties;
        if (dec.usable) {
            const SuccessCount sc = adjudicate_success(dec.configs, p.intended, p.cert);
            r.successes = sc.successes;
        } else {
            r.status = "unusable";
        }
    } else {
        r.successes = adjudicate_success(o.samples, p.intended, p.cert).successes;
    }
    r.reads = o.samples.size();
    return o;
}

}  // namespace

RunSummary cmd_run(const ExperimentConfig &cfg, const RunOptions &opts) {
    cfg.validate();
    if (opts.threads < 1) throw ValidationError("threads must be positive");
    const RunLayout lay{cfg.out};
    if (!fs::exists(lay.root / "config.json")) throw DependencyError("run directory has no generated instances: " + lay.root.string());
    const ProblemMap problems = load_problems(cfg, lay);
    const std::set<std::string> flagged = read_flagged(lay);
    std::set<std::string> done = read_index(lay);

    RunSummary sum;
    std::vector<RecordKey> todo;
    for (const RecordKey &k : all_keys(cfg)) {
        if (flagged.count(instance_id(k.L, k.instance))) continue;
        ++sum.total;
        if (done.count(k.id(cfg))) ++sum.skipped;
        else todo.push_back(k);
    }
    fs::create_directories(lay.root / "records");
    fs::create_directories(lay.root / "samples");

    const auto sampler = make_sampler(cfg.solver, cfg.sa, 1);
    std::mutex index_mutex;
    std::ofstream index(lay.index(), std::ios::binary | std::ios::app);
    if (!index) throw InputError("cannot append to " + lay.index().string());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> completed{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const std::size_t limit = opts.max_records ? std::min(opts.max_records, todo.size()) : todo.size();

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= limit) return;
            {
                std::lock_guard lock(failure_mutex);
                if (failure) return;
            }
            try {
                const RecordKey &key = todo[i];
                const std::string id = key.id(cfg);
                Outcome o = run_one(cfg, problems.at({key.L, key.instance}), key, *sampler);
                const fs::path archive = lay.samples(id);
                write_sample_archive(archive, o.samples,
                                     {{"id", id},
                                      {"eta", format_real(o.record.eta)},
                                      {"gamma", o.record.gamma ? format_real(*o.record.gamma) : "none"},
                                      {"noise_seed", std::to_string(o.record.noise_seed)},
                                      {"gauge_seed", std::to_string(o.record.gauge_seed)}});
                o.record.archive = fs::relative(archive, lay.root).generic_string();
                o.record.archive_crc32 = file_crc32(archive);
                spit(lay.record(id), format_record(o.record) + "\n");
                std::lock_guard lock(index_mutex);
                index << json{{"id", id}}.dump() << '\n' << std::flush;
                ++completed;
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int nthreads = std::max(1, std::min<int>(opts.threads, static_cast<int>(std::max<std::size_t>(limit, 1))));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    sum.completed = completed.load();
    return sum;
}

std::vector<RunRecord> load_records(const ExperimentConfig &cfg) {
    const RunLayout lay{cfg.out};
    std::vector<RunRecord> out;
    for (const std::string &id : read_index(lay)) out.push_back(parse_record(slurp(lay.record(id))));
    std::sort(out.begin(), out.end(), [](const RunRecord &a, const RunRecord &b) { return a.key < b.key; });
    return out;
}

// ---------------------------------------------------------------------------
// analysis

namespace {

struct GroupKey {
    int L, instance, eta_index;
    Strategy strategy;
    int gamma_index;
    friend auto operator<=>(const GroupKey &, const GroupKey &) = default;
};

struct GroupStats {
    GaugeCounts counts;
    std::uint64_t successes = 0, reads = 0;
    std::size_t truncations = 0;
    bool usable = true;
    SuccessEstimate est;
    TtsResult runs;
};

struct InstanceRow {
    int L, instance, eta_index;
    // C
    const GroupStats *c = nullptr;
    // QAC at the chosen gamma
    const GroupStats *qac = nullptr;
    PenaltyChoice choice;
};

struct Analysis {
    std::map<GroupKey, GroupStats> groups;
    std::vector<InstanceRow> rows;  // sorted by (L, eta, instance)
    std::size_t unusable_groups = 0;
};

Analysis compute_analysis(const ExperimentConfig &cfg) {
    const std::vector<RunRecord> records = load_records(cfg);
    if (records.empty()) throw InputError("run directory " + cfg.out.string() + " has no records");
    Analysis a;
    for (const RunRecord &r : records) {
        GroupStats &g = a.groups[{r.key.L, r.key.instance, r.key.eta_index, r.key.strategy, r.key.gamma_index}];
        g.counts.gauges.push_back({r.successes, r.reads});
        g.successes += r.successes;
        g.reads += r.reads;
        g.truncations = std::max(g.truncations, r.truncations);
        if (r.status != "complete") g.usable = false;
    }
    for (auto &[k, g] : a.groups) {
        if (!g.usable) {
            ++a.unusable_groups;
            continue;
        }
        BootstrapOptions bo;
        bo.n_resamples = cfg.bootstrap_resamples;
        if (k.strategy == Strategy::C) bo.transform = [](double b) { return c_strategy_success(b, 4); };
        const Seed seed = derive_seed(cfg.seed, SeedTag::bootstrap,
                                      {static_cast<std::uint64_t>(k.L), static_cast<std::uint64_t>(k.instance),
                                       static_cast<std::uint64_t>(k.eta_index), static_cast<std::uint64_t>(k.strategy),
                                       static_cast<std::uint64_t>(k.gamma_index + 1)});
        g.est = bootstrap_success(g.counts, bo, seed);
        // Never seeing the ground state leaves the run count undefined.
        g.runs = g.successes == 0 ? tts(0.0, cfg.t_f) : tts(g.est.mu.mean, cfg.t_f);
    }
    for (int L : cfg.L)
        for (int j = 0; j < static_cast<int>(cfg.eta.size()); ++j)
            for (int k = 0; k < cfg.instances; ++k) {
                auto ci = a.groups.find({L, k, j, Strategy::C, -1});
                if (ci == a.groups.end() || !ci->second.usable) continue;
                std::map<double, double> by_gamma;
                bool complete = true;
                for (int gi = 0; gi < static_cast<int>(cfg.gamma.size()); ++gi) {
                    auto qi = a.groups.find({L, k, j, Strategy::QAC, gi});
                    if (qi == a.groups.end() || !qi->second.usable) {
                        complete = false;
                        break;
                    }
                    by_gamma[cfg.gamma[gi]] = static_cast<double>(qi->second.successes) / static_cast<double>(qi->second.reads);
                }
                if (!complete) continue;
                InstanceRow row{L, k, j, &ci->second, nullptr, optimal_penalty(by_gamma)};
                const double chosen = row.choice.gamma.value_or(cfg.gamma.front());
                const int gi = static_cast<int>(std::find(cfg.gamma.begin(), cfg.gamma.end(), chosen) - cfg.gamma.begin());
                row.qac = &a.groups.at({L, k, j, Strategy::QAC, gi});
                a.rows.push_back(row);
            }
    return a;
}

class Csv {
  public:
    explicit Csv(std::vector<std::string> header) : cols_(header.size()) { row(header); }
    void comment(const std::string &c) { text_ << "# " << c << '\n'; }
    void row(const std::vector<std::string> &cells) {
        if (cells.size() != cols_) throw Error("csv row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) text_ << (i ? "," : "") << cells[i];
        text_ << '\n';
    }
    const std::string str() const { return text_.str(); }

  private:
    std::size_t cols_;
    std::ostringstream text_;
};

std::string strategy_gamma(const ExperimentConfig &cfg, const GroupKey &k) {
    return k.strategy == Strategy::QAC ? format_real(cfg.gamma.at(k.gamma_index)) : "NA";
}

using SeriesKey = std::tuple<Strategy, int, int>;  // strategy, L, eta index

std::map<SeriesKey, std::vector<double>> runs_by_class(const Analysis &a) {
    std::map<SeriesKey, std::vector<double>> out;
    for (const InstanceRow &r : a.rows) {
        out[{Strategy::C, r.L, r.eta_index}].push_back(tts_sort_key(r.c->runs));
        const double q = r.choice.failed() ? std::numeric_limits<double>::infinity() : tts_sort_key(r.qac->runs);
        out[{Strategy::QAC, r.L, r.eta_index}].push_back(q);
    }
    return out;
}

struct MedianRow {
    std::size_t n = 0, unsolved = 0;
    MedianCi m;
};

std::map<SeriesKey, MedianRow> median_runs(const ExperimentConfig &cfg, const Analysis &a) {
    std::map<SeriesKey, MedianRow> out;
    for (const auto &[key, values] : runs_by_class(a)) {
        MedianRow row;
        row.n = values.size();
        row.unsolved = static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return std::isinf(v); }));
        const auto &[s, L, j] = key;
        row.m = median_ci(values, cfg.bootstrap_resamples,
                          derive_seed(cfg.seed, SeedTag::bootstrap,
                                      {0xAAull, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(L), static_cast<std::uint64_t>(j)}));
        out[key] = row;
    }
    return out;
}

std::uint64_t logical_coupler_count(const ExperimentConfig &cfg, int L) { return logical_graph(cfg, L).edges().size(); }

}  // namespace

std::vector<fs::path> cmd_analyze(const ExperimentConfig &cfg) {
    const RunLayout lay{cfg.out};
    const Analysis a = compute_analysis(cfg);
    fs::create_directories(lay.analysis());
    std::vector<fs::path> written;
    auto emit = [&](const std::string &name, const Csv &csv) {
        const fs::path p = lay.analysis() / name;
        spit(p, csv.str());
        written.push_back(p);
    };

    {
        Csv csv({"L", "instance", "eta", "strategy", "gamma", "gauges", "reads", "successes", "mu", "mu_lo", "mu_hi",
                 "sigma", "sigma_lo", "sigma_hi", "chaoticity", "chaoticity_lo", "chaoticity_hi", "runs", "truncations"});
        csv.comment("C rows report the four-copy success 1-(1-p)^4; unusable groups: " + std::to_string(a.unusable_groups));
        for (const auto &[k, g] : a.groups) {
            if (!g.usable) continue;
            csv.row({std::to_string(k.L), std::to_string(k.instance), format_real(cfg.eta[k.eta_index]), to_string(k.strategy),
                     strategy_gamma(cfg, k), std::to_string(g.counts.size()), std::to_string(g.reads),
                     std::to_string(g.successes), num(g.est.mu.mean), num(g.est.mu.ci95.lo), num(g.est.mu.ci95.hi),
                     num(g.est.sigma.mean), num(g.est.sigma.ci95.lo), num(g.est.sigma.ci95.hi), num(g.est.chaoticity.mean),
                     num(g.est.chaoticity.ci95.lo), num(g.est.chaoticity.ci95.hi), num(tts_sort_key(g.runs)),
                     std::to_string(g.truncations)});
        }
        emit("success.csv", csv);
    }
    {
        Csv csv({"L", "instance", "eta", "gamma_opt", "success"});
        for (const InstanceRow &r : a.rows)
            csv.row({std::to_string(r.L), std::to_string(r.instance), format_real(cfg.eta[r.eta_index]),
                     r.choice.failed() ? "fail" : format_real(*r.choice.gamma), num(r.choice.success)});
        emit("optimal_penalty.csv", csv);
    }
    {
        Csv csv({"strategy", "L", "eta", "n", "excluded_zero_success", "pearson", "spearman", "spearman_p"});
        csv.comment("correlation between success probability and chaoticity (sigma/mu) across instances");
        std::map<SeriesKey, std::pair<std::vector<double>, std::vector<double>>> series;
        std::map<SeriesKey, std::size_t> excluded;
        for (const InstanceRow &r : a.rows) {
            for (Strategy s : {Strategy::C, Strategy::QAC}) {
                const GroupStats *g = s == Strategy::C ? r.c : r.qac;
                const SeriesKey key{s, r.L, r.eta_index};
                excluded[key];
                if (g->successes == 0 || (s == Strategy::QAC && r.choice.failed())) {
                    ++excluded[key];
                    continue;
                }
                series[key].first.push_back(g->est.mu.mean);
                series[key].second.push_back(g->est.chaoticity.mean);
            }
        }
        for (const auto &[key, ex] : excluded) {
            const auto &[s, L, j] = key;
            const auto &xy = series[key];
            std::string pr = "NA", sr = "NA", sp = "NA";
            try {
                if (xy.first.size() >= 3) {
                    pr = num(pearson(xy.first, xy.second));
                    const RankCorrelation rc = spearman(xy.first, xy.second);
                    sr = num(rc.rho);
                    sp = num(rc.p_value);
                }
            } catch (const InputError &) {
                // constant series: correlation undefined
            }
            csv.row({to_string(s), std::to_string(L), format_real(cfg.eta[j]), std::to_string(xy.first.size()),
                     std::to_string(ex), pr, sr, sp});
        }
        emit("correlation.csv", csv);
    }
    {
        Csv better({"L", "eta", "compared", "qac_better", "c_better", "ties", "fraction_qac_better", "both_failed"});
        Csv failures({"L", "eta", "instance"});
        std::map<std::pair<int, int>, std::array<std::size_t, 5>> tally;  // compared, q, c, tie, failed
        for (const InstanceRow &r : a.rows) {
            auto &t = tally[{r.L, r.eta_index}];
            const bool qac_failed = r.choice.failed() || r.qac->successes == 0;
            if (qac_failed && r.c->successes == 0) {
                ++t[4];
                failures.row({std::to_string(r.L), format_real(cfg.eta[r.eta_index]), std::to_string(r.instance)});
                continue;
            }
            ++t[0];
            const double q = qac_failed ? 0.0 : r.qac->est.mu.mean, c = r.c->est.mu.mean;
            if (q > c) ++t[1];
            else if (c > q) ++t[2];
            else ++t[3];
        }
        for (const auto &[k, t] : tally)
            better.row({std::to_string(k.first), format_real(cfg.eta[k.second]), std::to_string(t[0]), std::to_string(t[1]),
                        std::to_string(t[2]), std::to_string(t[3]),
                        t[0] ? num(static_cast<double>(t[1]) / static_cast<double>(t[0])) : "NA", std::to_string(t[4])});
        emit("better_fraction.csv", better);
        emit("failures.csv", failures);
    }
    {
        Csv csv({"strategy", "L", "eta", "n", "median_success"});
        std::map<SeriesKey, std::vector<double>> mu;
        for (const InstanceRow &r : a.rows) {
            mu[{Strategy::C, r.L, r.eta_index}].push_back(r.c->est.mu.mean);
            mu[{Strategy::QAC, r.L, r.eta_index}].push_back(r.choice.failed() ? 0.0 : r.qac->est.mu.mean);
        }
        for (const auto &[key, v] : mu) {
            const auto &[s, L, j] = key;
            csv.row({to_string(s), std::to_string(L), format_real(cfg.eta[j]), std::to_string(v.size()), num(median(v))});
        }
        emit("median_success.csv", csv);
    }
    const auto medians = median_runs(cfg, a);
    {
        Csv csv({"strategy", "L", "eta", "n", "unsolved", "median_runs", "ci_lo", "ci_hi"});
        for (const auto &[key, row] : medians) {
            const auto &[s, L, j] = key;
            csv.row({to_string(s), std::to_string(L), format_real(cfg.eta[j]), std::to_string(row.n),
                     std::to_string(row.unsolved), num(row.m.median), num(row.m.ci95.lo), num(row.m.ci95.hi)});
        }
        emit("median_tts.csv", csv);
    }
    {
        Csv csv({"strategy", "L", "eta", "percentile", "runs"});
        for (const auto &[key, values] : runs_by_class(a)) {
            const auto &[s, L, j] = key;
            for (int p = 10; p <= 90; p += 10)
                csv.row({to_string(s), std::to_string(L), format_real(cfg.eta[j]), std::to_string(p),
                         num(percentile(values, p))});
        }
        emit("percentile_tts.csv", csv);
    }
    {
        std::vector<SeriesPoint> c, q;
        for (const auto &[key, row] : medians) {
            const auto &[s, L, j] = key;
            (s == Strategy::C ? c : q).push_back({static_cast<double>(L), cfg.eta[j], row.m.median});
        }
        Csv csv({"L", "eta", "ratio_c_over_qac"});
        if (!c.empty() && !q.empty()) {
            const SpeedupSeries sp = speedup_ratio(c, q);
            csv.comment("omitted_unsolved=" + std::to_string(sp.omitted_unsolved));
            for (const SeriesPoint &p : sp.ratios) csv.row({num(p.L), num(p.eta), num(p.runs)});
        }
        emit("speedup.csv", csv);
    }
    return written;
}

std::vector<fs::path> cmd_collapse(const ExperimentConfig &cfg) {
    const RunLayout lay{cfg.out};
    const Analysis a = compute_analysis(cfg);
    const auto medians = median_runs(cfg, a);
    fs::create_directories(lay.collapse());
    std::vector<fs::path> written;
    std::map<int, std::uint64_t> couplers;
    for (int L : cfg.L) couplers[L] = logical_coupler_count(cfg, L);

    Csv data_csv({"strategy", "L", "eta", "collapse_x", "log10_runs"});
    for (Strategy s : {Strategy::C, Strategy::QAC}) {
        std::vector<CollapsePoint> pts;
        std::vector<BoundPoint> bounds;
        for (const auto &[key, row] : medians) {
            const auto &[ks, L, j] = key;
            if (ks != s) continue;
            pts.push_back({static_cast<double>(L), cfg.eta[j], row.m.median, couplers[L]});
            bounds.push_back({static_cast<double>(L), cfg.eta[j], row.m.ci95.lo, row.m.ci95.hi, couplers[L]});
        }
        for (bool eff : {false, true}) {
            for (TrialFormId id : {TrialFormId::g1, TrialFormId::g2, TrialFormId::g3a, TrialFormId::g3b, TrialFormId::g3c}) {
                for (Positivity pos : {Positivity::squared, Positivity::raw}) {
                    const std::string name = std::string(to_string(s)) + "-" + to_string(id) + "-" + to_string(pos) + "-" +
                                             (eff ? "effL" : "L") + ".txt";
                    std::string text;
                    try {
                        FitOptions fo;
                        fo.positivity = pos;
                        fo.use_effective_L = eff;
                        fo.seed = derive_seed(cfg.seed, SeedTag::fit, {static_cast<std::uint64_t>(s), eff ? 1u : 0u,
                                                                        static_cast<std::uint64_t>(id), static_cast<std::uint64_t>(pos)});
                        const ScalingFit fit = fit_collapse(pts, id, fo);
                        std::optional<DBounds> db;
                        if (id == TrialFormId::g1 && pos == Positivity::squared) {
                            DBoundOptions dbo;
                            dbo.use_effective_L = eff;
                            dbo.seed = fo.seed;
                            db = fit_d_bounds(bounds, fit.form.params[0], fit.form.params[1], fit.form.params[2], dbo);
                            if (!eff) {
                                for (const CollapsePoint &p : pts) {
                                    if (!std::isfinite(p.runs)) continue;
                                    const double x = std::pow(p.eta * p.eta + fit.form.params[1] * fit.form.params[1],
                                                              fit.form.params[2]) *
                                                     std::pow(p.L, fit.form.params[3]);
                                    data_csv.row({to_string(s), num(p.L), num(p.eta), num(x), num(std::log10(p.runs))});
                                }
                            }
                        }
                        text = "status=ok\nstrategy=" + std::string(to_string(s)) + "\nL_mode=" + (eff ? "effective" : "raw") +
                               "\n" + format_fit_report(fit, pts, db);
                    } catch (const Error &e) {
                        text = "status=failed\nstrategy=" + std::string(to_string(s)) + "\nform=" + to_string(id) +
                               "\npositivity=" + to_string(pos) + "\nL_mode=" + (eff ? "effective" : "raw") +
                               "\nreason=" + e.what() + "\n";
                    }
                    const fs::path p = lay.collapse() / name;
                    spit(p, text);
                    written.push_back(p);
                }
            }
        }
    }
    spit(lay.collapse() / "collapse_data.csv", data_csv.str());
    written.push_back(lay.collapse() / "collapse_data.csv");

    Csv bound_csv({"L", "eta", "alpha", "log10_dp_bound", "log10_random_guess"});
    for (int L : cfg.L)
        for (double e : cfg.eta)
            bound_csv.row({std::to_string(L), format_real(e), "1", num(classical_bound(L, e, 1.0)), num(random_guess_bound(L, e, 1.0))});
    spit(lay.collapse() / "bounds.csv", bound_csv.str());
    written.push_back(lay.collapse() / "bounds.csv");
    return written;
}

VerifySummary cmd_verify(const ExperimentConfig &cfg, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("verify fraction must lie in (0, 1]");
    const RunLayout lay{cfg.out};
    std::vector<RunRecord> records = load_records(cfg);
    if (records.empty()) throw InputError("run directory " + cfg.out.string() + " has no records");
    const ProblemMap problems = load_problems(cfg, lay);
    Rng rng = make_rng(derive_seed(cfg.seed, SeedTag::oracle, {0x5E1Full}));
    std::shuffle(records.begin(), records.end(), rng);
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(records.size()))));
    records.resize(std::min(n, records.size()));

    VerifySummary sum;
    for (const RunRecord &r : records) {
        ++sum.checked;
        const std::string id = r.key.id(cfg);
        const fs::path archive = lay.root / r.archive;
        if (file_crc32(archive) != r.archive_crc32) {
            sum.mismatches.push_back(id + ": archive hash");
            continue;
        }
        const Problem &p = problems.at({r.key.L, r.key.instance});
        const SampleSet ss = read_sample_archive(archive);
        const PerturbedPair pp = perturbed_problem(cfg, p.lg, p.intended, r.key);
        const IsingInstance &problem = r.key.strategy == Strategy::QAC ? *pp.physical : pp.logical;
        if (max_energy_discrepancy(ss, problem) > 1e-9) sum.mismatches.push_back(id + ": stored energies");
        if (ss.size() != r.reads) sum.mismatches.push_back(id + ": readout count");
        std::uint64_t successes = 0;
        if (r.key.strategy == Strategy::QAC) {
            const DecodedSet dec = decode_majority(ss, p.lg);
            if (dec.usable) successes = adjudicate_success(dec.configs, p.intended, p.cert).successes;
        } else {
            successes = adjudicate_success(ss, p.intended, p.cert).successes;
        }
        if (successes != r.successes) sum.mismatches.push_back(id + ": success count");
    }
    return sum;
}

std::string cmd_report(const ExperimentConfig &cfg) {
    const RunLayout lay{cfg.out};
    const Analysis a = compute_analysis(cfg);
    std::ostringstream out;
    out << "run directory: " << lay.root.string() << '\n'
        << "records: " << load_records(cfg).size() << '\n'
        << "flagged instances: " << read_flagged(lay).size() << '\n'
        << "unusable groups: " << a.unusable_groups << "\n\n";
    out << "median success (C as best of four copies, QAC at its optimal penalty)\n";
    out << "  L   eta      C         QAC       QAC-better fraction\n";
    std::map<std::pair<int, int>, std::array<std::vector<double>, 2>> mu;
    std::map<std::pair<int, int>, std::array<std::size_t, 2>> better;  // compared, qac better
    for (const InstanceRow &r : a.rows) {
        auto &m = mu[{r.L, r.eta_index}];
        const double q = r.choice.failed() ? 0.0 : r.qac->est.mu.mean;
        m[0].push_back(r.c->est.mu.mean);
        m[1].push_back(q);
        const bool both_failed = r.c->successes == 0 && (r.choice.failed() || r.qac->successes == 0);
        if (!both_failed) {
            ++better[{r.L, r.eta_index}][0];
            if (q > r.c->est.mu.mean) ++better[{r.L, r.eta_index}][1];
        }
    }
    for (const auto &[k, m] : mu) {
        const auto &b = better[k];
        char line[160];
        std::snprintf(line, sizeof line, "  %-3d %-8s %-9.4f %-9.4f %s\n", k.first, format_real(cfg.eta[k.second]).c_str(),
                      median(m[0]), median(m[1]),
                      b[0] ? format_real(static_cast<double>(b[1]) / static_cast<double>(b[0])).c_str() : "NA");
        out << line;
    }
    return out.str();
}

}  // namespace jchaos
