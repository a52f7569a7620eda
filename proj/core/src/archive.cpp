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

#include <zlib.h>

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "jchaos/error.hpp"
#include "jchaos/solvers.hpp"

namespace jchaos {

namespace {

std::string spins_to_text(const Config &s) {
    std::string out(s.size(), '.');
    for (std::size_t q = 0; q < s.size(); ++q)
        if (s[q] > 0) out[q] = '+';
        else if (s[q] < 0) out[q] = '-';
    return out;
}

Config text_to_spins(const std::string &t) {
    Config s(t.size(), 0);
    for (std::size_t q = 0; q < t.size(); ++q) {
        switch (t[q]) {
        case '+': s[q] = 1; break;
        case '-': s[q] = -1; break;
        case '.': s[q] = 0; break;
        default: throw ParseError(std::string("bad spin character '") + t[q] + "'");
        }
    }
    return s;
}

template <typename T>
T parse_number(const std::string &text, const char *what) {
    T value{};
    const char *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw ParseError(std::string("bad ") + what + " '" + text + "'");
    return value;
}

std::string gz_read(const std::filesystem::path &path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw DependencyError("cannot open " + path.string());
    std::string out;
    char buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(n));
    const bool bad = n < 0;
    gzclose(f);
    if (bad) throw ParseError("corrupt gzip stream in " + path.string());
    return out;
}

void gz_write(const std::filesystem::path &path, const std::string &data) {
    // gzopen writes a fixed header (no name, zero mtime), so equal content
    // gives equal bytes.
    gzFile f = gzopen(path.c_str(), "wb6");
    if (!f) throw InputError("cannot write " + path.string());
    const int n = gzwrite(f, data.data(), static_cast<unsigned>(data.size()));
    gzclose(f);
    if (n != static_cast<int>(data.size())) throw Error("short write to " + path.string());
}

}  // namespace

void write_sample_archive(const std::filesystem::path &path, const SampleSet &samples,
                          const std::vector<std::pair<std::string, std::string>> &metadata) {
    if (samples.energies.size() != samples.readouts.size()) throw InputError("sample set energies/readouts mismatch");
    std::ostringstream out;
    out << "# solver=" << samples.solver.name << '\n'
        << "# sweeps=" << samples.solver.sweeps << '\n'
        << "# schedule=" << samples.solver.schedule << '\n'
        << "# seed=" << samples.solver.seed << '\n'
        << "# gauge=" << samples.gauge_id << '\n';
    for (const auto &[k, v] : metadata) {
        if (k.find('=') != std::string::npos || k.find('\n') != std::string::npos || v.find('\n') != std::string::npos)
            throw InputError("metadata entries must be single-line key=value");
        out << "# meta." << k << '=' << v << '\n';
    }
    for (std::size_t k = 0; k < samples.readouts.size(); ++k)
        out << spins_to_text(samples.readouts[k]) << ' ' << format_real(samples.energies[k]) << ' ' << samples.gauge_id
            << '\n';
    gz_write(path, out.str());
}

SampleSet read_sample_archive(const std::filesystem::path &path, std::vector<std::pair<std::string, std::string>> *metadata) {
    std::istringstream in(gz_read(path));
    SampleSet out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.starts_with("# ")) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ParseError("bad header line '" + line + "'");
            const std::string key = line.substr(2, eq - 2), value = line.substr(eq + 1);
            if (key == "solver") out.solver.name = value;
            else if (key == "sweeps") out.solver.sweeps = parse_number<int>(value, "sweeps");
            else if (key == "schedule") out.solver.schedule = value;
            else if (key == "seed") out.solver.seed = parse_number<Seed>(value, "seed");
            else if (key == "gauge") out.gauge_id = parse_number<int>(value, "gauge");
            else if (key.starts_with("meta.")) {
                if (metadata) metadata->emplace_back(key.substr(5), value);
            } else throw ParseError("unknown archive header '" + key + "'");
            continue;
        }
        std::istringstream fields(line);
        std::string spins, e, g;
        if (!(fields >> spins >> e >> g)) throw ParseError("bad readout line '" + line + "'");
        out.readouts.push_back(text_to_spins(spins));
        out.energies.push_back(parse_number<double>(e, "energy"));
        if (!out.readouts.empty() && out.readouts.back().size() != out.readouts.front().size())
            throw ParseError("readouts of different lengths");
    }
    return out;
}

std::string format_certificate(const GroundCertificate &cert) {
    auto tri = [](const std::optional<bool> &b) { return b ? (*b ? "true" : "false") : "unknown"; };
    std::ostringstream out;
    out << "method=" << to_string(cert.method) << '\n'
        << "energy=" << format_real(cert.energy) << '\n'
        << "units=" << (cert.energy_units ? std::to_string(*cert.energy_units) : "none") << '\n'
        << "scale=" << cert.scale << '\n'
        << "agrees_with_pticm=" << tri(cert.agrees_with_pticm) << '\n'
        << "agrees_with_brute_force=" << tri(cert.agrees_with_brute_force) << '\n'
        << "witness=" << spins_to_text(cert.witness) << '\n';
    return out.str();
}

GroundCertificate parse_certificate(const std::string &text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("bad certificate line '" + line + "'");
        if (!kv.emplace(line.substr(0, eq), line.substr(eq + 1)).second)
            throw ParseError("duplicate certificate key '" + line.substr(0, eq) + "'");
    }
    auto need = [&](const char *k) -> const std::string & {
        auto it = kv.find(k);
        if (it == kv.end()) throw ParseError(std::string("certificate lacks '") + k + "'");
        return it->second;
    };
    auto tri = [](const std::string &v) -> std::optional<bool> {
        if (v == "true") return true;
        if (v == "false") return false;
        if (v == "unknown") return std::nullopt;
        throw ParseError("bad boolean '" + v + "'");
    };
    GroundCertificate c;
    c.method = parse_cert_method(need("method"));
    c.energy = parse_number<double>(need("energy"), "energy");
    if (need("units") != "none") c.energy_units = parse_number<std::int64_t>(need("units"), "units");
    c.scale = parse_number<int>(need("scale"), "scale");
    c.agrees_with_pticm = tri(need("agrees_with_pticm"));
    c.agrees_with_brute_force = tri(need("agrees_with_brute_force"));
    c.witness = text_to_spins(need("witness"));
    return c;
}

void write_certificate(const std::filesystem::path &path, const GroundCertificate &cert) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << format_certificate(cert);
}

GroundCertificate read_certificate(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DependencyError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_certificate(buf.str());
}

}  // namespace jchaos
