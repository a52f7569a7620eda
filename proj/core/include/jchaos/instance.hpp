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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jchaos/chimera.hpp"
#include "jchaos/rng.hpp"

namespace jchaos {

using Spin = std::int8_t;
using Config = std::vector<Spin>;

enum class GraphKind { logical, physical };

const char *to_string(GraphKind k);
GraphKind parse_graph_kind(const std::string &s);

struct Coupler {
    QubitIndex u;
    QubitIndex v;
    double value;
};

struct Provenance {
    Seed seed = 0;
    double eta = 0.0;
    std::string parent;
};

//! Local fields and couplers over a Chimera-shaped graph.
//!
//! Logical instances live on the r = 1 quotient of a LogicalGraph
//! (`LogicalGraph::as_chimera`), physical ones on the device graph. When an
//! exact scale s is set, every field and coupler is stored as an integer
//! numerator n with value n / s and energies are evaluated in integers.
class IsingInstance {
  public:
    IsingInstance(GraphKind kind, ChimeraGraph graph, std::optional<int> exact_scale = std::nullopt);

    GraphKind kind() const { return kind_; }
    const ChimeraGraph &graph() const { return graph_; }
    std::size_t size() const { return graph_.qubit_count(); }
    bool active(QubitIndex q) const { return graph_.active(q); }

    std::optional<int> exact_scale() const { return scale_; }
    bool exact() const { return scale_.has_value(); }

    std::span<const double> fields() const { return h_; }
    std::span<const Coupler> couplers() const { return J_; }
    //! Integer numerators; empty unless exact().
    std::span<const std::int64_t> field_units() const { return h_units_; }
    std::span<const std::int64_t> coupler_units() const { return J_units_; }

    void set_field(QubitIndex q, double value);
    void set_coupler(QubitIndex u, QubitIndex v, double value);
    void set_field_units(QubitIndex q, std::int64_t numerator);
    void set_coupler_units(QubitIndex u, QubitIndex v, std::int64_t numerator);

    //! Index of coupler (u, v) in couplers(), or -1.
    std::ptrdiff_t find_coupler(QubitIndex u, QubitIndex v) const;

    //! Forget the integer representation (values are kept).
    void drop_exact();

    Provenance provenance;

    friend bool operator==(const IsingInstance &a, const IsingInstance &b);

  private:
    void check_site(QubitIndex q) const;
    std::size_t insert_slot(QubitIndex u, QubitIndex v, double value);

    GraphKind kind_;
    ChimeraGraph graph_;
    std::optional<int> scale_;
    std::vector<double> h_;
    std::vector<Coupler> J_;
    std::vector<std::int64_t> h_units_;
    std::vector<std::int64_t> J_units_;
};

//! Zero fields; each coupler of `graph` uniformly from {+-1/6, +-1/3, +-1/2},
//! stored exactly at scale 6.
IsingInstance generate_instance(GraphKind kind, const ChimeraGraph &graph, Seed seed);
IsingInstance generate_instance(const LogicalGraph &graph, Seed seed);

//! Per-term Gaussian perturbation, keyed by site / edge so that one draw can
//! be applied to several instances sharing the same couplers.
struct NoiseDraw {
    double eta = 0.0;
    std::vector<std::pair<QubitIndex, double>> dh;  //!< sorted by site
    std::vector<std::pair<Edge, double>> dJ;        //!< sorted by edge
    std::size_t truncation_count = 0;
};

struct PerturbOptions {
    //! Draw a field delta for every active qubit, zero fields included.
    //! When off, only couplers receive noise.
    bool fields = true;
};

//! Draws delta ~ N(0, eta^2) for every coupler (and fields if enabled).
NoiseDraw draw_noise(const IsingInstance &inst, double eta, Seed seed, PerturbOptions opts = {});

//! Adds the drawn deltas and clips to [-1, 1]; returns the truncation count
//! through `draw`. Every coupler of `inst` must have a delta in `draw`.
IsingInstance apply_noise(const IsingInstance &inst, NoiseDraw &draw);

std::pair<IsingInstance, NoiseDraw> perturb(const IsingInstance &inst, double eta, Seed seed, PerturbOptions opts = {});

//! Spin-reversal transform: a_i = +-1 on active sites, 0 elsewhere.
struct Gauge {
    std::vector<Spin> a;
};

Gauge identity_gauge(const IsingInstance &inst);
Gauge random_gauge(const IsingInstance &inst, Seed seed);

//! h_i -> a_i h_i, J_ij -> a_i a_j J_ij.
IsingInstance apply_gauge(const IsingInstance &inst, const Gauge &g);
//! s_i -> a_i s_i.
Config ungauge_readout(std::span<const Spin> spins, const Gauge &g);

struct Energy {
    double value = 0.0;
    std::optional<std::int64_t> units;  //!< numerator at exact_scale when exact
};

//! sum h_i s_i + sum J_ij s_i s_j. Throws InputError on a missing spin
//! (a value other than +-1 at an active site) or a size mismatch.
Energy energy(const IsingInstance &inst, std::span<const Spin> spins);

//! Energy change of flipping site q.
double flip_delta(const IsingInstance &inst, std::span<const Spin> spins, QubitIndex q);

//! Text format:
//!   # kind=logical|physical
//!   # L=<int>
//!   # r=<int>
//!   # scale=<int>|none
//!   # seed=<uint64>
//!   # eta=<real>
//!   # parent=<id>
//!   # inactive=<comma separated indices>
//!   i i value      (field)
//!   i j value      (coupler, i < j)
//! With an integer scale the values are integer numerators, otherwise
//! shortest round-trip decimal strings.
std::string format_instance(const IsingInstance &inst);
IsingInstance parse_instance(const std::string &text);
void write_instance(const std::filesystem::path &path, const IsingInstance &inst);
IsingInstance read_instance(const std::filesystem::path &path);

//! Shortest decimal string that round-trips to the same double.
std::string format_real(double x);

}  // namespace jchaos
