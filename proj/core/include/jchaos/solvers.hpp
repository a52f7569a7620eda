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
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jchaos/instance.hpp"
#include "jchaos/rng.hpp"

namespace jchaos {

struct SolverDescriptor {
    std::string name;
    int sweeps = 0;
    std::string schedule;
    Seed seed = 0;
};

//! Readouts of one sampler call, stored in the instance's (ungauged) frame.
struct SampleSet {
    std::vector<Config> readouts;
    std::vector<double> energies;  //!< energy of each readout on the sampled instance
    int gauge_id = 0;
    SolverDescriptor solver;
    double wall_seconds = 0.0;

    std::size_t size() const { return readouts.size(); }
};

//! Re-evaluate every stored energy against `inst`; returns the largest
//! absolute discrepancy.
double max_energy_discrepancy(const SampleSet &samples, const IsingInstance &inst);

enum class CertMethod { dp_exact, brute_force, pticm };
const char *to_string(CertMethod m);
CertMethod parse_cert_method(const std::string &s);

struct GroundCertificate {
    double energy = 0.0;
    std::optional<std::int64_t> energy_units;  //!< numerator at `scale` for exact instances
    int scale = 0;                             //!< 0 when the energy is real-valued
    Config witness;
    CertMethod method = CertMethod::dp_exact;
    std::optional<bool> agrees_with_pticm;
    std::optional<bool> agrees_with_brute_force;
};

//! True when the witness evaluates to the certified energy (exactly in
//! integer units, or within 1e-9).
bool certificate_consistent(const GroundCertificate &cert, const IsingInstance &inst);

//! Same energy (integer equality when both are exact, 1e-9 otherwise).
bool same_energy(const GroundCertificate &a, const GroundCertificate &b);

// ---------------------------------------------------------------------------
// Samplers

using BetaSchedule = std::vector<double>;

//! One beta per sweep, linear from beta0 to beta1.
BetaSchedule linear_beta_schedule(double beta0, double beta1, int sweeps);

//! Single-spin Metropolis simulated annealing; `n_reads` independent
//! restarts, each seeded by derive_seed(seed, read, {k}). Bitwise
//! reproducible for any `threads`.
SampleSet solve_sa(const IsingInstance &inst, const BetaSchedule &schedule, int n_reads, Seed seed, int threads = 1);

//! Common contract for the annealer stand-ins.
class Sampler {
  public:
    virtual ~Sampler() = default;
    virtual std::string name() const = 0;
    virtual SampleSet sample(const IsingInstance &inst, int n_reads, Seed seed) const = 0;
};

struct SaParams {
    double beta0 = 0.1;
    double beta1 = 3.0;
    int sweeps = 1000;
};

class SimulatedAnnealingSampler final : public Sampler {
  public:
    explicit SimulatedAnnealingSampler(SaParams params = {}, int threads = 1);
    std::string name() const override { return "sa"; }
    SampleSet sample(const IsingInstance &inst, int n_reads, Seed seed) const override;

  private:
    SaParams params_;
    int threads_;
};

std::unique_ptr<Sampler> make_sampler(const std::string &name, const SaParams &params, int threads = 1);

// ---------------------------------------------------------------------------
// Parallel tempering with Houdayer cluster moves

struct PticmParams {
    int replicas_per_beta = 2;
    BetaSchedule betas;  //!< strictly increasing
    int sweeps = 2000;
    int icm_period = 1;
    //! Recompute the replica pair energy around every cluster move and throw
    //! if it changed.
    bool check_moves = false;
};

//! Geometric ladder from beta_min to beta_max.
BetaSchedule geometric_ladder(double beta_min, double beta_max, int count);
PticmParams default_pticm_params(const IsingInstance &inst);

struct PticmResult {
    GroundCertificate certificate;
    SampleSet samples;  //!< final configurations of the coldest replicas
    std::uint64_t cluster_moves = 0;
};

PticmResult solve_pticm(const IsingInstance &inst, const PticmParams &params, Seed seed);

//! Houdayer move on a replica pair: grow one cluster of disagreeing sites
//! from a random seed site and flip it in both replicas. Returns the cluster
//! size (0 when the replicas agree everywhere). The summed energy of the two
//! replicas is unchanged.
std::size_t houdayer_move(const IsingInstance &inst, Config &a, Config &b, Rng &rng);

// ---------------------------------------------------------------------------
// Exact solvers

struct DpOptions {
    int max_frontier_bits = 24;
};

struct DpPlan {
    int peak_frontier_bits = 0;
    std::uint64_t table_bytes = 0;
    std::uint64_t decision_bytes = 0;
};

//! Sweep order used by the frontier DP: cells column by column, top to
//! bottom; side-0 spins of a cell before its side-1 spins.
std::vector<QubitIndex> chimera_sweep_order(const ChimeraGraph &g);

DpPlan plan_dp(const IsingInstance &inst);

//! Exact ground state by a frontier dynamic program along
//! chimera_sweep_order. Exact instances are minimized in integer units.
//! Throws ResourceError when the peak frontier exceeds the cap.
GroundCertificate solve_dp_exact(const IsingInstance &inst, const DpOptions &opts = {});

struct BruteForceResult {
    GroundCertificate certificate;
    std::vector<Config> ground_set;
};

//! Exhaustive enumeration; real-valued ties within 1e-12 are kept.
BruteForceResult brute_force(const IsingInstance &inst, int max_spins = 24);

// ---------------------------------------------------------------------------

struct SuccessCount {
    std::uint64_t successes = 0;
    std::uint64_t total = 0;
};

//! A readout succeeds iff its energy on the intended instance equals the
//! certified ground energy of that instance.
SuccessCount adjudicate_success(std::span<const Config> readouts, const IsingInstance &intended,
                                const GroundCertificate &cert);
SuccessCount adjudicate_success(const SampleSet &samples, const IsingInstance &intended, const GroundCertificate &cert);

// ---------------------------------------------------------------------------
// Persistence

//! gzip text archive. Header lines "# key=value"; then one readout per line:
//! "<spins> <energy> <gauge>" with spins as '+', '-' ('.' for inactive).
void write_sample_archive(const std::filesystem::path &path, const SampleSet &samples,
                          const std::vector<std::pair<std::string, std::string>> &metadata = {});
SampleSet read_sample_archive(const std::filesystem::path &path,
                              std::vector<std::pair<std::string, std::string>> *metadata = nullptr);

std::string format_certificate(const GroundCertificate &cert);
GroundCertificate parse_certificate(const std::string &text);
void write_certificate(const std::filesystem::path &path, const GroundCertificate &cert);
GroundCertificate read_certificate(const std::filesystem::path &path);

}  // namespace jchaos
