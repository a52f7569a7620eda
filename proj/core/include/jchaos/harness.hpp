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
#include <string>
#include <vector>

#include "jchaos/chimera.hpp"
#include "jchaos/instance.hpp"
#include "jchaos/qac.hpp"
#include "jchaos/rng.hpp"
#include "jchaos/solvers.hpp"

namespace jchaos {

struct ExperimentConfig {
    std::vector<int> L{1, 2, 3, 4};
    std::vector<double> eta{0.0, 0.03, 0.05, 0.07, 0.10, 0.15};
    int instances = 20;
    int gauges = 5;
    int reads = 1000;
    std::vector<double> gamma{0.1, 0.2, 0.3, 0.4, 0.5};
    double alpha = 1.0;
    std::string solver = "sa";
    SaParams sa;
    Seed seed = 1;
    //! Device hole mask file; empty means a hole-free device of size max(L).
    std::filesystem::path device;
    bool noise_per_gauge = false;
    bool perturb_fields = true;
    int dp_max_frontier_bits = 24;
    int pticm_sweeps = 2000;
    int pticm_replicas = 2;
    std::size_t bootstrap_resamples = 2000;
    double t_f = 20.0;  //!< nominal anneal time in microseconds, metadata only
    std::filesystem::path out = "run";

    //! Throws ValidationError on an inconsistent configuration.
    void validate() const;
};

//! Structured text (JSON). "profile": "full" switches unset counts to the
//! full-size study (100 instances, 10000 reads, L up to 16).
ExperimentConfig parse_config(const std::string &json_text);
ExperimentConfig read_config(const std::filesystem::path &path);
std::string format_config(const ExperimentConfig &cfg);

enum class Strategy { C, QAC };
const char *to_string(Strategy s);

//! Identity tuple of one sampler call.
struct RecordKey {
    int L = 0;
    int instance = 0;
    int eta_index = 0;
    Strategy strategy = Strategy::C;
    int gamma_index = -1;  //!< -1 for C
    int gauge = 0;

    std::string id(const ExperimentConfig &cfg) const;
    friend auto operator<=>(const RecordKey &, const RecordKey &) = default;
};

struct RunRecord {
    RecordKey key;
    double eta = 0.0;
    std::optional<double> gamma;
    Seed noise_seed = 0;
    Seed gauge_seed = 0;
    Seed solver_seed = 0;
    std::string status;  //!< "complete" or "unusable"
    std::uint64_t successes = 0;
    std::uint64_t reads = 0;
    std::size_t truncations = 0;
    int two_vote_ties = 0;
    std::string archive;  //!< relative to the run directory
    std::uint32_t archive_crc32 = 0;
};

std::string format_record(const RunRecord &r);
RunRecord parse_record(const std::string &json_text);

//! Canonical file locations inside a run directory.
struct RunLayout {
    std::filesystem::path root;
    std::filesystem::path instance(int L, int k) const;
    std::filesystem::path certificate(int L, int k) const;
    std::filesystem::path encoded(int L, int k, double gamma) const;
    std::filesystem::path mapping(int L) const;
    std::filesystem::path samples(const std::string &id) const;
    std::filesystem::path record(const std::string &id) const;
    std::filesystem::path index() const;
    std::filesystem::path flagged() const;
    std::filesystem::path analysis() const;
    std::filesystem::path collapse() const;
};

//! The device graph named by the config, and its top-left L x L logical
//! graph.
ChimeraGraph device_graph(const ExperimentConfig &cfg);
LogicalGraph logical_graph(const ExperimentConfig &cfg, int L);

Seed instance_seed(const ExperimentConfig &cfg, int L, int k);

//! Perturbed problems seen by the two strategies for one record. The
//! physical noise is drawn once over every coupler of the encoding; the C
//! problem takes, per logical coupler, the delta of its first backing copy.
struct PerturbedPair {
    IsingInstance logical;
    std::optional<IsingInstance> physical;  //!< set for QAC keys
    std::size_t truncations = 0;
};
PerturbedPair perturbed_problem(const ExperimentConfig &cfg, const LogicalGraph &lg, const IsingInstance &intended,
                                const RecordKey &key);

struct GenerateSummary {
    std::size_t instances = 0;
    std::size_t certified = 0;
    std::vector<std::string> flagged;
};

//! Writes intended instances, their ground certificates (frontier DP, cross
//! checked by PT-ICM; PT-ICM alone beyond the DP cap), encoded instances and
//! mapping sidecars. Instances where the two oracles disagree are flagged.
GenerateSummary cmd_generate(const ExperimentConfig &cfg);

struct RunOptions {
    int threads = 1;
    //! Stop after this many new records (for interruption tests); 0 = no limit.
    std::size_t max_records = 0;
};

struct RunSummary {
    std::size_t completed = 0;
    std::size_t skipped = 0;
    std::size_t total = 0;
};

//! Samples every identity tuple not yet in the record index. Throws
//! DependencyError when an instance or certificate is missing.
RunSummary cmd_run(const ExperimentConfig &cfg, const RunOptions &opts = {});

//! All complete records of a run directory, sorted by key.
std::vector<RunRecord> load_records(const ExperimentConfig &cfg);

//! Writes the CSV tables under analysis/. Returns the written paths.
std::vector<std::filesystem::path> cmd_analyze(const ExperimentConfig &cfg);

//! Collapse fits (raw and effective L), d ranges and bound overlays under
//! collapse/. Requires cmd_analyze output.
std::vector<std::filesystem::path> cmd_collapse(const ExperimentConfig &cfg);

struct VerifySummary {
    std::size_t checked = 0;
    std::vector<std::string> mismatches;
    bool ok() const { return mismatches.empty(); }
};

//! Recomputes a seeded sample (fraction, at least one) of records from their
//! archives and compares energies, success counts and hashes.
VerifySummary cmd_verify(const ExperimentConfig &cfg, double fraction = 0.01);

//! Human-readable summary of the analysis tables.
std::string cmd_report(const ExperimentConfig &cfg);

}  // namespace jchaos
