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

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jchaos/chimera.hpp"
#include "jchaos/instance.hpp"

namespace jchaos {

struct SampleSet;

//! A logical problem written onto the physical graph with the [3,1,3]
//! penalty code: alpha * (encoded problem) + gamma * (penalty term).
struct QacEncoding {
    double gamma = 0.0;
    double alpha = 1.0;
    IsingInstance physical;
    //! Physical couplers behind each logical coupler, parallel to
    //! the logical instance's couplers().
    std::vector<int> backing_multiplicity;
    std::size_t penalty_coupler_count = 0;
};

//! Each logical field goes on all three data qubits and each logical coupler
//! on every backing physical coupler, scaled by alpha. Operational logical
//! qubits get a -gamma coupler between the penalty qubit and each data qubit;
//! penalty-missing qubits are encoded without a penalty. An exact logical
//! instance yields an exact encoding whenever alpha and gamma have a common
//! integer scale (denominators up to 1000).
QacEncoding encode(const IsingInstance &logical, double gamma, double alpha, const LogicalGraph &lg);

struct DecodeInfo {
    int two_vote_ties = 0;   //!< two-vote disagreements settled by the tie-break
    int unresolved = 0;      //!< qubits with fewer than two active data qubits
};

struct DecodedSet {
    std::vector<Config> configs;  //!< logical configurations, one per readout
    std::vector<DecodeInfo> info;
    //! False when an operational or penalty-missing logical qubit could not
    //! be resolved in some readout.
    bool usable = true;
    std::size_t size() const { return configs.size(); }
};

//! Majority vote over the data qubits of every logical qubit; penalty qubits
//! are ignored. Two-vote ties are broken by a pseudo-random draw keyed by the
//! sample set's seed, the readout index and the logical qubit.
DecodedSet decode_majority(const SampleSet &physical_readouts, const LogicalGraph &lg);

//! Broadcast a logical configuration onto every data qubit (penalty qubits
//! aligned with their data); inactive physical qubits are left at 0.
Config broadcast_logical(std::span<const Spin> logical, const LogicalGraph &lg);

//! Success probability of the classical repetition baseline: 1 - (1 - p)^k.
double c_strategy_success(double p, int k = 4);

struct PenaltyChoice {
    std::optional<double> gamma;  //!< empty means "fail": no gamma ever succeeded
    double success = 0.0;
    bool failed() const { return !gamma.has_value(); }
};

//! argmax over gamma, ties toward the smaller gamma.
PenaltyChoice optimal_penalty(const std::map<double, double> &success_by_gamma);

//! Sidecar for encoded instance files: one line per logical qubit,
//! "logical d0 d1 d2 penalty status".
std::string format_qac_mapping(const LogicalGraph &lg);
void write_qac_mapping(const std::filesystem::path &path, const LogicalGraph &lg);

}  // namespace jchaos
