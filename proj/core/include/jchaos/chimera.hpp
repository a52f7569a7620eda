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

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace jchaos {

using QubitIndex = std::uint32_t;

//! Unordered pair stored with u < v.
struct Edge {
    QubitIndex u;
    QubitIndex v;
    friend auto operator<=>(const Edge &, const Edge &) = default;
};

inline Edge make_edge(QubitIndex a, QubitIndex b) { return a < b ? Edge{a, b} : Edge{b, a}; }

//! Position of a qubit inside the L x L grid of K_{r,r} cells.
//!
//! side 0 qubits couple to the same offset in the cells above and below
//! (vertical couplers); side 1 qubits couple to the same offset in the cells
//! left and right (horizontal couplers).
struct QubitCoord {
    int row;
    int col;
    int side;
    int offset;
    friend bool operator==(const QubitCoord &, const QubitCoord &) = default;
};

//! Generalized Chimera graph with a hole mask.
//!
//! Index layout (fixed, so that instance files are portable):
//!     index = ((row * L + col) * 2 + side) * r + offset
//! i.e. row-major over cells, side-then-offset within a cell.
class ChimeraGraph {
  public:
    ChimeraGraph(int L, int r, std::span<const QubitIndex> holes);

    int L() const { return L_; }
    int r() const { return r_; }
    std::size_t qubit_count() const { return active_.size(); }
    std::size_t active_count() const;
    bool active(QubitIndex q) const { return active_.at(q) != 0; }
    const std::vector<std::uint8_t> &active_mask() const { return active_; }
    const std::vector<Edge> &edges() const { return edges_; }
    std::vector<QubitIndex> holes() const;

    QubitIndex index(const QubitCoord &c) const;
    QubitCoord coord(QubitIndex q) const;

    //! Adjacency in the hole-free graph of the same (L, r).
    bool geometric_adjacent(QubitIndex a, QubitIndex b) const;
    //! Adjacency in this graph (both endpoints active).
    bool adjacent(QubitIndex a, QubitIndex b) const;

    //! The top-left sub x sub square, with the holes falling inside it.
    ChimeraGraph top_left(int sub) const;

    friend bool operator==(const ChimeraGraph &, const ChimeraGraph &) = default;

  private:
    int L_;
    int r_;
    std::vector<std::uint8_t> active_;
    std::vector<Edge> edges_;
};

ChimeraGraph build_chimera(int L, int r, std::span<const QubitIndex> holes = {});

enum class LogicalStatus { operational, penalty_missing, inactive };

const char *to_string(LogicalStatus s);

struct LogicalQubit {
    std::array<QubitIndex, 3> data;
    QubitIndex penalty;
    LogicalStatus status;
};

struct LogicalEdge {
    QubitIndex u;
    QubitIndex v;
    //! Physical data-data couplers realizing this edge, one per copy.
    std::vector<Edge> backing;
};

//! The degree-3 code graph: two logical qubits per unit cell.
//!
//! Logical index = (row * L + col) * 2 + slot. Slot 0 takes side-0 offsets
//! {0,1,2} as data and side-1 offset 3 as penalty; slot 1 mirrors it with
//! side-1 data and side-0 offset 3 as penalty. Slot-0 qubits chain
//! vertically, slot-1 qubits horizontally, so the logical graph is itself a
//! Chimera graph with r = 1 (see `as_chimera`).
class LogicalGraph {
  public:
    explicit LogicalGraph(ChimeraGraph physical);

    int L() const { return physical_.L(); }
    const ChimeraGraph &physical() const { return physical_; }
    const std::vector<LogicalQubit> &qubits() const { return qubits_; }
    const std::vector<LogicalEdge> &edges() const { return edges_; }
    std::size_t operational_count() const;
    //! Qubits usable in a logical problem (operational or penalty-missing).
    std::size_t usable_count() const;
    const LogicalEdge *find_edge(QubitIndex a, QubitIndex b) const;

    //! The logical connectivity as an r = 1 Chimera graph whose holes are
    //! the inactive logical qubits.
    const ChimeraGraph &as_chimera() const { return quotient_; }

  private:
    ChimeraGraph physical_;
    ChimeraGraph quotient_;
    std::vector<LogicalQubit> qubits_;
    std::vector<LogicalEdge> edges_;
};

LogicalGraph build_logical_graph(const ChimeraGraph &g);

//! Coupler count of the hole-free logical graph: L(3L - 2).
std::uint64_t ideal_logical_coupler_count(int L);

//! Positive root of x(3x - 2) = count; 0 for count 0.
double effective_L(std::uint64_t actual_coupler_count);

struct HoleMask {
    int L = 1;
    int r = 4;
    std::vector<QubitIndex> holes;
};

//! Format: "L r" on the first line, then one inactive index per line, sorted.
HoleMask read_hole_mask(const std::filesystem::path &path);
void write_hole_mask(const std::filesystem::path &path, const HoleMask &mask);
HoleMask parse_hole_mask(const std::string &text);
std::string format_hole_mask(const HoleMask &mask);

}  // namespace jchaos
