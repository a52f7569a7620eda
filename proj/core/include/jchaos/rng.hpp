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
#include <initializer_list>
#include <random>

namespace jchaos {

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

//! Labels for the levels of the seed tree. Every random stream in the
//! library is keyed by a path of (tag, index...) below the experiment seed:
//!
//!   experiment -> instance -> noise -> gauge -> solver -> read
//!
//! so that any stream can be regenerated without replaying its siblings.
enum class SeedTag : std::uint64_t {
    instance = 0x11,
    noise = 0x22,
    gauge = 0x33,
    solver = 0x44,
    read = 0x55,
    bootstrap = 0x66,
    fit = 0x77,
    tie_break = 0x88,
    oracle = 0x99,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

//! Counter-based child seed: a pure function of the parent and the path.
inline constexpr Seed derive_seed(Seed parent, std::initializer_list<std::uint64_t> path) {
    Seed s = splitmix64(parent ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t p : path) s = splitmix64(s ^ splitmix64(p + 0x3c6ef372fe94f82bULL));
    return s;
}

inline constexpr Seed derive_seed(Seed parent, SeedTag tag, std::initializer_list<std::uint64_t> path = {}) {
    Seed s = derive_seed(parent, {static_cast<std::uint64_t>(tag)});
    return path.size() ? derive_seed(s, path) : s;
}

inline Rng make_rng(Seed s) { return Rng(s); }

//! Uniform double in [0, 1) with 53 random bits; independent of the
//! standard library's distribution implementations.
inline double uniform01(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace jchaos
