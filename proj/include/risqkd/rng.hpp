// Copyright 2026 The risqkd Authors
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
#include <string_view>

#include <boost/random/mersenne_twister.hpp>

namespace risqkd {

/// Engine used for every seeded draw in the library. Boost's distributions
/// are implementation-fixed, so (seed, config) replays across platforms.
using Rng = boost::random::mt19937_64;
inline constexpr std::string_view kRngName = "mt19937_64";

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Child seed for (master, elevation, N, stream). The elevation enters as
/// round(deg * 1e6) so 20 and 20.0000001 deg are distinct streams while
/// re-parsed config values map to the same one. Adding sweep points never
/// perturbs the seeds of existing points.
std::uint64_t derive_seed(std::uint64_t master, double elevation_deg, std::uint64_t n_elements,
                          std::uint64_t stream);

/// Stream tags for derive_seed.
enum class SeedStream : std::uint64_t {
    cascade_quantum = 1,
    cascade_classical = 2,
    fading = 3,
    solver = 4,
};

std::uint64_t derive_seed(std::uint64_t master, double elevation_deg, std::uint64_t n_elements,
                          SeedStream stream, std::uint64_t trial = 0);

}  // namespace risqkd
