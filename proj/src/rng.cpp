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

#include "risqkd/rng.hpp"

#include <cmath>

namespace risqkd {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, double elevation_deg, std::uint64_t n_elements,
                          std::uint64_t stream) {
    const auto micro_deg = static_cast<std::int64_t>(std::llround(elevation_deg * 1e6));
    std::uint64_t h = mix64(master);
    h = mix64(h ^ static_cast<std::uint64_t>(micro_deg));
    h = mix64(h ^ n_elements);
    h = mix64(h ^ stream);
    return h;
}

std::uint64_t derive_seed(std::uint64_t master, double elevation_deg, std::uint64_t n_elements,
                          SeedStream stream, std::uint64_t trial) {
    const auto base =
        derive_seed(master, elevation_deg, n_elements, static_cast<std::uint64_t>(stream));
    return trial == 0 ? base : mix64(base ^ trial);
}

}  // namespace risqkd
