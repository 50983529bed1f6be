/*
 * Copyright 2026 The kcgflr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <random>

namespace kcgflr {

/// Addresses one reproducible pseudorandom stream.
///
/// The generator is std::mt19937_64 seeded through std::seed_seq with the
/// 32-bit halves of (seed, stream, lane). Both are fully specified by the
/// C++ standard, so draws are identical across platforms and standard
/// libraries. Uniforms take the top 53 bits of one engine output; normals
/// come from the Box-Muller transform, using both outputs of each pair.
/// Distinct (seed, stream, lane) triples give distinct seed sequences.
struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::uint64_t lane = 0;

    RngSpec with_lane(std::uint64_t l) const noexcept { return {seed, stream, l}; }
    friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

/// Stream id for replication `rep` at sample size `n`; injective for n, rep < 2^32.
std::uint64_t cell_stream(std::uint64_t n, std::uint64_t rep) noexcept;

class NormalStream {
public:
    explicit NormalStream(const RngSpec& spec);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double normal();

private:
    std::mt19937_64 engine_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace kcgflr
