// SPDX-License-Identifier: Apache-2.0
//
// rpabeam - hybrid beamforming with pattern-reconfigurable antennas
// Copyright (C) 2026 the rpabeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "rpabeam/common.hpp"

namespace rpabeam {

/// One splitmix64 step. Used to whiten seed material.
inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from (base seed, stream index).
/// Parallel and serial consumers of the same (seed, index) pair see
/// identical streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = seed ^ (index + 0x9E3779B97F4A7C15ULL);
    std::uint64_t b = splitmix64(s);
    return a ^ (b + 0x165667B19E3779F9ULL + (a << 6) + (a >> 2));
}

/// Deterministic random source. The distribution transforms are written out
/// explicitly instead of using std::*_distribution, whose output sequences
/// are implementation defined; this keeps generated datasets byte-identical
/// across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_raw() { return gen_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (two uniforms per draw, no caching).
    double normal()
    {
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    /// Circularly-symmetric complex Gaussian CN(0, 1).
    cplx cgauss()
    {
        double re = normal();
        double im = normal();
        return cplx(re, im) / std::sqrt(2.0);
    }

    /// Unbiased integer in [0, n) via rejection.
    std::uint64_t integer(std::uint64_t n)
    {
        if (n == 0)
            throw std::invalid_argument("Rng::integer: n must be positive");
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t x = 0;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

  private:
    std::mt19937_64 gen_;
};

} // namespace rpabeam
