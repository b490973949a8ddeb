// SPDX-License-Identifier: Apache-2.0
//
// cellfree-sim: downlink rate simulator for cell-free massive MIMO
// Copyright (C) 2026 cellfree-sim contributors
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

#ifndef CELLFREE_RNG_HPP
#define CELLFREE_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace cellfree {

// SplitMix64 step (Steele/Lea/Flood mixing constants).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives the seed of an independent substream from a base seed and up to
// three stream indices. Every parallel work unit (snapshot, fading block)
// gets its randomness from substream_seed(base, ...) so that results do not
// depend on worker count or scheduling.
inline std::uint64_t substream_seed(std::uint64_t base, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = base;
    (void)splitmix64(s);
    s ^= a;
    (void)splitmix64(s);
    s ^= b;
    (void)splitmix64(s);
    s ^= c;
    return splitmix64(s);
}

// Random source used throughout the library. Uniform bits come from
// std::mt19937_64; normal variates use the polar (Marsaglia) method so the
// draw sequence is pinned by this file and not by the standard library's
// normal_distribution implementation.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer on [0, n), n >= 1. Fixed-point multiply; the bias is
    // below 2^-53 for any n this library uses.
    int uniform_int(int n) {
        const unsigned __int128 wide =
            static_cast<unsigned __int128>(gen_()) * static_cast<unsigned __int128>(n);
        return static_cast<int>(wide >> 64);
    }

    // Standard normal N(0, 1).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double r = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * r;
        have_spare_ = true;
        return u * r;
    }

    // Circularly-symmetric complex normal CN(0, 1): unit total variance,
    // independent real/imaginary parts of variance 1/2.
    std::complex<double> cnormal() {
        const double x = normal();
        const double y = normal();
        return {x * M_SQRT1_2, y * M_SQRT1_2};
    }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace cellfree

#endif
