// SPDX-License-Identifier: Apache-2.0
//
// relaycap: capacity bounds for Gaussian MIMO relay channels
// Copyright (C) 2026 The relaycap authors
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
#include <numbers>

namespace relaycap
{

/// Counter-based 64-bit generator.
///
/// The key is derived from (seed, stream) and the n-th output is
/// splitmix64_finalize(key + n * 0x9E3779B97F4A7C15). Outputs depend only on
/// (seed, stream, n), so streams can be generated independently and in any
/// order. Uniform doubles take the top 53 bits; Gaussian pairs use Box-Muller.
class CounterRng
{
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(finalize(finalize(seed) ^ (stream * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull)))
    {
    }

    static constexpr std::uint64_t finalize(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return finalize(key_ + (counter_++) * 0x9E3779B97F4A7C15ull); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_open0() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal N(0, 1). Consumes two uniforms; returns the cosine branch.
    double normal()
    {
        const double u1 = uniform_open0();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Circularly-symmetric CN(0, 1): both Box-Muller branches, each scaled to variance 1/2.
    std::complex<double> complex_normal()
    {
        const double u1 = uniform_open0();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(theta), r * std::sin(theta)};
    }

    std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace relaycap
