// SPDX-License-Identifier: Apache-2.0
//
// cabinlifi: reading-light LiFi channel and DCO-OFDM link simulator
// Copyright (C) 2026 The cabinlifi authors
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

#ifndef CABINLIFI_RNG_HPP
#define CABINLIFI_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace cabinlifi
{

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derives an independent stream key from a seed and a list of counters,
// e.g. (seed, source, chip, ray index).
constexpr std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> counters)
{
    std::uint64_t key = mix64(seed ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t c : counters)
        key = mix64(key ^ mix64(c + 0x9e3779b97f4a7c15ULL));
    return key;
}

// Counter-based generator: state advances by a Weyl increment and each
// output is the mixed state. Satisfies UniformRandomBitGenerator.
class CounterRng
{
  public:
    using result_type = std::uint64_t;

    explicit constexpr CounterRng(std::uint64_t key) : state_{key} {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()()
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    // Uniform on [0, 1) with 53 random bits.
    constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

} // namespace cabinlifi

#endif
