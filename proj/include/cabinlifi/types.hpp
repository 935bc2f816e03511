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

#ifndef CABINLIFI_TYPES_HPP
#define CABINLIFI_TYPES_HPP

#include <Eigen/Core>

#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cabinlifi
{

// Global frame, centimetres. y is up, the cabin extends along z.
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

// Speed of light in cm/ns.
inline constexpr double kSpeedOfLight = 29.9792458;

// Self-intersection guard for ray queries, cm.
inline constexpr double kRayEpsilon = 1e-6;

inline constexpr double kPi = std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

enum class Band
{
    ir,
    vl
};

std::string to_string(Band band);
Band band_from_string(const std::string &name);

enum class CabinVariant
{
    simplified,
    realistic
};

std::string to_string(CabinVariant variant);
CabinVariant cabin_variant_from_string(const std::string &name);

//! Whole-string decimal parse. Unlike std::stod, values that underflow to a
//! subnormal or zero are accepted. Throws std::invalid_argument otherwise.
double parse_number(std::string_view text);

// Invalid user input: scenario files, curve files, command-line values.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Corrupt or incompatible ray data bank.
class RdbError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

} // namespace cabinlifi

#endif
