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

#ifndef CABINLIFI_CONFIG_HPP
#define CABINLIFI_CONFIG_HPP

#include "cabinlifi/ofdm.hpp"
#include "cabinlifi/raytracer.hpp"
#include "cabinlifi/scene.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cabinlifi
{

struct Link
{
    std::string source;
    std::string detector;
};

//! Everything a pipeline run needs. Loaded from JSON; command-line flags
//! override individual fields.
struct ScenarioConfig
{
    SceneConfig scene;
    TraceConfig trace;
    std::vector<Link> links;

    double dw = 0.2; // ns
    int taps = 7;

    OfdmConfig ofdm;
    double i_min = 100.0;   // mA
    double i_max = 700.0;   // mA
    double beta = 400.0;    // mA
    double beta_db = 19.19; // dB
    TapNormalization normalization = TapNormalization::raw;
    TapLayout layout = TapLayout::compact;
    std::vector<double> snr_db;
    std::uint64_t min_bits = 1000000;

    std::uint64_t seed = 1;
    std::filesystem::path output_dir;

    //! Reference layout with the band's tracing defaults and links r1-C1,
    //! r2-B2, r3-A3.
    static ScenarioConfig defaults(Band band = Band::ir);

    ClippingModel clipping() const { return ClippingModel::from_bias_db(beta, beta_db, i_min, i_max); }

    //! Throws ConfigError on inconsistent values or missing curve files.
    void validate() const;

    //! Sorted-key JSON of every field that affects results. Excludes the
    //! seed, output directory and thread count. Parses back to an
    //! equivalent configuration.
    std::string canonical_json() const;
    std::uint64_t digest() const;
};

//! Parses a scenario document. Relative curve paths resolve against
//! `base_dir`; `origin` prefixes diagnostics (usually the file name).
//! Syntax errors report line and column, value errors the field path.
ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path &base_dir = {},
                              std::string_view origin = "<scenario>");
ScenarioConfig load_scenario(const std::filesystem::path &path);

//! `# digest=<hex> seed=<n>`
std::string artifact_stamp(std::uint64_t digest, std::uint64_t seed);
//! Parses a stamp line; returns false when the line is not a stamp.
bool parse_stamp(std::string_view line, std::uint64_t &digest, std::uint64_t &seed);

std::string to_string(TapNormalization n);
std::string to_string(TapLayout l);

} // namespace cabinlifi

#endif
