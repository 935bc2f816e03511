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

#ifndef CABINLIFI_RAYTRACER_HPP
#define CABINLIFI_RAYTRACER_HPP

#include "cabinlifi/scene.hpp"
#include "cabinlifi/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace cabinlifi
{

struct Ray
{
    Vec3 origin = Vec3::Zero();
    Vec3 direction = Vec3::UnitZ();
    double power = 0.0;      // W
    double wavelength = 0.0; // um
    double elapsed = 0.0;    // ns
    int kappa = 0;           // bounce order
    double rel_intensity = 1.0;
};

struct HitRecord
{
    std::uint16_t detector_id = 0;
    std::uint8_t kappa = 0;
    double wavelength = 0.0; // um
    double t = 0.0;          // ns
    double power = 0.0;      // W, after detector responsivity

    friend bool operator==(const HitRecord &, const HitRecord &) = default;
};

struct TraceConfig
{
    std::uint64_t rays_per_chip = 10000;
    double min_rel_intensity = 1e-4;
    int kappa_max = 4;
    int scatter_count = 0; // 0: use each material's own count
    Band band = Band::ir;
    std::uint64_t seed = 1;

    // Extra primaries per chip traced for the direct path only. When
    // non-zero, zero-order hits of the main pool are discarded and this pool
    // supplies the line-of-sight component with lower variance.
    std::uint64_t los_rays_per_chip = 0;

    // Upper bound on primaries * nu_s^kappa_max.
    double ray_budget = 1e12;
    int threads = 0; // 0: all hardware threads

    //! kappa_max = 4, min_rel = 1e-4 for IR; 6 and 1e-5 for VL.
    static TraceConfig defaults(Band band);
    void validate() const;
};

struct TraceMetadata
{
    std::uint64_t seed = 0;
    std::uint64_t rays_per_chip = 0;
    std::uint64_t los_rays_per_chip = 0;
    double min_rel_intensity = 0.0;
    int kappa_max = 0;
    int scatter_count = 0;
    Band band = Band::ir;
    std::string source;       // traced source name
    double source_power = 0;  // P_S, W
    int chips = 0;

    friend bool operator==(const TraceMetadata &, const TraceMetadata &) = default;
};

//! Detector hits of one traced source, grouped by detector and sorted by time.
struct RayDataBank
{
    std::uint64_t digest = 0;  // FNV-1a of scenario_json
    std::string scenario_json; // configuration that produced the bank
    TraceMetadata metadata;
    std::vector<std::string> detector_names;
    std::vector<std::vector<HitRecord>> hits; // indexed by detector id

    // Launched power per bounce generation. Diagnostic, not persisted.
    std::vector<double> launched_power;

    std::size_t record_count() const;
    std::size_t hit_count(int detector) const { return hits.at(static_cast<std::size_t>(detector)).size(); }
    int find_detector(const std::string &name) const;
    //! Stable sort by t within each detector.
    void finalize();
};

//! Traces one source of the scene.
RayDataBank trace(const CabinScene &scene, int source, const TraceConfig &config);

//! Children of a ray reflecting on a diffuse surface. `u` supplies 2 uniform
//! variates per child.
std::vector<Ray> emit_diffuse_children(const Ray &parent, const Vec3 &hit_normal, double reflectance, int nu_s,
                                       std::span<const double> u);

//! Responsivity applied to a detector hit: angular(theta) * spectral(lambda).
//! Zero for grazing or back-side incidence.
double detector_hit_weight(const DetectorModel &model, double cos_incidence, double wavelength_um);

// ---- persistence --------------------------------------------------------

inline constexpr std::uint16_t kRdbVersion = 1;

void save_rdb(const RayDataBank &bank, const std::filesystem::path &path);
std::vector<char> serialize_rdb(const RayDataBank &bank);
//! Throws RdbError on bad magic, version mismatch, truncation, or a digest
//! that does not match the embedded scenario (or `expected_digest` if given).
RayDataBank load_rdb(const std::filesystem::path &path, std::uint64_t expected_digest = 0);
RayDataBank deserialize_rdb(std::span<const char> bytes, std::uint64_t expected_digest = 0);
//! Columns: detector_id,kappa,wavelength_um,t_ns,power_w.
void export_rdb_csv(const RayDataBank &bank, const std::filesystem::path &path);

} // namespace cabinlifi

#endif
