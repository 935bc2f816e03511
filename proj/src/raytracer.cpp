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

#include "cabinlifi/raytracer.hpp"

#include "cabinlifi/digest.hpp"
#include "cabinlifi/parallel.hpp"
#include "cabinlifi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cabinlifi
{

TraceConfig TraceConfig::defaults(Band band)
{
    TraceConfig c;
    c.band = band;
    if (band == Band::vl)
    {
        c.kappa_max = 6;
        c.min_rel_intensity = 1e-5;
    }
    return c;
}

void TraceConfig::validate() const
{
    if (rays_per_chip < 1)
        throw ConfigError("trace: rays_per_chip must be at least 1");
    if (!(min_rel_intensity > 0.0 && min_rel_intensity < 1.0))
        throw ConfigError("trace: min_rel_intensity must lie in (0, 1)");
    if (kappa_max < 0 || kappa_max > 255)
        throw ConfigError("trace: kappa_max must lie in [0, 255]");
    if (scatter_count < 0)
        throw ConfigError("trace: scatter_count must be non-negative");
    if (los_rays_per_chip != 0 && los_rays_per_chip < rays_per_chip)
        throw ConfigError("trace: los_rays_per_chip must be 0 or at least rays_per_chip");
    if (!(ray_budget > 0.0))
        throw ConfigError("trace: ray_budget must be positive");
}

std::size_t RayDataBank::record_count() const
{
    std::size_t n = 0;
    for (const auto &h : hits)
        n += h.size();
    return n;
}

int RayDataBank::find_detector(const std::string &name) const
{
    for (std::size_t i = 0; i < detector_names.size(); ++i)
        if (detector_names[i] == name)
            return static_cast<int>(i);
    throw ConfigError("detector '" + name + "' not present in ray data bank");
}

void RayDataBank::finalize()
{
    for (auto &list : hits)
        std::stable_sort(list.begin(), list.end(), [](const HitRecord &a, const HitRecord &b) { return a.t < b.t; });
}

double detector_hit_weight(const DetectorModel &model, double cos_incidence, double wavelength_um)
{
    if (!(cos_incidence > 1e-12))
        return 0.0;
    const double theta = rad2deg(std::acos(std::min(cos_incidence, 1.0)));
    return model.angular_responsivity(theta) * model.spectral_responsivity(wavelength_um);
}

namespace
{

template <class Out>
void spawn_children(const Ray &parent, const Vec3 &n, double reflectance, int nu_s, std::span<const double> u,
                    Out &&out)
{
    const Eigen::Matrix3d frame = frame_from_normal(n);
    const double share = reflectance / nu_s;
    for (int i = 0; i < nu_s; ++i)
    {
        Ray c;
        c.origin = parent.origin;
        c.direction = (frame * sample_cosine_hemisphere(u[2 * i], u[2 * i + 1])).normalized();
        c.power = parent.power * share;
        c.wavelength = parent.wavelength;
        c.elapsed = parent.elapsed;
        c.kappa = parent.kappa + 1;
        c.rel_intensity = parent.rel_intensity * share;
        out(c);
    }
}

struct Pending
{
    Ray ray;
    int ignore;
};

struct ChunkResult
{
    std::vector<HitRecord> records;
    std::vector<double> launched;
};

} // namespace

std::vector<Ray> emit_diffuse_children(const Ray &parent, const Vec3 &hit_normal, double reflectance, int nu_s,
                                       std::span<const double> u)
{
    if (!(reflectance >= 0.0 && reflectance <= 1.0))
        throw std::invalid_argument("emit_diffuse_children: reflectance must lie in [0, 1]");
    if (nu_s < 1 || u.size() < static_cast<std::size_t>(2 * nu_s))
        throw std::invalid_argument("emit_diffuse_children: need nu_s >= 1 and 2 variates per child");
    std::vector<Ray> out;
    out.reserve(static_cast<std::size_t>(nu_s));
    spawn_children(parent, hit_normal.normalized(), reflectance, nu_s, u, [&](const Ray &r) { out.push_back(r); });
    return out;
}

RayDataBank trace(const CabinScene &scene, int source, const TraceConfig &config)
{
    config.validate();
    if (source < 0 || source >= static_cast<int>(scene.sources().size()))
        throw ConfigError("trace: source index out of range");
    const PlacedSource &src = scene.sources()[static_cast<std::size_t>(source)];
    const SourceModel &emitter = scene.source_models()[static_cast<std::size_t>(src.emitter)];

    int max_nu = config.scatter_count;
    if (max_nu == 0)
        for (const auto &m : scene.materials())
            max_nu = std::max(max_nu, m.spectrum.scatter_count);
    max_nu = std::max(max_nu, 1);

    const std::uint64_t chips = static_cast<std::uint64_t>(src.chips());
    const double primaries = static_cast<double>(chips * config.rays_per_chip);
    if (primaries * std::pow(static_cast<double>(max_nu), config.kappa_max) > config.ray_budget)
        throw ConfigError("trace: primaries * nu_s^kappa_max exceeds the ray budget");

    const std::vector<Vec3> chip_pos = src.chip_positions();
    const Eigen::Matrix3d aim_frame = frame_from_normal(src.aim());
    const double p_main = src.power_total / primaries;
    const double p_los =
        config.los_rays_per_chip ? src.power_total / static_cast<double>(chips * config.los_rays_per_chip) : 0.0;
    const bool split_los = config.los_rays_per_chip > 0;

    // Work items: main pool first, then the direct-path pool; chip-major.
    const std::uint64_t n_main = chips * config.rays_per_chip;
    const std::uint64_t n_total = n_main + chips * config.los_rays_per_chip;
    constexpr std::uint64_t kChunk = 64;
    const std::size_t n_chunks = static_cast<std::size_t>((n_total + kChunk - 1) / kChunk);
    std::vector<ChunkResult> chunks(n_chunks);

    parallel_for(n_chunks, config.threads, [&](std::size_t chunk) {
        ChunkResult &res = chunks[chunk];
        res.launched.assign(static_cast<std::size_t>(config.kappa_max) + 1, 0.0);
        std::vector<Pending> stack;
        double u[512];
        const std::uint64_t begin = chunk * kChunk, end = std::min(n_total, begin + kChunk);
        for (std::uint64_t item = begin; item < end; ++item)
        {
            const bool los_pool = item >= n_main;
            const std::uint64_t local = los_pool ? item - n_main : item;
            const std::uint64_t per_chip = los_pool ? config.los_rays_per_chip : config.rays_per_chip;
            const std::uint64_t chip = local / per_chip, index = local % per_chip;
            CounterRng rng(stream_key(config.seed, {static_cast<std::uint64_t>(source), los_pool ? 1u : 0u, chip, index}));

            Ray r;
            r.origin = chip_pos[chip];
            r.wavelength = sample_wavelength(emitter.spectrum, rng.uniform());
            const double u1 = rng.uniform(), u2 = rng.uniform();
            r.direction = (aim_frame * emitter.directivity.sample_direction(u1, u2)).normalized();
            r.power = los_pool ? p_los : p_main;
            const int kappa_limit = los_pool ? 0 : config.kappa_max;

            stack.push_back({r, -1});
            while (!stack.empty())
            {
                Pending cur = stack.back();
                stack.pop_back();
                res.launched[static_cast<std::size_t>(cur.ray.kappa)] += cur.ray.power;

                const auto hit = scene.intersect(cur.ray.origin, cur.ray.direction, cur.ignore);
                if (!hit)
                    continue;
                Ray at = cur.ray;
                at.origin = hit->point;
                at.elapsed += hit->distance / kSpeedOfLight;

                if (hit->kind == Hit::Kind::detector)
                {
                    if (split_los && !los_pool && at.kappa == 0)
                        continue;
                    const PlacedDetector &det = scene.detectors()[static_cast<std::size_t>(hit->index)];
                    const double cos_inc = -cur.ray.direction.dot(hit->normal);
                    if (cos_inc <= 0.0)
                        continue; // back side absorbs
                    const DetectorModel &rx = scene.detector_models()[static_cast<std::size_t>(det.receiver)];
                    const double w = detector_hit_weight(rx, cos_inc, at.wavelength);
                    res.records.push_back({static_cast<std::uint16_t>(hit->index), static_cast<std::uint8_t>(at.kappa),
                                           at.wavelength, at.elapsed, at.power * w});
                    continue;
                }

                if (at.kappa >= kappa_limit)
                    continue;
                const Surface &surf = scene.surfaces()[static_cast<std::size_t>(hit->index)];
                const MaterialSpectrum &mat = scene.materials()[static_cast<std::size_t>(surf.material_id)].spectrum;
                const double refl = mat.reflectance_at(at.wavelength);
                const int nu = config.scatter_count ? config.scatter_count : mat.scatter_count;
                if (!(refl > 0.0) || at.rel_intensity * refl / nu <= config.min_rel_intensity)
                    continue;
                for (int i = 0; i < 2 * nu; ++i)
                    u[i] = rng.uniform();
                const Vec3 n = hit->normal.dot(cur.ray.direction) < 0.0 ? hit->normal : Vec3(-hit->normal);
                // Pushed in reverse so the first child is traced first.
                const std::size_t base = stack.size();
                spawn_children(at, n, refl, nu, std::span<const double>(u, static_cast<std::size_t>(2 * nu)),
                               [&](const Ray &c) { stack.push_back({c, hit->primitive}); });
                std::reverse(stack.begin() + static_cast<std::ptrdiff_t>(base), stack.end());
            }
        }
    });

    RayDataBank bank;
    bank.metadata.seed = config.seed;
    bank.metadata.rays_per_chip = config.rays_per_chip;
    bank.metadata.los_rays_per_chip = config.los_rays_per_chip;
    bank.metadata.min_rel_intensity = config.min_rel_intensity;
    bank.metadata.kappa_max = config.kappa_max;
    bank.metadata.scatter_count = config.scatter_count;
    bank.metadata.band = config.band;
    bank.metadata.source = src.name;
    bank.metadata.source_power = src.power_total;
    bank.metadata.chips = src.chips();
    for (const auto &d : scene.detectors())
        bank.detector_names.push_back(d.name);
    bank.hits.resize(scene.detectors().size());
    bank.launched_power.assign(static_cast<std::size_t>(config.kappa_max) + 1, 0.0);
    for (const auto &c : chunks)
    {
        for (const auto &rec : c.records)
            bank.hits[rec.detector_id].push_back(rec);
        for (std::size_t k = 0; k < c.launched.size(); ++k)
            bank.launched_power[k] += c.launched[k];
    }
    bank.digest = fnv1a64(bank.scenario_json);
    bank.finalize();
    return bank;
}

} // namespace cabinlifi
