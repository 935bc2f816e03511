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

// Small scenes and oracles shared by the unit tests.

#ifndef CABINLIFI_TESTS_SUPPORT_HPP
#define CABINLIFI_TESTS_SUPPORT_HPP

#include "cabinlifi/scene.hpp"

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>

namespace cabinlifi::testing
{

// Closed axis-aligned box with inward normals and one material.
inline std::vector<Surface> box_surfaces(const Vec3 &lo, const Vec3 &hi, int material_id, int first_id = 0)
{
    std::vector<Surface> out;
    const Vec3 c = 0.5 * (lo + hi);
    auto face = [&](std::vector<Vec3> v) {
        Surface s = make_surface(first_id + static_cast<int>(out.size()), v, material_id);
        const Vec3 centroid = (v[0] + v[1] + v[2] + v[3]) / 4.0;
        if (s.normal.dot(c - centroid) < 0.0)
        {
            std::reverse(v.begin(), v.end());
            s = make_surface(s.id, v, material_id);
        }
        out.push_back(s);
    };
    const double x0 = lo.x(), y0 = lo.y(), z0 = lo.z(), x1 = hi.x(), y1 = hi.y(), z1 = hi.z();
    face({{x0, y0, z0}, {x1, y0, z0}, {x1, y0, z1}, {x0, y0, z1}}); // floor
    face({{x0, y1, z0}, {x1, y1, z0}, {x1, y1, z1}, {x0, y1, z1}}); // ceiling
    face({{x0, y0, z0}, {x0, y1, z0}, {x0, y1, z1}, {x0, y0, z1}});
    face({{x1, y0, z0}, {x1, y1, z0}, {x1, y1, z1}, {x1, y0, z1}});
    face({{x0, y0, z0}, {x1, y0, z0}, {x1, y1, z0}, {x0, y1, z0}});
    face({{x0, y0, z1}, {x1, y0, z1}, {x1, y1, z1}, {x0, y1, z1}});
    return out;
}

inline Material flat_material(double reflectance, int nu_s = 5)
{
    return {"flat", MaterialSpectrum{SpectralCurve::constant(reflectance), nu_s}};
}

inline SourceModel flat_source(double order = 1.0)
{
    return SourceModel{SpectralCurve::constant(1.0, 0.8, 0.9), AngularProfile::lambertian(order), 120.0};
}

inline DetectorModel cosine_detector()
{
    return make_detector_model(SpectralCurve::constant(1.0), AngularProfile::lambertian(1.0));
}

inline PlacedSource point_source(const Vec3 &p, double power = 1.0)
{
    PlacedSource s;
    s.name = "s";
    s.position = p;
    s.rows = 1;
    s.cols = 1;
    s.power_total = power;
    return s;
}

inline PlacedDetector detector_at(const std::string &name, const Vec3 &p, double size = 1.0,
                                  const Vec3 &normal = Vec3::UnitY())
{
    PlacedDetector d;
    d.name = name;
    d.position = p;
    d.normal = normal;
    d.width = size;
    d.height = size;
    return d;
}

// Unique scratch directory under the system temp dir, removed on scope exit.
class TempDir
{
  public:
    explicit TempDir(const std::string &tag)
    {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("cabinlifi_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;
    const std::filesystem::path &path() const { return path_; }

  private:
    std::filesystem::path path_;
};

} // namespace cabinlifi::testing

#endif
