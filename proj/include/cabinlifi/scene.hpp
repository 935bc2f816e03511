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

#ifndef CABINLIFI_SCENE_HPP
#define CABINLIFI_SCENE_HPP

#include "cabinlifi/photometry.hpp"
#include "cabinlifi/types.hpp"

#include <Eigen/Geometry>

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cabinlifi
{

//! Planar convex polygon with a material.
struct Surface
{
    int id = 0;
    std::vector<Vec3> vertices;
    Vec3 normal = Vec3::Zero();
    int material_id = 0;
};

// Builds a surface with the normal of the vertex winding (right-hand rule).
// Throws std::invalid_argument on non-planar, non-convex or degenerate input.
Surface make_surface(int id, std::vector<Vec3> vertices, int material_id);

struct PlacedSource
{
    std::string name;
    Vec3 position = Vec3::Zero();
    double orientation_deg = 0.0; // rotation about z; 0 aims straight down
    int rows = 4;
    int cols = 4;
    double pitch_mm = 4.0;
    double power_total = 16.0; // W
    int emitter = 0;           // index into CabinScene::source_models

    int chips() const { return rows * cols; }
    Vec3 aim() const;
    //! Chip centres, row-major, on the plane normal to aim().
    std::vector<Vec3> chip_positions() const;
};

struct PlacedDetector
{
    std::string name;
    Vec3 position = Vec3::Zero();
    Vec3 normal = Vec3::UnitY();
    double width = 1.0;  // cm
    double height = 1.0; // cm
    int receiver = 0;    // index into CabinScene::detector_models

    double area() const { return width * height; }
    //! Corners of the active area, counter-clockwise seen from the normal side.
    std::array<Vec3, 4> corners() const;
};

struct Material
{
    std::string name;
    MaterialSpectrum spectrum;
};

struct Hit
{
    enum class Kind
    {
        surface,
        detector
    };
    Kind kind = Kind::surface;
    int index = 0;     // surface or detector index
    int primitive = 0; // accelerator id, usable as ignore id
    Vec3 point = Vec3::Zero();
    Vec3 normal = Vec3::Zero(); // geometric normal, not face-forwarded
    double distance = 0.0;
};

//! Immutable scene with a bounding-volume hierarchy over all surfaces and
//! detector areas. Safe to share between threads.
class CabinScene
{
  public:
    CabinScene(std::vector<Surface> surfaces, std::vector<PlacedSource> sources, std::vector<PlacedDetector> detectors,
               std::vector<Material> materials, std::vector<SourceModel> source_models,
               std::vector<DetectorModel> detector_models);

    const std::vector<Surface> &surfaces() const { return surfaces_; }
    const std::vector<PlacedSource> &sources() const { return sources_; }
    const std::vector<PlacedDetector> &detectors() const { return detectors_; }
    const std::vector<Material> &materials() const { return materials_; }
    const std::vector<SourceModel> &source_models() const { return source_models_; }
    const std::vector<DetectorModel> &detector_models() const { return detector_models_; }

    int find_source(const std::string &name) const;
    int find_detector(const std::string &name) const;

    // Nearest hit with distance > kRayEpsilon, skipping primitive `ignore`.
    std::optional<Hit> intersect(const Vec3 &origin, const Vec3 &direction, int ignore = -1) const;
    // Exhaustive scan with identical semantics; test oracle.
    std::optional<Hit> intersect_brute_force(const Vec3 &origin, const Vec3 &direction, int ignore = -1) const;

    int primitive_count() const { return static_cast<int>(prims_.size()); }

  private:
    struct Primitive
    {
        Vec3 normal;
        double offset; // normal . x = offset on the plane
        // Rectangles: corner, unit edge axes and edge lengths.
        bool rectangle = false;
        Vec3 corner, axis_u, axis_v;
        double len_u = 0.0, len_v = 0.0;
        // Other convex polygons: vertices and inward in-plane edge normals.
        std::vector<Vec3> vertices;
        std::vector<Vec3> edge_normals;
        Eigen::AlignedBox3d box;
        Hit::Kind kind;
        int index;
        int key; // tie-break: detectors by index, surfaces by id
    };
    struct Node
    {
        Eigen::AlignedBox3d box;
        int right = -1; // internal: second child (first child is the next node)
        int first = 0;  // leaf: primitive range in order_
        int count = 0;  // 0 for internal nodes
        int axis = 0;   // internal: split axis
    };

    bool hit_primitive(const Primitive &p, const Vec3 &o, const Vec3 &d, double t_max, double &t) const;
    int build(int first, int count);
    Hit make_hit(int prim, const Vec3 &o, const Vec3 &d, double t) const;

    std::vector<Surface> surfaces_;
    std::vector<PlacedSource> sources_;
    std::vector<PlacedDetector> detectors_;
    std::vector<Material> materials_;
    std::vector<SourceModel> source_models_;
    std::vector<DetectorModel> detector_models_;

    std::vector<Primitive> prims_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
};

//! Signed aim angle in degrees for a light over a target: arctan(dx / drop).
double aim_rotation(const Vec3 &source_xz, const Vec3 &target_xz, double drop);

// ---- configuration ------------------------------------------------------

struct SeatPlacement
{
    std::string label; // e.g. "30B"
    Vec3 origin = Vec3::Zero();
};

struct ExtraSurface
{
    std::vector<Vec3> vertices;
    std::string material;
};

struct SceneConfig
{
    CabinVariant variant = CabinVariant::simplified;
    Band band = Band::ir;

    double length = 760.0;      // cabin extent along z, cm
    double segment = 40.0;      // hull quads are split every `segment` cm along z
    int tessellation = 32;      // segments per curved side wall (realistic)
    std::vector<Vec2> section;  // cross-section override (x, y), counter-clockwise

    std::vector<SeatPlacement> seats;
    std::vector<PlacedSource> sources;
    std::vector<PlacedDetector> detectors;
    std::vector<ExtraSurface> extra_surfaces;

    std::string hull_material = "plastic";
    std::string floor_material = "carpet";
    std::string seat_material = "fabric";

    double source_fwhm = 120.0;
    std::optional<double> detector_fwhm; // band default when unset
    std::optional<std::filesystem::path> source_spectrum_csv;
    std::optional<std::filesystem::path> source_angular_csv;
    std::optional<std::filesystem::path> detector_spectrum_csv;
    std::optional<std::filesystem::path> detector_angular_csv;
    std::map<std::string, std::filesystem::path> material_csv; // name -> reflectance
    int scatter_count = 5;

    //! Three seat rows, three reading lights and nine detectors of the
    //! reference layout.
    static SceneConfig defaults(Band band = Band::ir);
};

//! Default cross-sections, (x, y) in cm, counter-clockwise.
std::vector<Vec2> simplified_section();
std::vector<Vec2> realistic_section(int tessellation);

//! Axis-aligned boxes (min, max) making up one seat at the given origin.
std::vector<Eigen::AlignedBox3d> seat_boxes(const Vec3 &origin);

//! Extruded-section cabin with seats, sources and detectors. Throws
//! ConfigError when seats or detectors fall outside the hull.
CabinScene build_simplified_cabin(const SceneConfig &config);
CabinScene build_realistic_cabin(const SceneConfig &config);
CabinScene build_cabin(const SceneConfig &config);

//! Point-in-polygon for the cabin cross-section.
bool section_contains(const std::vector<Vec2> &section, const Vec2 &p);

} // namespace cabinlifi

#endif
