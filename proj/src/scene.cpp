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

#include "cabinlifi/scene.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cabinlifi
{

namespace
{
constexpr double kPlanarTol = 1e-6;  // cm
constexpr double kInsideTol = 1e-7;  // cm, inclusive edge test
constexpr double kBoxPad = 1e-7;     // cm

Vec3 newell_normal(const std::vector<Vec3> &v)
{
    Vec3 n = Vec3::Zero();
    for (std::size_t i = 0; i < v.size(); ++i)
        n += v[i].cross(v[(i + 1) % v.size()]);
    return n;
}
} // namespace

Surface make_surface(int id, std::vector<Vec3> vertices, int material_id)
{
    if (vertices.size() < 3)
        throw std::invalid_argument("surface: at least 3 vertices required");
    for (const auto &v : vertices)
        if (!v.allFinite())
            throw std::invalid_argument("surface: non-finite vertex");
    Vec3 n = newell_normal(vertices);
    const double twice_area = n.norm();
    if (!(twice_area > 0.0))
        throw std::invalid_argument("surface: degenerate polygon");
    n /= twice_area;
    for (const auto &v : vertices)
        if (std::abs(n.dot(v - vertices[0])) > kPlanarTol)
            throw std::invalid_argument("surface: vertices are not coplanar");
    const std::size_t k = vertices.size();
    for (std::size_t i = 0; i < k; ++i)
    {
        const Vec3 e0 = vertices[(i + 1) % k] - vertices[i];
        const Vec3 e1 = vertices[(i + 2) % k] - vertices[(i + 1) % k];
        if (e0.cross(e1).dot(n) < -kPlanarTol * e0.norm() * e1.norm())
            throw std::invalid_argument("surface: polygon is not convex");
    }
    return Surface{id, std::move(vertices), n, material_id};
}

// ---- sources and detectors ----------------------------------------------

Vec3 PlacedSource::aim() const
{
    const double a = deg2rad(orientation_deg);
    return {std::sin(a), -std::cos(a), 0.0};
}

std::vector<Vec3> PlacedSource::chip_positions() const
{
    const double a = deg2rad(orientation_deg);
    const Vec3 u(std::cos(a), std::sin(a), 0.0);
    const Vec3 v = Vec3::UnitZ();
    const double pitch = 0.1 * pitch_mm;
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(chips()));
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            out.push_back(position + (c - 0.5 * (cols - 1)) * pitch * u + (r - 0.5 * (rows - 1)) * pitch * v);
    return out;
}

std::array<Vec3, 4> PlacedDetector::corners() const
{
    const Vec3 n = normal.normalized();
    const Vec3 ref = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitZ();
    const Vec3 u = (ref - ref.dot(n) * n).normalized();
    const Vec3 v = n.cross(u);
    const double hw = 0.5 * width, hh = 0.5 * height;
    return {position - hw * u - hh * v, position + hw * u - hh * v, position + hw * u + hh * v,
            position - hw * u + hh * v};
}

double aim_rotation(const Vec3 &source_xz, const Vec3 &target_xz, double drop)
{
    if (!(drop > 0.0))
        throw std::invalid_argument("aim_rotation: drop must be positive");
    return rad2deg(std::atan((target_xz.x() - source_xz.x()) / drop));
}

// ---- CabinScene ---------------------------------------------------------

CabinScene::CabinScene(std::vector<Surface> surfaces, std::vector<PlacedSource> sources,
                       std::vector<PlacedDetector> detectors, std::vector<Material> materials,
                       std::vector<SourceModel> source_models, std::vector<DetectorModel> detector_models)
    : surfaces_{std::move(surfaces)}, sources_{std::move(sources)}, detectors_{std::move(detectors)},
      materials_{std::move(materials)}, source_models_{std::move(source_models)},
      detector_models_{std::move(detector_models)}
{
    for (const auto &m : materials_)
        m.spectrum.validate();
    for (const auto &s : surfaces_)
    {
        if (s.material_id < 0 || s.material_id >= static_cast<int>(materials_.size()))
            throw ConfigError("surface " + std::to_string(s.id) + ": unresolved material id");
        if (std::abs(s.normal.norm() - 1.0) > 1e-9)
            throw ConfigError("surface " + std::to_string(s.id) + ": normal is not unit length");
    }
    for (const auto &s : sources_)
    {
        if (!(s.power_total > 0.0))
            throw ConfigError("source " + s.name + ": power must be positive");
        if (!(s.pitch_mm > 0.0) || s.rows < 1 || s.cols < 1)
            throw ConfigError("source " + s.name + ": invalid chip grid");
        if (s.emitter < 0 || s.emitter >= static_cast<int>(source_models_.size()))
            throw ConfigError("source " + s.name + ": unresolved emitter model");
    }
    for (const auto &m : source_models_)
        m.validate();
    if (detectors_.size() > 65535)
        throw ConfigError("too many detectors");
    for (const auto &d : detectors_)
    {
        if (!(d.width * d.height > 0.0))
            throw ConfigError("detector " + d.name + ": active area must be positive");
        if (d.receiver < 0 || d.receiver >= static_cast<int>(detector_models_.size()))
            throw ConfigError("detector " + d.name + ": unresolved receiver model");
    }

    auto add_prim = [this](std::vector<Vec3> verts, const Vec3 &n, Hit::Kind kind, int index, int key) {
        Primitive p;
        p.normal = n;
        p.offset = n.dot(verts[0]);
        p.kind = kind;
        p.index = index;
        p.key = key;
        for (const auto &v : verts)
            p.box.extend(v);
        p.box.min().array() -= kBoxPad;
        p.box.max().array() += kBoxPad;
        if (verts.size() == 4)
        {
            const Vec3 eu = verts[1] - verts[0], ev = verts[3] - verts[0];
            const Vec3 diag = verts[0] + eu + ev - verts[2];
            const double scale = eu.norm() * ev.norm();
            if (std::abs(eu.dot(ev)) <= 1e-12 * scale && diag.norm() <= 1e-9 * (eu.norm() + ev.norm()))
            {
                p.rectangle = true;
                p.corner = verts[0];
                p.len_u = eu.norm();
                p.len_v = ev.norm();
                p.axis_u = eu / p.len_u;
                p.axis_v = ev / p.len_v;
            }
        }
        if (!p.rectangle)
        {
            for (std::size_t i = 0; i < verts.size(); ++i)
                p.edge_normals.push_back(n.cross(verts[(i + 1) % verts.size()] - verts[i]).normalized());
            p.vertices = std::move(verts);
        }
        prims_.push_back(std::move(p));
    };
    for (std::size_t i = 0; i < surfaces_.size(); ++i)
        add_prim(surfaces_[i].vertices, surfaces_[i].normal, Hit::Kind::surface, static_cast<int>(i), surfaces_[i].id);
    for (std::size_t i = 0; i < detectors_.size(); ++i)
    {
        auto c = detectors_[i].corners();
        add_prim({c.begin(), c.end()}, detectors_[i].normal.normalized(), Hit::Kind::detector, static_cast<int>(i),
                 static_cast<int>(i));
    }

    order_.resize(prims_.size());
    std::iota(order_.begin(), order_.end(), 0);
    if (!prims_.empty())
        build(0, static_cast<int>(prims_.size()));
}

// Binned surface-area-heuristic build, depth-first node layout.
int CabinScene::build(int first, int count)
{
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    Eigen::AlignedBox3d box, centroids;
    for (int i = first; i < first + count; ++i)
    {
        box.extend(prims_[order_[i]].box);
        centroids.extend(prims_[order_[i]].box.center());
    }
    nodes_[id].box = box;

    auto area = [](const Eigen::AlignedBox3d &b) {
        if (b.isEmpty())
            return 0.0;
        const Vec3 s = b.sizes();
        return s.x() * s.y() + s.y() * s.z() + s.z() * s.x();
    };

    constexpr int kBins = 16;
    double best_cost = static_cast<double>(count) * area(box);
    int best_axis = -1;
    int best_bin = 0;
    if (count > 2)
    {
        for (int axis = 0; axis < 3; ++axis)
        {
            const double lo = centroids.min()[axis], hi = centroids.max()[axis];
            if (!(hi > lo))
                continue;
            Eigen::AlignedBox3d bin_box[kBins];
            int bin_count[kBins] = {};
            for (int i = first; i < first + count; ++i)
            {
                const auto &p = prims_[order_[i]];
                int b = static_cast<int>(kBins * (p.box.center()[axis] - lo) / (hi - lo));
                b = std::clamp(b, 0, kBins - 1);
                bin_box[b].extend(p.box);
                ++bin_count[b];
            }
            for (int s = 1; s < kBins; ++s)
            {
                Eigen::AlignedBox3d lb, rb;
                int lc = 0, rc = 0;
                for (int b = 0; b < s; ++b)
                {
                    lb.extend(bin_box[b]);
                    lc += bin_count[b];
                }
                for (int b = s; b < kBins; ++b)
                {
                    rb.extend(bin_box[b]);
                    rc += bin_count[b];
                }
                if (lc == 0 || rc == 0)
                    continue;
                const double cost = 0.125 * area(box) + lc * area(lb) + rc * area(rb);
                if (cost < best_cost)
                {
                    best_cost = cost;
                    best_axis = axis;
                    best_bin = s;
                }
            }
        }
    }

    if (best_axis < 0)
    {
        if (count <= 4)
        {
            nodes_[id].first = first;
            nodes_[id].count = count;
            return id;
        }
        // No useful SAH split; fall back to a median split.
        Eigen::Index axis;
        centroids.sizes().maxCoeff(&axis);
        best_axis = static_cast<int>(axis);
    }

    int mid;
    if (best_axis >= 0 && best_cost < static_cast<double>(count) * area(box))
    {
        const int axis = best_axis;
        const double lo = centroids.min()[axis], hi = centroids.max()[axis];
        auto it = std::stable_partition(order_.begin() + first, order_.begin() + first + count, [&](int a) {
            int b = static_cast<int>(kBins * (prims_[a].box.center()[axis] - lo) / (hi - lo));
            b = std::clamp(b, 0, kBins - 1);
            return b < best_bin;
        });
        mid = static_cast<int>(it - order_.begin());
    }
    else
    {
        mid = first + count / 2;
        const int axis = best_axis;
        std::nth_element(order_.begin() + first, order_.begin() + mid, order_.begin() + first + count,
                         [&](int a, int b) {
                             const double ca = prims_[a].box.center()[axis], cb = prims_[b].box.center()[axis];
                             return ca < cb || (ca == cb && a < b);
                         });
    }
    if (mid == first || mid == first + count)
        mid = first + count / 2;

    nodes_[id].axis = best_axis;
    build(first, mid - first);
    const int right = build(mid, first + count - mid);
    nodes_[id].right = right;
    return id;
}

bool CabinScene::hit_primitive(const Primitive &p, const Vec3 &o, const Vec3 &d, double t_max, double &t) const
{
    const double denom = p.normal.dot(d);
    if (std::abs(denom) < 1e-12)
        return false;
    t = (p.offset - p.normal.dot(o)) / denom;
    if (!(t > kRayEpsilon && t <= t_max))
        return false;
    const Vec3 x = o + t * d;
    if (p.rectangle)
    {
        const Vec3 r = x - p.corner;
        const double a = r.dot(p.axis_u), b = r.dot(p.axis_v);
        return a >= -kInsideTol && a <= p.len_u + kInsideTol && b >= -kInsideTol && b <= p.len_v + kInsideTol;
    }
    for (std::size_t i = 0; i < p.vertices.size(); ++i)
        if (p.edge_normals[i].dot(x - p.vertices[i]) < -kInsideTol)
            return false;
    return true;
}

Hit CabinScene::make_hit(int prim, const Vec3 &o, const Vec3 &d, double t) const
{
    const Primitive &p = prims_[prim];
    return Hit{p.kind, p.index, prim, o + t * d, p.normal, t};
}

namespace
{
// Deterministic ordering among equal-distance candidates.
struct Candidate
{
    double t = std::numeric_limits<double>::infinity();
    int kind = 0;
    int key = 0;
    int prim = -1;

    bool better(double t2, int kind2, int key2) const
    {
        if (t2 != t)
            return t2 < t;
        if (kind2 != kind)
            return kind2 > kind; // detectors win ties
        return key2 < key;
    }
};

bool slab(const Eigen::AlignedBox3d &b, const Vec3 &o, const Vec3 &inv, double t_max)
{
    double lo = 0.0, hi = t_max;
    for (int a = 0; a < 3; ++a)
    {
        const double t1 = (b.min()[a] - o[a]) * inv[a];
        const double t2 = (b.max()[a] - o[a]) * inv[a];
        lo = std::max(lo, std::min(t1, t2));
        hi = std::min(hi, std::max(t1, t2));
    }
    return lo <= hi;
}
} // namespace

std::optional<Hit> CabinScene::intersect(const Vec3 &origin, const Vec3 &direction, int ignore) const
{
    if (nodes_.empty())
        return std::nullopt;
    const Vec3 inv = direction.cwiseInverse();
    Candidate best;
    int stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0)
    {
        const Node &node = nodes_[stack[--top]];
        if (!slab(node.box, origin, inv, best.t))
            continue;
        if (node.count > 0)
        {
            for (int i = node.first; i < node.first + node.count; ++i)
            {
                const int id = order_[i];
                if (id == ignore)
                    continue;
                const Primitive &p = prims_[id];
                double t;
                if (!hit_primitive(p, origin, direction, best.t, t))
                    continue;
                const int kind = p.kind == Hit::Kind::detector ? 1 : 0;
                if (best.better(t, kind, p.key))
                    best = Candidate{t, kind, p.key, id};
            }
        }
        else
        {
            // Near child on top of the stack.
            const int near = static_cast<int>(&node - nodes_.data()) + 1;
            if (direction[node.axis] < 0.0)
            {
                stack[top++] = near;
                stack[top++] = node.right;
            }
            else
            {
                stack[top++] = node.right;
                stack[top++] = near;
            }
        }
    }
    if (best.prim < 0)
        return std::nullopt;
    return make_hit(best.prim, origin, direction, best.t);
}

std::optional<Hit> CabinScene::intersect_brute_force(const Vec3 &origin, const Vec3 &direction, int ignore) const
{
    Candidate best;
    for (int id = 0; id < static_cast<int>(prims_.size()); ++id)
    {
        if (id == ignore)
            continue;
        const Primitive &p = prims_[id];
        double t;
        if (!hit_primitive(p, origin, direction, std::numeric_limits<double>::infinity(), t))
            continue;
        const int kind = p.kind == Hit::Kind::detector ? 1 : 0;
        if (best.better(t, kind, p.key))
            best = Candidate{t, kind, p.key, id};
    }
    if (best.prim < 0)
        return std::nullopt;
    return make_hit(best.prim, origin, direction, best.t);
}

int CabinScene::find_source(const std::string &name) const
{
    for (std::size_t i = 0; i < sources_.size(); ++i)
        if (sources_[i].name == name)
            return static_cast<int>(i);
    throw ConfigError("unknown source '" + name + "'");
}

int CabinScene::find_detector(const std::string &name) const
{
    for (std::size_t i = 0; i < detectors_.size(); ++i)
        if (detectors_[i].name == name)
            return static_cast<int>(i);
    throw ConfigError("unknown detector '" + name + "'");
}

// ---- cabin construction -------------------------------------------------

std::vector<Vec2> simplified_section()
{
    return {{20, 0},    {370, 0},   {390, 25},  {390, 170}, {265, 170}, {255, 205},
            {230, 225}, {160, 225}, {135, 205}, {125, 170}, {0, 170},   {0, 25}};
}

std::vector<Vec2> realistic_section(int tessellation)
{
    if (tessellation < 1)
        throw ConfigError("tessellation must be at least 1");
    // Side walls follow a circular arc from the floor to the bin line; the
    // bins and ceiling crown match the simplified section.
    const Vec2 c(195.0, 100.0);
    const double r = 200.0;
    const double a0 = std::asin((0.0 - c.y()) / r);
    const double a1 = std::asin((170.0 - c.y()) / r);
    std::vector<Vec2> out;
    for (int i = 0; i <= tessellation; ++i)
    {
        const double a = a0 + (a1 - a0) * i / tessellation;
        out.emplace_back(c.x() + r * std::cos(a), c.y() + r * std::sin(a));
    }
    out.back().y() = 170.0;
    for (const Vec2 &p : {Vec2(265, 170), Vec2(255, 205), Vec2(230, 225), Vec2(160, 225), Vec2(135, 205),
                          Vec2(125, 170)})
        out.push_back(p);
    for (int i = 0; i <= tessellation; ++i)
    {
        const double a = a1 + (a0 - a1) * i / tessellation;
        out.emplace_back(c.x() - r * std::cos(a), c.y() + r * std::sin(a));
    }
    out.back().y() = 0.0;
    out.front().y() = 0.0;
    return out;
}

bool section_contains(const std::vector<Vec2> &section, const Vec2 &p)
{
    bool inside = false;
    for (std::size_t i = 0, j = section.size() - 1; i < section.size(); j = i++)
    {
        const Vec2 &a = section[i], &b = section[j];
        if ((a.y() > p.y()) != (b.y() > p.y()))
        {
            const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (p.x() < x)
                inside = !inside;
        }
    }
    return inside;
}

std::vector<Eigen::AlignedBox3d> seat_boxes(const Vec3 &o)
{
    auto box = [&o](double x0, double x1, double y0, double y1, double z0, double z1) {
        return Eigen::AlignedBox3d(o + Vec3(x0, y0, z0), o + Vec3(x1, y1, z1));
    };
    // Local origin: rear, left, at cushion base. Passengers face +z.
    return {
        box(2, 51, 0, 12, 0, 48),            // cushion
        box(2, 51, 12, 72, 0, 10),           // backrest
        box(10, 43, -o.y(), 0, 10, 38),      // pedestal down to the floor
        box(0, 2, 12, 32, 5, 45),            // armrests
        box(51, 53, 12, 32, 5, 45),
    };
}

SceneConfig SceneConfig::defaults(Band band)
{
    SceneConfig c;
    c.band = band;
    const double seat_x[] = {215.199, 268.199, 321.199};
    const char seat_letter[] = {'C', 'B', 'A'};
    const double row_z[] = {270.0, 351.0, 432.0};
    const int row_no[] = {31, 30, 29};
    for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s)
            c.seats.push_back({std::to_string(row_no[r]) + seat_letter[s], Vec3(seat_x[s], 42.643, row_z[r])});

    const double light_x[] = {289.199, 292.199, 295.199};
    const double alpha[] = {-33.0, 0.0, 33.0};
    for (int i = 0; i < 3; ++i)
    {
        PlacedSource s;
        s.name = "r" + std::to_string(i + 1);
        s.position = Vec3(light_x[i], 167.643, 408.0);
        s.orientation_deg = alpha[i];
        c.sources.push_back(s);
    }

    const double det_x[] = {221.699, 239.199, 256.699, 274.699, 292.199, 309.699, 327.699, 345.199, 362.699};
    for (int i = 0; i < 9; ++i)
    {
        PlacedDetector d;
        d.name = std::string(1, seat_letter[i / 3]) + std::to_string(i % 3 + 1);
        d.position = Vec3(det_x[i], 100.443, 408.0);
        c.detectors.push_back(d);
    }
    return c;
}

namespace
{

std::vector<Material> make_materials(const SceneConfig &config)
{
    std::vector<Material> out = {
        {"plastic", builtin::white_plastic(config.band)},
        {"fabric", builtin::seat_fabric(config.band)},
        {"carpet", builtin::carpet(config.band)},
    };
    for (auto &m : out)
        m.spectrum.scatter_count = config.scatter_count;
    for (const auto &[name, path] : config.material_csv)
    {
        MaterialSpectrum spec{load_spectral_curve(path), config.scatter_count};
        auto it = std::find_if(out.begin(), out.end(), [&](const Material &m) { return m.name == name; });
        if (it != out.end())
            it->spectrum = std::move(spec);
        else
            out.push_back({name, std::move(spec)});
    }
    return out;
}

int material_id(const std::vector<Material> &materials, const std::string &name)
{
    for (std::size_t i = 0; i < materials.size(); ++i)
        if (materials[i].name == name)
            return static_cast<int>(i);
    throw ConfigError("unknown material '" + name + "'");
}

SourceModel make_source_model(const SceneConfig &c)
{
    SpectralCurve spectrum =
        c.source_spectrum_csv ? load_spectral_curve(*c.source_spectrum_csv) : builtin::source_spectrum(c.band);
    if (!(c.source_fwhm > 0.0 && c.source_fwhm < 180.0))
        throw ConfigError("source fwhm must lie in (0, 180) deg");
    const double m = lambertian_order(c.source_fwhm);
    AngularProfile directivity = AngularProfile::lambertian(m);
    if (c.source_angular_csv)
    {
        auto t = load_angular_profile(*c.source_angular_csv);
        directivity = AngularProfile({t.table().x().begin(), t.table().x().end()},
                                     {t.table().y().begin(), t.table().y().end()}, m);
    }
    return SourceModel{std::move(spectrum), std::move(directivity), c.source_fwhm};
}

DetectorModel make_receiver_model(const SceneConfig &c)
{
    SpectralCurve response =
        c.detector_spectrum_csv ? load_spectral_curve(*c.detector_spectrum_csv) : builtin::detector_response(c.band);
    const double fwhm = c.detector_fwhm.value_or(c.band == Band::ir ? 132.0 : 120.0);
    if (!(fwhm >= 1.0 && fwhm < 180.0))
        throw ConfigError("detector fwhm must lie in [1, 180) deg");
    const double m = lambertian_order(fwhm);
    AngularProfile angular = AngularProfile::lambertian(m);
    if (c.detector_angular_csv)
    {
        auto t = load_angular_profile(*c.detector_angular_csv);
        angular = AngularProfile({t.table().x().begin(), t.table().x().end()},
                                 {t.table().y().begin(), t.table().y().end()}, m);
    }
    return make_detector_model(std::move(response), std::move(angular));
}

bool inside_hull(const std::vector<Vec2> &section, double length, const Vec3 &p)
{
    return p.z() > 0.0 && p.z() < length && section_contains(section, Vec2(p.x(), p.y()));
}

CabinScene build_extruded(const SceneConfig &config, const std::vector<Vec2> &section)
{
    if (!(config.length > 0.0) || !(config.segment > 0.0))
        throw ConfigError("cabin length and segment size must be positive");
    if (section.size() < 3)
        throw ConfigError("cabin cross-section needs at least 3 points");

    std::vector<Material> materials = make_materials(config);
    const int hull_mat = material_id(materials, config.hull_material);
    const int floor_mat = material_id(materials, config.floor_material);
    const int seat_mat = material_id(materials, config.seat_material);

    double floor_y = section[0].y();
    Vec2 lo = section[0], hi = section[0];
    for (const auto &p : section)
    {
        floor_y = std::min(floor_y, p.y());
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }

    std::vector<Surface> surfaces;
    auto add = [&surfaces](std::vector<Vec3> v, int mat) {
        surfaces.push_back(make_surface(static_cast<int>(surfaces.size()), std::move(v), mat));
    };

    const int nseg = std::max(1, static_cast<int>(std::ceil(config.length / config.segment - 1e-9)));
    for (std::size_t i = 0; i < section.size(); ++i)
    {
        const Vec2 &a = section[i], &b = section[(i + 1) % section.size()];
        if ((b - a).norm() == 0.0)
            throw ConfigError("cabin cross-section has repeated points");
        const int mat = (a.y() == floor_y && b.y() == floor_y) ? floor_mat : hull_mat;
        for (int s = 0; s < nseg; ++s)
        {
            const double z0 = config.length * s / nseg, z1 = config.length * (s + 1) / nseg;
            // Wound so the normal faces the cabin interior.
            add({Vec3(a.x(), a.y(), z0), Vec3(a.x(), a.y(), z1), Vec3(b.x(), b.y(), z1), Vec3(b.x(), b.y(), z0)}, mat);
        }
    }
    for (double z : {0.0, config.length})
    {
        std::vector<Vec3> cap = {Vec3(lo.x(), lo.y(), z), Vec3(hi.x(), lo.y(), z), Vec3(hi.x(), hi.y(), z),
                                 Vec3(lo.x(), hi.y(), z)};
        if (z > 0.0)
            std::reverse(cap.begin(), cap.end());
        add(std::move(cap), hull_mat);
    }

    for (const auto &seat : config.seats)
    {
        for (const auto &b : seat_boxes(seat.origin))
        {
            const Vec3 centre = b.center();
            for (int k = 0; k < 8; ++k)
            {
                const Vec3 corner = b.corner(static_cast<Eigen::AlignedBox3d::CornerType>(k));
                if (!inside_hull(section, config.length, corner + 1e-6 * (centre - corner)))
                    throw ConfigError("seat " + seat.label + " protrudes outside the cabin hull");
            }
            const Vec3 p = b.min(), q = b.max();
            add({Vec3(p.x(), p.y(), p.z()), Vec3(p.x(), p.y(), q.z()), Vec3(p.x(), q.y(), q.z()), Vec3(p.x(), q.y(), p.z())}, seat_mat);
            add({Vec3(q.x(), p.y(), p.z()), Vec3(q.x(), q.y(), p.z()), Vec3(q.x(), q.y(), q.z()), Vec3(q.x(), p.y(), q.z())}, seat_mat);
            add({Vec3(p.x(), p.y(), p.z()), Vec3(q.x(), p.y(), p.z()), Vec3(q.x(), p.y(), q.z()), Vec3(p.x(), p.y(), q.z())}, seat_mat);
            add({Vec3(p.x(), q.y(), p.z()), Vec3(p.x(), q.y(), q.z()), Vec3(q.x(), q.y(), q.z()), Vec3(q.x(), q.y(), p.z())}, seat_mat);
            add({Vec3(p.x(), p.y(), p.z()), Vec3(p.x(), q.y(), p.z()), Vec3(q.x(), q.y(), p.z()), Vec3(q.x(), p.y(), p.z())}, seat_mat);
            add({Vec3(p.x(), p.y(), q.z()), Vec3(q.x(), p.y(), q.z()), Vec3(q.x(), q.y(), q.z()), Vec3(p.x(), q.y(), q.z())}, seat_mat);
        }
    }

    for (const auto &extra : config.extra_surfaces)
    {
        try
        {
            add(extra.vertices, material_id(materials, extra.material));
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError(std::string("extra surface: ") + e.what());
        }
    }

    for (const auto &d : config.detectors)
        if (!inside_hull(section, config.length, d.position))
            throw ConfigError("detector " + d.name + " lies outside the cabin hull");
    for (const auto &s : config.sources)
        if (!inside_hull(section, config.length, s.position))
            throw ConfigError("source " + s.name + " lies outside the cabin hull");

    return CabinScene(std::move(surfaces), config.sources, config.detectors, std::move(materials),
                      {make_source_model(config)}, {make_receiver_model(config)});
}

} // namespace

CabinScene build_simplified_cabin(const SceneConfig &config)
{
    return build_extruded(config, config.section.empty() ? simplified_section() : config.section);
}

CabinScene build_realistic_cabin(const SceneConfig &config)
{
    return build_extruded(config, config.section.empty() ? realistic_section(config.tessellation) : config.section);
}

CabinScene build_cabin(const SceneConfig &config)
{
    return config.variant == CabinVariant::simplified ? build_simplified_cabin(config) : build_realistic_cabin(config);
}

} // namespace cabinlifi
