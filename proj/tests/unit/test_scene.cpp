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
#include "cabinlifi/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "support.hpp"

namespace cabinlifi
{
namespace
{

CabinScene unit_box_scene(std::vector<Surface> surfaces)
{
    return CabinScene(std::move(surfaces), {}, {}, {testing::flat_material(0.5)}, {testing::flat_source()},
                      {testing::cosine_detector()});
}

Vec3 random_direction(CounterRng &rng)
{
    const double z = 2.0 * rng.uniform() - 1.0;
    const double phi = 2.0 * kPi * rng.uniform();
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
}

// Uniform point strictly inside the default cabin air volume (outside seats
// is not required: seats are closed boxes and rays from inside them still hit).
Vec3 random_interior_point(CounterRng &rng, const std::vector<Vec2> &section, double length)
{
    for (;;)
    {
        const Vec3 p(390.0 * rng.uniform(), 225.0 * rng.uniform(), length * rng.uniform());
        if (p.z() > 1e-3 && p.z() < length - 1e-3 && section_contains(section, Vec2(p.x(), p.y())))
            return p;
    }
}

TEST(MakeSurface, NormalFollowsWinding)
{
    const Surface s = make_surface(3, {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}, 0);
    EXPECT_LT((s.normal - Vec3::UnitZ()).norm(), 1e-12);
    EXPECT_EQ(s.id, 3);
}

TEST(MakeSurface, RejectsBadPolygons)
{
    EXPECT_THROW(make_surface(0, {{0, 0, 0}, {1, 0, 0}}, 0), std::invalid_argument);
    EXPECT_THROW(make_surface(0, {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0.01}}, 0), std::invalid_argument);
    EXPECT_THROW(make_surface(0, {{0, 0, 0}, {2, 0, 0}, {1, 0.2, 0}, {2, 2, 0}, {0, 2, 0}}, 0),
                 std::invalid_argument);
    EXPECT_THROW(make_surface(0, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, 0), std::invalid_argument);
}

TEST(CabinScene, RejectsUnresolvedMaterial)
{
    auto surfaces = testing::box_surfaces({-1, -1, -1}, {1, 1, 1}, 4);
    EXPECT_THROW(unit_box_scene(surfaces), ConfigError);
}

TEST(BuildCabin, ReferenceSourcePositions)
{
    const CabinScene scene = build_cabin(SceneConfig::defaults(Band::ir));
    ASSERT_EQ(scene.sources().size(), 3u);
    const double x[] = {289.199, 292.199, 295.199};
    for (int i = 0; i < 3; ++i)
    {
        EXPECT_LT((scene.sources()[i].position - Vec3(x[i], 167.643, 408.0)).norm(), 1e-9);
        EXPECT_EQ(scene.sources()[i].chips(), 16);
    }
    EXPECT_EQ(scene.detectors().size(), 9u);
    EXPECT_EQ(scene.find_detector("B2"), 4);
    EXPECT_THROW(scene.find_detector("Z9"), ConfigError);
}

TEST(BuildCabin, UnitBoxIsSixSurfaces)
{
    SceneConfig c;
    c.section = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    c.length = 1.0;
    c.segment = 1.0;
    const CabinScene scene = build_cabin(c);
    ASSERT_EQ(scene.surfaces().size(), 6u);
    const Vec3 centre(0.5, 0.5, 0.5);
    for (const auto &s : scene.surfaces())
    {
        const Vec3 centroid = std::accumulate(s.vertices.begin(), s.vertices.end(), Vec3(Vec3::Zero())) /
                              static_cast<double>(s.vertices.size());
        EXPECT_GT(s.normal.dot(centre - centroid), 0.0) << "surface " << s.id << " faces outwards";
    }
}

TEST(BuildCabin, RealisticVariantBuilds)
{
    SceneConfig c = SceneConfig::defaults(Band::vl);
    c.variant = CabinVariant::realistic;
    c.tessellation = 8;
    const CabinScene scene = build_cabin(c);
    EXPECT_GT(scene.surfaces().size(), build_cabin(SceneConfig::defaults(Band::vl)).surfaces().size());
}

TEST(BuildCabin, RejectsProtrusions)
{
    SceneConfig seat = SceneConfig::defaults();
    seat.seats.push_back({"99X", Vec3(360.0, 42.643, 408.0)});
    EXPECT_THROW(build_cabin(seat), ConfigError);

    SceneConfig det = SceneConfig::defaults();
    det.detectors[0].position = Vec3(221.699, 100.443, 800.0);
    EXPECT_THROW(build_cabin(det), ConfigError);

    SceneConfig src = SceneConfig::defaults();
    src.sources[0].position.y() = 240.0;
    EXPECT_THROW(build_cabin(src), ConfigError);
}

TEST(Intersect, AxisAlignedCeiling)
{
    const CabinScene scene = unit_box_scene(testing::box_surfaces({-1, -1, -1}, {1, 1, 1}, 0));
    const auto hit = scene.intersect(Vec3::Zero(), Vec3::UnitY());
    ASSERT_TRUE(hit);
    EXPECT_EQ(hit->kind, Hit::Kind::surface);
    EXPECT_EQ(hit->index, 1); // ceiling
    EXPECT_DOUBLE_EQ(hit->distance, 1.0);
    EXPECT_LT((hit->point - Vec3(0, 1, 0)).norm(), 1e-15);
}

TEST(Intersect, ParallelRayMissesPlane)
{
    const CabinScene scene = unit_box_scene({make_surface(0, {{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1}}, 0)});
    EXPECT_FALSE(scene.intersect(Vec3(0.5, 0.3, -2.0), Vec3::UnitZ()));
    EXPECT_FALSE(scene.intersect(Vec3(0.5, 0.0, -2.0), Vec3::UnitZ()));
    EXPECT_FALSE(scene.intersect_brute_force(Vec3(0.5, 0.3, -2.0), Vec3::UnitZ()));
    EXPECT_TRUE(scene.intersect(Vec3(0.5, 0.3, 0.5), -Vec3::UnitY()));
}

TEST(Intersect, IgnoresOwnPrimitiveAndEpsilon)
{
    const CabinScene scene = unit_box_scene(testing::box_surfaces({-1, -1, -1}, {1, 1, 1}, 0));
    const auto up = scene.intersect(Vec3::Zero(), Vec3::UnitY());
    ASSERT_TRUE(up);
    const auto back = scene.intersect(up->point, -Vec3::UnitY(), up->primitive);
    ASSERT_TRUE(back);
    EXPECT_EQ(back->index, 0);
    EXPECT_DOUBLE_EQ(back->distance, 2.0);
}

TEST(Intersect, DetectorIsHit)
{
    auto surfaces = testing::box_surfaces({-10, -10, -10}, {10, 10, 10}, 0);
    const CabinScene scene(surfaces, {}, {testing::detector_at("D", Vec3(0, -5, 0), 2.0)},
                           {testing::flat_material(0.5)}, {testing::flat_source()}, {testing::cosine_detector()});
    const auto hit = scene.intersect(Vec3(0.5, 5, 0.5), -Vec3::UnitY());
    ASSERT_TRUE(hit);
    EXPECT_EQ(hit->kind, Hit::Kind::detector);
    EXPECT_DOUBLE_EQ(hit->distance, 10.0);
    const auto beside = scene.intersect(Vec3(1.5, 5, 0.5), -Vec3::UnitY());
    ASSERT_TRUE(beside);
    EXPECT_EQ(beside->kind, Hit::Kind::surface);
}

TEST(Intersect, HierarchyMatchesBruteForce)
{
    const CabinScene scene = build_cabin(SceneConfig::defaults(Band::ir));
    const auto section = simplified_section();
    CounterRng rng(21);
    int hits = 0;
    for (int i = 0; i < 1000; ++i)
    {
        // Half from inside the cabin, half from a box around it.
        const Vec3 o = i % 2 ? random_interior_point(rng, section, 760.0)
                             : Vec3(-100 + 600 * rng.uniform(), -100 + 400 * rng.uniform(), -100 + 960 * rng.uniform());
        const Vec3 d = random_direction(rng);
        const auto a = scene.intersect(o, d);
        const auto b = scene.intersect_brute_force(o, d);
        ASSERT_EQ(a.has_value(), b.has_value()) << "ray " << i;
        if (!a)
            continue;
        ++hits;
        EXPECT_EQ(a->primitive, b->primitive) << "ray " << i;
        EXPECT_EQ(a->distance, b->distance) << "ray " << i;
    }
    EXPECT_GT(hits, 500);
}

TEST(Intersect, PermutationInvariant)
{
    const SceneConfig config = SceneConfig::defaults(Band::ir);
    const CabinScene scene = build_cabin(config);
    auto shuffled = scene.surfaces();
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + 17, shuffled.end());
    const CabinScene permuted(shuffled, scene.sources(), scene.detectors(), scene.materials(), scene.source_models(),
                              scene.detector_models());

    const auto section = simplified_section();
    CounterRng rng(23);
    for (int i = 0; i < 2000; ++i)
    {
        const Vec3 o = random_interior_point(rng, section, config.length);
        const Vec3 d = random_direction(rng);
        const auto a = scene.intersect(o, d);
        const auto b = permuted.intersect(o, d);
        ASSERT_TRUE(a && b);
        ASSERT_EQ(a->kind, b->kind);
        if (a->kind == Hit::Kind::surface)
            EXPECT_EQ(scene.surfaces()[a->index].id, permuted.surfaces()[b->index].id);
        else
            EXPECT_EQ(a->index, b->index);
        EXPECT_EQ(a->distance, b->distance);
    }
}

TEST(Intersect, InteriorRaysNeverMiss)
{
    for (CabinVariant variant : {CabinVariant::simplified, CabinVariant::realistic})
    {
        SceneConfig config = SceneConfig::defaults(Band::ir);
        config.variant = variant;
        const CabinScene scene = build_cabin(config);
        const auto section = variant == CabinVariant::simplified ? simplified_section()
                                                                 : realistic_section(config.tessellation);
        CounterRng rng(29);
        for (int i = 0; i < 20000; ++i)
        {
            const Vec3 o = random_interior_point(rng, section, config.length);
            ASSERT_TRUE(scene.intersect(o, random_direction(rng))) << "ray " << i << " escaped";
        }
    }
}

TEST(AimRotation, ReferenceAngles)
{
    const Vec3 src(0, 0, 0);
    EXPECT_EQ(aim_rotation(src, Vec3(0, 0, 0), 84.0), 0.0);
    const double a = aim_rotation(src, Vec3(53, 0, 0), 84.0);
    EXPECT_NEAR(a, 32.25, 0.01);
    EXPECT_EQ(std::ceil(a), 33.0);
    EXPECT_NEAR(aim_rotation(src, Vec3(84, 0, 0), 84.0), 45.0, 1e-12);
    EXPECT_THROW(aim_rotation(src, src, 0.0), std::invalid_argument);
}

TEST(AimRotation, OddInOffset)
{
    CounterRng rng(31);
    for (int i = 0; i < 1000; ++i)
    {
        const Vec3 s(100 * rng.uniform(), 0, 0);
        const double d = 200 * rng.uniform() - 100;
        const double drop = 1 + 100 * rng.uniform();
        EXPECT_NEAR(aim_rotation(s, s + Vec3(d, 0, 0), drop), -aim_rotation(s, s - Vec3(d, 0, 0), drop), 1e-9);
        EXPECT_EQ(aim_rotation(Vec3::Zero(), Vec3(d, 0, 0), drop), -aim_rotation(Vec3::Zero(), Vec3(-d, 0, 0), drop));
    }
}

TEST(PlacedSource, ChipGridIsCentredAndOrthogonalToAim)
{
    PlacedSource s = SceneConfig::defaults().sources[0];
    const auto chips = s.chip_positions();
    ASSERT_EQ(chips.size(), 16u);
    Vec3 mean = Vec3::Zero();
    for (const auto &c : chips)
    {
        mean += c;
        EXPECT_NEAR((c - s.position).dot(s.aim()), 0.0, 1e-12);
    }
    EXPECT_LT((mean / 16.0 - s.position).norm(), 1e-12);
    EXPECT_NEAR((chips[1] - chips[0]).norm(), 0.4, 1e-12);
    EXPECT_NEAR(s.aim().y(), -std::cos(deg2rad(33.0)), 1e-12);
}

TEST(PlacedDetector, CornersSpanArea)
{
    const PlacedDetector d = testing::detector_at("D", Vec3(1, 2, 3), 2.0);
    const auto c = d.corners();
    EXPECT_NEAR((c[1] - c[0]).cross(c[2] - c[1]).dot(d.normal), d.area(), 1e-12);
}

} // namespace
} // namespace cabinlifi
