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

#include "cabinlifi/photometry.hpp"
#include "cabinlifi/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "support.hpp"

namespace cabinlifi
{
namespace
{

// Composite Simpson on a fine uniform grid; independent of the knot logic.
template <class F> double simpson(F f, double a, double b, int n = 200000)
{
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

TEST(LambertianOrder, KnownWidths)
{
    EXPECT_NEAR(lambertian_order(120.0), 1.0, 1e-12);
    EXPECT_NEAR(lambertian_order(90.0), 2.0, 1e-9);
    EXPECT_GT(lambertian_order(1.0), 1e4);
}

TEST(LambertianOrder, RejectsOutOfRange)
{
    EXPECT_THROW(lambertian_order(0.5), std::invalid_argument);
    EXPECT_THROW(lambertian_order(180.0), std::invalid_argument);
}

TEST(SpectralCurve, EvaluateKnotMidpointAndOutside)
{
    const SpectralCurve c({0.5, 0.6, 0.7}, {0.2, 0.4, 0.1});
    EXPECT_EQ(c.evaluate(0.6), 0.4);
    EXPECT_NEAR(c.evaluate(0.55), 0.3, 1e-15);
    EXPECT_EQ(c.evaluate(0.49), 0.0);
    EXPECT_EQ(c.evaluate(0.71), 0.0);
}

TEST(SpectralCurve, RejectsInvalidSamples)
{
    EXPECT_THROW(SpectralCurve({0.5}, {1.0}), std::invalid_argument);
    EXPECT_THROW(SpectralCurve({0.5, 0.5}, {1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(SpectralCurve({0.6, 0.5}, {1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW(SpectralCurve({0.5, 0.6}, {1.0, -0.1}), std::invalid_argument);
    EXPECT_THROW(SpectralCurve({0.5, 0.6}, {1.0}), std::invalid_argument);
}

TEST(SpectralCurve, MonotoneUnderPointwiseEdits)
{
    const SpectralCurve lo({0.4, 0.5, 0.6, 0.7}, {0.1, 0.5, 0.3, 0.2});
    const SpectralCurve hi({0.4, 0.5, 0.6, 0.7}, {0.1, 0.7, 0.3, 0.25});
    CounterRng rng(3);
    for (int i = 0; i < 10000; ++i)
    {
        const double x = 0.35 + 0.4 * rng.uniform();
        EXPECT_LE(lo.evaluate(x), hi.evaluate(x));
    }
}

TEST(SampleWavelength, MonochromaticAlwaysReturnsLine)
{
    const SpectralCurve c = SpectralCurve::monochromatic(0.86);
    for (double u : {0.0, 0.1, 0.5, 0.999999})
        EXPECT_EQ(sample_wavelength(c, u), 0.86);
}

TEST(SampleWavelength, UniformMedian)
{
    const SpectralCurve c({0.8, 0.9}, {1.0, 1.0});
    EXPECT_NEAR(sample_wavelength(c, 0.5), 0.85, 1e-12);
}

TEST(SampleWavelength, RejectsAllZeroSpectrum)
{
    const SpectralCurve c({0.8, 0.9}, {0.0, 0.0});
    EXPECT_THROW(sample_wavelength(c, 0.5), std::invalid_argument);
}

TEST(SampleWavelength, TwoPeakMassRatioMatchesIntegrals)
{
    const std::vector<Eigen::Vector3d> lines = {{0.45, 0.012, 1.0}, {0.604, 0.05, 2.0}};
    const SpectralCurve c = SpectralCurve::gaussians(lines, 0.38, 0.80, 421);
    const double split = 0.52;
    const double left = simpson([&](double x) { return c.evaluate(x); }, 0.38, split);
    const double right = simpson([&](double x) { return c.evaluate(x); }, split, 0.80);

    CounterRng rng(11);
    std::size_t n_left = 0, n_right = 0;
    for (int i = 0; i < 1000000; ++i)
        (sample_wavelength(c, rng.uniform()) < split ? n_left : n_right)++;
    const double empirical = static_cast<double>(n_right) / static_cast<double>(n_left);
    EXPECT_NEAR(empirical / (right / left), 1.0, 0.01);
}

TEST(SampleWavelength, StaysWithinSpanAndIgnoresScale)
{
    const SpectralCurve c({0.7, 0.8, 0.95, 1.0}, {0.0, 2.0, 0.5, 0.1});
    const SpectralCurve scaled = c.scaled(7.5);
    CounterRng rng(5);
    for (int i = 0; i < 100000; ++i)
    {
        const double u = rng.uniform();
        const double w = sample_wavelength(c, u);
        EXPECT_GE(w, c.lo());
        EXPECT_LE(w, c.hi());
        EXPECT_NEAR(sample_wavelength(scaled, u), w, 1e-12);
    }
}

TEST(InverseCdf, InvertsTheCumulativeIntegral)
{
    const PiecewiseLinear f({0.0, 1.0, 3.0, 4.0}, {1.0, 3.0, 0.5, 2.0});
    for (double u : {0.01, 0.2, 0.45, 0.7, 0.93})
    {
        const double x = f.inverse_cdf(u);
        const double mass = simpson([&](double t) { return f(t); }, 0.0, x, 20000);
        EXPECT_NEAR(mass / f.integral(), u, 1e-9);
    }
}

TEST(EmissionDirection, LambertianMeanCosine)
{
    const AngularProfile p = AngularProfile::lambertian(1.0);
    CounterRng rng(7);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i)
    {
        const double u1 = rng.uniform(), u2 = rng.uniform();
        const Vec3 d = sample_emission_direction(p, u1, u2);
        ASSERT_NEAR(d.norm(), 1.0, 1e-12);
        sum += d.z();
    }
    EXPECT_NEAR(sum / n / (2.0 / 3.0), 1.0, 0.005);
}

TEST(EmissionDirection, CollimatedLimit)
{
    const AngularProfile p = AngularProfile::lambertian(std::numeric_limits<double>::infinity());
    CounterRng rng(9);
    for (int i = 0; i < 1000; ++i)
    {
        const double u1 = rng.uniform(), u2 = rng.uniform();
        EXPECT_GT(sample_emission_direction(p, u1, u2).z(), 1.0 - 1e-12);
    }
}

TEST(EmissionDirection, TabulatedCosineMatchesAnalyticCdf)
{
    std::vector<double> angles, weights;
    for (int a = 0; a <= 90; ++a)
    {
        angles.push_back(a);
        weights.push_back(std::cos(deg2rad(a)));
    }
    const AngularProfile tab(angles, weights);
    ASSERT_TRUE(tab.is_tabulated());

    const int n = 100000;
    std::vector<double> theta(n);
    CounterRng rng(13);
    for (auto &t : theta)
    {
        const double u1 = rng.uniform(), u2 = rng.uniform();
        t = std::acos(std::clamp(sample_emission_direction(tab, u1, u2).z(), -1.0, 1.0));
    }
    std::sort(theta.begin(), theta.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double cdf = 1.0 - std::cos(theta[i]) * std::cos(theta[i]); // m = 1
        ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
    }
    EXPECT_LT(ks, 0.01);
}

TEST(AngularProfile, NormalizesToUnitAtZero)
{
    const AngularProfile p({0.0, 45.0, 90.0}, {4.0, 2.0, 0.0});
    EXPECT_DOUBLE_EQ(p.evaluate(0.0), 1.0);
    EXPECT_DOUBLE_EQ(p.evaluate(45.0), 0.5);
    EXPECT_THROW(AngularProfile({5.0, 90.0}, {1.0, 0.0}), std::invalid_argument);
    EXPECT_THROW(AngularProfile({0.0, 95.0}, {1.0, 0.0}), std::invalid_argument);
}

TEST(CosineHemisphere, MeanCosine)
{
    CounterRng rng(17);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i)
    {
        const double u1 = rng.uniform(), u2 = rng.uniform();
        const Vec3 d = sample_cosine_hemisphere(u1, u2);
        ASSERT_GE(d.z(), 0.0);
        sum += d.z();
    }
    EXPECT_NEAR(sum / n / (2.0 / 3.0), 1.0, 0.005);
}

TEST(FrameFromNormal, IsOrthonormalWithNormalLast)
{
    CounterRng rng(19);
    for (int i = 0; i < 1000; ++i)
    {
        const Vec3 n = Vec3(rng.uniform() - 0.5, rng.uniform() - 0.5, rng.uniform() - 0.5).normalized();
        const Eigen::Matrix3d f = frame_from_normal(n);
        EXPECT_LT((f.transpose() * f - Eigen::Matrix3d::Identity()).norm(), 1e-12);
        EXPECT_LT((f.col(2) - n).norm(), 1e-12);
    }
}

TEST(IntegrateProduct, MatchesNumericIntegration)
{
    const SpectralCurve a = builtin::source_spectrum(Band::ir);
    const SpectralCurve b = builtin::detector_response(Band::ir);
    const double oracle = simpson([&](double x) { return a.evaluate(x) * b.evaluate(x); }, 0.3, 1.2, 400000);
    EXPECT_NEAR(integrate_product(a, b) / oracle, 1.0, 1e-7);
}

TEST(IntegrateProduct, MatchedPairCollectsMore)
{
    for (Band band : {Band::ir, Band::vl})
    {
        const Band other = band == Band::ir ? Band::vl : Band::ir;
        const SpectralCurve src = builtin::source_spectrum(band);
        EXPECT_GE(integrate_product(src, builtin::detector_response(band)),
                  integrate_product(src, builtin::detector_response(other)));
    }
}

TEST(Builtins, DetectorPeaksAreNormalized)
{
    const DetectorModel ir = builtin::detector_model(Band::ir);
    const DetectorModel vl = builtin::detector_model(Band::vl);
    EXPECT_NEAR(ir.peak_wavelength_um, 0.90, 1e-9);
    EXPECT_NEAR(vl.peak_wavelength_um, 0.62, 1e-9);
    EXPECT_DOUBLE_EQ(ir.spectral_responsivity(0.90), 1.0);
    EXPECT_DOUBLE_EQ(vl.spectral_responsivity(0.62), 1.0);
}

TEST(Builtins, SourceSpectraShapes)
{
    const SpectralCurve ir = builtin::source_spectrum(Band::ir);
    EXPECT_NEAR(ir.peak().first, 0.86, 1e-3);
    const SpectralCurve vl = builtin::source_spectrum(Band::vl);
    const double blue = simpson([&](double x) { return vl.evaluate(x); }, 0.38, 0.52);
    const double yellow = simpson([&](double x) { return vl.evaluate(x); }, 0.52, 0.80);
    // Areas 1 and 2; the broad yellow line leaks a normal tail below the split.
    const double leak = 2.0 * 0.5 * std::erfc((0.604 - 0.52) / 0.05 / std::sqrt(2.0));
    EXPECT_NEAR((yellow + blue) / blue, 3.0 / (1.0 + leak), 1e-3);
}

TEST(Builtins, MaterialsFollowBandContrast)
{
    EXPECT_DOUBLE_EQ(builtin::white_plastic(Band::ir).reflectance_at(0.86), 0.85);
    EXPECT_DOUBLE_EQ(builtin::white_plastic(Band::vl).reflectance_at(0.55), 0.80);
    EXPECT_DOUBLE_EQ(builtin::seat_fabric(Band::ir).reflectance_at(0.86), 0.70);
    EXPECT_DOUBLE_EQ(builtin::seat_fabric(Band::vl).reflectance_at(0.55), 0.25);
    EXPECT_DOUBLE_EQ(builtin::carpet(Band::ir).reflectance_at(0.86), 0.55);
    EXPECT_DOUBLE_EQ(builtin::carpet(Band::vl).reflectance_at(0.55), 0.08);
    EXPECT_EQ(builtin::carpet(Band::vl).scatter_count, 5);
}

TEST(MaterialSpectrum, Validation)
{
    EXPECT_THROW((MaterialSpectrum{SpectralCurve::constant(1.2), 5}.validate()), ConfigError);
    EXPECT_THROW((MaterialSpectrum{SpectralCurve::constant(0.5), 0}.validate()), ConfigError);
    EXPECT_NO_THROW((MaterialSpectrum{SpectralCurve::constant(1.0), 1}.validate()));
}

TEST(CurveCsv, LoadsAndReportsErrors)
{
    testing::TempDir dir("curves");
    const auto good = dir.path() / "good.csv";
    std::ofstream(good) << "# measured\nx,weight\n0.8,0.5\n0.9,1.0\n";
    const SpectralCurve c = load_spectral_curve(good);
    EXPECT_DOUBLE_EQ(c.evaluate(0.85), 0.75);

    const auto bad = dir.path() / "bad.csv";
    std::ofstream(bad) << "x,weight\n0.8,0.5\n0.9,abc\n";
    try
    {
        load_spectral_curve(bad);
        FAIL() << "expected ConfigError";
    }
    catch (const ConfigError &e)
    {
        EXPECT_NE(std::string(e.what()).find("bad.csv:3"), std::string::npos) << e.what();
    }

    const auto missing = dir.path() / "missing.csv";
    try
    {
        load_spectral_curve(missing);
        FAIL() << "expected ConfigError";
    }
    catch (const ConfigError &e)
    {
        EXPECT_NE(std::string(e.what()).find("missing.csv"), std::string::npos);
    }

    const auto ang = dir.path() / "angular.csv";
    std::ofstream(ang) << "x,weight\n0,2\n60,1\n90,0\n";
    EXPECT_DOUBLE_EQ(load_angular_profile(ang).evaluate(60.0), 0.5);
}

} // namespace
} // namespace cabinlifi
