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

#ifndef CABINLIFI_PHOTOMETRY_HPP
#define CABINLIFI_PHOTOMETRY_HPP

#include "cabinlifi/types.hpp"

#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace cabinlifi
{

//! Piecewise-linear tabulated function, zero outside its span.
//! Shared storage for spectral and angular curves.
class PiecewiseLinear
{
  public:
    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    double front() const { return x_.front(); }
    double back() const { return x_.back(); }
    double integral() const { return cumulative_.back(); }

    // Inverse CDF of the density proportional to this function. Exact for
    // the piecewise-linear density (quadratic inversion per segment).
    double inverse_cdf(double u) const;

    std::span<const double> x() const { return x_; }
    std::span<const double> y() const { return y_; }

  private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> cumulative_;
};

//! Relative weight versus wavelength in micrometres.
class SpectralCurve
{
  public:
    SpectralCurve(std::vector<double> wavelengths_um, std::vector<double> weights);

    // Single line; all samples return this wavelength.
    static SpectralCurve monochromatic(double wavelength_um);
    static SpectralCurve constant(double weight, double lo_um = 0.3, double hi_um = 1.2);
    // Sum of Gaussian lines (centre, sigma, area) tabulated on [lo, hi].
    static SpectralCurve gaussians(std::span<const Eigen::Vector3d> lines, double lo_um, double hi_um,
                                   int samples = 401);

    double evaluate(double wavelength_um) const;
    double integral() const;
    bool is_monochromatic() const { return line_ > 0.0; }
    double lo() const;
    double hi() const;
    //! (wavelength, weight) at the largest tabulated weight.
    std::pair<double, double> peak() const;
    SpectralCurve scaled(double factor) const;
    const PiecewiseLinear &table() const { return table_; }

  private:
    SpectralCurve() = default;
    PiecewiseLinear table_;
    double line_ = 0.0;
};

//! Axially symmetric angular weight versus polar angle in degrees, with
//! weight(0) = 1. Either tabulated or a generalized Lambertian cos^m.
class AngularProfile
{
  public:
    AngularProfile(std::vector<double> angles_deg, std::vector<double> weights, double fallback_order = 1.0);

    static AngularProfile lambertian(double order);
    static AngularProfile from_fwhm(double fwhm_deg);

    double evaluate(double theta_deg) const;
    bool is_tabulated() const { return tabulated_; }
    double order() const { return order_; }
    const PiecewiseLinear &table() const { return table_; }

    // Unit direction about +z with polar density ~ weight(theta) sin(theta)
    // and uniform azimuth.
    Vec3 sample_direction(double u1, double u2) const;
    double sample_polar(double u) const;

  private:
    AngularProfile() = default;
    bool tabulated_ = false;
    double order_ = 1.0;
    PiecewiseLinear table_;
    PiecewiseLinear polar_density_; // weight(theta) sin(theta), theta in rad
};

struct MaterialSpectrum
{
    SpectralCurve reflectance;
    int scatter_count = 5;

    void validate() const;
    double reflectance_at(double wavelength_um) const { return reflectance.evaluate(wavelength_um); }
};

struct SourceModel
{
    SpectralCurve spectrum;
    AngularProfile directivity;
    double fwhm_deg;

    void validate() const;
};

struct DetectorModel
{
    // Peak normalized to 1 on construction through make_detector_model.
    SpectralCurve spectral_response;
    AngularProfile angular_response;
    double peak_wavelength_um;

    double spectral_responsivity(double wavelength_um) const { return spectral_response.evaluate(wavelength_um); }
    double angular_responsivity(double theta_deg) const { return angular_response.evaluate(theta_deg); }
};

DetectorModel make_detector_model(SpectralCurve response, AngularProfile angular);

//! Generalized Lambertian order for a full-width-half-maximum angle.
double lambertian_order(double fwhm_deg);

inline double evaluate(const SpectralCurve &curve, double wavelength_um) { return curve.evaluate(wavelength_um); }
inline double evaluate(const AngularProfile &profile, double theta_deg) { return profile.evaluate(theta_deg); }

double sample_wavelength(const SpectralCurve &spectrum, double u);
Vec3 sample_emission_direction(const AngularProfile &profile, double u1, double u2);

//! Cosine-weighted direction about +z (ideal diffuse reflector).
Vec3 sample_cosine_hemisphere(double u1, double u2);

//! Orthonormal basis (t, b, n) with n given.
Eigen::Matrix3d frame_from_normal(const Vec3 &n);

// Exact integral of the pointwise product (piecewise quadratic between the
// merged knots).
double integrate_product(const SpectralCurve &a, const SpectralCurve &b);

// Curve CSV: header `x,weight`. Throws ConfigError naming the path.
SpectralCurve load_spectral_curve(const std::filesystem::path &path);
AngularProfile load_angular_profile(const std::filesystem::path &path);

namespace builtin
{
// Synthetic stand-ins for the measured source, detector and coating data.
SpectralCurve source_spectrum(Band band);
SpectralCurve detector_response(Band band);
SourceModel source_model(Band band);
DetectorModel detector_model(Band band);
MaterialSpectrum white_plastic(Band band);
MaterialSpectrum seat_fabric(Band band);
MaterialSpectrum carpet(Band band);
} // namespace builtin

} // namespace cabinlifi

#endif
