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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cabinlifi
{

PiecewiseLinear::PiecewiseLinear(std::vector<double> x, std::vector<double> y) : x_{std::move(x)}, y_{std::move(y)}
{
    if (x_.size() != y_.size())
        throw std::invalid_argument("curve: abscissa and weight counts differ");
    if (x_.size() < 2)
        throw std::invalid_argument("curve: at least 2 samples required");
    for (std::size_t i = 0; i < x_.size(); ++i)
    {
        if (!std::isfinite(x_[i]) || !std::isfinite(y_[i]))
            throw std::invalid_argument("curve: non-finite sample");
        if (y_[i] < 0.0)
            throw std::invalid_argument("curve: negative weight");
        if (i > 0 && !(x_[i] > x_[i - 1]))
            throw std::invalid_argument("curve: abscissae must be strictly increasing");
    }
    cumulative_.assign(x_.size(), 0.0);
    for (std::size_t i = 1; i < x_.size(); ++i)
        cumulative_[i] = cumulative_[i - 1] + 0.5 * (y_[i] + y_[i - 1]) * (x_[i] - x_[i - 1]);
}

double PiecewiseLinear::operator()(double x) const
{
    if (!(x >= x_.front() && x <= x_.back()))
        return 0.0;
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    if (it == x_.end())
        return y_.back();
    const std::size_t j = static_cast<std::size_t>(it - x_.begin());
    const double x0 = x_[j - 1], x1 = x_[j];
    if (x == x0)
        return y_[j - 1];
    const double t = (x - x0) / (x1 - x0);
    return y_[j - 1] + t * (y_[j] - y_[j - 1]);
}

double PiecewiseLinear::inverse_cdf(double u) const
{
    const double total = cumulative_.back();
    if (!(total > 0.0))
        throw std::invalid_argument("curve: cannot sample an all-zero density");
    const double target = std::clamp(u, 0.0, 1.0) * total;

    // First segment whose cumulative end exceeds the target; zero-area
    // segments are skipped because their end equals their start.
    auto it = std::upper_bound(cumulative_.begin() + 1, cumulative_.end(), target);
    if (it == cumulative_.end())
        --it;
    const std::size_t j = static_cast<std::size_t>(it - cumulative_.begin());

    const double h = x_[j] - x_[j - 1];
    const double f0 = y_[j - 1], f1 = y_[j];
    const double r = target - cumulative_[j - 1];
    const double a = 0.5 * (f1 - f0) / h;

    // Solve a t^2 + f0 t = r in the cancellation-free form.
    double t;
    const double disc = std::max(f0 * f0 + 4.0 * a * r, 0.0);
    const double denom = f0 + std::sqrt(disc);
    t = denom > 0.0 ? 2.0 * r / denom : 0.0;
    return x_[j - 1] + std::clamp(t, 0.0, h);
}

// ---- SpectralCurve ------------------------------------------------------

SpectralCurve::SpectralCurve(std::vector<double> wavelengths_um, std::vector<double> weights)
    : table_{std::move(wavelengths_um), std::move(weights)}
{
}

SpectralCurve SpectralCurve::monochromatic(double wavelength_um)
{
    if (!(wavelength_um > 0.0))
        throw std::invalid_argument("monochromatic: wavelength must be positive");
    const double w = 1e-6;
    SpectralCurve c;
    c.table_ = PiecewiseLinear({wavelength_um - w, wavelength_um, wavelength_um + w}, {0.0, 1.0, 0.0});
    c.line_ = wavelength_um;
    return c;
}

SpectralCurve SpectralCurve::constant(double weight, double lo_um, double hi_um)
{
    return SpectralCurve({lo_um, hi_um}, {weight, weight});
}

SpectralCurve SpectralCurve::gaussians(std::span<const Eigen::Vector3d> lines, double lo_um, double hi_um,
                                       int samples)
{
    if (samples < 2 || !(hi_um > lo_um))
        throw std::invalid_argument("gaussians: bad tabulation range");
    std::vector<double> x(static_cast<std::size_t>(samples)), y(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        x[i] = lo_um + (hi_um - lo_um) * static_cast<double>(i) / (samples - 1);
        for (const auto &g : lines)
        {
            const double z = (x[i] - g[0]) / g[1];
            y[i] += g[2] / (g[1] * std::sqrt(2.0 * kPi)) * std::exp(-0.5 * z * z);
        }
    }
    return SpectralCurve(std::move(x), std::move(y));
}

double SpectralCurve::evaluate(double wavelength_um) const { return table_(wavelength_um); }
double SpectralCurve::integral() const { return table_.integral(); }
double SpectralCurve::lo() const { return is_monochromatic() ? line_ : table_.front(); }
double SpectralCurve::hi() const { return is_monochromatic() ? line_ : table_.back(); }

std::pair<double, double> SpectralCurve::peak() const
{
    auto y = table_.y();
    auto it = std::max_element(y.begin(), y.end());
    return {table_.x()[static_cast<std::size_t>(it - y.begin())], *it};
}

SpectralCurve SpectralCurve::scaled(double factor) const
{
    if (!(factor >= 0.0))
        throw std::invalid_argument("scaled: factor must be non-negative");
    SpectralCurve c = *this;
    std::vector<double> y(table_.y().begin(), table_.y().end());
    for (double &v : y)
        v *= factor;
    c.table_ = PiecewiseLinear({table_.x().begin(), table_.x().end()}, std::move(y));
    return c;
}

double sample_wavelength(const SpectralCurve &spectrum, double u)
{
    if (spectrum.is_monochromatic())
        return spectrum.lo();
    return spectrum.table().inverse_cdf(u);
}

double integrate_product(const SpectralCurve &a, const SpectralCurve &b)
{
    std::vector<double> knots(a.table().x().begin(), a.table().x().end());
    knots.insert(knots.end(), b.table().x().begin(), b.table().x().end());
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    double sum = 0.0;
    for (std::size_t i = 1; i < knots.size(); ++i)
    {
        const double x0 = knots[i - 1], x1 = knots[i], xm = 0.5 * (x0 + x1);
        // A curve's edge value belongs to the segment inside its span only.
        if (xm < a.table().front() || xm > a.table().back() || xm < b.table().front() || xm > b.table().back())
            continue;
        const double f0 = a.evaluate(x0) * b.evaluate(x0);
        const double fm = a.evaluate(xm) * b.evaluate(xm);
        const double f1 = a.evaluate(x1) * b.evaluate(x1);
        sum += (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
    }
    return sum;
}

// ---- AngularProfile -----------------------------------------------------

namespace
{
constexpr int kPolarGrid = 4097;

PiecewiseLinear polar_density_of(const PiecewiseLinear &table)
{
    const double hi = deg2rad(table.back());
    std::vector<double> th(kPolarGrid), w(kPolarGrid);
    for (int i = 0; i < kPolarGrid; ++i)
    {
        th[i] = hi * i / (kPolarGrid - 1);
        w[i] = table(rad2deg(th[i])) * std::sin(th[i]);
    }
    th.back() = hi;
    return PiecewiseLinear(std::move(th), std::move(w));
}
} // namespace

AngularProfile::AngularProfile(std::vector<double> angles_deg, std::vector<double> weights, double fallback_order)
{
    if (angles_deg.empty() || angles_deg.front() != 0.0)
        throw std::invalid_argument("angular profile: first angle must be 0 deg");
    if (angles_deg.back() > 90.0)
        throw std::invalid_argument("angular profile: angles must lie in [0, 90] deg");
    if (weights.empty() || !(weights.front() > 0.0))
        throw std::invalid_argument("angular profile: weight at 0 deg must be positive");
    const double w0 = weights.front();
    for (double &w : weights)
        w /= w0;
    tabulated_ = true;
    order_ = fallback_order;
    table_ = PiecewiseLinear(std::move(angles_deg), std::move(weights));
    polar_density_ = polar_density_of(table_);
}

AngularProfile AngularProfile::lambertian(double order)
{
    if (!(order >= 0.0))
        throw std::invalid_argument("lambertian: order must be non-negative");
    AngularProfile p;
    p.order_ = order;
    return p;
}

AngularProfile AngularProfile::from_fwhm(double fwhm_deg) { return lambertian(lambertian_order(fwhm_deg)); }

double AngularProfile::evaluate(double theta_deg) const
{
    if (tabulated_)
        return table_(theta_deg);
    if (!(theta_deg >= 0.0 && theta_deg < 90.0))
        return 0.0;
    if (std::isinf(order_))
        return theta_deg == 0.0 ? 1.0 : 0.0;
    return std::pow(std::cos(deg2rad(theta_deg)), order_);
}

double AngularProfile::sample_polar(double u) const
{
    if (tabulated_)
        return polar_density_.inverse_cdf(u);
    // F(theta) = 1 - cos^(m+1) theta.
    return std::acos(std::pow(1.0 - u, 1.0 / (order_ + 1.0)));
}

Vec3 AngularProfile::sample_direction(double u1, double u2) const
{
    const double theta = sample_polar(u1);
    const double phi = 2.0 * kPi * u2;
    const double s = std::sin(theta);
    return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

Vec3 sample_emission_direction(const AngularProfile &profile, double u1, double u2)
{
    return profile.sample_direction(u1, u2);
}

Vec3 sample_cosine_hemisphere(double u1, double u2)
{
    const double r = std::sqrt(u1);
    const double phi = 2.0 * kPi * u2;
    return {r * std::cos(phi), r * std::sin(phi), std::sqrt(std::max(0.0, 1.0 - u1))};
}

Eigen::Matrix3d frame_from_normal(const Vec3 &n)
{
    // Branchless orthonormal basis (Duff et al.).
    const double sign = std::copysign(1.0, n.z());
    const double a = -1.0 / (sign + n.z());
    const double b = n.x() * n.y() * a;
    Eigen::Matrix3d m;
    m.col(0) = Vec3(1.0 + sign * n.x() * n.x() * a, sign * b, -sign * n.x());
    m.col(1) = Vec3(b, sign + n.y() * n.y() * a, -n.y());
    m.col(2) = n;
    return m;
}

double lambertian_order(double fwhm_deg)
{
    if (!(fwhm_deg >= 1.0 && fwhm_deg < 180.0))
        throw std::invalid_argument("lambertian_order: fwhm must lie in [1, 180) deg");
    return -std::log(2.0) / std::log(std::cos(deg2rad(0.5 * fwhm_deg)));
}

// ---- models -------------------------------------------------------------

void MaterialSpectrum::validate() const
{
    if (scatter_count < 1)
        throw ConfigError("material: scatter count must be at least 1");
    for (double w : reflectance.table().y())
        if (w > 1.0)
            throw ConfigError("material: reflectance exceeds 1");
}

void SourceModel::validate() const
{
    if (!(fwhm_deg > 0.0 && fwhm_deg < 180.0))
        throw ConfigError("source: fwhm must lie in (0, 180) deg");
}

DetectorModel make_detector_model(SpectralCurve response, AngularProfile angular)
{
    auto [peak_x, peak_w] = response.peak();
    if (!(peak_w > 0.0))
        throw ConfigError("detector: spectral response is identically zero");
    return DetectorModel{response.scaled(1.0 / peak_w), std::move(angular), peak_x};
}

// ---- CSV ----------------------------------------------------------------

namespace
{
std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::pair<std::vector<double>, std::vector<double>> read_curve_csv(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open curve file: " + path.string());
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    std::vector<double> x, y;
    while (std::getline(in, line))
    {
        ++lineno;
        line = trim(line);
        if (line.empty() || line.front() == '#')
            continue;
        if (!header)
        {
            if (line != "x,weight")
                throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected header 'x,weight'");
            header = true;
            continue;
        }
        const auto comma = line.find(',');
        try
        {
            if (comma == std::string::npos)
                throw std::invalid_argument("missing comma");
            x.push_back(parse_number(trim(line.substr(0, comma))));
            y.push_back(parse_number(trim(line.substr(comma + 1))));
        }
        catch (const std::exception &e)
        {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": malformed row (" + e.what() + ")");
        }
    }
    if (!header)
        throw ConfigError(path.string() + ": missing header 'x,weight'");
    return {std::move(x), std::move(y)};
}
} // namespace

SpectralCurve load_spectral_curve(const std::filesystem::path &path)
{
    auto [x, y] = read_curve_csv(path);
    try
    {
        return SpectralCurve(std::move(x), std::move(y));
    }
    catch (const std::invalid_argument &e)
    {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

AngularProfile load_angular_profile(const std::filesystem::path &path)
{
    auto [x, y] = read_curve_csv(path);
    try
    {
        return AngularProfile(std::move(x), std::move(y));
    }
    catch (const std::invalid_argument &e)
    {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

// ---- built-in stand-ins -------------------------------------------------

namespace builtin
{

SpectralCurve source_spectrum(Band band)
{
    if (band == Band::ir)
    {
        const Eigen::Vector3d line(0.860, 0.020, 1.0);
        return SpectralCurve::gaussians({&line, 1}, 0.780, 0.940, 161);
    }
    const Eigen::Vector3d lines[] = {{0.450, 0.012, 1.0}, {0.604, 0.050, 2.0}};
    return SpectralCurve::gaussians(lines, 0.380, 0.800, 421);
}

SpectralCurve detector_response(Band band)
{
    if (band == Band::ir)
        return SpectralCurve({0.40, 0.90, 1.10}, {0.0, 1.0, 0.0});
    return SpectralCurve({0.35, 0.62, 1.10}, {0.0, 1.0, 0.0});
}

SourceModel source_model(Band band)
{
    return SourceModel{source_spectrum(band), AngularProfile::from_fwhm(120.0), 120.0};
}

DetectorModel detector_model(Band band)
{
    const double fwhm = band == Band::ir ? 132.0 : 120.0;
    return make_detector_model(detector_response(band), AngularProfile::from_fwhm(fwhm));
}

MaterialSpectrum white_plastic(Band band)
{
    return {SpectralCurve::constant(band == Band::ir ? 0.85 : 0.80), 5};
}

MaterialSpectrum seat_fabric(Band band)
{
    return {SpectralCurve::constant(band == Band::ir ? 0.70 : 0.25), 5};
}

MaterialSpectrum carpet(Band band)
{
    return {SpectralCurve::constant(band == Band::ir ? 0.55 : 0.08), 5};
}

} // namespace builtin

} // namespace cabinlifi
