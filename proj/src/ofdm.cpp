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

#include "cabinlifi/ofdm.hpp"

#include "cabinlifi/parallel.hpp"
#include "cabinlifi/rng.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>

namespace cabinlifi
{

namespace
{
Eigen::FFT<double> &fft_engine()
{
    thread_local Eigen::FFT<double> fft;
    return fft;
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int isqrt_exact(int m)
{
    const int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
    return s * s == m ? s : -1;
}
} // namespace

void OfdmConfig::validate() const
{
    if (!is_pow2(n) || n < 8)
        throw ConfigError("ofdm: N must be a power of two >= 8");
    const int side = isqrt_exact(m);
    if (m < 4 || side < 2 || !is_pow2(side))
        throw ConfigError("ofdm: M must be a square power of two (4, 16, 64, ...)");
    if (n_cp < 0 || n_cp >= n)
        throw ConfigError("ofdm: N_CP must lie in [0, N)");
    if (!(bandwidth > 0.0) || !(channel_bandwidth > 0.0))
        throw ConfigError("ofdm: bandwidths must be positive");
}

int OfdmConfig::bits_per_symbol() const
{
    int b = 0;
    while ((1 << b) < m)
        ++b;
    return b;
}

// ---- clipping -----------------------------------------------------------

ClippingModel ClippingModel::from_bias_db(double beta, double beta_db, double i_min, double i_max)
{
    const double r2 = std::pow(10.0, beta_db / 10.0) - 1.0;
    if (!(r2 > 0.0))
        throw ConfigError("clipping: beta_dB must be positive");
    ClippingModel m{i_min, i_max, beta, beta / std::sqrt(r2)};
    m.validate();
    return m;
}

ClippingModel ClippingModel::unclipped(double sigma_drive, double beta)
{
    const double inf = std::numeric_limits<double>::infinity();
    return ClippingModel{-inf, inf, beta, sigma_drive};
}

void ClippingModel::validate() const
{
    if (!(sigma_drive > 0.0))
        throw ConfigError("clipping: sigma_drive must be positive");
    if (!(i_min <= beta && beta <= i_max))
        throw ConfigError("clipping: bias must lie within [I_min, I_max]");
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

BussgangParams bussgang(const ClippingModel &model)
{
    model.validate();
    const double s = model.sigma_drive;
    const double a = (model.i_min - model.beta) / s; // may be -inf
    const double b = (model.i_max - model.beta) / s; // may be +inf
    const double phi_a = std::isinf(a) ? 0.0 : std::exp(-0.5 * a * a) / std::sqrt(2.0 * kPi);
    const double phi_b = std::isinf(b) ? 0.0 : std::exp(-0.5 * b * b) / std::sqrt(2.0 * kPi);
    const double cdf_a = q_function(-a); // P(z < a)
    const double sf_b = q_function(b);   // P(z > b)
    const double a_cdf = std::isinf(a) ? 0.0 : a * cdf_a;
    const double b_sf = std::isinf(b) ? 0.0 : b * sf_b;
    const double a2_cdf = std::isinf(a) ? 0.0 : a * a * cdf_a;
    const double b2_sf = std::isinf(b) ? 0.0 : b * b * sf_b;
    const double a_phi = std::isinf(a) ? 0.0 : a * phi_a;
    const double b_phi = std::isinf(b) ? 0.0 : b * phi_b;

    // Moments of the standard normal clipped to [a, b].
    const double inside = q_function(a) - q_function(b);
    const double m1 = a_cdf + (phi_a - phi_b) + b_sf;
    const double m2 = a2_cdf + inside + a_phi - b_phi + b2_sf;

    BussgangParams p;
    p.sigma = s;
    p.a = inside;
    p.mu_z = s * m1;
    p.p_opt = model.beta + p.mu_z;
    p.p_elec = model.beta * model.beta + 2.0 * model.beta * s * m1 + s * s * m2;
    p.sigma_c2 = std::max(0.0, s * s * ((m2 - m1 * m1) - inside * inside));
    return p;
}

double bussgang_p_opt_printed(const ClippingModel &mdl)
{
    const double s = mdl.sigma_drive, b = mdl.beta, lo = mdl.i_min, hi = mdl.i_max;
    return s / std::sqrt(2.0 * kPi) *
               (std::exp(-(lo - b) * (lo - b) / (2 * s * s)) - std::exp(-(hi - b) * (hi - b) / (2 * s * s))) +
           (hi - b) * q_function((hi - b) / s) + (b - lo) * q_function((lo - b) / s) + lo;
}

double bussgang_p_elec_printed(const ClippingModel &mdl)
{
    const double s = mdl.sigma_drive, b = mdl.beta, lo = mdl.i_min, hi = mdl.i_max;
    return s / std::sqrt(2.0 * kPi) *
               ((lo + b) * std::exp(-(lo - b) * (lo - b) / (2 * s * s)) -
                (hi + b) * std::exp(-(hi - b) * (hi - b) / (2 * s * s))) +
           (b * b + s * s - lo * lo) * q_function((lo - b) / s) + (hi * hi - b * b - s * s) * q_function((hi - b) / s) +
           lo * lo;
}

// ---- constellation ------------------------------------------------------

QamMapper::QamMapper(int m) : m_{m}
{
    side_ = isqrt_exact(m);
    if (m < 4 || side_ < 2 || !is_pow2(side_))
        throw std::invalid_argument("QamMapper: M must be a square power of two");
    k_ = 0;
    while ((1 << k_) < side_)
        ++k_;
    scale_ = 1.0 / std::sqrt(2.0 * (m - 1) / 3.0);
    level_to_gray_.resize(static_cast<std::size_t>(side_));
    gray_to_level_.resize(static_cast<std::size_t>(side_));
    for (int i = 0; i < side_; ++i)
    {
        const int g = i ^ (i >> 1);
        level_to_gray_[static_cast<std::size_t>(i)] = g;
        gray_to_level_[static_cast<std::size_t>(g)] = i;
    }
}

Complex QamMapper::map(std::span<const std::uint8_t> bits) const
{
    auto axis = [this](std::span<const std::uint8_t> b) {
        int g = 0;
        for (int i = 0; i < k_; ++i)
            g = (g << 1) | (b[static_cast<std::size_t>(i)] & 1);
        const int level = gray_to_level_[static_cast<std::size_t>(g)];
        return (2 * level - (side_ - 1)) * scale_;
    };
    return {axis(bits.subspan(0, static_cast<std::size_t>(k_))),
            axis(bits.subspan(static_cast<std::size_t>(k_), static_cast<std::size_t>(k_)))};
}

void QamMapper::demap(Complex s, std::span<std::uint8_t> bits) const
{
    auto axis = [this](double v, std::span<std::uint8_t> b) {
        int level = static_cast<int>(std::lround((v / scale_ + (side_ - 1)) / 2.0));
        level = std::clamp(level, 0, side_ - 1);
        const int g = level_to_gray_[static_cast<std::size_t>(level)];
        for (int i = 0; i < k_; ++i)
            b[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((g >> (k_ - 1 - i)) & 1);
    };
    axis(s.real(), bits.subspan(0, static_cast<std::size_t>(k_)));
    axis(s.imag(), bits.subspan(static_cast<std::size_t>(k_), static_cast<std::size_t>(k_)));
}

// ---- transceiver --------------------------------------------------------

double natural_sigma(int n) { return std::sqrt(static_cast<double>(n - 2)) / n; }

Eigen::VectorXd hermitian_frame(std::span<const Complex> data, int n)
{
    if (static_cast<int>(data.size()) != n / 2 - 1)
        throw std::invalid_argument("hermitian_frame: need N/2 - 1 data symbols");
    std::vector<Complex> spec(static_cast<std::size_t>(n), Complex(0.0, 0.0)), time;
    for (int k = 1; k < n / 2; ++k)
    {
        spec[static_cast<std::size_t>(k)] = data[static_cast<std::size_t>(k - 1)];
        spec[static_cast<std::size_t>(n - k)] = std::conj(data[static_cast<std::size_t>(k - 1)]);
    }
    fft_engine().inv(time, spec); // 1/N scaling
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i)
        x[i] = time[static_cast<std::size_t>(i)].real();
    return x;
}

Eigen::VectorXd modulate(std::span<const std::uint8_t> bits, const OfdmConfig &config)
{
    if (static_cast<int>(bits.size()) != config.bits_per_frame())
        throw std::invalid_argument("modulate: bit count must equal (N/2 - 1) log2 M");
    const QamMapper qam(config.m);
    const auto bps = static_cast<std::size_t>(qam.bits_per_symbol());
    std::vector<Complex> data(static_cast<std::size_t>(config.data_carriers()));
    for (std::size_t k = 0; k < data.size(); ++k)
        data[k] = qam.map(bits.subspan(k * bps, bps));
    return hermitian_frame(data, config.n);
}

double bias_clip(double x, const ClippingModel &model) { return std::clamp(x + model.beta, model.i_min, model.i_max); }

Eigen::VectorXd bias_clip(const Eigen::VectorXd &x, const ClippingModel &model)
{
    Eigen::VectorXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        out[i] = bias_clip(x[i], model);
    return out;
}

Eigen::VectorXd apply_channel(const Eigen::VectorXd &x, std::span<const double> h, int n_cp)
{
    if (h.empty())
        throw std::invalid_argument("apply_channel: empty channel");
    if (static_cast<int>(h.size()) - 1 > n_cp)
        throw std::invalid_argument("apply_channel: channel span exceeds the cyclic prefix");
    const Eigen::Index n = x.size();
    Eigen::VectorXd with_cp(n + n_cp);
    with_cp.head(n_cp) = x.tail(n_cp);
    with_cp.tail(n) = x;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const Eigen::Index j = i + n_cp;
        double acc = 0.0;
        for (std::size_t l = 0; l < h.size(); ++l)
            acc += h[l] * with_cp[j - static_cast<Eigen::Index>(l)];
        y[i] = acc;
    }
    return y;
}

std::vector<Complex> channel_response(std::span<const double> h, int n)
{
    if (static_cast<int>(h.size()) > n)
        throw std::invalid_argument("channel_response: channel longer than the transform");
    std::vector<Complex> in(static_cast<std::size_t>(n), Complex(0.0, 0.0)), out;
    for (std::size_t i = 0; i < h.size(); ++i)
        in[i] = h[i];
    fft_engine().fwd(out, in);
    return out;
}

std::vector<std::uint8_t> demodulate_zf(const Eigen::VectorXd &y, std::span<const Complex> h_freq, double gain,
                                        const OfdmConfig &config)
{
    const int n = config.n;
    if (y.size() != n || static_cast<int>(h_freq.size()) != n)
        throw std::invalid_argument("demodulate_zf: frame or channel length mismatch");
    std::vector<Complex> in(static_cast<std::size_t>(n)), spec;
    for (int i = 0; i < n; ++i)
        in[static_cast<std::size_t>(i)] = y[i];
    fft_engine().fwd(spec, in);
    const QamMapper qam(config.m);
    const auto bps = static_cast<std::size_t>(qam.bits_per_symbol());
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(config.bits_per_frame()));
    for (int k = 1; k < n / 2; ++k)
    {
        const Complex hk = gain * h_freq[static_cast<std::size_t>(k)];
        if (std::abs(hk) == 0.0)
            throw std::runtime_error("demodulate_zf: zero channel gain on a data subcarrier");
        qam.demap(spec[static_cast<std::size_t>(k)] / hk,
                  std::span<std::uint8_t>(bits).subspan(static_cast<std::size_t>(k - 1) * bps, bps));
    }
    return bits;
}

// ---- link analysis ------------------------------------------------------

double bit_rate(const OfdmConfig &c)
{
    return c.bandwidth * c.bits_per_symbol() * (static_cast<double>(c.n - 2) / c.n) *
           (static_cast<double>(c.n) / (c.n + c.n_cp));
}

double spectral_efficiency(const OfdmConfig &c) { return bit_rate(c) / (2.0 * c.bandwidth); }

double qam_ber(double gamma, int m1, int m2)
{
    const double mm = static_cast<double>(m1) * m2;
    const double lg = std::log2(mm);
    const double coeff = (4.0 * mm - 2.0 * (m1 + m2)) / (mm * lg);
    return coeff * q_function(std::sqrt(6.0 * gamma * lg / (static_cast<double>(m1) * m1 + static_cast<double>(m2) * m2 - 2.0)));
}

namespace
{
double drive_symbol_energy(const BussgangParams &p, int n)
{
    const double s = p.sigma / natural_sigma(n);
    return s * s;
}
} // namespace

TheoryResult ber_theory(std::span<const Complex> h_freq, const BussgangParams &params, const OfdmConfig &config,
                        double sigma_w2)
{
    config.validate();
    const int n = config.n;
    const int side = isqrt_exact(config.m);
    const double ex = drive_symbol_energy(params, n);
    const double rk = bit_rate(config);
    const double overhead = static_cast<double>(n - 2) / (n + config.n_cp);
    TheoryResult r;
    double sum = 0.0;
    for (int k = 1; k < n / 2; ++k)
    {
        const double h2 = std::norm(h_freq[static_cast<std::size_t>(k)]);
        const double denom = params.sigma_c2 + (sigma_w2 > 0.0 ? sigma_w2 / h2 : 0.0);
        const double g = denom > 0.0 ? config.bandwidth * params.a * params.a * ex / (rk * n * denom)
                                     : std::numeric_limits<double>::infinity();
        r.gamma.push_back(g);
        r.gamma_det.push_back(g * overhead);
        sum += qam_ber(g * overhead, side, side);
    }
    r.ber = 2.0 / (n - 2) * sum;
    return r;
}

std::vector<double> effective_channel(const TapSet &taps, TapLayout layout, TapNormalization norm)
{
    if (taps.taps.empty())
        throw std::invalid_argument("effective_channel: empty tap set");
    std::vector<double> h;
    if (layout == TapLayout::delay)
        h = taps.impulse();
    else
        for (const auto &t : taps.taps)
            h.push_back(t.gain);
    if (norm == TapNormalization::unit_energy)
    {
        double e = 0.0;
        for (double v : h)
            e += v * v;
        if (!(e > 0.0))
            throw std::invalid_argument("effective_channel: zero-energy taps");
        for (double &v : h)
            v /= std::sqrt(e);
    }
    return h;
}

double noise_for_axis(double snr_db, const BussgangParams &params, const OfdmConfig &config, double shift_db)
{
    const double gamma_ref = std::pow(10.0, (snr_db + shift_db) / 10.0);
    return config.bandwidth * params.a * params.a * drive_symbol_energy(params, config.n) /
           (bit_rate(config) * config.n * gamma_ref);
}

std::pair<double, double> binomial_interval(double p, std::uint64_t n)
{
    const double half = 1.959963984540054 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return {p - half, p + half};
}

LinkResult ber_montecarlo(std::span<const double> h, const ClippingModel &model, const OfdmConfig &config,
                          const SweepOptions &options)
{
    config.validate();
    if (static_cast<int>(h.size()) - 1 > config.n_cp)
        throw ConfigError("ofdm: channel span exceeds the cyclic prefix");
    LinkResult result;
    result.bussgang = bussgang(model);
    result.rate = bit_rate(config);
    result.eta = spectral_efficiency(config);
    const BussgangParams &bp = result.bussgang;
    const double s = model.sigma_drive / natural_sigma(config.n);
    const std::vector<Complex> hf = channel_response(h, config.n);

    const auto bpf = static_cast<std::uint64_t>(config.bits_per_frame());
    const std::uint64_t frames = std::max<std::uint64_t>(1, (options.min_bits + bpf - 1) / bpf);
    constexpr std::uint64_t kChunk = 64;
    const std::size_t n_chunks = static_cast<std::size_t>((frames + kChunk - 1) / kChunk);

    for (std::size_t pi = 0; pi < options.snr_db.size(); ++pi)
    {
        SweepPoint pt;
        pt.snr_db = options.snr_db[pi];
        pt.sigma_w2 = noise_for_axis(pt.snr_db, bp, config, options.axis_shift_db);
        const TheoryResult th = ber_theory(hf, bp, config, pt.sigma_w2);
        pt.ber_theory = th.ber;
        pt.gamma = th.gamma;

        std::vector<std::uint64_t> chunk_errors(n_chunks, 0);
        parallel_for(n_chunks, options.threads, [&](std::size_t c) {
            const QamMapper qam(config.m);
            std::vector<std::uint8_t> bits(bpf);
            std::uint64_t errors = 0;
            const std::uint64_t end = std::min(frames, (c + 1) * kChunk);
            for (std::uint64_t f = c * kChunk; f < end; ++f)
            {
                std::mt19937_64 rng(stream_key(options.seed, {static_cast<std::uint64_t>(pi), f}));
                for (std::size_t i = 0; i < bits.size(); i += 64)
                {
                    std::uint64_t word = rng();
                    for (std::size_t j = i; j < std::min(bits.size(), i + 64); ++j, word >>= 1)
                        bits[j] = static_cast<std::uint8_t>(word & 1);
                }
                const Eigen::VectorXd x = modulate(bits, config) * s;
                const Eigen::VectorXd xc = bias_clip(x, model);
                const Eigen::VectorXd y = apply_channel_and_noise(xc, h, pt.sigma_w2, config.n_cp, rng);
                const auto out = demodulate_zf(y, hf, bp.a * s, config);
                for (std::size_t j = 0; j < bits.size(); ++j)
                    errors += bits[j] != out[j];
            }
            chunk_errors[c] = errors;
        });
        for (auto e : chunk_errors)
            pt.errors += e;
        pt.frames = frames;
        pt.bits = frames * bpf;
        pt.ber_sim = static_cast<double>(pt.errors) / static_cast<double>(pt.bits);
        result.points.push_back(std::move(pt));
    }
    return result;
}

} // namespace cabinlifi
