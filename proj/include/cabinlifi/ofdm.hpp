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

#ifndef CABINLIFI_OFDM_HPP
#define CABINLIFI_OFDM_HPP

#include "cabinlifi/channel.hpp"

#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace cabinlifi
{

using Complex = std::complex<double>;

struct OfdmConfig
{
    int n = 512;                      // FFT size
    int m = 4;                        // square QAM order
    int n_cp = 7;                     // cyclic prefix, samples
    double bandwidth = 2.5e9;         // B, Hz
    double channel_bandwidth = 5.0e9; // B_CH, Hz

    void validate() const;
    int bits_per_symbol() const;
    int data_carriers() const { return n / 2 - 1; }
    //! Independent bits per frame: (N/2 - 1) log2 M.
    int bits_per_frame() const { return data_carriers() * bits_per_symbol(); }
};

struct ClippingModel
{
    double i_min = 100.0;       // mA; -inf disables the lower clip
    double i_max = 700.0;       // mA; +inf disables the upper clip
    double beta = 400.0;        // mA
    double sigma_drive = 44.18; // mA

    //! sigma_drive from the bias ratio: beta_dB = 10 log10(r^2 + 1), r = beta / sigma.
    static ClippingModel from_bias_db(double beta, double beta_db, double i_min, double i_max);
    static ClippingModel unclipped(double sigma_drive, double beta = 0.0);
    double r() const { return beta / sigma_drive; }
    double beta_db() const { return 10.0 * std::log10(r() * r() + 1.0); }
    void validate() const;
};

struct BussgangParams
{
    double a = 1.0;       // attenuation
    double p_opt = 0.0;   // mA
    double p_elec = 0.0;  // mA^2
    double sigma_c2 = 0.0; // mA^2
    double mu_z = 0.0;    // mA
    double sigma = 0.0;   // drive standard deviation, mA
};

double q_function(double x);

BussgangParams bussgang(const ClippingModel &model);
// The same moments in the printed closed forms; finite limits only.
double bussgang_p_opt_printed(const ClippingModel &model);
double bussgang_p_elec_printed(const ClippingModel &model);

// ---- constellation ------------------------------------------------------

//! Gray-mapped square QAM with unit average energy.
class QamMapper
{
  public:
    explicit QamMapper(int m);
    int order() const { return m_; }
    int bits_per_symbol() const { return 2 * k_; }
    Complex map(std::span<const std::uint8_t> bits) const;
    void demap(Complex s, std::span<std::uint8_t> bits) const;

  private:
    int m_;
    int side_; // sqrt(M)
    int k_;    // bits per dimension
    double scale_;
    std::vector<int> gray_to_level_;
    std::vector<int> level_to_gray_;
};

// ---- transceiver --------------------------------------------------------

//! Real frame from data symbols on k = 1..N/2-1; 1/N-scaled inverse transform.
Eigen::VectorXd hermitian_frame(std::span<const Complex> data, int n);
//! Standard deviation of a frame of unit-energy symbols: sqrt(N-2)/N.
double natural_sigma(int n);

Eigen::VectorXd modulate(std::span<const std::uint8_t> bits, const OfdmConfig &config);
Eigen::VectorXd bias_clip(const Eigen::VectorXd &x_scaled, const ClippingModel &model);
double bias_clip(double x_scaled, const ClippingModel &model);

//! CP prepend, linear convolution with `h`, AWGN of variance sigma_w2, CP
//! removal. Throws std::invalid_argument when the channel is longer than the CP.
template <class Rng>
Eigen::VectorXd apply_channel_and_noise(const Eigen::VectorXd &x, std::span<const double> h, double sigma_w2,
                                        int n_cp, Rng &rng);
Eigen::VectorXd apply_channel(const Eigen::VectorXd &x, std::span<const double> h, int n_cp);

//! Frequency response of an impulse response on N points.
std::vector<Complex> channel_response(std::span<const double> h, int n);

//! Forward transform, division by A * s * H[k], minimum-distance demapping.
std::vector<std::uint8_t> demodulate_zf(const Eigen::VectorXd &y, std::span<const Complex> h_freq, double gain,
                                        const OfdmConfig &config);

// ---- link analysis ------------------------------------------------------

double bit_rate(const OfdmConfig &config);            // R_k, bits/s
double spectral_efficiency(const OfdmConfig &config); // eta_k, bits/s/Hz

//! Per-carrier BER of Eq-19 type for rectangular M1 x M2 QAM at SNR per bit g.
double qam_ber(double gamma, int m1, int m2);

struct TheoryResult
{
    double ber = 0.0;
    std::vector<double> gamma;     // gamma_k as defined for the bit rate R_k, linear, k = 1..N/2-1
    std::vector<double> gamma_det; // SNR per information bit at the detector, linear
};

//! gamma_k = B A^2 E|X|^2 / (R_k N (sigma_c^2 + sigma_w^2/|H[k]|^2)) with
//! E|X|^2 the drive-domain symbol energy. The BER is averaged over the data
//! carriers at gamma_det = gamma_k (N - 2) / (N + N_CP), which removes the
//! cyclic-prefix and null-carrier overhead carried by R_k.
TheoryResult ber_theory(std::span<const Complex> h_freq, const BussgangParams &params, const OfdmConfig &config,
                        double sigma_w2);

enum class TapNormalization
{
    raw,        // MCRT gains; sweep axis shifted by -100 dB
    unit_energy // sum of squared taps = 1; no shift
};

enum class TapLayout
{
    compact, // L largest taps, in delay order, on consecutive samples
    delay    // taps at their true relative delays
};

std::vector<double> effective_channel(const TapSet &taps, TapLayout layout, TapNormalization norm);

struct SweepPoint
{
    double snr_db = 0.0; // received electrical SNR per bit axis
    double ber_sim = 0.0;
    double ber_theory = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    std::uint64_t frames = 0;
    double sigma_w2 = 0.0;
    std::vector<double> gamma; // gamma_k, linear
};

struct LinkResult
{
    std::vector<SweepPoint> points;
    double rate = 0.0; // R_k
    double eta = 0.0;  // eta_k
    BussgangParams bussgang;
};

//! Noise variance for an axis value; the axis is the transmit-referenced
//! electrical SNR per bit (gamma with |H| = 1, sigma_c = 0) minus the shift.
double noise_for_axis(double snr_db, const BussgangParams &params, const OfdmConfig &config, double shift_db);

struct SweepOptions
{
    std::vector<double> snr_db;
    std::uint64_t min_bits = 1000000;
    std::uint64_t seed = 1;
    double axis_shift_db = 100.0;
    int threads = 0;
};

LinkResult ber_montecarlo(std::span<const double> h, const ClippingModel &model, const OfdmConfig &config,
                          const SweepOptions &options);

//! Two-sided 95% normal-approximation binomial interval around p for n trials.
std::pair<double, double> binomial_interval(double p, std::uint64_t n);

// ---- template implementation ---------------------------------------------

template <class Rng>
Eigen::VectorXd apply_channel_and_noise(const Eigen::VectorXd &x, std::span<const double> h, double sigma_w2,
                                        int n_cp, Rng &rng)
{
    Eigen::VectorXd y = apply_channel(x, h, n_cp);
    if (sigma_w2 > 0.0)
    {
        std::normal_distribution<double> noise(0.0, std::sqrt(sigma_w2));
        for (Eigen::Index i = 0; i < y.size(); ++i)
            y[i] += noise(rng);
    }
    return y;
}

} // namespace cabinlifi

#endif
