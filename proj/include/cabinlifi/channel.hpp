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

#ifndef CABINLIFI_CHANNEL_HPP
#define CABINLIFI_CHANNEL_HPP

#include "cabinlifi/raytracer.hpp"
#include "cabinlifi/scene.hpp"

#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace cabinlifi
{

//! Binned impulse response. Bin n covers [t1 + n dw, t1 + (n+1) dw).
struct DiscreteCir
{
    std::vector<double> bins;
    double dw = 0.2; // ns
    double t1 = 0.0; // ns
    // per_bounce[kappa][n]; empty when no decomposition is available.
    std::vector<std::vector<double>> per_bounce;

    int size() const { return static_cast<int>(bins.size()); }
    double time(int n) const { return t1 + n * dw; }
    bool has_decomposition() const { return !per_bounce.empty(); }
    //! Copy with every bin divided by `source_power`.
    DiscreteCir normalized(double source_power) const;
};

struct Cfr
{
    // Ordered k = -N/2 .. N/2-1 (k = 0 at index N/2).
    std::vector<std::complex<double>> values;
    int n = 0;
    double sample_rate = 0.0; // Hz, 1/dw

    std::complex<double> at(int k) const { return values[static_cast<std::size_t>(k + n / 2)]; }
    double frequency(int k) const { return k * sample_rate / n; }
};

struct DelayStats
{
    double mean_delay = 0.0;  // ns, absolute (t1 + mean index * dw)
    double mean_excess = 0.0; // ns, relative to t1
    double rms_delay = 0.0;   // ns
};

struct ChannelStats
{
    std::size_t i_hit = 0;
    double h0 = 0.0;
    double path_loss_db = 0.0;
    double mean_delay = 0.0; // ns
    double rms_delay = 0.0;  // ns
    double flatness = 0.0;
};

struct Tap
{
    int index = 0; // bin index
    double gain = 0.0;
};

struct TapSet
{
    std::vector<Tap> taps; // sorted by delay
    double fraction = 0.0; // retained share of the CIR power
    double dw = 0.2;       // ns

    int size() const { return static_cast<int>(taps.size()); }
    //! Largest delay difference between selected taps, in samples.
    int span() const;
    //! Dense impulse response starting at the earliest selected tap.
    std::vector<double> impulse() const;
};

struct LosResult
{
    double gain = 0.0;
    double delay = 0.0; // ns
};

//! Throws std::invalid_argument on an empty hit list or dw <= 0.
DiscreteCir bin_rays(std::span<const HitRecord> hits, double dw);
//! Index of the bin holding time t, for a CIR with `nb` bins starting at t1.
int bin_index(double t, double t1, double dw, int nb);
int bin_count(double t1, double t_last, double dw);

//! Zero-padded to N = 2^ceil(log2 N_b).
Cfr cfr(const DiscreteCir &cir);
int fft_size(int nb);

double dc_gain(const DiscreteCir &cir);
double path_loss(double h0);
DelayStats delay_stats(const DiscreteCir &cir);
double flatness(const DiscreteCir &cir);
//! Ties between equal gains go to the earlier bin. L is clamped to N_b.
TapSet top_l_taps(const DiscreteCir &cir, int l);

//! Point-source generalized-Lambertian line-of-sight gain and delay.
LosResult analytical_los(const PlacedSource &source, const PlacedDetector &detector, double m, double area);

//! Stats of one detector in a bank, normalized by the traced source power.
ChannelStats characterize(const RayDataBank &bank, int detector, double dw);

// ---- CSV ----------------------------------------------------------------
// `stamp` is written verbatim as the leading comment line.

//! Columns t_ns,power_w,kappa0_w,... with bins in watts.
void write_cir_csv(const std::filesystem::path &path, const DiscreteCir &cir, double source_power,
                   const std::string &stamp);
//! Single-sided, 0 .. max_frequency inclusive; columns f_hz,mag,mag_db.
void write_cfr_csv(const std::filesystem::path &path, const Cfr &h, double max_frequency, const std::string &stamp);

struct CirFile
{
    DiscreteCir cir; // watts
    double source_power = 1.0;
    std::string stamp;
};
CirFile read_cir_csv(const std::filesystem::path &path);

} // namespace cabinlifi

#endif
