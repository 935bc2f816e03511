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

#include "cabinlifi/channel.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cabinlifi
{

DiscreteCir DiscreteCir::normalized(double source_power) const
{
    if (!(source_power > 0.0))
        throw std::invalid_argument("normalized: source power must be positive");
    DiscreteCir out = *this;
    for (double &b : out.bins)
        b /= source_power;
    for (auto &row : out.per_bounce)
        for (double &b : row)
            b /= source_power;
    return out;
}

int bin_count(double t1, double t_last, double dw)
{
    const double span = (t_last - t1) / dw;
    return std::max(1, static_cast<int>(std::ceil(span)));
}

int bin_index(double t, double t1, double dw, int nb)
{
    int n = static_cast<int>(std::floor((t - t1) / dw));
    n = std::clamp(n, 0, nb - 1);
    // Settle against the edges exactly as they are evaluated, t1 + n dw.
    while (n > 0 && t < t1 + n * dw)
        --n;
    while (n < nb - 1 && t >= t1 + (n + 1) * dw)
        ++n;
    return n;
}

DiscreteCir bin_rays(std::span<const HitRecord> hits, double dw)
{
    if (hits.empty())
        throw std::invalid_argument("bin_rays: empty hit list");
    if (!(dw > 0.0))
        throw std::invalid_argument("bin_rays: bin width must be positive");
    double t1 = hits[0].t, tl = hits[0].t;
    int kmax = 0;
    for (const auto &h : hits)
    {
        t1 = std::min(t1, h.t);
        tl = std::max(tl, h.t);
        kmax = std::max(kmax, static_cast<int>(h.kappa));
    }
    DiscreteCir cir;
    cir.dw = dw;
    cir.t1 = t1;
    const int nb = bin_count(t1, tl, dw);
    cir.bins.assign(static_cast<std::size_t>(nb), 0.0);
    cir.per_bounce.assign(static_cast<std::size_t>(kmax) + 1, std::vector<double>(static_cast<std::size_t>(nb), 0.0));
    for (const auto &h : hits)
    {
        const auto n = static_cast<std::size_t>(bin_index(h.t, t1, dw, nb));
        cir.bins[n] += h.power;
        cir.per_bounce[h.kappa][n] += h.power;
    }
    return cir;
}

int fft_size(int nb)
{
    if (nb < 1)
        throw std::invalid_argument("fft_size: need at least one bin");
    int n = 1;
    while (n < nb)
        n <<= 1;
    return n;
}

Cfr cfr(const DiscreteCir &cir)
{
    const int n = fft_size(cir.size());
    std::vector<std::complex<double>> in(static_cast<std::size_t>(n)), out;
    for (int i = 0; i < cir.size(); ++i)
        in[static_cast<std::size_t>(i)] = cir.bins[static_cast<std::size_t>(i)];
    if (n == 1)
        out = in;
    else
    {
        Eigen::FFT<double> fft;
        fft.fwd(out, in);
    }
    Cfr h;
    h.n = n;
    h.sample_rate = 1e9 / cir.dw;
    h.values.resize(static_cast<std::size_t>(n));
    for (int k = -n / 2; k < n - n / 2; ++k)
        h.values[static_cast<std::size_t>(k + n / 2)] = out[static_cast<std::size_t>((k + n) % n)];
    return h;
}

double dc_gain(const DiscreteCir &cir)
{
    double s = 0.0;
    for (double b : cir.bins)
        s += b;
    return s;
}

double path_loss(double h0)
{
    if (!(h0 > 0.0))
        throw std::invalid_argument("path_loss: channel has no energy");
    return -10.0 * std::log10(h0);
}

DelayStats delay_stats(const DiscreteCir &cir)
{
    // Weights are squared amplitudes.
    double s0 = 0.0, s1 = 0.0;
    for (int n = 0; n < cir.size(); ++n)
    {
        const double w = cir.bins[static_cast<std::size_t>(n)] * cir.bins[static_cast<std::size_t>(n)];
        s0 += w;
        s1 += n * w;
    }
    if (!(s0 > 0.0))
        throw std::invalid_argument("delay_stats: channel has no energy");
    const double mean = s1 / s0;
    double s2 = 0.0;
    for (int n = 0; n < cir.size(); ++n)
    {
        const double w = cir.bins[static_cast<std::size_t>(n)] * cir.bins[static_cast<std::size_t>(n)];
        s2 += (n - mean) * (n - mean) * w;
    }
    DelayStats d;
    d.mean_excess = mean * cir.dw;
    d.mean_delay = cir.t1 + d.mean_excess;
    d.rms_delay = std::sqrt(s2 / s0) * cir.dw;
    return d;
}

double flatness(const DiscreteCir &cir)
{
    if (!cir.has_decomposition())
        throw std::invalid_argument("flatness: per-bounce decomposition is missing");
    const double h0 = dc_gain(cir);
    if (!(h0 > 0.0))
        throw std::invalid_argument("flatness: channel has no energy");
    double los = 0.0;
    for (double b : cir.per_bounce[0])
        los += b;
    return los / h0;
}

int TapSet::span() const
{
    if (taps.empty())
        return 0;
    return taps.back().index - taps.front().index;
}

std::vector<double> TapSet::impulse() const
{
    std::vector<double> h(static_cast<std::size_t>(span()) + 1, 0.0);
    for (const auto &t : taps)
        h[static_cast<std::size_t>(t.index - taps.front().index)] = t.gain;
    return h;
}

TapSet top_l_taps(const DiscreteCir &cir, int l)
{
    if (l < 1)
        throw std::invalid_argument("top_l_taps: L must be at least 1");
    const int nb = cir.size();
    l = std::min(l, nb);
    std::vector<int> idx(static_cast<std::size_t>(nb));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return cir.bins[static_cast<std::size_t>(a)] > cir.bins[static_cast<std::size_t>(b)];
    });
    TapSet set;
    set.dw = cir.dw;
    double kept = 0.0;
    for (int i = 0; i < l; ++i)
    {
        const int n = idx[static_cast<std::size_t>(i)];
        set.taps.push_back({n, cir.bins[static_cast<std::size_t>(n)]});
        kept += cir.bins[static_cast<std::size_t>(n)];
    }
    std::sort(set.taps.begin(), set.taps.end(), [](const Tap &a, const Tap &b) { return a.index < b.index; });
    const double total = dc_gain(cir);
    set.fraction = total > 0.0 ? kept / total : 0.0;
    return set;
}

LosResult analytical_los(const PlacedSource &source, const PlacedDetector &detector, double m, double area)
{
    const Vec3 v = detector.position - source.position;
    const double d = v.norm();
    if (!(d > 0.0))
        throw std::invalid_argument("analytical_los: source and detector coincide");
    const Vec3 u = v / d;
    const double cos_phi = source.aim().dot(u);
    const double cos_psi = -detector.normal.normalized().dot(u);
    LosResult r;
    r.delay = d / kSpeedOfLight;
    if (cos_phi <= 0.0 || cos_psi <= 0.0)
        return r;
    r.gain = (m + 1.0) * area * std::pow(cos_phi, m) * cos_psi / (2.0 * kPi * d * d);
    return r;
}

ChannelStats characterize(const RayDataBank &bank, int detector, double dw)
{
    const auto &hits = bank.hits.at(static_cast<std::size_t>(detector));
    const DiscreteCir cir = bin_rays(hits, dw).normalized(bank.metadata.source_power);
    ChannelStats s;
    s.i_hit = hits.size();
    s.h0 = dc_gain(cir);
    s.path_loss_db = path_loss(s.h0);
    const DelayStats d = delay_stats(cir);
    s.mean_delay = d.mean_delay;
    s.rms_delay = d.rms_delay;
    s.flatness = flatness(cir);
    return s;
}

// ---- CSV ----------------------------------------------------------------

void write_cir_csv(const std::filesystem::path &path, const DiscreteCir &cir, double source_power,
                   const std::string &stamp)
{
    std::FILE *f = std::fopen(path.string().c_str(), "w");
    if (!f)
        throw std::runtime_error("cannot write " + path.string());
    std::fprintf(f, "%s\n", stamp.c_str());
    std::fprintf(f, "# dw_ns=%.17g t1_ns=%.17g source_power_w=%.17g\n", cir.dw, cir.t1, source_power);
    std::fprintf(f, "t_ns,power_w");
    for (std::size_t k = 0; k < cir.per_bounce.size(); ++k)
        std::fprintf(f, ",kappa%zu_w", k);
    std::fprintf(f, "\n");
    for (int n = 0; n < cir.size(); ++n)
    {
        std::fprintf(f, "%.17g,%.17g", cir.time(n), cir.bins[static_cast<std::size_t>(n)]);
        for (const auto &row : cir.per_bounce)
            std::fprintf(f, ",%.17g", row[static_cast<std::size_t>(n)]);
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

void write_cfr_csv(const std::filesystem::path &path, const Cfr &h, double max_frequency, const std::string &stamp)
{
    std::FILE *f = std::fopen(path.string().c_str(), "w");
    if (!f)
        throw std::runtime_error("cannot write " + path.string());
    std::fprintf(f, "%s\n", stamp.c_str());
    std::fprintf(f, "f_hz,mag,mag_db\n");
    for (int k = 0; k <= h.n / 2 && k < h.n; ++k)
    {
        const double fk = h.frequency(k);
        if (fk > max_frequency * (1.0 + 1e-12))
            break;
        // k = N/2 is stored at index 0 of the shifted layout.
        const std::complex<double> v = k == h.n / 2 && h.n > 1 ? h.values[0] : h.at(k);
        const double mag = std::abs(v);
        std::fprintf(f, "%.17g,%.17g,%.17g\n", fk, mag, 20.0 * std::log10(mag));
    }
    std::fclose(f);
}

CirFile read_cir_csv(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open CIR file " + path.string());
    CirFile out;
    std::string line;
    bool have_dw = false, header = false;
    std::size_t columns = 0;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        if (line[0] == '#')
        {
            if (out.stamp.empty())
                out.stamp = line;
            std::istringstream ss(line.substr(1));
            std::string tok;
            while (ss >> tok)
            {
                const auto eq = tok.find('=');
                if (eq == std::string::npos)
                    continue;
                const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
                if (key == "dw_ns")
                {
                    out.cir.dw = parse_number(val);
                    have_dw = true;
                }
                else if (key == "t1_ns")
                    out.cir.t1 = parse_number(val);
                else if (key == "source_power_w")
                    out.source_power = parse_number(val);
            }
            continue;
        }
        if (!header)
        {
            if (line.rfind("t_ns,power_w", 0) != 0)
                throw ConfigError(path.string() + ": expected CIR header 't_ns,power_w,...'");
            columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
            out.cir.per_bounce.assign(columns - 2, {});
            header = true;
            continue;
        }
        std::vector<double> row;
        std::istringstream ss(line);
        std::string cell;
        try
        {
            while (std::getline(ss, cell, ','))
                row.push_back(parse_number(cell));
        }
        catch (const std::logic_error &)
        {
            throw ConfigError(path.string() + ": bad number '" + cell + "' in CIR row");
        }
        if (row.size() != columns)
            throw ConfigError(path.string() + ": ragged CIR row");
        out.cir.bins.push_back(row[1]);
        for (std::size_t k = 2; k < columns; ++k)
            out.cir.per_bounce[k - 2].push_back(row[k]);
    }
    if (!header || !have_dw || out.cir.bins.empty())
        throw ConfigError(path.string() + ": incomplete CIR file");
    return out;
}

} // namespace cabinlifi
