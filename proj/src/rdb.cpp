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

#include "cabinlifi/digest.hpp"
#include "cabinlifi/raytracer.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

namespace cabinlifi
{

static_assert(std::endian::native == std::endian::little, "RDB I/O assumes a little-endian host");

namespace
{

constexpr char kMagic[4] = {'L', 'R', 'D', 'B'};
constexpr char kTrailerMagic[4] = {'L', 'R', 'D', 'M'};
constexpr std::size_t kRecordBytes = 2 + 1 + 8 + 8 + 8;

class Writer
{
  public:
    template <class T>
    void put(T v)
    {
        char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        out.insert(out.end(), b, b + sizeof(T));
    }
    void bytes(const char *p, std::size_t n) { out.insert(out.end(), p, p + n); }
    void str(const std::string &s)
    {
        put<std::uint64_t>(s.size());
        bytes(s.data(), s.size());
    }
    std::vector<char> out;
};

class Reader
{
  public:
    explicit Reader(std::span<const char> b) : buf{b} {}
    template <class T>
    T get()
    {
        need(sizeof(T));
        T v;
        std::memcpy(&v, buf.data() + pos, sizeof(T));
        pos += sizeof(T);
        return v;
    }
    void bytes(char *p, std::size_t n)
    {
        need(n);
        std::memcpy(p, buf.data() + pos, n);
        pos += n;
    }
    std::string str()
    {
        const auto n = get<std::uint64_t>();
        need(n);
        std::string s(buf.data() + pos, buf.data() + pos + n);
        pos += n;
        return s;
    }
    void need(std::uint64_t n) const
    {
        if (n > buf.size() - pos)
            throw RdbError("ray data bank is truncated");
    }
    std::span<const char> buf;
    std::size_t pos = 0;
};

} // namespace

std::vector<char> serialize_rdb(const RayDataBank &bank)
{
    Writer w;
    w.bytes(kMagic, 4);
    w.put<std::uint16_t>(kRdbVersion);
    w.put<std::uint64_t>(bank.metadata.seed);
    w.put<std::uint64_t>(bank.record_count());
    for (const auto &list : bank.hits)
        for (const auto &r : list)
        {
            w.put(r.detector_id);
            w.put(r.kappa);
            w.put(r.wavelength);
            w.put(r.t);
            w.put(r.power);
        }

    const TraceMetadata &m = bank.metadata;
    w.bytes(kTrailerMagic, 4);
    w.put<std::uint64_t>(m.rays_per_chip);
    w.put<std::uint64_t>(m.los_rays_per_chip);
    w.put<double>(m.min_rel_intensity);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(m.kappa_max));
    w.put<std::uint8_t>(static_cast<std::uint8_t>(m.scatter_count));
    w.put<std::uint8_t>(m.band == Band::ir ? 0 : 1);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(m.chips));
    w.put<double>(m.source_power);
    w.str(m.source);
    w.put<std::uint16_t>(static_cast<std::uint16_t>(bank.detector_names.size()));
    for (const auto &n : bank.detector_names)
        w.str(n);
    w.str(bank.scenario_json);
    w.put<std::uint64_t>(bank.digest);
    return std::move(w.out);
}

RayDataBank deserialize_rdb(std::span<const char> bytes, std::uint64_t expected_digest)
{
    Reader r(bytes);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw RdbError("not a ray data bank (bad magic)");
    const auto version = r.get<std::uint16_t>();
    if (version != kRdbVersion)
        throw RdbError("unsupported ray data bank version " + std::to_string(version) + " (expected " +
                       std::to_string(kRdbVersion) + ")");
    RayDataBank bank;
    bank.metadata.seed = r.get<std::uint64_t>();
    const auto count = r.get<std::uint64_t>();
    r.need(count > (bytes.size() / kRecordBytes) ? bytes.size() + 1 : count * kRecordBytes);
    std::vector<HitRecord> records(count);
    for (auto &rec : records)
    {
        rec.detector_id = r.get<std::uint16_t>();
        rec.kappa = r.get<std::uint8_t>();
        rec.wavelength = r.get<double>();
        rec.t = r.get<double>();
        rec.power = r.get<double>();
    }

    r.bytes(magic, 4);
    if (std::memcmp(magic, kTrailerMagic, 4) != 0)
        throw RdbError("ray data bank metadata block is missing or corrupt");
    TraceMetadata &m = bank.metadata;
    m.rays_per_chip = r.get<std::uint64_t>();
    m.los_rays_per_chip = r.get<std::uint64_t>();
    m.min_rel_intensity = r.get<double>();
    m.kappa_max = r.get<std::uint8_t>();
    m.scatter_count = r.get<std::uint8_t>();
    const auto band = r.get<std::uint8_t>();
    if (band > 1)
        throw RdbError("ray data bank has an unknown band code");
    m.band = band == 0 ? Band::ir : Band::vl;
    m.chips = static_cast<int>(r.get<std::uint32_t>());
    m.source_power = r.get<double>();
    m.source = r.str();
    const auto n_det = r.get<std::uint16_t>();
    for (std::uint16_t i = 0; i < n_det; ++i)
        bank.detector_names.push_back(r.str());
    bank.scenario_json = r.str();
    bank.digest = r.get<std::uint64_t>();
    if (r.pos != bytes.size())
        throw RdbError("ray data bank has trailing bytes");

    if (fnv1a64(bank.scenario_json) != bank.digest)
        throw RdbError("ray data bank digest does not match its scenario");
    if (expected_digest != 0 && expected_digest != bank.digest)
        throw RdbError("ray data bank digest " + digest_hex(bank.digest) + " does not match scenario digest " +
                       digest_hex(expected_digest));

    bank.hits.resize(n_det);
    for (const auto &rec : records)
    {
        if (rec.detector_id >= n_det)
            throw RdbError("ray data bank record references an unknown detector");
        bank.hits[rec.detector_id].push_back(rec);
    }
    return bank;
}

void save_rdb(const RayDataBank &bank, const std::filesystem::path &path)
{
    const auto bytes = serialize_rdb(bank);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

RayDataBank load_rdb(const std::filesystem::path &path, std::uint64_t expected_digest)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw RdbError("cannot open ray data bank " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try
    {
        return deserialize_rdb(bytes, expected_digest);
    }
    catch (const RdbError &e)
    {
        throw RdbError(path.string() + ": " + e.what());
    }
}

void export_rdb_csv(const RayDataBank &bank, const std::filesystem::path &path)
{
    std::FILE *f = std::fopen(path.string().c_str(), "w");
    if (!f)
        throw std::runtime_error("cannot write " + path.string());
    std::fprintf(f, "# digest=%s seed=%llu\n", digest_hex(bank.digest).c_str(),
                 static_cast<unsigned long long>(bank.metadata.seed));
    std::fprintf(f, "detector_id,kappa,wavelength_um,t_ns,power_w\n");
    for (const auto &list : bank.hits)
        for (const auto &r : list)
            std::fprintf(f, "%u,%u,%.17g,%.17g,%.17g\n", static_cast<unsigned>(r.detector_id),
                         static_cast<unsigned>(r.kappa), r.wavelength, r.t, r.power);
    std::fclose(f);
}

} // namespace cabinlifi
