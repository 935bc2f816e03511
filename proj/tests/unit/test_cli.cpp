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

#include "cli.hpp"
#include "support.hpp"

#include "cabinlifi/channel.hpp"
#include "cabinlifi/config.hpp"
#include "cabinlifi/digest.hpp"
#include "cabinlifi/raytracer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cabinlifi
{
namespace
{

namespace fs = std::filesystem;
using testing::TempDir;

struct Outcome
{
    int code;
    std::string out, err;
};

Outcome cli_run(std::vector<std::string> args)
{
    // Output placement must not depend on the caller's environment.
    ::unsetenv("CABINLIFI_OUT");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines_of(const fs::path &p)
{
    std::ifstream in(p);
    std::vector<std::string> v;
    for (std::string l; std::getline(in, l);)
        v.push_back(l);
    return v;
}

std::vector<std::string> split(const std::string &s, char sep = ',')
{
    std::vector<std::string> v;
    std::stringstream ss(s);
    for (std::string c; std::getline(ss, c, sep);)
        v.push_back(c);
    return v;
}

const fs::path kRegression = fs::path(CABINLIFI_SOURCE_DIR) / "data" / "regression";

// Characterizes the checked-in regression banks into `dir`.
void characterize_regression(const fs::path &dir)
{
    std::vector<std::string> args{"characterize"};
    for (int s = 1; s <= 3; ++s)
        args.push_back((kRegression / ("ir_simplified_r" + std::to_string(s) + ".lrdb")).string());
    args.insert(args.end(), {"--out", dir.string()});
    const Outcome r = cli_run(args);
    ASSERT_EQ(r.code, 0) << r.err;
}

TEST(CliTrace, SmallRunWritesBanksAndRepeatsExactly)
{
    TempDir a("trace_a"), b("trace_b");
    const std::vector<std::string> base{"trace", "--band", "ir", "--cabin", "simplified", "--seed", "7", "--rays",
                                        "20", "--los-rays", "200", "--source", "r2", "--threads", "1"};
    auto with_out = [&](const fs::path &p) {
        auto v = base;
        v.insert(v.end(), {"--out", p.string()});
        return v;
    };
    const Outcome ra = cli_run(with_out(a.path()));
    const Outcome rb = cli_run(with_out(b.path()));
    ASSERT_EQ(ra.code, 0) << ra.err;
    ASSERT_EQ(rb.code, 0) << rb.err;
    EXPECT_EQ(ra.out.substr(0, ra.out.find('\n')), rb.out.substr(0, rb.out.find('\n')));
    EXPECT_NE(ra.out.find("seed=7"), std::string::npos);
    const fs::path fa = a.path() / "ir_simplified_r2.lrdb", fb = b.path() / "ir_simplified_r2.lrdb";
    ASSERT_TRUE(fs::exists(fa));
    EXPECT_EQ(slurp(fa), slurp(fb));
    const RayDataBank bank = load_rdb(fa);
    EXPECT_EQ(bank.metadata.seed, 7u);
    EXPECT_EQ(bank.metadata.rays_per_chip, 20u);
    EXPECT_EQ(bank.metadata.source, "r2");
}

TEST(CliTrace, SeedIsNotPartOfTheDigest)
{
    TempDir a("seed_a"), b("seed_b");
    const Outcome ra = cli_run({"trace", "--seed", "1", "--rays", "4", "--los-rays", "0", "--source", "r1",
                                "--threads", "1", "--out", a.path().string()});
    const Outcome rb = cli_run({"trace", "--seed", "2", "--rays", "4", "--los-rays", "0", "--source", "r1",
                                "--threads", "1", "--out", b.path().string()});
    ASSERT_EQ(ra.code, 0);
    ASSERT_EQ(rb.code, 0);
    EXPECT_EQ(load_rdb(a.path() / "ir_simplified_r1.lrdb").digest, load_rdb(b.path() / "ir_simplified_r1.lrdb").digest);
}

TEST(CliTrace, MissingCurveFileIsAConfigError)
{
    TempDir d("missing_curve");
    const std::string missing = (d.path() / "nope.csv").string();
    const Outcome r = cli_run({"trace", "--rays", "1", "--source-spectrum", missing, "--out", d.path().string()});
    EXPECT_EQ(r.code, cli::kConfigError);
    EXPECT_NE(r.err.find("nope.csv"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(d.path() / "ir_simplified_r1.lrdb"));
}

TEST(CliTrace, UnknownSourceAndBadBandAreConfigErrors)
{
    TempDir d("bad_args");
    EXPECT_EQ(cli_run({"trace", "--source", "r9", "--out", d.path().string()}).code, cli::kConfigError);
    EXPECT_EQ(cli_run({"trace", "--band", "uv", "--out", d.path().string()}).code, cli::kConfigError);
    EXPECT_EQ(cli_run({"frobnicate"}).code, cli::kConfigError);
}

// One unit-delay record on B2 from r2: a single-tap channel.
fs::path single_ray_bank(const fs::path &dir, double power)
{
    const ScenarioConfig cfg = ScenarioConfig::defaults(Band::ir);
    const CabinScene scene = build_cabin(cfg.scene);
    RayDataBank bank;
    bank.scenario_json = cfg.canonical_json();
    bank.digest = fnv1a64(bank.scenario_json);
    bank.metadata.seed = cfg.seed;
    bank.metadata.band = Band::ir;
    bank.metadata.source = "r2";
    bank.metadata.source_power = scene.sources()[static_cast<std::size_t>(scene.find_source("r2"))].power_total;
    bank.metadata.chips = 1;
    for (const auto &d : scene.detectors())
        bank.detector_names.push_back(d.name);
    bank.hits.resize(bank.detector_names.size());
    const int b2 = bank.find_detector("B2");
    bank.hits[static_cast<std::size_t>(b2)].push_back({static_cast<std::uint16_t>(b2), 0, 0.85, 2.25, power});
    const fs::path p = dir / "single_r2.lrdb";
    save_rdb(bank, p);
    return p;
}

TEST(CliCharacterize, SingleRayIsFlatWithZeroSpread)
{
    TempDir d("single");
    const fs::path rdb = single_ray_bank(d.path(), 1e-3);
    const Outcome r = cli_run({"characterize", rdb.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    EXPECT_NE(r.err.find("C1 has no records"), std::string::npos);

    const auto lines = lines_of(d.path() / "single_r2_stats.csv");
    ASSERT_GE(lines.size(), 3u);
    EXPECT_EQ(lines[0].rfind("# digest=", 0), 0u);
    EXPECT_EQ(lines[2], "S,R,i_hit,H0,tau_RMS_ns,rho,PL_dB,mean_delay_ns,H0_LoS,t_LoS_ns,link");
    bool seen = false;
    for (std::size_t i = 3; i < lines.size(); ++i)
    {
        const auto c = split(lines[i]);
        ASSERT_EQ(c.size(), 11u);
        if (c[1] != "B2")
        {
            EXPECT_EQ(c[2], "0");
            EXPECT_EQ(c[3], "nan");
            continue;
        }
        seen = true;
        EXPECT_EQ(c[2], "1");
        EXPECT_DOUBLE_EQ(std::stod(c[3]), 1e-3 / 16.0);
        EXPECT_DOUBLE_EQ(std::stod(c[4]), 0.0);
        EXPECT_DOUBLE_EQ(std::stod(c[5]), 1.0);
        EXPECT_EQ(c[10], "1");
    }
    EXPECT_TRUE(seen);
    EXPECT_TRUE(fs::exists(d.path() / "single_r2_B2_cir.csv"));
    EXPECT_TRUE(fs::exists(d.path() / "single_r2_B2_cfr.csv"));
    EXPECT_FALSE(fs::exists(d.path() / "single_r2_C1_cir.csv"));
}

TEST(CliCharacterize, RegressionReplayMatchesGoldenStats)
{
    TempDir d("replay");
    characterize_regression(d.path());
    for (int s = 1; s <= 3; ++s)
    {
        const std::string name = "ir_simplified_r" + std::to_string(s) + "_stats.csv";
        EXPECT_EQ(slurp(d.path() / name), slurp(kRegression / "golden" / name)) << name;
    }
}

TEST(CliCharacterize, BadBinWidthAndCorruptBank)
{
    TempDir d("bad_dw");
    const fs::path rdb = single_ray_bank(d.path(), 1.0);
    EXPECT_EQ(cli_run({"characterize", rdb.string(), "--dw", "0"}).code, cli::kConfigError);
    const fs::path bad = d.path() / "bad.lrdb";
    std::ofstream(bad) << "not a bank";
    EXPECT_EQ(cli_run({"characterize", bad.string()}).code, cli::kRuntimeError);
}

struct BerTable
{
    std::vector<std::string> head;
    std::vector<std::vector<double>> rows;
};

BerTable read_ber(const fs::path &p)
{
    const auto lines = lines_of(p);
    BerTable t;
    t.head = {lines.begin(), lines.begin() + 3};
    for (std::size_t i = 3; i < lines.size(); ++i)
    {
        std::vector<double> r;
        for (const auto &c : split(lines[i]))
            r.push_back(std::stod(c));
        t.rows.push_back(r);
    }
    return t;
}

TEST(CliBer, CirSweepIsMonotoneAndAgreementIsConsistent)
{
    TempDir d("ber");
    characterize_regression(d.path());
    const fs::path cir = d.path() / "ir_simplified_r2_B2_cir.csv";
    const Outcome r = cli_run({"ber", cir.string(), "--snr", "-16:-8:2", "--min-bits", "40000", "--threads", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const BerTable t = read_ber(d.path() / "ir_simplified_r2_B2_M4_ber.csv");
    EXPECT_EQ(t.head[2], "snr_db,ber_sim,ber_theory,bits,frames,errors,ci_low,ci_high");
    EXPECT_NE(t.head[1].find("axis_shift_db=100"), std::string::npos) << t.head[1];
    EXPECT_NE(t.head[1].find("detector=B2"), std::string::npos);
    ASSERT_EQ(t.rows.size(), 5u);
    for (std::size_t i = 1; i < t.rows.size(); ++i)
    {
        EXPECT_GT(t.rows[i][0], t.rows[i - 1][0]);
        EXPECT_LT(t.rows[i][2], t.rows[i - 1][2]);
    }
    EXPECT_LT(t.rows.back()[1], t.rows.front()[1]);

    bool agree = true;
    for (const auto &row : t.rows)
    {
        EXPECT_GE(row[3], 40000.0);
        EXPECT_DOUBLE_EQ(row[1], row[5] / row[3]);
        if (row[2] >= 1e-4)
            agree = agree && row[1] >= row[6] && row[1] <= row[7];
    }
    EXPECT_NE(t.head[1].find(std::string("agreement=") + (agree ? "1" : "0")), std::string::npos);
    EXPECT_TRUE(fs::exists(d.path() / "ir_simplified_r2_B2_M4_rate.csv"));
}

TEST(CliBer, FlatSixtyFourQamReportsSpectralEfficiency)
{
    TempDir d("flat");
    const Outcome r = cli_run({"ber", "--flat", "--m", "64", "--snr", "20", "--min-bits", "1000", "--threads", "1",
                               "--out", d.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("eta = 2.95"), std::string::npos) << r.out;
    EXPECT_TRUE(fs::exists(d.path() / "flat_M64_ber.csv"));
}

TEST(CliBer, TapsBeyondCyclicPrefixAreRejected)
{
    TempDir d("taps");
    characterize_regression(d.path());
    const Outcome r = cli_run({"ber", (d.path() / "ir_simplified_r2_B2_cir.csv").string(), "--taps", "9", "--ncp",
                               "7", "--snr", "0", "--min-bits", "100"});
    EXPECT_EQ(r.code, cli::kConfigError);
    EXPECT_NE(r.err.find("N_CP"), std::string::npos) << r.err;
    EXPECT_EQ(cli_run({"ber", "--flat", "--snr", "1:0:1"}).code, cli::kConfigError);
    EXPECT_EQ(cli_run({"ber"}).code, cli::kConfigError);
}

TEST(CliReport, OrderingsMissingRunsAndIdempotence)
{
    TempDir d("report");
    characterize_regression(d.path());
    for (const char *det : {"r2_B2", "r3_A3"})
    {
        const Outcome r = cli_run({"ber", (d.path() / (std::string("ir_simplified_") + det + "_cir.csv")).string(),
                                   "--snr", "-12:0:4", "--min-bits", "4000", "--threads", "1"});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    const Outcome r = cli_run({"report", d.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string md = slurp(d.path() / "report.md");
    EXPECT_NE(md.find("H0: "), std::string::npos);
    EXPECT_NE(md.find("tau_RMS: "), std::string::npos);
    EXPECT_NE(md.find("rho: "), std::string::npos);
    // Golden stats: B2 from r2 is the strongest of the three links.
    EXPECT_NE(md.find("H0: B2 > A3 > C1"), std::string::npos) << md;
    EXPECT_NE(md.find("## Missing runs"), std::string::npos);
    EXPECT_NE(md.find("BER M = 4 for C1"), std::string::npos);
    EXPECT_NE(r.out.find("missing: BER M = 4 for C1"), std::string::npos);
    EXPECT_NE(md.find("Seat gap (M = 4)"), std::string::npos);

    const std::string summary = slurp(d.path() / "report_summary.csv");
    ASSERT_EQ(cli_run({"report", d.path().string()}).code, 0);
    EXPECT_EQ(slurp(d.path() / "report.md"), md);
    EXPECT_EQ(slurp(d.path() / "report_summary.csv"), summary);
}

TEST(CliReport, EmptyDirectory)
{
    TempDir d("empty");
    const Outcome r = cli_run({"report", d.path().string()});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(slurp(d.path() / "report.md").find("Empty report"), std::string::npos);
}

TEST(CliReport, RefusesMixedRuns)
{
    TempDir d("mixed");
    characterize_regression(d.path());
    single_ray_bank(d.path(), 1.0);
    ASSERT_EQ(cli_run({"characterize", (d.path() / "single_r2.lrdb").string()}).code, 0);
    const Outcome r = cli_run({"report", d.path().string()});
    EXPECT_EQ(r.code, cli::kRuntimeError);
    EXPECT_NE(r.err.find("refusing to mix"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(d.path() / "report.md"));
}

TEST(CliReport, NotADirectory)
{
    EXPECT_EQ(cli_run({"report", "/nonexistent/cabinlifi"}).code, cli::kConfigError);
}

TEST(CliCrossing, InterpolatesInLogDomain)
{
    EXPECT_NEAR(cli::crossing_db({0, 10}, {1e-2, 1e-4}, 1e-3), 5.0, 1e-12);
    EXPECT_TRUE(std::isnan(cli::crossing_db({0, 10}, {1e-1, 1e-2}, 1e-3)));
    EXPECT_TRUE(std::isnan(cli::crossing_db({0, 10}, {1e-4, 1e-5}, 1e-3)));
    EXPECT_EQ(cli::crossing_db({0, 10}, {1e-2, 0.0}, 1e-3), 10.0);
}

} // namespace
} // namespace cabinlifi
