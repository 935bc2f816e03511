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

#include "cabinlifi/channel.hpp"
#include "cabinlifi/config.hpp"
#include "cabinlifi/digest.hpp"
#include "cabinlifi/ofdm.hpp"
#include "cabinlifi/raytracer.hpp"
#include "cabinlifi/scene.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

namespace cabinlifi::cli
{

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

using Fields = std::map<std::string, std::string>;

// ---- shared helpers -------------------------------------------------------

std::string read_text(const fs::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Scenario from an optional file plus flag overrides applied to the raw
// document, so defaults and validation follow one path.
ScenarioConfig build_scenario(const std::string &config_path, const std::function<void(json &)> &overlay)
{
    std::string text = "{}";
    fs::path base = fs::current_path();
    std::string origin = "<flags>";
    if (!config_path.empty())
    {
        text = read_text(config_path);
        base = fs::absolute(fs::path(config_path)).parent_path();
        origin = config_path;
    }
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error &)
    {
        parse_scenario(text, base, origin); // throws with line and column
        throw;
    }
    if (!doc.is_object())
        throw ConfigError(origin + ": expected a JSON object at the top level");
    overlay(doc);
    return parse_scenario(doc.dump(), base, origin);
}

fs::path output_root(const std::string &flag, const fs::path &configured, const fs::path &fallback)
{
    if (!flag.empty())
        return flag;
    if (!configured.empty())
        return configured;
    if (const char *env = std::getenv("CABINLIFI_OUT"); env && *env)
        return env;
    return fallback;
}

// `# key=value key=value` tokens from the leading comment block.
Fields comment_fields(const fs::path &path)
{
    std::ifstream in(path);
    Fields f;
    std::string line;
    while (std::getline(in, line) && !line.empty() && line[0] == '#')
    {
        std::istringstream ss(line.substr(1));
        std::string tok;
        while (ss >> tok)
            if (const auto eq = tok.find('='); eq != std::string::npos)
                f[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return f;
}

std::string first_line(const fs::path &path)
{
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    return line;
}

std::string fmt(const char *format, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string g17(double v) { return fmt("%.17g", v); }

std::vector<double> parse_sweep(const std::string &s)
{
    std::vector<double> out;
    if (s.find(':') != std::string::npos)
    {
        double a = 0, b = 0, c = 0;
        if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &b, &c, &a) != 3 || !(a > 0.0) || c < b)
            throw ConfigError("--snr: expected start:stop:step with step > 0");
        const int n = static_cast<int>(std::floor((c - b) / a + 1e-9));
        for (int i = 0; i <= n; ++i)
            out.push_back(b + i * a);
        return out;
    }
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ','))
    {
        try
        {
            out.push_back(parse_number(cell));
        }
        catch (const std::exception &)
        {
            throw ConfigError("--snr: '" + cell + "' is not a number");
        }
    }
    if (out.empty())
        throw ConfigError("--snr: empty sweep");
    return out;
}

struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string &name) const
    {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : static_cast<int>(it - header.begin());
    }
};

CsvTable read_csv(const fs::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    CsvTable t;
    std::string line;
    auto split = [](const std::string &l) {
        std::vector<std::string> cells;
        std::stringstream ss(l);
        std::string c;
        while (std::getline(ss, c, ','))
            cells.push_back(c);
        return cells;
    };
    while (std::getline(in, line))
    {
        if (line.empty() || line[0] == '#')
            continue;
        if (t.header.empty())
            t.header = split(line);
        else
            t.rows.push_back(split(line));
    }
    return t;
}

std::string link_list(const std::vector<Link> &links)
{
    std::string s;
    for (const auto &l : links)
        s += (s.empty() ? "" : ",") + l.source + ":" + l.detector;
    return s;
}

// ---- trace ------------------------------------------------------------------

struct TraceArgs
{
    std::string config, band, cabin, out;
    std::optional<std::uint64_t> seed, rays, los_rays;
    std::optional<int> threads;
    std::vector<std::string> sources;
    std::string source_spectrum, source_angular, detector_spectrum, detector_angular;
};

void add_scene_flags(CLI::App *app, TraceArgs &a)
{
    app->add_option("--config", a.config, "Scenario JSON file");
    app->add_option("--band", a.band, "ir | vl");
    app->add_option("--cabin", a.cabin, "simplified | realistic");
    app->add_option("--seed", a.seed, "Random seed");
    app->add_option("--rays", a.rays, "Primary rays per chip");
    app->add_option("--los-rays", a.los_rays, "Direct-path rays per chip (0 disables the extra pool)");
    app->add_option("--threads", a.threads, "Worker threads (0: all)");
    app->add_option("--source-spectrum", a.source_spectrum, "Source spectrum CSV");
    app->add_option("--source-angular", a.source_angular, "Source directivity CSV");
    app->add_option("--detector-spectrum", a.detector_spectrum, "Detector responsivity CSV");
    app->add_option("--detector-angular", a.detector_angular, "Detector angular response CSV");
}

ScenarioConfig scenario_from(const TraceArgs &a)
{
    return build_scenario(a.config, [&](json &doc) {
        auto &scene = doc["scene"];
        if (!a.band.empty())
            scene["band"] = a.band;
        if (!a.cabin.empty())
            scene["cabin"] = a.cabin;
        const std::pair<const std::string *, const char *> curves[] = {
            {&a.source_spectrum, "source_spectrum_csv"},
            {&a.source_angular, "source_angular_csv"},
            {&a.detector_spectrum, "detector_spectrum_csv"},
            {&a.detector_angular, "detector_angular_csv"}};
        for (const auto &[value, key] : curves)
            if (!value->empty())
                scene[key] = fs::absolute(*value).string();
        if (a.seed)
            doc["seed"] = *a.seed;
        if (a.rays)
            doc["trace"]["rays_per_chip"] = *a.rays;
        if (a.los_rays)
            doc["trace"]["los_rays_per_chip"] = *a.los_rays;
        if (a.threads)
            doc["trace"]["threads"] = *a.threads;
        if (scene.is_null())
            doc.erase("scene");
    });
}

int cmd_trace(const TraceArgs &a, std::ostream &out)
{
    const ScenarioConfig cfg = scenario_from(a);
    const CabinScene scene = build_cabin(cfg.scene);
    const std::string json_text = cfg.canonical_json();
    const std::uint64_t digest = fnv1a64(json_text);
    const fs::path root = output_root(a.out, cfg.output_dir, "out");
    fs::create_directories(root);

    std::vector<std::string> names = a.sources;
    if (names.empty())
        for (const auto &l : cfg.links)
            if (std::find(names.begin(), names.end(), l.source) == names.end())
                names.push_back(l.source);

    out << "digest=" << digest_hex(digest) << " seed=" << cfg.seed << "\n";
    for (const auto &name : names)
    {
        const int idx = scene.find_source(name);
        if (idx < 0)
            throw ConfigError("unknown source '" + name + "'");
        RayDataBank bank = trace(scene, idx, cfg.trace);
        bank.scenario_json = json_text;
        bank.digest = digest;
        const fs::path path =
            root / (to_string(cfg.scene.band) + "_" + to_string(cfg.scene.variant) + "_" + name + ".lrdb");
        save_rdb(bank, path);
        out << name << " -> " << path.string() << " (" << bank.record_count() << " records)\n";
        for (std::size_t d = 0; d < bank.detector_names.size(); ++d)
            out << "  " << bank.detector_names[d] << " i_hit=" << bank.hits[d].size() << "\n";
    }
    return kOk;
}

// ---- characterize ---------------------------------------------------------

struct CharacterizeArgs
{
    std::vector<std::string> rdbs;
    std::optional<double> dw;
    std::string out;
};

int cmd_characterize(const CharacterizeArgs &a, std::ostream &out, std::ostream &err)
{
    for (const auto &rdb : a.rdbs)
    {
        const RayDataBank bank = load_rdb(rdb);
        const ScenarioConfig cfg = parse_scenario(bank.scenario_json, {}, rdb + " (embedded scenario)");
        const CabinScene scene = build_cabin(cfg.scene);
        const double dw = a.dw.value_or(cfg.dw);
        if (!(dw > 0.0))
            throw ConfigError("--dw must be positive");
        const fs::path root = output_root(a.out, {}, fs::path(rdb).parent_path());
        fs::create_directories(root);
        const std::string stem = fs::path(rdb).stem().string();
        const std::string stamp = artifact_stamp(bank.digest, bank.metadata.seed);
        const std::string source = bank.metadata.source;
        const int src = scene.find_source(source);
        if (src < 0)
            throw RdbError(rdb + ": source '" + source + "' is not in the embedded scenario");
        const double m = lambertian_order(cfg.scene.source_fwhm);

        std::ostringstream meta;
        meta << "# band=" << to_string(cfg.scene.band) << " cabin=" << to_string(cfg.scene.variant)
             << " source=" << source << " dw_ns=" << g17(dw) << " links=" << link_list(cfg.links);

        const fs::path stats_path = root / (stem + "_stats.csv");
        std::ofstream stats(stats_path);
        if (!stats)
            throw std::runtime_error("cannot write " + stats_path.string());
        stats << stamp << "\n" << meta.str() << "\n";
        stats << "S,R,i_hit,H0,tau_RMS_ns,rho,PL_dB,mean_delay_ns,H0_LoS,t_LoS_ns,link\n";
        out << stem << " (" << stamp.substr(2) << ")\n";
        for (std::size_t d = 0; d < bank.detector_names.size(); ++d)
        {
            const std::string &det_name = bank.detector_names[d];
            const int det = scene.find_detector(det_name);
            if (det < 0)
                throw RdbError(rdb + ": detector '" + det_name + "' is not in the embedded scenario");
            const PlacedDetector &pd = scene.detectors()[static_cast<std::size_t>(det)];
            const LosResult los = analytical_los(scene.sources()[static_cast<std::size_t>(src)], pd, m, pd.area());
            const bool is_link = std::any_of(cfg.links.begin(), cfg.links.end(), [&](const Link &l) {
                return l.source == source && l.detector == det_name;
            });
            stats << source << "," << det_name << "," << bank.hits[d].size() << ",";
            if (bank.hits[d].empty())
            {
                err << "warning: " << stem << ": detector " << det_name << " has no records\n";
                stats << "nan,nan,nan,nan,nan," << g17(los.gain) << "," << g17(los.delay) << "," << is_link << "\n";
                continue;
            }
            const ChannelStats s = characterize(bank, static_cast<int>(d), dw);
            stats << g17(s.h0) << "," << g17(s.rms_delay) << "," << g17(s.flatness) << "," << g17(s.path_loss_db) << ","
                  << g17(s.mean_delay) << "," << g17(los.gain) << "," << g17(los.delay) << "," << is_link << "\n";
            out << "  " << source << "," << det_name << " i_hit=" << s.i_hit << " H0=" << fmt("%.4e", s.h0)
                << " tau_RMS=" << fmt("%.3f", s.rms_delay) << "ns rho=" << fmt("%.3f", s.flatness)
                << " LoS=" << fmt("%.4e", los.gain) << (is_link ? " [link]" : "") << "\n";

            const DiscreteCir cir = bin_rays(bank.hits[d], dw);
            const std::string cir_stamp = stamp + "\n# band=" + to_string(cfg.scene.band) +
                                          " cabin=" + to_string(cfg.scene.variant) + " source=" + source +
                                          " detector=" + det_name;
            write_cir_csv(root / (stem + "_" + det_name + "_cir.csv"), cir, bank.metadata.source_power, cir_stamp);
            write_cfr_csv(root / (stem + "_" + det_name + "_cfr.csv"), cfr(cir.normalized(bank.metadata.source_power)),
                          cfg.ofdm.channel_bandwidth / 2.0, cir_stamp);
        }
        if (!stats)
            throw std::runtime_error("failed writing " + stats_path.string());
    }
    return kOk;
}

// ---- ber ------------------------------------------------------------------

struct BerArgs
{
    std::string cir, config, out, snr, normalization, layout;
    bool flat = false;
    std::optional<int> m, n, n_cp, taps, threads;
    std::optional<std::uint64_t> min_bits, seed;
};

int cmd_ber(const BerArgs &a, std::ostream &out)
{
    if (a.cir.empty() != a.flat)
        throw ConfigError("ber: give either a CIR file or --flat");
    Fields meta;
    CirFile cir_file;
    if (!a.flat)
    {
        cir_file = read_cir_csv(a.cir);
        meta = comment_fields(a.cir);
    }
    const std::string band = meta.count("band") ? meta["band"] : "";
    const ScenarioConfig cfg = build_scenario(a.config, [&](json &doc) {
        if (!band.empty() && a.config.empty())
            doc["scene"]["band"] = band;
        auto &o = doc["ofdm"];
        if (a.m)
            o["m"] = *a.m;
        if (a.n)
            o["n"] = *a.n;
        if (a.n_cp)
            o["n_cp"] = *a.n_cp;
        if (a.taps)
            doc["channel"]["taps"] = *a.taps;
        auto &b = doc["ber"];
        if (!a.normalization.empty())
            b["normalization"] = a.normalization;
        if (!a.layout.empty())
            b["layout"] = a.layout;
        if (a.min_bits)
            b["min_bits"] = *a.min_bits;
        if (!a.snr.empty())
            b["snr_db"] = parse_sweep(a.snr);
        if (a.seed)
            doc["seed"] = *a.seed;
        if (o.is_null())
            doc.erase("ofdm");
        if (b.is_null())
            doc.erase("ber");
    });

    std::vector<double> h;
    double shift = 0.0;
    int span = 0;
    if (a.flat)
        h = {1.0};
    else
    {
        const TapSet taps = top_l_taps(cir_file.cir.normalized(cir_file.source_power), cfg.taps);
        if (cfg.layout == TapLayout::compact && taps.size() > cfg.ofdm.n_cp)
            throw ConfigError("ber: " + std::to_string(taps.size()) + " taps need N_CP >= L, got N_CP = " +
                              std::to_string(cfg.ofdm.n_cp));
        if (cfg.layout == TapLayout::delay && taps.span() > cfg.ofdm.n_cp)
            throw ConfigError("ber: tap delay span of " + std::to_string(taps.span()) +
                              " samples exceeds N_CP = " + std::to_string(cfg.ofdm.n_cp));
        h = effective_channel(taps, cfg.layout, cfg.normalization);
        shift = cfg.normalization == TapNormalization::raw ? 100.0 : 0.0;
        span = taps.span();
    }

    SweepOptions opt;
    opt.snr_db = cfg.snr_db;
    opt.min_bits = cfg.min_bits;
    opt.seed = cfg.seed;
    opt.axis_shift_db = shift;
    opt.threads = a.threads.value_or(0);
    const LinkResult res = ber_montecarlo(h, cfg.clipping(), cfg.ofdm, opt);

    bool agree = true;
    for (const auto &p : res.points)
        if (p.ber_theory >= 1e-4)
        {
            const auto [lo, hi] = binomial_interval(p.ber_theory, p.bits);
            agree = agree && p.ber_sim >= lo && p.ber_sim <= hi;
        }

    std::string stamp;
    std::string stem;
    if (a.flat)
    {
        stamp = artifact_stamp(cfg.digest(), cfg.seed);
        stem = "flat";
    }
    else
    {
        stamp = cir_file.stamp;
        stem = fs::path(a.cir).stem().string();
        if (stem.size() > 4 && stem.substr(stem.size() - 4) == "_cir")
            stem.resize(stem.size() - 4);
    }
    const fs::path root = output_root(a.out, {}, a.flat ? fs::path("out") : fs::path(a.cir).parent_path());
    fs::create_directories(root);
    stem += "_M" + std::to_string(cfg.ofdm.m);

    std::ostringstream meta_line;
    meta_line << "# band=" << (band.empty() ? "none" : band)
              << " cabin=" << (meta.count("cabin") ? meta["cabin"] : "none")
              << " source=" << (meta.count("source") ? meta["source"] : "none")
              << " detector=" << (meta.count("detector") ? meta["detector"] : "flat") << " M=" << cfg.ofdm.m
              << " N=" << cfg.ofdm.n << " n_cp=" << cfg.ofdm.n_cp << " taps=" << h.size() << " span=" << span
              << " normalization=" << (a.flat ? "flat" : to_string(cfg.normalization))
              << " layout=" << to_string(cfg.layout) << " axis_shift_db=" << g17(shift)
              << " ber_seed=" << cfg.seed << " rate_bps=" << g17(res.rate) << " eta=" << fmt("%.4f", res.eta)
              << " agreement=" << (agree ? 1 : 0);

    const fs::path ber_path = root / (stem + "_ber.csv");
    std::ofstream ber(ber_path);
    if (!ber)
        throw std::runtime_error("cannot write " + ber_path.string());
    ber << stamp << "\n" << meta_line.str() << "\n";
    ber << "snr_db,ber_sim,ber_theory,bits,frames,errors,ci_low,ci_high\n";
    for (const auto &p : res.points)
    {
        const auto [lo, hi] = binomial_interval(p.ber_theory, p.bits);
        ber << g17(p.snr_db) << "," << g17(p.ber_sim) << "," << g17(p.ber_theory) << "," << p.bits << "," << p.frames
            << "," << p.errors << "," << g17(lo) << "," << g17(hi) << "\n";
    }

    const fs::path rate_path = root / (stem + "_rate.csv");
    std::ofstream rate(rate_path);
    if (!rate)
        throw std::runtime_error("cannot write " + rate_path.string());
    rate << stamp << "\n" << meta_line.str() << "\n";
    rate << "snr_db,k,gamma_db,Rk_bps,eta\n";
    for (const auto &p : res.points)
        for (std::size_t k = 0; k < p.gamma.size(); ++k)
            rate << g17(p.snr_db) << "," << k + 1 << "," << g17(10.0 * std::log10(p.gamma[k])) << "," << g17(res.rate)
                 << "," << g17(res.eta) << "\n";

    out << stem << ": eta = " << fmt("%.2f", res.eta) << " bits/s/Hz, R = " << fmt("%.4g", res.rate)
        << " bit/s, theory/simulation agreement: " << (agree ? "yes" : "no") << "\n";
    for (const auto &p : res.points)
        out << "  " << fmt("%6.1f", p.snr_db) << " dB  sim " << fmt("%.3e", p.ber_sim) << "  theory "
            << fmt("%.3e", p.ber_theory) << "\n";
    return kOk;
}

// ---- report ---------------------------------------------------------------

struct StatsRow
{
    std::string source, detector;
    double h0, tau, rho, los;
    std::size_t i_hit;
    bool link;
};

struct BerCurve
{
    std::string detector;
    int m;
    std::vector<double> snr, sim, theory;
    bool agreement;
    std::string eta;
};

std::string ordering(std::vector<std::pair<std::string, double>> v)
{
    std::stable_sort(v.begin(), v.end(), [](const auto &a, const auto &b) { return a.second > b.second; });
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? " > " : "") + v[i].first;
    return s;
}

int cmd_report(const std::string &dir, std::ostream &out)
{
    const fs::path root(dir);
    if (!fs::is_directory(root))
        throw ConfigError("report: not a directory: " + dir);
    std::vector<fs::path> stats_files, ber_files;
    for (const auto &e : fs::directory_iterator(root))
    {
        const std::string name = e.path().filename().string();
        auto ends = [&](const std::string &suf) {
            return name.size() > suf.size() && name.compare(name.size() - suf.size(), suf.size(), suf) == 0;
        };
        if (ends("_stats.csv"))
            stats_files.push_back(e.path());
        else if (ends("_ber.csv"))
            ber_files.push_back(e.path());
    }
    std::sort(stats_files.begin(), stats_files.end());
    std::sort(ber_files.begin(), ber_files.end());

    const fs::path report_path = root / "report.md";
    std::ofstream md(report_path);
    if (!md)
        throw std::runtime_error("cannot write " + report_path.string());
    if (stats_files.empty() && ber_files.empty())
    {
        md << "# Report\n\nEmpty report: no characterization or BER outputs were found in this directory.\n";
        out << "empty report: no *_stats.csv or *_ber.csv files in " << dir << "\n";
        return kOk;
    }

    std::map<std::pair<std::uint64_t, std::uint64_t>, std::vector<std::string>> stamps;
    for (const auto *group : {&stats_files, &ber_files})
        for (const auto &p : *group)
        {
            std::uint64_t d = 0, s = 0;
            if (!parse_stamp(first_line(p), d, s))
                throw RdbError("report: " + p.string() + " carries no digest/seed stamp");
            stamps[{d, s}].push_back(p.filename().string());
        }
    if (stamps.size() > 1)
    {
        std::ostringstream msg;
        msg << "report: refusing to mix runs with different digests or seeds:";
        for (const auto &[k, files] : stamps)
            msg << "\n  digest=" << digest_hex(k.first) << " seed=" << k.second << ": " << files.front()
                << (files.size() > 1 ? " (+" + std::to_string(files.size() - 1) + " more)" : "");
        md.close();
        fs::remove(report_path);
        throw std::runtime_error(msg.str());
    }
    const auto [digest, seed] = stamps.begin()->first;

    std::vector<StatsRow> rows;
    std::set<std::string> expected_links;
    std::string band, cabin;
    for (const auto &p : stats_files)
    {
        Fields meta = comment_fields(p);
        band = meta["band"];
        cabin = meta["cabin"];
        std::stringstream ls(meta["links"]);
        std::string l;
        while (std::getline(ls, l, ','))
            if (!l.empty())
                expected_links.insert(l);
        const CsvTable t = read_csv(p);
        const int cs = t.column("S"), cr = t.column("R"), ci = t.column("i_hit"), ch = t.column("H0"),
                  ct = t.column("tau_RMS_ns"), cp = t.column("rho"), cl = t.column("H0_LoS"), ck = t.column("link");
        if (std::min({cs, cr, ci, ch, ct, cp, cl, ck}) < 0)
            throw std::runtime_error("report: " + p.string() + " lacks the statistics columns");
        for (const auto &r : t.rows)
            rows.push_back({r[cs], r[cr], parse_number(r[ch]), parse_number(r[ct]), parse_number(r[cp]), parse_number(r[cl]),
                            static_cast<std::size_t>(std::stoull(r[ci])), r[ck] == "1"});
    }

    std::vector<BerCurve> curves;
    for (const auto &p : ber_files)
    {
        Fields meta = comment_fields(p);
        const CsvTable t = read_csv(p);
        BerCurve c;
        c.detector = meta["detector"];
        c.m = std::stoi(meta.count("M") ? meta["M"] : "0");
        c.agreement = meta["agreement"] == "1";
        c.eta = meta["eta"];
        const int cs = t.column("snr_db"), cb = t.column("ber_sim"), ct = t.column("ber_theory");
        if (std::min({cs, cb, ct}) < 0)
            throw std::runtime_error("report: " + p.string() + " lacks the BER columns");
        for (const auto &r : t.rows)
        {
            c.snr.push_back(parse_number(r[cs]));
            c.sim.push_back(parse_number(r[cb]));
            c.theory.push_back(parse_number(r[ct]));
        }
        curves.push_back(std::move(c));
    }

    md << "# Report\n\n";
    md << "digest `" << digest_hex(digest) << "`, seed " << seed;
    if (!band.empty())
        md << ", band " << band << ", cabin " << cabin;
    md << "\n\n";

    std::vector<StatsRow> links;
    for (const auto &r : rows)
        if (r.link)
            links.push_back(r);
    std::map<std::string, double> summary;
    if (!links.empty())
    {
        md << "## Channel statistics\n\n";
        md << "| S,R | i_hit | H0 | tau_RMS (ns) | rho | LoS analytic |\n|---|---|---|---|---|---|\n";
        for (const auto &r : links)
            md << "| " << r.source << "," << r.detector << " | " << r.i_hit << " | " << fmt("%.4e", r.h0) << " | "
               << fmt("%.3f", r.tau) << " | " << fmt("%.3f", r.rho) << " | " << fmt("%.4e", r.los) << " |\n";
        std::vector<std::pair<std::string, double>> h0, tau, rho;
        for (const auto &r : links)
        {
            if (std::isnan(r.h0))
                continue;
            h0.emplace_back(r.detector, r.h0);
            tau.emplace_back(r.detector, r.tau);
            rho.emplace_back(r.detector, r.rho);
        }
        md << "\n## Orderings\n\n";
        md << "H0: " << ordering(h0) << "\n\n";
        md << "tau_RMS: " << ordering(tau) << "\n\n";
        md << "rho: " << ordering(rho) << "\n\n";
    }

    std::set<int> orders;
    for (const auto &c : curves)
        orders.insert(c.m);
    for (int m : orders)
    {
        md << "## BER, M = " << m << "\n\n";
        md << "| R | eta (bits/s/Hz) | SNR at BER 1e-3, sim (dB) | theory (dB) | agreement |\n|---|---|---|---|---|\n";
        std::map<char, double> best_by_seat;
        for (const auto &c : curves)
        {
            if (c.m != m)
                continue;
            const double sim = crossing_db(c.snr, c.sim, 1e-3);
            const double th = crossing_db(c.snr, c.theory, 1e-3);
            md << "| " << c.detector << " | " << c.eta << " | " << fmt("%.2f", sim) << " | " << fmt("%.2f", th)
               << " | " << (c.agreement ? "yes" : "no") << " |\n";
            summary["snr_1e-3_M" + std::to_string(m) + "_" + c.detector] = sim;
            if (!c.detector.empty() && c.detector != "flat")
            {
                const char seat = c.detector[0];
                auto it = best_by_seat.find(seat);
                if (it == best_by_seat.end() || sim < it->second || std::isnan(it->second))
                    best_by_seat[seat] = sim;
            }
        }
        if (best_by_seat.count('B') && best_by_seat.size() > 1)
        {
            double worst_gap = std::numeric_limits<double>::infinity();
            for (const auto &[seat, v] : best_by_seat)
                if (seat != 'B')
                    worst_gap = std::min(worst_gap, v - best_by_seat['B']);
            md << "\nSeat gap (M = " << m << "): seat B needs " << fmt("%.2f", worst_gap)
               << " dB less SNR than the nearest other seat at BER 1e-3\n";
            summary["seat_gap_db_M" + std::to_string(m)] = worst_gap;
        }
        md << "\n";
    }

    std::vector<std::string> missing;
    for (const auto &l : expected_links)
    {
        const auto colon = l.find(':');
        const std::string src = l.substr(0, colon), det = l.substr(colon + 1);
        const bool have = std::any_of(rows.begin(), rows.end(),
                                      [&](const StatsRow &r) { return r.source == src && r.detector == det; });
        if (!have)
            missing.push_back("statistics for " + src + "," + det);
        for (int m : orders)
            if (std::none_of(curves.begin(), curves.end(),
                             [&](const BerCurve &c) { return c.m == m && c.detector == det; }))
                missing.push_back("BER M = " + std::to_string(m) + " for " + det);
    }
    if (!missing.empty())
    {
        md << "## Missing runs\n\n";
        for (const auto &m : missing)
            md << "- " << m << "\n";
        md << "\n";
    }

    const fs::path summary_path = root / "report_summary.csv";
    std::ofstream sum(summary_path);
    sum << artifact_stamp(digest, seed) << "\nmetric,value\n";
    for (const auto &[k, v] : summary)
        sum << k << "," << g17(v) << "\n";

    out << "report written to " << report_path.string() << "\n";
    for (const auto &m : missing)
        out << "missing: " << m << "\n";
    return kOk;
}

} // namespace

double crossing_db(const std::vector<double> &snr_db, const std::vector<double> &ber, double target)
{
    for (std::size_t i = 0; i < ber.size(); ++i)
    {
        if (ber[i] >= target)
            continue;
        if (i == 0)
            return std::numeric_limits<double>::quiet_NaN();
        const double y0 = std::log10(ber[i - 1]), x0 = snr_db[i - 1], x1 = snr_db[i];
        if (ber[i] <= 0.0)
            return x1; // no errors observed: conservative upper bound
        const double y1 = std::log10(ber[i]);
        return x0 + (std::log10(target) - y0) * (x1 - x0) / (y1 - y0);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Reading-light LiFi channel and DCO-OFDM link simulator", "cabinlifi"};
    app.require_subcommand(1);

    TraceArgs ta;
    auto *trace_cmd = app.add_subcommand("trace", "Trace sources and write ray data banks");
    add_scene_flags(trace_cmd, ta);
    trace_cmd->add_option("--source", ta.sources, "Source to trace (repeatable; default: every linked source)");
    trace_cmd->add_option("--out", ta.out, "Output directory (default: $CABINLIFI_OUT or ./out)");

    CharacterizeArgs ca;
    auto *char_cmd = app.add_subcommand("characterize", "Channel statistics, CIR and CFR from ray data banks");
    char_cmd->add_option("rdb", ca.rdbs, "Ray data bank files")->required()->check(CLI::ExistingFile);
    char_cmd->add_option("--dw", ca.dw, "Bin width in ns (default: scenario value)");
    char_cmd->add_option("--out", ca.out, "Output directory (default: $CABINLIFI_OUT or beside the bank)");

    BerArgs ba;
    auto *ber_cmd = app.add_subcommand("ber", "DCO-OFDM BER sweep over a CIR");
    ber_cmd->add_option("cir", ba.cir, "CIR CSV written by characterize");
    ber_cmd->add_flag("--flat", ba.flat, "Use a single unit tap instead of a CIR");
    ber_cmd->add_option("--config", ba.config, "Scenario JSON file");
    ber_cmd->add_option("--m", ba.m, "QAM order");
    ber_cmd->add_option("--n", ba.n, "FFT size");
    ber_cmd->add_option("--ncp", ba.n_cp, "Cyclic prefix length");
    ber_cmd->add_option("--taps", ba.taps, "Number of strongest taps kept");
    ber_cmd->add_option("--snr", ba.snr, "Sweep as start:stop:step or a comma list, dB");
    ber_cmd->add_option("--min-bits", ba.min_bits, "Bits per SNR point");
    ber_cmd->add_option("--seed", ba.seed, "Random seed");
    ber_cmd->add_option("--normalization", ba.normalization, "raw | unit_energy");
    ber_cmd->add_option("--layout", ba.layout, "compact | delay");
    ber_cmd->add_option("--threads", ba.threads, "Worker threads (0: all)");
    ber_cmd->add_option("--out", ba.out, "Output directory (default: $CABINLIFI_OUT or beside the CIR)");

    std::string report_dir;
    auto *report_cmd = app.add_subcommand("report", "Summarize a run directory");
    report_cmd->add_option("dir", report_dir, "Run directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp &e)
    {
        out << app.help();
        return kOk;
    }
    catch (const CLI::ParseError &e)
    {
        std::ostringstream o, er;
        app.exit(e, o, er);
        out << o.str();
        err << er.str();
        return e.get_exit_code() == 0 ? kOk : kConfigError;
    }

    try
    {
        if (*trace_cmd)
            return cmd_trace(ta, out);
        if (*char_cmd)
            return cmd_characterize(ca, out, err);
        if (*ber_cmd)
            return cmd_ber(ba, out);
        return cmd_report(report_dir, out);
    }
    catch (const ConfigError &e)
    {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }
    catch (const std::exception &e)
    {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
}

} // namespace cabinlifi::cli
