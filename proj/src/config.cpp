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

#include "cabinlifi/config.hpp"

#include "cabinlifi/digest.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cabinlifi
{

using nlohmann::json;

namespace
{

// Reads one JSON object, recording consumed keys so that leftovers
// (typos) can be rejected with their full field path.
class Fields
{
  public:
    Fields(const json &j, std::string path, std::string_view origin) : j_{j}, path_{std::move(path)}, origin_{origin}
    {
        if (!j_.is_object())
            fail("", "expected an object");
    }

    bool has(const std::string &key)
    {
        seen_.insert(key);
        return j_.contains(key);
    }
    const json &at(const std::string &key) const { return j_.at(key); }
    std::string field(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    [[noreturn]] void fail(const std::string &key, const std::string &what) const
    {
        const std::string f = key.empty() ? path_ : field(key);
        throw ConfigError(std::string(origin_) + ": field '" + (f.empty() ? "<root>" : f) + "': " + what);
    }

    double number(const std::string &key, double fallback)
    {
        if (!has(key))
            return fallback;
        const json &v = j_.at(key);
        if (!v.is_number())
            fail(key, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d))
            fail(key, "expected a finite number");
        return d;
    }
    std::optional<double> optional_number(const std::string &key)
    {
        if (!has(key) || j_.at(key).is_null())
            return std::nullopt;
        return number(key, 0.0);
    }
    std::uint64_t count(const std::string &key, std::uint64_t fallback)
    {
        if (!has(key))
            return fallback;
        const json &v = j_.at(key);
        if (v.is_number_unsigned())
            return v.get<std::uint64_t>();
        if (v.is_number_float() && v.get<double>() >= 0.0 && v.get<double>() < 1.8e19 &&
            std::floor(v.get<double>()) == v.get<double>())
            return static_cast<std::uint64_t>(v.get<double>());
        fail(key, "expected a non-negative integer");
    }
    int integer(const std::string &key, int fallback)
    {
        if (!has(key))
            return fallback;
        const json &v = j_.at(key);
        if (!v.is_number_integer())
            fail(key, "expected an integer");
        return v.get<int>();
    }
    std::string text(const std::string &key, const std::string &fallback)
    {
        if (!has(key))
            return fallback;
        const json &v = j_.at(key);
        if (!v.is_string())
            fail(key, "expected a string");
        return v.get<std::string>();
    }
    Vec3 vec3(const std::string &key, const Vec3 &fallback)
    {
        if (!has(key))
            return fallback;
        return as_vec3(j_.at(key), key);
    }
    Vec3 as_vec3(const json &v, const std::string &key) const
    {
        if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
            fail(key, "expected [x, y, z]");
        return Vec3(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                fail(it.key(), "unknown field");
    }

  private:
    const json &j_;
    std::string path_;
    std::string_view origin_;
    std::set<std::string> seen_;
};

std::filesystem::path resolve(const std::filesystem::path &base, const std::string &p)
{
    std::filesystem::path path(p);
    if (path.is_relative() && !base.empty())
        path = base / path;
    return path.lexically_normal();
}

json vec_json(const Vec3 &v) { return json::array({v.x(), v.y(), v.z()}); }

template <class E> E enum_field(Fields &f, const std::string &key, E fallback, E (*parse)(const std::string &))
{
    if (!f.has(key))
        return fallback;
    const std::string s = f.text(key, "");
    try
    {
        return parse(s);
    }
    catch (const ConfigError &e)
    {
        f.fail(key, e.what());
    }
}

TapNormalization normalization_from_string(const std::string &s)
{
    if (s == "raw")
        return TapNormalization::raw;
    if (s == "unit_energy")
        return TapNormalization::unit_energy;
    throw ConfigError("unknown tap normalization '" + s + "' (raw | unit_energy)");
}

TapLayout layout_from_string(const std::string &s)
{
    if (s == "compact")
        return TapLayout::compact;
    if (s == "delay")
        return TapLayout::delay;
    throw ConfigError("unknown tap layout '" + s + "' (compact | delay)");
}

std::vector<double> default_sweep()
{
    std::vector<double> v;
    for (int s = -20; s <= 20; ++s)
        v.push_back(s);
    return v;
}

void parse_scene(Fields &f, SceneConfig &sc, const std::filesystem::path &base, std::string_view origin)
{
    sc.length = f.number("length_cm", sc.length);
    sc.segment = f.number("segment_cm", sc.segment);
    sc.tessellation = f.integer("tessellation", sc.tessellation);
    sc.source_fwhm = f.number("source_fwhm_deg", sc.source_fwhm);
    sc.detector_fwhm = f.optional_number("detector_fwhm_deg");
    sc.scatter_count = f.integer("scatter_count", sc.scatter_count);
    sc.hull_material = f.text("hull_material", sc.hull_material);
    sc.floor_material = f.text("floor_material", sc.floor_material);
    sc.seat_material = f.text("seat_material", sc.seat_material);

    auto path_field = [&](const char *key, std::optional<std::filesystem::path> &out) {
        if (f.has(key) && !f.at(key).is_null())
            out = resolve(base, f.text(key, ""));
    };
    path_field("source_spectrum_csv", sc.source_spectrum_csv);
    path_field("source_angular_csv", sc.source_angular_csv);
    path_field("detector_spectrum_csv", sc.detector_spectrum_csv);
    path_field("detector_angular_csv", sc.detector_angular_csv);

    if (f.has("material_csv"))
    {
        Fields m(f.at("material_csv"), f.field("material_csv"), origin);
        sc.material_csv.clear();
        for (auto it = f.at("material_csv").begin(); it != f.at("material_csv").end(); ++it)
            sc.material_csv[it.key()] = resolve(base, m.text(it.key(), ""));
    }

    if (f.has("section"))
    {
        const json &arr = f.at("section");
        if (!arr.is_array())
            f.fail("section", "expected an array of [x, y]");
        sc.section.clear();
        for (const auto &p : arr)
        {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                f.fail("section", "expected an array of [x, y]");
            sc.section.emplace_back(p[0].get<double>(), p[1].get<double>());
        }
    }

    if (f.has("seats"))
    {
        const json &arr = f.at("seats");
        if (!arr.is_array())
            f.fail("seats", "expected an array");
        sc.seats.clear();
        for (std::size_t i = 0; i < arr.size(); ++i)
        {
            Fields s(arr[i], f.field("seats") + "[" + std::to_string(i) + "]", origin);
            sc.seats.push_back({s.text("label", ""), s.vec3("origin", Vec3::Zero())});
            s.finish();
        }
    }

    if (f.has("sources"))
    {
        const json &arr = f.at("sources");
        if (!arr.is_array())
            f.fail("sources", "expected an array");
        sc.sources.clear();
        for (std::size_t i = 0; i < arr.size(); ++i)
        {
            Fields s(arr[i], f.field("sources") + "[" + std::to_string(i) + "]", origin);
            PlacedSource p;
            p.name = s.text("name", "");
            p.position = s.vec3("position", p.position);
            p.orientation_deg = s.number("orientation_deg", p.orientation_deg);
            p.rows = s.integer("rows", p.rows);
            p.cols = s.integer("cols", p.cols);
            p.pitch_mm = s.number("pitch_mm", p.pitch_mm);
            p.power_total = s.number("power_w", p.power_total);
            s.finish();
            sc.sources.push_back(p);
        }
    }

    if (f.has("detectors"))
    {
        const json &arr = f.at("detectors");
        if (!arr.is_array())
            f.fail("detectors", "expected an array");
        sc.detectors.clear();
        for (std::size_t i = 0; i < arr.size(); ++i)
        {
            Fields s(arr[i], f.field("detectors") + "[" + std::to_string(i) + "]", origin);
            PlacedDetector d;
            d.name = s.text("name", "");
            d.position = s.vec3("position", d.position);
            d.normal = s.vec3("normal", d.normal);
            d.width = s.number("width_cm", d.width);
            d.height = s.number("height_cm", d.height);
            s.finish();
            sc.detectors.push_back(d);
        }
    }

    if (f.has("extra_surfaces"))
    {
        const json &arr = f.at("extra_surfaces");
        if (!arr.is_array())
            f.fail("extra_surfaces", "expected an array");
        sc.extra_surfaces.clear();
        for (std::size_t i = 0; i < arr.size(); ++i)
        {
            const std::string path = f.field("extra_surfaces") + "[" + std::to_string(i) + "]";
            Fields s(arr[i], path, origin);
            ExtraSurface e;
            e.material = s.text("material", "plastic");
            if (!s.has("vertices") || !s.at("vertices").is_array())
                s.fail("vertices", "expected an array of [x, y, z]");
            for (const auto &v : s.at("vertices"))
                e.vertices.push_back(s.as_vec3(v, "vertices"));
            s.finish();
            sc.extra_surfaces.push_back(std::move(e));
        }
    }
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte)
{
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
    {
        if (text[i] == '\n')
        {
            ++line;
            col = 1;
        }
        else
            ++col;
    }
    return {line, col};
}

} // namespace

std::string to_string(TapNormalization n) { return n == TapNormalization::raw ? "raw" : "unit_energy"; }
std::string to_string(TapLayout l) { return l == TapLayout::compact ? "compact" : "delay"; }

ScenarioConfig ScenarioConfig::defaults(Band band)
{
    ScenarioConfig c;
    c.scene = SceneConfig::defaults(band);
    c.trace = TraceConfig::defaults(band);
    c.links = {{"r1", "C1"}, {"r2", "B2"}, {"r3", "A3"}};
    c.snr_db = default_sweep();
    return c;
}

void ScenarioConfig::validate() const
{
    trace.validate();
    ofdm.validate();
    clipping();
    if (trace.band != scene.band)
        throw ConfigError("scenario: trace and scene bands differ");
    if (!(dw > 0.0))
        throw ConfigError("scenario: field 'channel.dw_ns' must be positive");
    if (taps < 1)
        throw ConfigError("scenario: field 'channel.taps' must be at least 1");
    if (snr_db.empty())
        throw ConfigError("scenario: field 'ber.snr_db' is empty");
    if (min_bits == 0)
        throw ConfigError("scenario: field 'ber.min_bits' must be positive");
    if (links.empty())
        throw ConfigError("scenario: field 'links' is empty");
    auto has_source = [&](const std::string &n) {
        return std::any_of(scene.sources.begin(), scene.sources.end(), [&](const auto &s) { return s.name == n; });
    };
    auto has_detector = [&](const std::string &n) {
        return std::any_of(scene.detectors.begin(), scene.detectors.end(), [&](const auto &d) { return d.name == n; });
    };
    for (const auto &l : links)
    {
        if (!has_source(l.source))
            throw ConfigError("scenario: link source '" + l.source + "' is not defined");
        if (!has_detector(l.detector))
            throw ConfigError("scenario: link detector '" + l.detector + "' is not defined");
    }
    auto check = [](const std::optional<std::filesystem::path> &p) {
        if (p && !std::filesystem::exists(*p))
            throw ConfigError("scenario: curve file not found: " + p->string());
    };
    check(scene.source_spectrum_csv);
    check(scene.source_angular_csv);
    check(scene.detector_spectrum_csv);
    check(scene.detector_angular_csv);
    for (const auto &[name, p] : scene.material_csv)
        check(p);
}

std::string ScenarioConfig::canonical_json() const
{
    json sc;
    sc["cabin"] = to_string(scene.variant);
    sc["band"] = to_string(scene.band);
    sc["length_cm"] = scene.length;
    sc["segment_cm"] = scene.segment;
    sc["tessellation"] = scene.tessellation;
    sc["source_fwhm_deg"] = scene.source_fwhm;
    sc["detector_fwhm_deg"] = scene.detector_fwhm ? json(*scene.detector_fwhm) : json(nullptr);
    sc["scatter_count"] = scene.scatter_count;
    sc["hull_material"] = scene.hull_material;
    sc["floor_material"] = scene.floor_material;
    sc["seat_material"] = scene.seat_material;
    auto opt_path = [](const std::optional<std::filesystem::path> &p) { return p ? json(p->string()) : json(nullptr); };
    sc["source_spectrum_csv"] = opt_path(scene.source_spectrum_csv);
    sc["source_angular_csv"] = opt_path(scene.source_angular_csv);
    sc["detector_spectrum_csv"] = opt_path(scene.detector_spectrum_csv);
    sc["detector_angular_csv"] = opt_path(scene.detector_angular_csv);
    json mats = json::object();
    for (const auto &[name, p] : scene.material_csv)
        mats[name] = p.string();
    sc["material_csv"] = mats;
    json section = json::array();
    for (const auto &p : scene.section)
        section.push_back({p.x(), p.y()});
    sc["section"] = section;
    json seats = json::array();
    for (const auto &s : scene.seats)
        seats.push_back({{"label", s.label}, {"origin", vec_json(s.origin)}});
    sc["seats"] = seats;
    json sources = json::array();
    for (const auto &s : scene.sources)
        sources.push_back({{"name", s.name},
                           {"position", vec_json(s.position)},
                           {"orientation_deg", s.orientation_deg},
                           {"rows", s.rows},
                           {"cols", s.cols},
                           {"pitch_mm", s.pitch_mm},
                           {"power_w", s.power_total}});
    sc["sources"] = sources;
    json dets = json::array();
    for (const auto &d : scene.detectors)
        dets.push_back({{"name", d.name},
                        {"position", vec_json(d.position)},
                        {"normal", vec_json(d.normal)},
                        {"width_cm", d.width},
                        {"height_cm", d.height}});
    sc["detectors"] = dets;
    json extra = json::array();
    for (const auto &e : scene.extra_surfaces)
    {
        json v = json::array();
        for (const auto &p : e.vertices)
            v.push_back(vec_json(p));
        extra.push_back({{"material", e.material}, {"vertices", v}});
    }
    sc["extra_surfaces"] = extra;

    json j;
    j["scene"] = sc;
    j["trace"] = {{"rays_per_chip", trace.rays_per_chip},
                  {"los_rays_per_chip", trace.los_rays_per_chip},
                  {"min_rel_intensity", trace.min_rel_intensity},
                  {"kappa_max", trace.kappa_max},
                  {"scatter_count", trace.scatter_count},
                  {"ray_budget", trace.ray_budget}};
    json links_j = json::array();
    for (const auto &l : links)
        links_j.push_back({{"source", l.source}, {"detector", l.detector}});
    j["links"] = links_j;
    j["channel"] = {{"dw_ns", dw}, {"taps", taps}};
    j["ofdm"] = {{"n", ofdm.n},
                 {"m", ofdm.m},
                 {"n_cp", ofdm.n_cp},
                 {"bandwidth_hz", ofdm.bandwidth},
                 {"channel_bandwidth_hz", ofdm.channel_bandwidth},
                 {"i_min_ma", i_min},
                 {"i_max_ma", i_max},
                 {"beta_ma", beta},
                 {"beta_db", beta_db}};
    j["ber"] = {{"normalization", to_string(normalization)},
                {"layout", to_string(layout)},
                {"snr_db", snr_db},
                {"min_bits", min_bits}};
    return j.dump();
}

std::uint64_t ScenarioConfig::digest() const { return fnv1a64(canonical_json()); }

ScenarioConfig parse_scenario(std::string_view text, const std::filesystem::path &base_dir, std::string_view origin)
{
    json doc;
    try
    {
        doc = json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error &e)
    {
        const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError(std::string(origin) + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": syntax error: " + e.what());
    }

    Fields root(doc, "", origin);
    Band band = Band::ir;
    CabinVariant variant = CabinVariant::simplified;
    {
        // The band selects the tracing defaults, so read it first.
        const json *scene_j = doc.contains("scene") ? &doc.at("scene") : nullptr;
        if (scene_j && scene_j->is_object())
        {
            Fields peek(*scene_j, "scene", origin);
            band = enum_field(peek, "band", band, &band_from_string);
            variant = enum_field(peek, "cabin", variant, &cabin_variant_from_string);
        }
    }
    ScenarioConfig c = ScenarioConfig::defaults(band);
    c.scene.variant = variant;

    if (root.has("scene"))
    {
        Fields f(doc.at("scene"), "scene", origin);
        f.has("band");
        f.has("cabin");
        parse_scene(f, c.scene, base_dir, origin);
        f.finish();
    }
    if (root.has("trace"))
    {
        Fields f(doc.at("trace"), "trace", origin);
        c.trace.rays_per_chip = f.count("rays_per_chip", c.trace.rays_per_chip);
        c.trace.los_rays_per_chip = f.count("los_rays_per_chip", c.trace.los_rays_per_chip);
        c.trace.min_rel_intensity = f.number("min_rel_intensity", c.trace.min_rel_intensity);
        c.trace.kappa_max = f.integer("kappa_max", c.trace.kappa_max);
        c.trace.scatter_count = f.integer("scatter_count", c.trace.scatter_count);
        c.trace.ray_budget = f.number("ray_budget", c.trace.ray_budget);
        c.trace.threads = f.integer("threads", c.trace.threads);
        f.finish();
    }
    if (root.has("links"))
    {
        const json &arr = doc.at("links");
        if (!arr.is_array())
            root.fail("links", "expected an array");
        c.links.clear();
        for (std::size_t i = 0; i < arr.size(); ++i)
        {
            Fields f(arr[i], "links[" + std::to_string(i) + "]", origin);
            c.links.push_back({f.text("source", ""), f.text("detector", "")});
            f.finish();
        }
    }
    if (root.has("channel"))
    {
        Fields f(doc.at("channel"), "channel", origin);
        c.dw = f.number("dw_ns", c.dw);
        c.taps = f.integer("taps", c.taps);
        f.finish();
    }
    if (root.has("ofdm"))
    {
        Fields f(doc.at("ofdm"), "ofdm", origin);
        c.ofdm.n = f.integer("n", c.ofdm.n);
        c.ofdm.m = f.integer("m", c.ofdm.m);
        c.ofdm.n_cp = f.integer("n_cp", c.ofdm.n_cp);
        c.ofdm.bandwidth = f.number("bandwidth_hz", c.ofdm.bandwidth);
        c.ofdm.channel_bandwidth = f.number("channel_bandwidth_hz", c.ofdm.channel_bandwidth);
        c.i_min = f.number("i_min_ma", c.i_min);
        c.i_max = f.number("i_max_ma", c.i_max);
        c.beta = f.number("beta_ma", c.beta);
        c.beta_db = f.number("beta_db", c.beta_db);
        f.finish();
    }
    if (root.has("ber"))
    {
        Fields f(doc.at("ber"), "ber", origin);
        c.normalization = enum_field(f, "normalization", c.normalization, &normalization_from_string);
        c.layout = enum_field(f, "layout", c.layout, &layout_from_string);
        c.min_bits = f.count("min_bits", c.min_bits);
        if (f.has("snr_db"))
        {
            const json &s = f.at("snr_db");
            c.snr_db.clear();
            if (s.is_array())
            {
                for (const auto &v : s)
                {
                    if (!v.is_number())
                        f.fail("snr_db", "expected numbers");
                    c.snr_db.push_back(v.get<double>());
                }
            }
            else if (s.is_object())
            {
                Fields r(s, "ber.snr_db", origin);
                const double start = r.number("start", 0.0), stop = r.number("stop", 0.0), step = r.number("step", 1.0);
                r.finish();
                if (!(step > 0.0) || stop < start)
                    f.fail("snr_db", "need start <= stop and step > 0");
                const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9));
                for (int i = 0; i <= n; ++i)
                    c.snr_db.push_back(start + i * step);
            }
            else
                f.fail("snr_db", "expected an array or {start, stop, step}");
        }
        f.finish();
    }
    c.seed = root.count("seed", c.seed);
    if (root.has("output_dir"))
        c.output_dir = resolve(base_dir, root.text("output_dir", ""));
    root.finish();

    c.trace.band = c.scene.band;
    c.trace.seed = c.seed;
    c.validate();
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open scenario file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.parent_path(), path.string());
}

std::string artifact_stamp(std::uint64_t digest, std::uint64_t seed)
{
    return "# digest=" + digest_hex(digest) + " seed=" + std::to_string(seed);
}

bool parse_stamp(std::string_view line, std::uint64_t &digest, std::uint64_t &seed)
{
    const std::string_view prefix = "# digest=";
    if (line.substr(0, prefix.size()) != prefix)
        return false;
    line.remove_prefix(prefix.size());
    const auto sp = line.find(" seed=");
    if (sp == std::string_view::npos || sp != 16)
        return false;
    try
    {
        std::size_t used = 0;
        digest = std::stoull(std::string(line.substr(0, 16)), &used, 16);
        if (used != 16)
            return false;
        const std::string rest(line.substr(sp + 6));
        seed = std::stoull(rest, &used, 10);
        return used == rest.size() || rest[used] == ' ' || rest[used] == '\r';
    }
    catch (const std::exception &)
    {
        return false;
    }
}

} // namespace cabinlifi
