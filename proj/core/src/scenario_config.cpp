#include <cmath>
#include <limits>
#include <set>

#include <nlohmann/json.hpp>

#include "twinbeam/errors.hpp"
#include "twinbeam/pgm.hpp"
#include "twinbeam/scenarios.hpp"

namespace twinbeam {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Typed access to one JSON object, tracking which keys were consumed so
// unknown keys can be rejected.
class Section {
public:
    Section(const json& node, std::string path, bool strict) : node_(node), path_(std::move(path)), strict_(strict) {
        if (!node_.is_object()) throw ConfigError(path_, "expected an object");
    }

    bool has(const std::string& key) {
        used_.insert(key);
        return node_.contains(key) && !node_.at(key).is_null();
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_number()) throw ConfigError(join(path_, key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(join(path_, key), "expected a finite number");
        return d;
    }

    std::optional<double> optional_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return number(key, 0.0);
    }

    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_number_integer()) throw ConfigError(join(path_, key), "expected an integer");
        return v.get<std::int64_t>();
    }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const json& v = node_.at(key);
        if (!v.is_boolean()) throw ConfigError(join(path_, key), "expected true or false");
        return v.get<bool>();
    }

    std::optional<std::string> string(const std::string& key) {
        if (!has(key)) return std::nullopt;
        const json& v = node_.at(key);
        if (!v.is_string()) throw ConfigError(join(path_, key), "expected a string");
        return v.get<std::string>();
    }

    std::optional<Section> child(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return Section(node_.at(key), join(path_, key), strict_);
    }

    const json& raw(const std::string& key) {
        used_.insert(key);
        return node_.at(key);
    }

    std::string key_path(const std::string& key) const { return join(path_, key); }

    // Rejects keys that were never looked up (strict mode only).
    void finish() const {
        if (!strict_) return;
        for (const auto& [key, _] : node_.items()) {
            if (!used_.count(key)) throw ConfigError(join(path_, key), "unknown key");
        }
    }

private:
    const json& node_;
    std::string path_;
    bool strict_;
    std::set<std::string> used_;
};

void require(bool ok, const std::string& key_path, const std::string& what) {
    if (!ok) throw ConfigError(key_path, what);
}

FileRef file_ref(const std::string& as_written, const fs::path& base_dir, const std::string& key_path) {
    require(!as_written.empty(), key_path, "empty file path");
    fs::path p(as_written);
    if (p.is_relative()) p = base_dir / p;
    p = p.lexically_normal();
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) throw ConfigError(key_path, "referenced file does not exist: " + p.string());
    return {as_written, p};
}

ScenarioKind parse_kind(const std::string& name) {
    for (auto kind : {ScenarioKind::GainSweep, ScenarioKind::AngleSweep, ScenarioKind::HomodyneScan,
                      ScenarioKind::ImageSubregion, ScenarioKind::ShapedLoEntanglement}) {
        if (name == to_string(kind)) return kind;
    }
    throw ConfigError("kind", "unknown scenario kind '" + name + "'");
}

json noise_level(double db) { return std::isfinite(db) ? json(db) : json(nullptr); }

}  // namespace

const char* to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::GainSweep: return "GainSweep";
        case ScenarioKind::AngleSweep: return "AngleSweep";
        case ScenarioKind::HomodyneScan: return "HomodyneScan";
        case ScenarioKind::ImageSubregion: return "ImageSubregion";
        case ScenarioKind::ShapedLoEntanglement: return "ShapedLoEntanglement";
    }
    return "?";
}

std::vector<double> SweepRange::points() const {
    if (steps < 1) throw ValidationError("sweep needs at least one step");
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        out[static_cast<std::size_t>(i)] =
            steps == 1 ? start : start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1);
    }
    if (steps > 1) out.back() = stop;
    return out;
}

ScenarioConfig parse_config(const fs::path& path, const ParseOptions& options) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const IoError& e) {
        throw ConfigError("", e.what());
    }
    return parse_config_text(text, path.parent_path(), path.string(), options);
}

ScenarioConfig parse_config_text(const std::string& text, const fs::path& base_dir, const std::string& source,
                                 const ParseOptions& options) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", source + ": invalid JSON: " + e.what());
    }
    if (!root.is_object()) throw ConfigError("", source + ": top level must be an object");

    ScenarioConfig cfg;
    cfg.source = source;
    bool strict = true;
    if (root.contains("strict")) {
        require(root.at("strict").is_boolean(), "strict", "expected true or false");
        strict = root.at("strict").get<bool>();
    }
    cfg.strict = strict || options.force_strict;

    Section top(root, "", cfg.strict);
    top.boolean("strict", true);
    const auto kind = top.string("kind");
    require(kind.has_value(), "kind", "missing scenario kind");
    cfg.kind = parse_kind(*kind);
    cfg.output_dir = top.string("output_dir").value_or("");
    {
        const std::int64_t seed = top.integer("random_seed", 0);
        require(seed >= 0, "random_seed", "must be >= 0");
        cfg.random_seed = static_cast<std::uint64_t>(seed);
    }

    if (auto amp = top.child("amplifier")) {
        cfg.gain = amp->number("gain", cfg.gain);
        require(cfg.gain >= 1.0, amp->key_path("gain"), "gain must be >= 1");
        if (auto cell = amp->child("cell")) {
            CellModel c;
            const std::int64_t slices = cell->integer("slices", c.n_slices);
            require(slices >= 1 && slices <= 100000, cell->key_path("slices"), "must be in 1..100000");
            c.n_slices = static_cast<int>(slices);
            c.probe_transmission = cell->number("probe_transmission", c.probe_transmission);
            require(c.probe_transmission > 0.0 && c.probe_transmission <= 1.0, cell->key_path("probe_transmission"),
                    "must lie in (0, 1]");
            c.conjugate_transmission = cell->number("conjugate_transmission", c.conjugate_transmission);
            require(c.conjugate_transmission > 0.0 && c.conjugate_transmission <= 1.0,
                    cell->key_path("conjugate_transmission"), "must lie in (0, 1]");
            cell->finish();
            cfg.cell = c;
        }
        if (auto ang = amp->child("angular")) {
            AngularGainModel m;
            m.peak_gain = ang->number("peak_gain", cfg.gain);
            require(m.peak_gain >= 1.0, ang->key_path("peak_gain"), "must be >= 1");
            m.center_mrad = ang->number("center_mrad", m.center_mrad);
            require(m.center_mrad >= 0.0, ang->key_path("center_mrad"), "must be >= 0");
            m.fwhm_mrad = ang->number("fwhm_mrad", m.fwhm_mrad);
            require(m.fwhm_mrad > 0.0, ang->key_path("fwhm_mrad"), "must be > 0");
            m.spot_size_mrad = ang->number("spot_mrad", m.spot_size_mrad);
            require(m.spot_size_mrad > 0.0, ang->key_path("spot_mrad"), "must be > 0");
            cfg.cone_min_mrad = ang->number("cone_min_mrad", cfg.cone_min_mrad);
            cfg.cone_max_mrad = ang->number("cone_max_mrad", cfg.cone_max_mrad);
            require(cfg.cone_min_mrad >= 0.0 && cfg.cone_min_mrad < cfg.cone_max_mrad, ang->key_path("cone_max_mrad"),
                    "need 0 <= cone_min_mrad < cone_max_mrad");
            ang->finish();
            cfg.angular = m;
        }
        amp->finish();
    }

    if (auto seed = top.child("seed")) {
        cfg.alpha_sq = seed->number("alpha_sq", cfg.alpha_sq);
        require(cfg.alpha_sq >= 0.0, seed->key_path("alpha_sq"), "must be >= 0");
        seed->finish();
    }

    if (auto det = top.child("detection")) {
        cfg.efficiency = det->number("efficiency", cfg.efficiency);
        require(cfg.efficiency >= 0.0 && cfg.efficiency <= 1.0, det->key_path("efficiency"), "must lie in [0, 1]");
        cfg.technical_noise.electronic_floor_db =
            det->optional_number("electronic_floor_db").value_or(-std::numeric_limits<double>::infinity());
        cfg.technical_noise.pump_scatter_db =
            det->optional_number("pump_scatter_db").value_or(-std::numeric_limits<double>::infinity());
        const std::int64_t steps = det->integer("phase_steps", static_cast<std::int64_t>(cfg.phase_steps));
        require(steps >= 1 && steps <= 1000000, det->key_path("phase_steps"), "must be in 1..1000000");
        cfg.phase_steps = static_cast<std::size_t>(steps);
        cfg.phase_mode = det->boolean("independent_phases", false) ? PhaseMode::Independent : PhaseMode::Synchronous;
        cfg.probe_lo_phase = det->number("probe_lo_phase", 0.0);
        cfg.conjugate_lo_phase = det->number("conjugate_lo_phase", 0.0);
        det->finish();
    }

    if (auto sw = top.child("sweep")) {
        SweepRange r;
        require(sw->has("start") && sw->has("stop"), sw->key_path("start"), "sweep needs start and stop");
        r.start = sw->number("start", 0.0);
        r.stop = sw->number("stop", 0.0);
        const std::int64_t steps = sw->integer("steps", 2);
        require(steps >= 1 && steps <= 1000000, sw->key_path("steps"), "must be in 1..1000000");
        r.steps = static_cast<int>(steps);
        require(r.steps == 1 ? r.start <= r.stop : r.start < r.stop, sw->key_path("stop"), "sweep range is empty");
        sw->finish();
        cfg.sweep = r;
    }

    if (auto img = top.child("image")) {
        if (auto m = img->string("mask")) cfg.mask = file_ref(*m, base_dir, img->key_path("mask"));
        cfg.mask_threshold = img->optional_number("threshold");
        if (cfg.mask_threshold)
            require(*cfg.mask_threshold >= 0.0 && *cfg.mask_threshold <= 1.0, img->key_path("threshold"),
                    "must lie in [0, 1]");
        cfg.pitch_mrad = img->number("pitch_mrad", cfg.pitch_mrad);
        require(cfg.pitch_mrad > 0.0, img->key_path("pitch_mrad"), "must be > 0");
        const std::string profile = img->string("gain_profile").value_or("uniform");
        require(profile == "uniform" || profile == "angular", img->key_path("gain_profile"),
                "must be \"uniform\" or \"angular\"");
        cfg.angular_gain_profile = profile == "angular";
        const std::int64_t budget = img->integer("mode_budget", static_cast<std::int64_t>(cfg.mode_budget));
        require(budget >= 1, img->key_path("mode_budget"), "must be >= 1");
        cfg.mode_budget = static_cast<std::size_t>(budget);
        if (img->has("regions")) {
            const json& regions = img->raw("regions");
            const std::string rpath = img->key_path("regions");
            require(regions.is_array(), rpath, "expected an array");
            std::set<std::string> names;
            for (std::size_t i = 0; i < regions.size(); ++i) {
                Section r(regions[i], rpath + "[" + std::to_string(i) + "]", cfg.strict);
                RegionPair pair;
                const auto name = r.string("name");
                require(name && !name->empty(), r.key_path("name"), "region needs a name");
                require(names.insert(*name).second, r.key_path("name"), "duplicate region name");
                pair.name = *name;
                const auto probe = r.string("probe");
                const auto conj = r.string("conjugate");
                require(probe.has_value(), r.key_path("probe"), "region needs a probe file");
                require(conj.has_value(), r.key_path("conjugate"), "region needs a conjugate file");
                pair.probe = file_ref(*probe, base_dir, r.key_path("probe"));
                pair.conjugate = file_ref(*conj, base_dir, r.key_path("conjugate"));
                r.finish();
                cfg.regions.push_back(std::move(pair));
            }
        }
        if (auto lo = img->string("lo_mask")) cfg.lo_mask = file_ref(*lo, base_dir, img->key_path("lo_mask"));
        img->finish();
    }
    top.finish();

    switch (cfg.kind) {
        case ScenarioKind::GainSweep:
            require(cfg.sweep.has_value(), "sweep", "GainSweep needs a sweep over gain");
            require(cfg.sweep->start >= 1.0, "sweep.start", "gain sweep must start at G >= 1");
            break;
        case ScenarioKind::AngleSweep:
            require(cfg.angular.has_value(), "amplifier.angular", "AngleSweep needs an angular gain model");
            require(cfg.sweep.has_value(), "sweep", "AngleSweep needs a sweep over angle");
            require(cfg.sweep->start >= 0.0, "sweep.start", "angle sweep must start at >= 0");
            break;
        case ScenarioKind::HomodyneScan:
            break;
        case ScenarioKind::ImageSubregion:
            require(cfg.mask.has_value(), "image.mask", "ImageSubregion needs a mask");
            break;
        case ScenarioKind::ShapedLoEntanglement:
            require(cfg.lo_mask.has_value(), "image.lo_mask", "ShapedLoEntanglement needs an LO mask");
            break;
    }
    if (cfg.angular_gain_profile)
        require(cfg.angular.has_value(), "image.gain_profile", "angular gain profile needs amplifier.angular");
    return cfg;
}

std::string ScenarioConfig::echo_json() const {
    json j;
    j["kind"] = to_string(kind);
    j["strict"] = strict;
    j["output_dir"] = output_dir;
    j["random_seed"] = random_seed;

    json amp;
    amp["gain"] = gain;
    if (cell) {
        amp["cell"] = {{"slices", cell->n_slices},
                       {"probe_transmission", cell->probe_transmission},
                       {"conjugate_transmission", cell->conjugate_transmission}};
    } else {
        amp["cell"] = nullptr;
    }
    if (angular) {
        amp["angular"] = {{"peak_gain", angular->peak_gain},
                          {"center_mrad", angular->center_mrad},
                          {"fwhm_mrad", angular->fwhm_mrad},
                          {"spot_mrad", angular->spot_size_mrad},
                          {"cone_min_mrad", cone_min_mrad},
                          {"cone_max_mrad", cone_max_mrad}};
    } else {
        amp["angular"] = nullptr;
    }
    j["amplifier"] = amp;
    j["seed"] = {{"alpha_sq", alpha_sq}};
    j["detection"] = {{"efficiency", efficiency},
                      {"electronic_floor_db", noise_level(technical_noise.electronic_floor_db)},
                      {"pump_scatter_db", noise_level(technical_noise.pump_scatter_db)},
                      {"phase_steps", phase_steps},
                      {"independent_phases", phase_mode == PhaseMode::Independent},
                      {"probe_lo_phase", probe_lo_phase},
                      {"conjugate_lo_phase", conjugate_lo_phase}};
    if (sweep) {
        j["sweep"] = {{"start", sweep->start}, {"stop", sweep->stop}, {"steps", sweep->steps}};
    } else {
        j["sweep"] = nullptr;
    }
    json img;
    img["mask"] = mask ? json(mask->as_written) : json(nullptr);
    img["threshold"] = mask_threshold ? json(*mask_threshold) : json(nullptr);
    img["pitch_mrad"] = pitch_mrad;
    img["gain_profile"] = angular_gain_profile ? "angular" : "uniform";
    img["mode_budget"] = mode_budget;
    img["regions"] = json::array();
    for (const auto& r : regions)
        img["regions"].push_back({{"name", r.name}, {"probe", r.probe.as_written}, {"conjugate", r.conjugate.as_written}});
    img["lo_mask"] = lo_mask ? json(lo_mask->as_written) : json(nullptr);
    j["image"] = img;
    return j.dump();
}

}  // namespace twinbeam
