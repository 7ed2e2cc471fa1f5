#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>

#include <nlohmann/json.hpp>

#include "twinbeam/entanglement.hpp"
#include "twinbeam/errors.hpp"
#include "twinbeam/imaging.hpp"
#include "twinbeam/pgm.hpp"
#include "twinbeam/scenarios.hpp"

namespace twinbeam {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
// written by exactly one worker, so results do not depend on scheduling.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += workers) fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

double round_db(double db) { return std::round(db * 1e4) / 1e4; }

bool is_db_name(const std::string& name) { return name.size() > 3 && name.compare(name.size() - 3, 3, "_db") == 0; }

class OutputWriter {
public:
    explicit OutputWriter(fs::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    void write(const std::string& name, const std::string& content) {
        write_text_file(dir_ / name, content);
        files_.push_back(name);
    }

    const fs::path& dir() const { return dir_; }
    const std::vector<std::string>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

// The two-mode state for one amplifier setting, seeded with alpha^2 photons
// and passed through detection loss eta.
GaussianState two_mode_output(const ScenarioConfig& cfg, double gain, double alpha_sq) {
    const double x = seed_x_for_photons(alpha_sq);
    GaussianState s = [&] {
        if (cfg.cell) {
            CellModel cell = *cfg.cell;
            cell.total_gain = gain;
            return distributed_cell_output(cell, x, 0.0);
        }
        return seeded_amplifier_output(gain, x, 0.0);
    }();
    if (cfg.efficiency < 1.0) s = apply_channel(s, loss_channel(cfg.efficiency, {probe_mode(), conjugate_mode()}));
    return s;
}

double two_mode_intensity_db(const ScenarioConfig& cfg, double gain) {
    return intensity_difference_db(two_mode_output(cfg, gain, cfg.alpha_sq), {probe_mode()}, {conjugate_mode()});
}

void write_trace(OutputWriter& out, const std::string& name, const NoiseTrace& trace, const ScenarioConfig& cfg) {
    out.write(name + ".csv", trace.to_csv());
    if (cfg.technical_noise.enabled()) {
        out.write(name + "_technical.csv", apply_technical_noise(trace, cfg.technical_noise).to_csv());
    }
}

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }
double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

void run_gain_sweep(const ScenarioConfig& cfg, unsigned threads, OutputWriter& out, ResultSummary& summary) {
    const std::vector<double> gains = cfg.sweep->points();
    std::vector<double> db(gains.size());
    parallel_for(gains.size(), threads, [&](std::size_t i) { db[i] = two_mode_intensity_db(cfg, gains[i]); });
    write_trace(out, "gain_sweep", NoiseTrace(gains, db, "intensity difference vs gain"), cfg);
    summary.headline.push_back({"min_db", min_of(db)});
    summary.headline.push_back({"db_at_max_gain", db.back()});
}

void run_angle_sweep(const ScenarioConfig& cfg, unsigned threads, OutputWriter& out, ResultSummary& summary) {
    const std::vector<double> angles = cfg.sweep->points();
    std::vector<double> gain(angles.size());
    std::vector<double> db(angles.size());
    parallel_for(angles.size(), threads, [&](std::size_t i) {
        gain[i] = angular_gain(*cfg.angular, angles[i]);
        db[i] = two_mode_intensity_db(cfg, gain[i]);
    });
    std::vector<double> gain_db(gain.size());
    std::transform(gain.begin(), gain.end(), gain_db.begin(), to_db);
    out.write("angle_gain.csv", NoiseTrace(angles, gain_db, "gain (dB) vs angle (mrad)").to_csv());
    write_trace(out, "angle_squeezing", NoiseTrace(angles, db, "intensity difference vs angle (mrad)"), cfg);

    const std::int64_t modes = estimate_mode_count(*cfg.angular, cfg.cone_min_mrad, cfg.cone_max_mrad);
    summary.headline.push_back({"peak_gain", max_of(gain)});
    summary.headline.push_back({"min_db", min_of(db)});
    summary.headline.push_back({"mode_count", static_cast<double>(modes)});
    summary.headline.push_back({"mode_count_order", static_cast<double>(order_of_magnitude(modes))});
}

template <MeasurableState State>
void homodyne_outputs(const ScenarioConfig& cfg, unsigned threads, const State& state, const HomodyneSpec& probe,
                      const HomodyneSpec& conj, const std::string& prefix, OutputWriter& out,
                      ResultSummary& summary) {
    const std::vector<double> phases = uniform_phases(cfg.phase_steps);
    std::vector<double> diff(phases.size());
    std::vector<double> sum(phases.size());
    parallel_for(phases.size(), threads, [&](std::size_t i) {
        diff[i] = to_db(joint_variance_at(state, probe, conj, JointSignal::Difference, phases[i], cfg.phase_mode));
        sum[i] = to_db(joint_variance_at(state, probe, conj, JointSignal::Sum, phases[i], cfg.phase_mode));
    });
    write_trace(out, prefix + "_diff", NoiseTrace(phases, diff, "difference signal vs LO phase (rad)"), cfg);
    write_trace(out, prefix + "_sum", NoiseTrace(phases, sum, "sum signal vs LO phase (rad)"), cfg);

    const PhaseOptimum best = optimal_lo_phase(state, probe, conj, cfg.phase_mode);
    const EntanglementReport report = EntanglementReport::from_variances(best.variances.x_minus, best.variances.p_plus);
    const EntanglementReport fixed = inseparability(state, probe, conj, false, cfg.phase_mode);
    out.write("entanglement.json", report.to_json());

    summary.headline.push_back({"min_diff_db", min_of(diff)});
    summary.headline.push_back({"max_diff_db", max_of(diff)});
    summary.headline.push_back({"min_sum_db", min_of(sum)});
    summary.headline.push_back({"inseparability", report.inseparability});
    summary.headline.push_back({"inseparability_fixed_phase", fixed.inseparability});
    summary.headline.push_back({"optimal_phase", best.phase});
    summary.headline.push_back({"entangled", report.entangled ? 1.0 : 0.0});
}

void run_homodyne_scan(const ScenarioConfig& cfg, unsigned threads, OutputWriter& out, ResultSummary& summary) {
    ScenarioConfig lossless = cfg;
    lossless.efficiency = 1.0;
    const GaussianState state = two_mode_output(lossless, cfg.gain, 0.0);
    const HomodyneSpec probe{{1.0}, cfg.probe_lo_phase, cfg.efficiency};
    const HomodyneSpec conj{{1.0}, cfg.conjugate_lo_phase, cfg.efficiency};
    homodyne_outputs(cfg, threads, state, probe, conj, "homodyne", out, summary);
}

// Amplified image; with_detection_loss applies efficiency as loss on every mode.
ImageState image_output(const ScenarioConfig& cfg, const BeamImage& seed, bool with_detection_loss) {
    GainMap gain = cfg.gain;
    if (cfg.angular_gain_profile) gain = *cfg.angular;
    ImageState state = amplify_image(seed, gain, cfg.mode_budget);
    if (with_detection_loss && cfg.efficiency < 1.0) {
        state = state.map_blocks([&](const GaussianState& b) {
            return apply_channel(b, loss_channel(cfg.efficiency, b.modes()));
        });
    }
    return state;
}

Mask config_mask(const ScenarioConfig& cfg, const FileRef& ref) {
    ThresholdConfig t;
    t.binarize_at = cfg.mask_threshold;
    t.angular_pitch_mrad = cfg.pitch_mrad;
    return load_mask(ref.resolved, t);
}

RegionSelector lit_region(const Mask& mask) {
    RegionSelector r{mask.grid, std::vector<bool>(mask.transmission.size())};
    for (std::size_t k = 0; k < r.included.size(); ++k) r.included[k] = mask.transmission[k] > 0.0;
    return r;
}

void run_image_subregion(const ScenarioConfig& cfg, OutputWriter& out, ResultSummary& summary) {
    const Mask mask = config_mask(cfg, *cfg.mask);
    const BeamImage seed = masked_seed(mask.grid, mask, std::sqrt(cfg.alpha_sq));
    const ImageState state = image_output(cfg, seed, true);

    std::vector<double> seed_intensity(mask.transmission.size());
    for (std::size_t k = 0; k < seed_intensity.size(); ++k) seed_intensity[k] = cfg.alpha_sq * mask.transmission[k];
    out.write("seed_intensity.pgm", format_pgm(intensity_image(mask.grid, seed_intensity)));
    out.write("probe_intensity.pgm", format_pgm(intensity_image(mask.grid, state.mean_photons(Beam::Probe))));
    out.write("conjugate_intensity.pgm", format_pgm(intensity_image(mask.grid, state.mean_photons(Beam::Conjugate))));

    const RegionSelector lit = lit_region(mask);
    const RegionSelector full = RegionSelector::all(mask.grid);
    if (lit.count() == 0) throw MeasurementUndefined("mask has no lit pixels to measure");
    summary.headline.push_back({"lit_region_db", subregion_intensity_difference_db(state, lit, lit)});
    summary.headline.push_back({"full_frame_db", subregion_intensity_difference_db(state, full, full)});
    for (const auto& pair : cfg.regions) {
        const RegionSelector probe = load_region(pair.probe.resolved, cfg.pitch_mrad);
        const RegionSelector conj = load_region(pair.conjugate.resolved, cfg.pitch_mrad);
        if (!(probe.grid == mask.grid) || !(conj.grid == mask.grid))
            throw ValidationError("region '" + pair.name + "' does not match the mask dimensions");
        try {
            summary.headline.push_back({pair.name + "_db", subregion_intensity_difference_db(state, probe, conj)});
        } catch (const MeasurementUndefined& e) {
            throw MeasurementUndefined("region '" + pair.name + "': " + e.what());
        }
    }
}

void run_shaped_lo(const ScenarioConfig& cfg, unsigned threads, OutputWriter& out, ResultSummary& summary) {
    const Mask mask = config_mask(cfg, *cfg.lo_mask);
    const BeamImage vacuum_seed{mask.grid, std::vector<Quadrature>(mask.grid.size())};
    // Efficiency enters through the homodyne specs, not the state.
    const ImageState state = image_output(cfg, vacuum_seed, false);
    const HomodyneSpec probe = lo_profile_from_mask(mask, cfg.probe_lo_phase, cfg.efficiency);
    const HomodyneSpec conj = lo_profile_from_mask(mask, cfg.conjugate_lo_phase, cfg.efficiency);

    std::vector<double> lo_intensity(probe.weights.size());
    for (std::size_t k = 0; k < lo_intensity.size(); ++k) lo_intensity[k] = probe.weights[k] * probe.weights[k];
    out.write("lo_profile.pgm", format_pgm(intensity_image(mask.grid, lo_intensity)));
    homodyne_outputs(cfg, threads, state, probe, conj, "shaped_lo", out, summary);
    summary.headline.push_back(
        {"lo_pixels", static_cast<double>(std::count_if(mask.transmission.begin(), mask.transmission.end(),
                                                        [](double t) { return t > 0.0; }))});
}

}  // namespace

std::optional<double> ResultSummary::find(const std::string& name) const {
    for (const auto& h : headline) {
        if (h.name == name) return h.value;
    }
    return std::nullopt;
}

std::string ResultSummary::to_json() const {
    json j;
    j["scenario"] = to_string(kind);
    j["engine_version"] = engine_version;
    json head = json::object();
    for (const auto& h : headline) head[h.name] = is_db_name(h.name) ? round_db(h.value) : h.value;
    j["headline"] = head;
    j["files"] = files;
    j["config"] = json::parse(config_echo);
    return j.dump(2) + "\n";
}

void emit_summary(const ResultSummary& summary, const fs::path& path) {
    const fs::path dir = path.parent_path();
    for (const auto& name : summary.files) {
        const fs::path f = dir / name;
        std::error_code ec;
        if (!fs::is_regular_file(f, ec)) throw IntegrityError("manifest lists " + f.string() + " but it is missing");
        if (fs::file_size(f, ec) == 0 || ec) throw IntegrityError("manifest lists " + f.string() + " but it is empty");
    }
    write_text_file(path, summary.to_json());
}

fs::path resolve_output_dir(const ScenarioConfig& config, const RunOptions& options) {
    if (!options.output_dir.empty()) return options.output_dir;
    if (!config.output_dir.empty()) return config.output_dir;
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
    return "twinbeam_out";
}

ResultSummary run_scenario(const ScenarioConfig& config, const RunOptions& options) {
    OutputWriter out(resolve_output_dir(config, options));
    ResultSummary summary;
    summary.kind = config.kind;
    summary.config_echo = config.echo_json();
    const unsigned threads = std::max(1u, options.threads);

    const std::string context = std::string(to_string(config.kind)) + " scenario (" + config.source + "): ";
    try {
        switch (config.kind) {
            case ScenarioKind::GainSweep: run_gain_sweep(config, threads, out, summary); break;
            case ScenarioKind::AngleSweep: run_angle_sweep(config, threads, out, summary); break;
            case ScenarioKind::HomodyneScan: run_homodyne_scan(config, threads, out, summary); break;
            case ScenarioKind::ImageSubregion: run_image_subregion(config, out, summary); break;
            case ScenarioKind::ShapedLoEntanglement: run_shaped_lo(config, threads, out, summary); break;
        }
    } catch (const ResourceError& e) {
        throw ResourceError(context + e.what());
    } catch (const MeasurementUndefined& e) {
        throw MeasurementUndefined(context + e.what());
    }
    summary.files = out.files();
    emit_summary(summary, out.dir() / kSummaryFileName);
    return summary;
}

}  // namespace twinbeam
