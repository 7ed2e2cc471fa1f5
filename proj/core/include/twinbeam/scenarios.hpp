#pragma once

// Scenario configuration and runner. A scenario is one of five experiment
// families; running it writes CSV traces, JSON reports and PGM images to an
// output directory, plus a summary.json manifest. Output is a pure function
// of the configuration.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "twinbeam/detection.hpp"
#include "twinbeam/fwm_amplifier.hpp"

namespace twinbeam {

inline constexpr const char* kEngineVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "TWINBEAM_OUT_DIR";
inline constexpr const char* kSummaryFileName = "summary.json";

enum class ScenarioKind { GainSweep, AngleSweep, HomodyneScan, ImageSubregion, ShapedLoEntanglement };

const char* to_string(ScenarioKind kind);

struct SweepRange {
    double start = 0.0;
    double stop = 0.0;
    int steps = 1;

    // steps points from start to stop inclusive (just start when steps == 1).
    std::vector<double> points() const;
};

// A path as written in the config and as resolved against the config's directory.
struct FileRef {
    std::string as_written;
    std::filesystem::path resolved;
};

struct RegionPair {
    std::string name;
    FileRef probe;
    FileRef conjugate;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::GainSweep;
    bool strict = true;
    std::string output_dir;
    std::uint64_t random_seed = 0;

    // amplifier
    double gain = 2.0;
    std::optional<CellModel> cell;
    std::optional<AngularGainModel> angular;
    double cone_min_mrad = 2.0;
    double cone_max_mrad = 10.0;

    // seed
    double alpha_sq = 1e4;

    // detection
    double efficiency = 1.0;
    TechnicalNoiseSpec technical_noise;
    std::size_t phase_steps = 256;
    PhaseMode phase_mode = PhaseMode::Synchronous;
    double probe_lo_phase = 0.0;
    double conjugate_lo_phase = 0.0;

    std::optional<SweepRange> sweep;

    // image
    std::optional<FileRef> mask;
    std::optional<double> mask_threshold;
    double pitch_mrad = 1.0;
    bool angular_gain_profile = false;
    std::size_t mode_budget = 4096;
    std::vector<RegionPair> regions;
    std::optional<FileRef> lo_mask;

    std::string source;

    // Every field with defaults materialized, paths as written.
    std::string echo_json() const;
};

struct ParseOptions {
    // Reject unknown keys even if the config sets "strict": false.
    bool force_strict = false;
};

// Throws ConfigError (with the offending key path) for unknown keys, bad
// values or missing referenced files.
ScenarioConfig parse_config(const std::filesystem::path& path, const ParseOptions& options = {});
ScenarioConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir,
                                 const std::string& source = "<config>", const ParseOptions& options = {});

struct Headline {
    std::string name;
    double value = 0.0;
};

struct ResultSummary {
    ScenarioKind kind = ScenarioKind::GainSweep;
    std::vector<Headline> headline;
    // Paths relative to the output directory.
    std::vector<std::string> files;
    std::string engine_version = kEngineVersion;
    std::string config_echo = "{}";

    std::optional<double> find(const std::string& name) const;
    // dB headlines ("*_db") are rounded to 4 decimals.
    std::string to_json() const;
};

// Writes the summary JSON to path after checking every manifest entry
// exists (relative to path's directory) and is nonempty.
void emit_summary(const ResultSummary& summary, const std::filesystem::path& path);

struct RunOptions {
    // Overrides config.output_dir when nonempty.
    std::filesystem::path output_dir;
    unsigned threads = 1;
};

std::filesystem::path resolve_output_dir(const ScenarioConfig& config, const RunOptions& options);

ResultSummary run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

}  // namespace twinbeam
