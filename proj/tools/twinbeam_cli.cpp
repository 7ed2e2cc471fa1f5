// twinbeam: run a twin-beam amplifier scenario from a JSON config.
//
//   twinbeam run <config> [--out DIR] [--strict] [--threads N]
//
// Exit codes: 0 success, 2 configuration or input error, 3 runtime physics error.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"

#include "twinbeam/errors.hpp"
#include "twinbeam/scenarios.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

void print_summary(const twinbeam::ResultSummary& summary, const std::filesystem::path& dir) {
    std::cout << twinbeam::to_string(summary.kind) << " -> " << dir.string() << '\n';
    for (const auto& h : summary.headline) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "  %-28s %.6g\n", h.name.c_str(), h.value);
        std::cout << buf;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Four-wave-mixing twin-beam amplifier simulator"};
    app.set_version_flag("--version", twinbeam::kEngineVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool strict = false;
    unsigned threads = 1;

    auto* run = app.add_subcommand("run", "Run the scenario described by a config file");
    run->add_option("config", config_path, "Scenario config (JSON)")->required();
    run->add_option("--out", out_dir, std::string("Output directory (default: config output_dir, then $") +
                                          twinbeam::kOutputDirEnv + ")");
    run->add_flag("--strict", strict, "Reject unknown config keys even if the config disables strict mode");
    run->add_option("--threads", threads, "Worker threads for sweep points")->check(CLI::Range(1u, 1024u));

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    twinbeam::ScenarioConfig config;
    try {
        config = twinbeam::parse_config(config_path, {strict});
    } catch (const twinbeam::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    twinbeam::RunOptions options{out_dir, threads};
    const auto dir = twinbeam::resolve_output_dir(config, options);
    try {
        const auto summary = twinbeam::run_scenario(config, options);
        print_summary(summary, dir);
    } catch (const twinbeam::ParseError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const twinbeam::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const twinbeam::ValidationError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << to_string(config.kind) << " failed: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}
