// obslab <experiment> --config <path> [--seed N] [--out prefix]
//
// Exit codes: 0 no violations, 1 violations, 2 config error (no files
// written), 3 numerical failure.

#include "obslab/errors.hpp"
#include "obslab/experiments.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <fstream>
#include <optional>

using namespace obslab;

int main(int argc, char** argv) {
    CLI::App app{"Batch runner for the obslab experiments"};
    std::string experiment, config_path, out;
    std::optional<std::uint64_t> seed;
    app.add_option("experiment", experiment, "experiment name")->required()->check(CLI::IsMember(experiment_names()));
    app.add_option("--config", config_path, "JSON config file")->required();
    app.add_option("--seed", seed, "override the config seed");
    app.add_option("--out", out, "override the output prefix");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    ExperimentConfig cfg;
    try {
        std::ifstream f(config_path);
        if (!f) throw ConfigError("cannot read " + config_path);
        ordered_json doc;
        try {
            doc = ordered_json::parse(f);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError(std::string("malformed JSON: ") + e.what());
        }
        cfg = parse_config(doc, experiment);
        if (seed) cfg.seed = *seed;
        if (!out.empty()) cfg.output = out;
    } catch (const Error& e) {
        fmt::print(stderr, "obslab: {}\n", e.what());
        return 2;
    }

    Report report;
    try {
        report = run_experiment(cfg);
    } catch (const Error& e) {
        fmt::print(stderr, "obslab: {}\n", e.what());
        return e.numerical() ? 3 : 2;
    }
    try {
        write_report(cfg.output, cfg.to_json(), report);
    } catch (const std::exception& e) {
        fmt::print(stderr, "obslab: {}\n", e.what());
        return 3;
    }
    fmt::print("{}: {} rows, {} violations -> {}.csv, {}.json\n", cfg.experiment, report.rows.size(),
               report.violations, cfg.output, cfg.output);
    return report.violations == 0 ? 0 : 1;
}
