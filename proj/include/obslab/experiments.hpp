#pragma once

#include "obslab/report.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace obslab {

// A resolved run: every parameter is present, defaults filled in.
struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 0;
    std::string output;
    ordered_json params = ordered_json::object();

    ordered_json to_json() const;
};

const std::vector<std::string>& experiment_names();

// Default parameter table of an experiment. ConfigError for unknown names.
ordered_json default_params(const std::string& experiment);

// Validates a config document {experiment, seed, output, params}. Unknown
// keys at either level, wrong types and unknown experiments are ConfigError.
// `experiment` may be omitted when given on the command line.
ExperimentConfig parse_config(const ordered_json& doc, const std::string& experiment = "");

// Runs the experiment. Library errors propagate: numerical() ones mean a
// numerical failure, the rest mean bad parameters.
Report run_experiment(const ExperimentConfig& cfg);

}  // namespace obslab
