#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nvsense/campaign.hpp"

namespace nvsense {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Everything a CLI invocation needs, assembled from one JSON config file.
// Physical quantities in the file use Hz, seconds, mT and degrees/radians;
// they are converted to the internal rad/us + us units here.
struct AppConfig {
    SensingModel model;
    RunConfig run;  // carries the control grid
    bool has_truth = false;
    GroundTruth truth;
    bool has_sweep = false;
    SweepSpec sweep;
    std::vector<RunMode> campaign_modes;
    int workers = 0;  // 0: one per hardware thread
    double throughput_seconds = 2.0;
    // Flattened effective key=value pairs (defaults included) for the
    // run manifest.
    std::vector<std::pair<std::string, std::string>> manifest;
};

AppConfig parse_config(const std::string& json_text);
AppConfig load_config(const std::filesystem::path& path);

// Built-in defaults (the two-spin sensing setup, or the AC-field setup) used
// by subcommands that can run without a config file.
AppConfig default_config(bool nuclear);

}  // namespace nvsense
