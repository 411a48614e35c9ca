#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dephase/fidelity_curve.hpp"
#include "dephase/initial_states.hpp"

namespace dephase {

enum class OutputFormat { csv, json };

// Everything needed to reproduce one fidelity run.
struct ExperimentConfig {
    std::string name;
    double k = 0.8;
    double epsilon = 5e-3;
    std::int64_t dim_n = 1000;
    // "position" or "gaussian".
    std::string state = "position";
    double q0 = 0.4;
    double p0 = 0.0;
    double sigma = 0.05;
    std::int64_t steps = 50;
    // Sample count for the DR estimator; grid mode uses N.
    std::int64_t samples = 1000;
    SampleMode mode = SampleMode::grid;
    std::uint64_t seed = 0;
    std::vector<Method> methods{Method::dr, Method::exact};
    std::string out = "fidelity.csv";
    OutputFormat format = OutputFormat::csv;
    unsigned threads = 0;

    MapSpec spec() const { return MapSpec(k, epsilon, dim_n); }
    InitialState initial_state() const;
};

// A raw key = value entry and where it came from, for error messages.
struct ConfigEntry {
    std::string value;
    std::string origin;  // "file.cfg:12" or "--flag"
};

using ConfigEntries = std::map<std::string, ConfigEntry>;

// Keys accepted in config files; each also has a --<key> CLI flag.
const std::vector<std::string>& config_keys();

// Parses "key = value" lines ('#' starts a comment). Malformed lines, unknown
// keys and duplicates are collected and thrown together as ValidationError.
ConfigEntries parse_config_text(const std::string& text, const std::string& source_name);

ConfigEntries load_config_file(const std::string& path);

// Converts entries to a config, re-checking every module precondition.
// Throws ValidationError listing every violation with its origin.
ExperimentConfig build_config(const ConfigEntries& entries);

// Renders a config in the file format accepted by parse_config_text.
std::string to_config_text(const ExperimentConfig& config);

struct Preset {
    std::string name;
    std::string description;
    ExperimentConfig config;
};

const std::vector<Preset>& presets();
std::optional<Preset> find_preset(const std::string& name);

std::string to_string(OutputFormat f);

}  // namespace dephase
