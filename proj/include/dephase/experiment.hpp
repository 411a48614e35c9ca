#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dephase/config.hpp"
#include "dephase/fidelity_curve.hpp"

namespace dephase {

// Step-by-step fidelity deviation between two curves.
struct ComparisonReport {
    std::string label_a;
    std::string label_b;
    std::vector<double> deviation;  // |M_a(t) - M_b(t)|
    double mad = 0.0;
    double max_deviation = 0.0;
    std::int64_t step_of_max = 0;
    FidelityCurve curve_a;
    FidelityCurve curve_b;
};

// Throws InvalidInput on length mismatch or empty curves.
ComparisonReport compare(const FidelityCurve& a, const FidelityCurve& b);

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<FidelityCurve> curves;  // in dr, exact, dense order
    std::optional<ComparisonReport> comparison;
    std::string data_path;
    std::string metadata_path;
};

// Computes every requested curve without touching the filesystem.
ExperimentResult compute_experiment(const ExperimentConfig& config);

// compute_experiment plus output files: the CSV (or JSON, per config.format)
// at config.out and a JSON metadata sidecar next to it.
ExperimentResult run_experiment(const ExperimentConfig& config);

inline constexpr const char* kCsvHeader = "step,t,method,M,amp_re,amp_im,stderr_re,stderr_im";

// Long-format CSV, one row per (step, method), 17 significant digits.
void write_curves_csv(std::ostream& os, const std::vector<FidelityCurve>& curves);
std::string curves_csv(const std::vector<FidelityCurve>& curves);

// Parses CSV written by write_curves_csv. Only the numeric columns and the
// method tag are recovered.
std::vector<FidelityCurve> parse_curves_csv(const std::string& text);

// JSON document with config, per-curve metadata, comparison and timestamp.
std::string metadata_json(const ExperimentResult& result, bool include_curves);

// "out.csv" -> "out.json"; "out" -> "out.json"; "out.json" -> "out.meta.json".
std::string sidecar_path(const std::string& data_path);

}  // namespace dephase
