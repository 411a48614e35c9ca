#include "dephase/experiment.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "dephase/dephasing.hpp"
#include "dephase/errors.hpp"
#include "dephase/quantum.hpp"
#include "dephase/shadowing.hpp"

namespace dephase {

namespace {

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double parse_field(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw InvalidInput("bad numeric CSV field '" + s + "'");
    return v;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << body;
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace

ComparisonReport compare(const FidelityCurve& a, const FidelityCurve& b) {
    if (a.size() != b.size())
        throw InvalidInput("compare: curve lengths differ (" + std::to_string(a.size()) + " vs " +
                           std::to_string(b.size()) + ")");
    if (a.size() == 0) throw InvalidInput("compare: curves are empty");
    ComparisonReport r;
    r.label_a = to_string(a.method);
    r.label_b = to_string(b.method);
    r.deviation.resize(a.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < a.size(); ++t) {
        const double d = std::abs(a.fidelity[t] - b.fidelity[t]);
        r.deviation[t] = d;
        sum += d;
        if (d > r.max_deviation) {
            r.max_deviation = d;
            r.step_of_max = static_cast<std::int64_t>(t);
        }
    }
    r.mad = sum / static_cast<double>(a.size());
    r.curve_a = a;
    r.curve_b = b;
    return r;
}

ExperimentResult compute_experiment(const ExperimentConfig& config) {
    const MapSpec spec = config.spec();
    const InitialState state = config.initial_state();
    const std::string descriptor = describe(state);

    auto wants = [&](Method m) { return std::find(config.methods.begin(), config.methods.end(), m) != config.methods.end(); };

    ExperimentResult result;
    result.config = config;

    if (wants(Method::dr)) {
        SampleSet samples = config.state == "gaussian"
                                ? samples_gaussian(spec, config.q0, config.p0, config.sigma, config.samples,
                                                   config.mode, config.seed, config.threads)
                                : samples_position_state(spec, config.q0, config.samples, config.mode, config.seed,
                                                         config.threads);
        FidelityCurve c = dr_curve(spec, samples, config.steps, config.threads);
        c.state = descriptor + "/" + to_string(config.mode);
        result.curves.push_back(std::move(c));
    }
    if (wants(Method::exact) || wants(Method::dense)) {
        const QuantumState psi0 = build_state(spec, state);
        if (wants(Method::exact)) result.curves.push_back(exact_fidelity_curve(spec, psi0, config.steps, descriptor));
        if (wants(Method::dense)) result.curves.push_back(dense_oracle(spec, psi0, config.steps, descriptor));
    }

    auto find = [&](Method m) -> const FidelityCurve* {
        for (const auto& c : result.curves)
            if (c.method == m) return &c;
        return nullptr;
    };
    const std::pair<Method, Method> pairs[] = {
        {Method::dr, Method::exact}, {Method::dr, Method::dense}, {Method::exact, Method::dense}};
    for (const auto& [ma, mb] : pairs) {
        if (const auto *a = find(ma), *b = find(mb); a && b) {
            result.comparison = compare(*a, *b);
            break;
        }
    }
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    ExperimentResult result = compute_experiment(config);
    result.data_path = config.out;
    result.metadata_path = sidecar_path(config.out);
    if (config.format == OutputFormat::csv)
        write_file(result.data_path, curves_csv(result.curves));
    else
        write_file(result.data_path, metadata_json(result, true));
    write_file(result.metadata_path, metadata_json(result, false));
    return result;
}

void write_curves_csv(std::ostream& os, const std::vector<FidelityCurve>& curves) {
    os << kCsvHeader << '\n';
    std::size_t len = 0;
    for (const auto& c : curves) len = std::max(len, c.size());
    for (std::size_t t = 0; t < len; ++t) {
        for (const auto& c : curves) {
            if (t >= c.size()) continue;
            os << t << ',' << g17(static_cast<double>(t)) << ',' << to_string(c.method) << ',' << g17(c.fidelity[t])
               << ',' << g17(c.amp_re[t]) << ',' << g17(c.amp_im[t]) << ',' << g17(c.stderr_re[t]) << ','
               << g17(c.stderr_im[t]) << '\n';
        }
    }
}

std::string curves_csv(const std::vector<FidelityCurve>& curves) {
    std::ostringstream os;
    write_curves_csv(os, curves);
    return os.str();
}

std::vector<FidelityCurve> parse_curves_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw InvalidInput("CSV header does not match the fidelity schema");
    std::vector<FidelityCurve> curves;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 8) throw InvalidInput("CSV line " + std::to_string(lineno) + ": expected 8 fields");
        const Method m = parse_method(f[2]);
        FidelityCurve* curve = nullptr;
        for (auto& c : curves)
            if (c.method == m) curve = &c;
        if (!curve) {
            curves.emplace_back();
            curve = &curves.back();
            curve->method = m;
        }
        if (static_cast<std::size_t>(parse_field(f[0])) != curve->size())
            throw InvalidInput("CSV line " + std::to_string(lineno) + ": steps out of order");
        curve->fidelity.push_back(parse_field(f[3]));
        curve->amp_re.push_back(parse_field(f[4]));
        curve->amp_im.push_back(parse_field(f[5]));
        curve->stderr_re.push_back(parse_field(f[6]));
        curve->stderr_im.push_back(parse_field(f[7]));
    }
    return curves;
}

std::string metadata_json(const ExperimentResult& result, bool include_curves) {
    using nlohmann::json;
    const ExperimentConfig& c = result.config;
    json j;
    j["generated_at"] = utc_timestamp();
    j["config"] = {
        {"name", c.name},       {"k", c.k},         {"epsilon", c.epsilon},
        {"N", c.dim_n},         {"hbar", c.spec().hbar()},
        {"state", c.state},     {"q0", c.q0},       {"p0", c.p0},
        {"sigma", c.sigma},     {"steps", c.steps}, {"samples", c.samples},
        {"mode", to_string(c.mode)}, {"seed", c.seed}, {"format", to_string(c.format)},
        {"threads", c.threads},
    };
    json methods = json::array();
    for (const auto m : c.methods) methods.push_back(to_string(m));
    j["config"]["methods"] = methods;
    if (c.epsilon != 0.0) j["shadow_time_estimate"] = shadow_time_estimate(std::abs(c.epsilon));
    j["csv_columns"] = kCsvHeader;
    if (!result.data_path.empty()) j["data_file"] = result.data_path;

    json curves = json::array();
    for (const auto& curve : result.curves) {
        json e = {{"method", to_string(curve.method)},
                  {"state", curve.state},
                  {"sample_count", curve.sample_count},
                  {"seed", curve.seed},
                  {"steps", curve.steps()}};
        if (include_curves) {
            e["M"] = curve.fidelity;
            e["amp_re"] = curve.amp_re;
            e["amp_im"] = curve.amp_im;
            e["stderr_re"] = curve.stderr_re;
            e["stderr_im"] = curve.stderr_im;
        }
        curves.push_back(std::move(e));
    }
    j["curves"] = curves;
    if (result.comparison) {
        const auto& r = *result.comparison;
        j["comparison"] = {{"a", r.label_a},
                           {"b", r.label_b},
                           {"mad", r.mad},
                           {"max_deviation", r.max_deviation},
                           {"step_of_max", r.step_of_max}};
        if (include_curves) j["comparison"]["deviation"] = r.deviation;
    }
    return j.dump(2) + "\n";
}

std::string sidecar_path(const std::string& data_path) {
    const auto slash = data_path.find_last_of('/');
    const auto dot = data_path.find_last_of('.');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    if (has_ext && data_path.substr(dot) == ".json") return data_path.substr(0, dot) + ".meta.json";
    return (has_ext ? data_path.substr(0, dot) : data_path) + ".json";
}

}  // namespace dephase
