#include "dephase/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dephase/errors.hpp"

namespace dephase {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt17(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// Collects violations while converting entries to typed values.
class Checker {
public:
    explicit Checker(const ConfigEntries& entries) : entries_(entries) {}

    void fail(const std::string& key, const std::string& msg) {
        const auto it = entries_.find(key);
        const std::string where = it != entries_.end() ? it->second.origin : std::string("<default>");
        errors_.push_back(where + ": " + key + ": " + msg);
    }

    void error(const std::string& msg) { errors_.push_back(msg); }

    template <class T, class Parse>
    void read(const std::string& key, T& out, Parse&& parse) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return;
        try {
            out = parse(it->second.value);
        } catch (const std::exception& e) {
            fail(key, e.what());
        }
    }

    const std::vector<std::string>& errors() const { return errors_; }
    bool has(const std::string& key) const { return entries_.count(key) != 0; }

private:
    const ConfigEntries& entries_;
    std::vector<std::string> errors_;
};

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw InvalidInput("expected a number, got '" + s + "'");
    }
    if (pos != s.size()) throw InvalidInput("expected a number, got '" + s + "'");
    if (!std::isfinite(v)) throw InvalidInput("must be finite");
    return v;
}

std::int64_t parse_int(const std::string& s) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw InvalidInput("expected an integer, got '" + s + "'");
    }
    if (pos != s.size()) throw InvalidInput("expected an integer, got '" + s + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& s) {
    if (s.empty() || s[0] == '-') throw InvalidInput("expected a nonnegative integer, got '" + s + "'");
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos);
    } catch (const std::exception&) {
        throw InvalidInput("expected a nonnegative integer, got '" + s + "'");
    }
    if (pos != s.size()) throw InvalidInput("expected a nonnegative integer, got '" + s + "'");
    return v;
}

std::vector<Method> parse_methods(const std::string& s) {
    std::vector<Method> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const Method m = parse_method(trim(item));
        for (Method seen : out)
            if (seen == m) throw InvalidInput("method '" + trim(item) + "' listed twice");
        out.push_back(m);
    }
    if (out.empty()) throw InvalidInput("at least one method is required");
    return out;
}

OutputFormat parse_format(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw InvalidInput("format must be csv or json, got '" + s + "'");
}

ExperimentConfig fig1(const std::string& name, double k, double epsilon) {
    ExperimentConfig c;
    c.name = name;
    c.k = k;
    c.epsilon = epsilon;
    c.dim_n = 1000;
    c.state = "position";
    c.q0 = 0.4;
    c.steps = 50;
    c.samples = 1000;
    c.mode = SampleMode::grid;
    c.methods = {Method::dr, Method::exact};
    c.out = name + ".csv";
    return c;
}

}  // namespace

std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

InitialState ExperimentConfig::initial_state() const {
    if (state == "gaussian") return GaussianWavepacket{q0, p0, sigma};
    return PositionEigenstate{q0};
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{"name",  "k",    "epsilon", "N",    "state",   "q0",
                                               "p0",    "sigma", "steps",  "samples", "mode", "seed",
                                               "methods", "out", "format", "threads"};
    return keys;
}

ConfigEntries parse_config_text(const std::string& text, const std::string& source_name) {
    ConfigEntries entries;
    std::vector<std::string> errors;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    const auto& keys = config_keys();
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = source_name + ":" + std::to_string(lineno);
        const auto hash = line.find('#');
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            errors.push_back(where + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            errors.push_back(where + ": unknown key '" + key + "'");
            continue;
        }
        if (const auto it = entries.find(key); it != entries.end()) {
            errors.push_back(where + ": duplicate key '" + key + "' (first set at " + it->second.origin + ")");
            continue;
        }
        entries[key] = ConfigEntry{value, where};
    }
    if (!errors.empty()) throw ValidationError(std::move(errors));
    return entries;
}

ConfigEntries load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

ExperimentConfig build_config(const ConfigEntries& entries) {
    ExperimentConfig c;
    Checker ck(entries);

    ck.read("name", c.name, [](const std::string& s) { return s; });
    ck.read("k", c.k, parse_double);
    ck.read("epsilon", c.epsilon, parse_double);
    ck.read("N", c.dim_n, parse_int);
    ck.read("state", c.state, [](const std::string& s) {
        if (s != "position" && s != "gaussian") throw InvalidInput("state must be position or gaussian");
        return s;
    });
    ck.read("q0", c.q0, parse_double);
    ck.read("p0", c.p0, parse_double);
    ck.read("sigma", c.sigma, parse_double);
    ck.read("steps", c.steps, parse_int);
    ck.read("seed", c.seed, parse_uint);
    ck.read("methods", c.methods, parse_methods);
    ck.read("out", c.out, [](const std::string& s) {
        if (s.empty()) throw InvalidInput("output path must not be empty");
        return s;
    });
    ck.read("format", c.format, parse_format);
    ck.read("threads", c.threads, [](const std::string& s) {
        const std::uint64_t v = parse_uint(s);
        if (v > 4096) throw InvalidInput("threads must be <= 4096");
        return static_cast<unsigned>(v);
    });

    // Defaults that depend on the state and dimension.
    c.mode = c.state == "gaussian" ? SampleMode::wigner : SampleMode::grid;
    ck.read("mode", c.mode, parse_sample_mode);
    c.samples = c.mode == SampleMode::grid ? c.dim_n : 1000;
    ck.read("samples", c.samples, parse_int);

    if (c.dim_n < 2) ck.fail("N", "must be >= 2");
    if (c.steps < 0) ck.fail("steps", "must be >= 0");
    if (c.samples < 1) ck.fail("samples", "must be >= 1");
    if (!(c.q0 >= 0.0 && c.q0 < 1.0)) ck.fail("q0", "must lie in [0, 1)");

    if (c.state == "position") {
        if (c.mode != SampleMode::grid && c.mode != SampleMode::monte_carlo)
            ck.fail("mode", "position states use grid or monte_carlo sampling");
        if (c.mode == SampleMode::grid && c.samples != c.dim_n && c.dim_n >= 2)
            ck.fail("samples", "grid mode needs samples = N (" + std::to_string(c.dim_n) + ")");
        if (c.dim_n >= 2 && c.q0 >= 0.0 && c.q0 < 1.0) {
            try {
                grid_index(MapSpec(0.0, 0.0, c.dim_n), c.q0);
            } catch (const InvalidInput& e) {
                ck.fail("q0", e.what());
            }
        }
    } else {
        if (c.mode != SampleMode::position_only && c.mode != SampleMode::wigner)
            ck.fail("mode", "gaussian states use position_only or wigner sampling");
        if (!(c.sigma > 0.0 && c.sigma < 0.5)) ck.fail("sigma", "must lie in (0, 0.5)");
    }

    if (!ck.errors().empty()) throw ValidationError(ck.errors());
    return c;
}

std::string to_config_text(const ExperimentConfig& c) {
    std::ostringstream os;
    if (!c.name.empty()) os << "name = " << c.name << '\n';
    os << "k = " << fmt17(c.k) << '\n'
       << "epsilon = " << fmt17(c.epsilon) << '\n'
       << "N = " << c.dim_n << '\n'
       << "state = " << c.state << '\n'
       << "q0 = " << fmt17(c.q0) << '\n';
    if (c.state == "gaussian") os << "p0 = " << fmt17(c.p0) << '\n' << "sigma = " << fmt17(c.sigma) << '\n';
    os << "steps = " << c.steps << '\n'
       << "samples = " << c.samples << '\n'
       << "mode = " << to_string(c.mode) << '\n'
       << "seed = " << c.seed << '\n';
    os << "methods = ";
    for (std::size_t i = 0; i < c.methods.size(); ++i) os << (i ? "," : "") << to_string(c.methods[i]);
    os << '\n' << "out = " << c.out << '\n' << "format = " << to_string(c.format) << '\n';
    if (c.threads != 0) os << "threads = " << c.threads << '\n';
    return os.str();
}

const std::vector<Preset>& presets() {
    static const std::vector<Preset> all{
        {"fig1-mixed", "standard map, mixed phase space: k = 0.8, eps = 5e-3, N = 1000, q0 = 0.4, 50 kicks",
         fig1("fig1-mixed", 0.8, 5e-3)},
        {"fig1-chaotic", "standard map, chaotic phase space: k = 10, eps = 2e-3, N = 1000, q0 = 0.4, 50 kicks",
         fig1("fig1-chaotic", 10.0, 2e-3)},
    };
    return all;
}

std::optional<Preset> find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return p;
    return std::nullopt;
}

}  // namespace dephase
