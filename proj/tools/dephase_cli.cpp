// dephase: fidelity decay of the perturbed kicked rotor by phase averaging
// over classical orbits and by exact grid propagation.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>

#include "dephase/config.hpp"
#include "dephase/errors.hpp"
#include "dephase/experiment.hpp"
#include "dephase/quantum.hpp"
#include "dephase/shadowing.hpp"

using namespace dephase;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitIo = 4;

// Shared options: a config file or preset plus one override flag per key.
struct ConfigOptions {
    std::string config_path;
    std::string preset;
    std::map<std::string, std::string> overrides;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "Config file (key = value lines)");
        app->add_option("--preset", preset, "Start from a built-in preset (see `presets`)");
        for (const auto& key : config_keys())
            app->add_option("--" + key, overrides[key], "Override config key '" + key + "'");
    }

    ExperimentConfig load(const CLI::App* app) const {
        ConfigEntries entries;
        if (!preset.empty()) {
            const auto p = find_preset(preset);
            if (!p) throw ValidationError({"--preset: unknown preset '" + preset + "'"});
            entries = parse_config_text(to_config_text(p->config), "preset:" + preset);
        }
        if (!config_path.empty()) {
            for (auto& [k, v] : load_config_file(config_path)) entries[k] = v;
        }
        for (const auto& [key, value] : overrides) {
            if (app->count("--" + key) > 0) entries[key] = ConfigEntry{value, "--" + key};
        }
        return build_config(entries);
    }
};

int cmd_run(const ExperimentConfig& cfg) {
    const ExperimentResult r = run_experiment(cfg);
    std::cout << "wrote " << r.data_path << " and " << r.metadata_path << "\n";
    if (r.comparison) {
        const auto& c = *r.comparison;
        std::printf("%s vs %s: MAD %.6g, max deviation %.6g at step %lld\n", c.label_a.c_str(), c.label_b.c_str(), c.mad,
                    c.max_deviation, static_cast<long long>(c.step_of_max));
    }
    return kExitOk;
}

int cmd_presets(const std::string& name, const std::string& out) {
    if (name.empty()) {
        for (const auto& p : presets()) std::cout << p.name << "\t" << p.description << "\n";
        return kExitOk;
    }
    const auto p = find_preset(name);
    if (!p) throw ValidationError({"unknown preset '" + name + "'"});
    const std::string text = "# " + p->description + "\n" + to_config_text(p->config);
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out);
        if (!f || !(f << text)) throw IoError("cannot write '" + out + "'");
    }
    return kExitOk;
}

struct ShadowOptions {
    std::int64_t orbits = 100;
    std::int64_t horizon = -1;
    double tol = 1e-12;
    int max_iter = 50;
    double delta = 1e-6;
};

int cmd_shadow(const ExperimentConfig& cfg, const ShadowOptions& opt, const std::string& out) {
    const MapSpec spec = cfg.spec();
    const std::int64_t horizon = opt.horizon >= 0 ? opt.horizon : cfg.steps;
    const ShadowSurvey s = shadow_survey(spec, opt.orbits, horizon, opt.tol, opt.max_iter, cfg.seed, cfg.threads);
    const BoundCheck l1 = check_perturbation_bound(spec, opt.orbits, horizon, cfg.seed);
    const BoundCheck l2 = check_noisy_bound(spec, opt.orbits, horizon, opt.delta, cfg.seed);

    std::printf("k = %g, eps = %g, horizon = %lld, orbits = %lld\n", spec.k(), spec.epsilon(),
                static_cast<long long>(horizon), static_cast<long long>(opt.orbits));
    std::printf("shadowing-time estimate eps^-1/2 = %.4f\n", s.time_estimate);
    std::printf("shadowed to tol %.1e: %lld / %lld (fraction %.4f)\n", opt.tol, static_cast<long long>(s.shadowed),
                static_cast<long long>(s.orbits), s.fraction);
    std::printf("perturbed orbits vs f0: worst residual %.6e, bound %.6e, violations %lld\n", l1.worst, l1.bound,
                static_cast<long long>(l1.violations));
    std::printf("noisy orbits (delta %.1e) vs f0: worst residual %.6e, bound %.6e, violations %lld\n", opt.delta,
                l2.worst, l2.bound, static_cast<long long>(l2.violations));

    if (!out.empty()) {
        std::ofstream f(out, std::ios::trunc);
        if (!f) throw IoError("cannot open '" + out + "' for writing");
        f << "orbit,q0,p0,converged,iterations,residual,shadow_distance\n";
        char buf[256];
        for (std::size_t i = 0; i < s.results.size(); ++i) {
            const auto& r = s.results[i];
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%d,%d,%.17g,%.17g\n", i, s.starts[i].q, s.starts[i].p,
                          r.converged ? 1 : 0, r.iterations, r.residual, r.shadow_distance);
            f << buf;
        }
        if (!f) throw IoError("failed writing '" + out + "'");
    }
    return (l1.violations == 0 && l2.violations == 0) ? kExitOk : kExitFailure;
}

int cmd_oracle_check(const ExperimentConfig& cfg, std::int64_t steps) {
    constexpr double kTol = 1e-9;
    bool ok = true;
    for (const std::int64_t n : {16, 64, 128}) {
        for (const double k : {0.8, 10.0}) {
            const MapSpec spec(k, cfg.epsilon, n);
            const std::int64_t j0 = static_cast<std::int64_t>(std::llround(cfg.q0 * static_cast<double>(n))) % n;
            const QuantumState psi = build_state(spec, PositionEigenstate{static_cast<double>(j0) / static_cast<double>(n)});
            const FidelityCurve a = exact_fidelity_curve(spec, psi, steps);
            const FidelityCurve b = dense_oracle(spec, psi, steps);
            double worst = 0.0;
            for (std::size_t t = 0; t < a.size(); ++t) worst = std::max(worst, std::abs(a.amplitude(t) - b.amplitude(t)));
            const bool pass = worst < kTol;
            ok = ok && pass;
            std::printf("%s N=%-4lld k=%-4g eps=%g T=%lld max|dO| = %.3e\n", pass ? "PASS" : "FAIL",
                        static_cast<long long>(n), k, cfg.epsilon, static_cast<long long>(steps), worst);
        }
    }
    return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fidelity decay of the perturbed standard map: dephasing representation vs exact quantum"};
    app.require_subcommand(1);

    ConfigOptions run_opts, shadow_opts, validate_opts, oracle_opts;

    auto* run = app.add_subcommand("run", "Compute fidelity curves and write CSV/JSON output");
    run_opts.attach(run);

    auto* pre = app.add_subcommand("presets", "List built-in configs, or print one");
    std::string preset_name, preset_out;
    pre->add_option("name", preset_name, "Preset to print as a config file");
    pre->add_option("--out", preset_out, "Write the preset to this path instead of stdout");

    auto* shadow = app.add_subcommand("shadow", "Shadowing diagnostics for the classical map");
    shadow_opts.attach(shadow);
    ShadowOptions sopt;
    shadow->add_option("--orbits", sopt.orbits, "Number of random orbits")->check(CLI::PositiveNumber);
    shadow->add_option("--horizon", sopt.horizon, "Orbit length (default: steps)");
    shadow->add_option("--tol", sopt.tol, "Residual tolerance for a converged shadow");
    shadow->add_option("--max-iter", sopt.max_iter, "Newton iteration cap");
    shadow->add_option("--delta", sopt.delta, "Noise amplitude for the noisy-orbit bound");

    auto* validate = app.add_subcommand("validate", "Check a config without running it");
    validate_opts.attach(validate);

    auto* oracle = app.add_subcommand("oracle-check", "Split-operator vs dense-matrix self-test");
    oracle_opts.attach(oracle);
    std::int64_t oracle_steps = 30;
    oracle->add_option("--oracle-steps", oracle_steps, "Kicks to compare");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(run_opts.load(run));
        if (*pre) return cmd_presets(preset_name, preset_out);
        if (*shadow) {
            const ExperimentConfig cfg = shadow_opts.load(shadow);
            return cmd_shadow(cfg, sopt, shadow->count("--out") ? cfg.out : std::string());
        }
        if (*validate) {
            const ExperimentConfig cfg = validate_opts.load(validate);
            std::cout << "config ok\n" << to_config_text(cfg);
            return kExitOk;
        }
        if (*oracle) return cmd_oracle_check(oracle_opts.load(oracle), oracle_steps);
    } catch (const ValidationError& e) {
        std::cerr << "invalid configuration:\n";
        for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
        return kExitValidation;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const CapacityError& e) {
        std::cerr << "capacity: " << e.what() << "\n";
        return kExitCapacity;
    } catch (const IoError& e) {
        std::cerr << "i/o: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}
