#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dephase/config.hpp"
#include "dephase/errors.hpp"
#include "dephase/experiment.hpp"

using namespace dephase;
namespace fs = std::filesystem;

namespace {

FidelityCurve constant_curve(double m, std::size_t len) {
    FidelityCurve c;
    for (std::size_t t = 0; t < len; ++t) c.push({std::sqrt(m), 0.0});
    return c;
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / ("dephase_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> violations_of(const std::string& text) {
    try {
        build_config(parse_config_text(text, "t.cfg"));
    } catch (const ValidationError& e) {
        return e.violations();
    }
    return {};
}

}  // namespace

TEST_CASE("compare") {
    const FidelityCurve x = constant_curve(0.3, 10);
    const ComparisonReport same = compare(x, x);
    CHECK(same.mad == 0.0);
    CHECK(same.max_deviation == 0.0);

    const ComparisonReport r = compare(constant_curve(1.0, 3), constant_curve(0.0, 3));
    CHECK(r.mad == 1.0);
    CHECK(r.max_deviation == 1.0);
    CHECK(r.deviation.size() == 3);

    CHECK_THROWS_AS(compare(constant_curve(1.0, 3), constant_curve(1.0, 4)), InvalidInput);
}

TEST_CASE("property: MAD never exceeds the max deviation") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        FidelityCurve a, b;
        const int len = 1 + trial % 40;
        for (int t = 0; t < len; ++t) {
            a.push(std::polar(u(gen), 6.0 * u(gen)));
            b.push(std::polar(u(gen), 6.0 * u(gen)));
        }
        const ComparisonReport r = compare(a, b);
        CHECK(r.mad <= r.max_deviation);
        CHECK(r.deviation[r.step_of_max] == r.max_deviation);
    }
}

TEST_CASE("config: parse, defaults and preset round trip") {
    const ExperimentConfig c = build_config(parse_config_text(
        "# comment\nk = 10\nepsilon = 2e-3   # trailing\nN = 500\nq0 = 0.4\nsteps = 20\nmethods = dr, exact\n", "x"));
    CHECK(c.k == 10.0);
    CHECK(c.epsilon == 2e-3);
    CHECK(c.dim_n == 500);
    CHECK(c.samples == 500);
    CHECK(c.mode == SampleMode::grid);
    CHECK(c.methods == std::vector<Method>{Method::dr, Method::exact});

    for (const auto& p : presets()) {
        const ExperimentConfig back = build_config(parse_config_text(to_config_text(p.config), p.name));
        CHECK(to_config_text(back) == to_config_text(p.config));
    }
    const auto mixed = find_preset("fig1-mixed");
    REQUIRE(mixed);
    CHECK(mixed->config.k == 0.8);
    CHECK(mixed->config.epsilon == 5e-3);
    const auto chaotic = find_preset("fig1-chaotic");
    REQUIRE(chaotic);
    CHECK(chaotic->config.k == 10.0);
    CHECK(chaotic->config.epsilon == 2e-3);
    for (const auto* p : {&*mixed, &*chaotic}) {
        CHECK(p->config.dim_n == 1000);
        CHECK(p->config.q0 == 0.4);
        CHECK(p->config.steps == 50);
        CHECK(p->config.samples == 1000);
        CHECK(p->config.mode == SampleMode::grid);
    }
    CHECK_FALSE(find_preset("fig2"));
}

TEST_CASE("config: syntax errors carry line numbers") {
    try {
        parse_config_text("k = 1\nbogus\nwhatever = 3\nk = 2\n", "file.cfg");
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        REQUIRE(e.violations().size() == 3);
        CHECK(e.violations()[0].rfind("file.cfg:2:", 0) == 0);
        CHECK(e.violations()[1].rfind("file.cfg:3:", 0) == 0);
        CHECK(e.violations()[2].rfind("file.cfg:4:", 0) == 0);
    }
}

TEST_CASE("config: every violation is reported") {
    const auto v = violations_of("k = nan\nN = 1\nsteps = -3\nq0 = 0.41234\nmethods = dr,magic\nformat = xml\n");
    CHECK(v.size() >= 5);
    const auto v2 = violations_of("N = 1000\nq0 = 0.4001\nsamples = 10\n");
    REQUIRE(v2.size() == 2);
    CHECK(v2[0].find("t.cfg:3") != std::string::npos);
    CHECK(v2[1].find("t.cfg:2") != std::string::npos);
    CHECK(violations_of("state = gaussian\nsigma = 0.7\nmode = grid\n").size() == 2);
    CHECK(violations_of("state = gaussian\nsigma = 0.05\n").empty());
    CHECK(violations_of("methods = dr,dr\n").size() == 1);
}

TEST_CASE("sidecar paths") {
    CHECK(sidecar_path("out/run.csv") == "out/run.json");
    CHECK(sidecar_path("run") == "run.json");
    CHECK(sidecar_path("a.b/run") == "a.b/run.json");
    CHECK(sidecar_path("run.json") == "run.meta.json");
}

TEST_CASE("property: CSV round trip is bitwise") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<FidelityCurve> curves(1 + trial % 3);
        const Method tags[] = {Method::dr, Method::exact, Method::dense};
        for (std::size_t i = 0; i < curves.size(); ++i) {
            curves[i].method = tags[i];
            for (int t = 0; t < 25; ++t)
                curves[i].push({u(gen) * 1e-3 * t, u(gen) / 3.0}, std::abs(u(gen)) * 1e-7, std::abs(u(gen)));
        }
        const auto back = parse_curves_csv(curves_csv(curves));
        REQUIRE(back.size() == curves.size());
        for (std::size_t i = 0; i < curves.size(); ++i) {
            CHECK(back[i].method == curves[i].method);
            CHECK(back[i].amp_re == curves[i].amp_re);
            CHECK(back[i].amp_im == curves[i].amp_im);
            CHECK(back[i].fidelity == curves[i].fidelity);
            CHECK(back[i].stderr_re == curves[i].stderr_re);
            CHECK(back[i].stderr_im == curves[i].stderr_im);
        }
    }
    CHECK_THROWS_AS(parse_curves_csv("step,M\n0,1\n"), InvalidInput);
}

TEST_CASE("run_experiment: files, zero perturbation and determinism") {
    const fs::path dir = scratch_dir();
    ExperimentConfig c;
    c.k = 10.0;
    c.epsilon = 0.0;
    c.dim_n = 400;
    c.samples = 400;
    c.steps = 30;
    c.methods = {Method::dr, Method::exact, Method::dense};
    c.dim_n = 200;
    c.samples = 200;
    c.out = (dir / "zero.csv").string();
    const ExperimentResult r = run_experiment(c);
    CHECK(fs::exists(dir / "zero.csv"));
    CHECK(fs::exists(dir / "zero.json"));
    const auto curves = parse_curves_csv(slurp(dir / "zero.csv"));
    REQUIRE(curves.size() == 3);
    for (const auto& curve : curves)
        for (const double m : curve.fidelity) CHECK(std::abs(m - 1.0) < 1e-10);
    REQUIRE(r.comparison);
    CHECK(r.comparison->label_a == "dr");
    CHECK(r.comparison->label_b == "exact");
    CHECK(slurp(dir / "zero.json").find("\"mad\"") != std::string::npos);

    ExperimentConfig mc = c;
    mc.epsilon = 4e-3;
    mc.mode = SampleMode::monte_carlo;
    mc.samples = 5000;
    mc.seed = 17;
    mc.methods = {Method::dr};
    mc.threads = 1;
    mc.out = (dir / "a.csv").string();
    run_experiment(mc);
    mc.threads = 8;
    mc.out = (dir / "b.csv").string();
    run_experiment(mc);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));

    ExperimentConfig js = c;
    js.format = OutputFormat::json;
    js.out = (dir / "full.json").string();
    run_experiment(js);
    CHECK(fs::exists(dir / "full.meta.json"));
    CHECK(slurp(dir / "full.json").find("\"amp_re\"") != std::string::npos);

    fs::remove_all(dir);
}

TEST_CASE("run_experiment: error paths") {
    ExperimentConfig c;
    c.dim_n = 100;
    c.samples = 100;
    c.steps = 5;
    c.out = "/nonexistent-dir/x/y.csv";
    CHECK_THROWS_AS(run_experiment(c), IoError);

    c.dim_n = 512;
    c.samples = 512;
    c.q0 = 0.5;
    c.methods = {Method::dense};
    CHECK_THROWS_AS(compute_experiment(c), CapacityError);
}
