#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dephase/errors.hpp"
#include "dephase/initial_states.hpp"

using namespace dephase;

namespace {

double weight_sum(const SampleSet& s) {
    double w = 0.0;
    for (const auto& x : s.samples) w += x.weight;
    return w;
}

bool same_samples(const SampleSet& a, const SampleSet& b) {
    if (a.samples.size() != b.samples.size()) return false;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        if (!(a.samples[i].point == b.samples[i].point) || a.samples[i].weight != b.samples[i].weight) return false;
    return true;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST_CASE("position state: grid mode on N = 4") {
    const MapSpec spec(0.8, 0.0, 4);
    const SampleSet s = samples_position_state(spec, 0.25, 4, SampleMode::grid, 0);
    REQUIRE(s.samples.size() == 4);
    CHECK(s.quadrature);
    for (std::size_t j = 0; j < 4; ++j) {
        CHECK(s.samples[j].point.q == 0.25);
        CHECK(s.samples[j].point.p == 0.25 * static_cast<double>(j));
        CHECK(s.samples[j].weight == 0.25);
    }
    CHECK(weight_sum(s) == 1.0);
}

TEST_CASE("position state: preconditions") {
    const MapSpec spec(0.8, 0.0, 1000);
    CHECK_THROWS_AS(samples_position_state(spec, 0.4001, 1000, SampleMode::grid, 0), InvalidInput);
    CHECK_THROWS_AS(samples_position_state(spec, 0.4, 999, SampleMode::grid, 0), InvalidInput);
    CHECK_THROWS_AS(samples_position_state(spec, 0.4, 0, SampleMode::monte_carlo, 0), InvalidInput);
    CHECK_THROWS_AS(samples_position_state(spec, 0.4, 10, SampleMode::wigner, 0), InvalidInput);
    CHECK_THROWS_AS(samples_position_state(spec, 1.0, 10, SampleMode::monte_carlo, 0), InvalidInput);
    CHECK(grid_index(spec, 0.4) == 400);
}

TEST_CASE("position state: weights, shared q, determinism") {
    const MapSpec spec(10.0, 2e-3, 1000);
    for (const auto mode : {SampleMode::grid, SampleMode::monte_carlo}) {
        const std::int64_t count = mode == SampleMode::grid ? 1000 : 12345;
        const SampleSet a = samples_position_state(spec, 0.4, count, mode, 42);
        CHECK(std::abs(weight_sum(a) - 1.0) < 1e-12);
        for (const auto& x : a.samples) CHECK(x.point.q == 0.4);
        const SampleSet b = samples_position_state(spec, 0.4, count, mode, 42, 8);
        CHECK(same_samples(a, b));
    }
    const SampleSet c = samples_position_state(spec, 0.4, 500, SampleMode::monte_carlo, 1);
    const SampleSet d = samples_position_state(spec, 0.4, 500, SampleMode::monte_carlo, 2);
    CHECK_FALSE(same_samples(c, d));
    CHECK_FALSE(c.quadrature);
}

TEST_CASE("monte carlo momenta are uniform") {
    const MapSpec spec(10.0, 2e-3, 1000);
    const SampleSet s = samples_position_state(spec, 0.4, 100000, SampleMode::monte_carlo, 5);
    std::vector<double> ps;
    for (const auto& x : s.samples) ps.push_back(x.point.p);
    std::sort(ps.begin(), ps.end());
    double d = 0.0;
    for (std::size_t i = 0; i < ps.size(); ++i)
        d = std::max({d, std::abs(ps[i] - double(i) / ps.size()), std::abs(ps[i] - double(i + 1) / ps.size())});
    // One-sample KS, 1% critical value 1.628 / sqrt(n).
    CHECK(d < 1.628 / std::sqrt(double(ps.size())));
}

TEST_CASE("gaussian: delta limit and positivity") {
    const MapSpec spec(0.8, 0.0, 1000);
    const SampleSet narrow = samples_gaussian(spec, 0.4, 0.1, 1e-4, 5000, SampleMode::position_only, 3);
    for (const auto& x : narrow.samples) {
        CHECK(std::abs(torus_delta(x.point.q, 0.4)) < 1e-3);
        CHECK(x.point.p == doctest::Approx(0.1));
    }
    const SampleSet w = samples_gaussian(spec, 0.4, 0.1, 0.05, 5000, SampleMode::wigner, 3);
    for (const auto& x : w.samples) CHECK(x.weight > 0.0);
    CHECK(std::abs(weight_sum(w) - 1.0) < 1e-12);
}

TEST_CASE("gaussian: width preconditions") {
    const MapSpec spec(0.8, 0.0, 100);
    for (const double sigma : {0.0, -0.1, 0.5, 0.7, double(NAN)})
        CHECK_THROWS_AS(samples_gaussian(spec, 0.4, 0.0, sigma, 10, SampleMode::wigner, 0), InvalidInput);
    CHECK_THROWS_AS(samples_gaussian(spec, 0.4, 0.0, 0.1, 10, SampleMode::grid, 0), InvalidInput);
}

TEST_CASE("gaussian: sample mean of q") {
    const MapSpec spec(0.8, 0.0, 1000);
    const double sigma = 0.03;
    const std::int64_t count = 100000;
    const SampleSet s = samples_gaussian(spec, 0.5, 0.0, sigma, count, SampleMode::position_only, 99);
    double mean = 0.0;
    for (const auto& x : s.samples) mean += x.point.q;
    mean /= double(count);
    CHECK(std::abs(mean - 0.5) < 3.0 * sigma / std::sqrt(double(count)));
}

TEST_CASE("gaussian: chi-squared goodness of fit against the periodized density") {
    const MapSpec spec(0.8, 0.0, 1000);
    const double q0 = 0.02, sigma = 0.15;  // wide enough to wrap
    const std::int64_t count = 100000;
    const SampleSet s = samples_gaussian(spec, q0, 0.0, sigma, count, SampleMode::position_only, 7);
    constexpr int bins = 40;
    std::vector<double> observed(bins, 0.0);
    for (const auto& x : s.samples) observed[std::min(bins - 1, int(x.point.q * bins))] += 1.0;
    double chi2 = 0.0;
    for (int b = 0; b < bins; ++b) {
        // Simpson's rule on the bin.
        const double lo = double(b) / bins, hi = double(b + 1) / bins;
        double prob = 0.0;
        constexpr int sub = 64;
        for (int i = 0; i <= sub; ++i) {
            const double x = lo + (hi - lo) * i / sub;
            const double wgt = (i == 0 || i == sub) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            prob += wgt * wrapped_normal_pdf(x, q0, sigma);
        }
        prob *= (hi - lo) / (3.0 * sub);
        const double expected = prob * double(count);
        chi2 += (observed[b] - expected) * (observed[b] - expected) / expected;
    }
    // 99.9% quantile of chi^2 with 39 degrees of freedom.
    CHECK(chi2 < 72.05);
}

TEST_CASE("wrapped normal density integrates to one") {
    for (const double sigma : {0.01, 0.05, 0.2, 0.45}) {
        // Trapezoid rule is spectrally accurate for smooth periodic integrands.
        constexpr int n = 4000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += wrapped_normal_pdf(double(i) / n, 0.3, sigma);
        CHECK(std::abs(sum / n - 1.0) < 1e-10);
    }
}

TEST_CASE("gaussian wigner: q marginal matches |psi(q)|^2 sampling") {
    const MapSpec spec(0.8, 0.0, 1000);
    const std::int64_t count = 100000;
    const SampleSet w = samples_gaussian(spec, 0.5, 0.2, 0.05, count, SampleMode::wigner, 1);
    const SampleSet p = samples_gaussian(spec, 0.5, 0.2, 0.05, count, SampleMode::position_only, 2);
    std::vector<double> qa, qb;
    for (const auto& x : w.samples) qa.push_back(x.point.q);
    for (const auto& x : p.samples) qb.push_back(x.point.q);
    // 1% critical value of the two-sample statistic: 1.628 * sqrt(2 / n).
    CHECK(ks_statistic(qa, qb) < 1.628 * std::sqrt(2.0 / double(count)));

    // Momentum spread is hbar / (2 sigma).
    const GaussianWigner g(spec, 0.5, 0.2, 0.05);
    CHECK(g.sigma_p() == doctest::Approx(spec.hbar() / 0.1));
}

TEST_CASE("custom wigner sampler: signed weights are rescaled by count") {
    struct Signed final : WignerSampler {
        WeightedSample sample(std::uint64_t, std::uint64_t index) const override {
            return {{0.1, 0.2}, index % 2 ? -1.0 : 3.0};
        }
        std::string describe() const override { return "signed"; }
    };
    const SampleSet s = samples_wigner(Signed{}, 4, 0);
    CHECK(s.samples[0].weight == 0.75);
    CHECK(s.samples[1].weight == -0.25);
    CHECK(weight_sum(s) == 1.0);
    CHECK(s.descriptor == "signed");
}
