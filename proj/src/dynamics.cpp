#include "dephase/dynamics.hpp"

#include <cmath>
#include <string>

#include "dephase/errors.hpp"

namespace dephase {

MapSpec::MapSpec(double k, double epsilon, std::int64_t dim_n)
    : k_(k), epsilon_(epsilon), dim_n_(dim_n), hbar_(1.0 / (kTwoPi * static_cast<double>(dim_n))) {
    if (!std::isfinite(k)) throw InvalidInput("kick strength k must be finite");
    if (!std::isfinite(epsilon)) throw InvalidInput("perturbation epsilon must be finite");
    if (dim_n < 2) throw InvalidInput("Hilbert dimension N must be >= 2, got " + std::to_string(dim_n));
}

double wrap_unit(double x) noexcept {
    double r = x - std::floor(x);
    // x slightly below an integer can round up to exactly 1.
    if (r >= 1.0) r = 0.0;
    return r;
}

double torus_delta(double a, double b) noexcept {
    double d = wrap_unit(a - b);
    if (d >= 0.5) d -= 1.0;
    return d;
}

double torus_distance(const PhasePoint& a, const PhasePoint& b) noexcept {
    return std::max(std::abs(torus_delta(a.q, b.q)), std::abs(torus_delta(a.p, b.p)));
}

double kick_potential(const MapSpec& spec, double q) noexcept {
    return -spec.k() / kFourPiSq * std::cos(kTwoPi * q);
}

double perturbation_potential(double q) noexcept { return -std::cos(kTwoPi * q) / kFourPiSq; }

namespace {

void require_finite(const PhasePoint& x) {
    if (!std::isfinite(x.q) || !std::isfinite(x.p)) throw InvalidInput("phase point has non-finite coordinates");
}

}  // namespace

// Out of line on purpose: inlined next to a cos() of the same argument, GCC
// fuses the pair into sincos(), whose sine can differ from sin() in the last
// bit. Chaotic orbits amplify that, so every caller must share this code.
[[gnu::noinline]] PhasePoint step(const MapSpec& spec, const PhasePoint& x, bool perturbed) {
    require_finite(x);
    const double p = wrap_unit(x.p - spec.kick(perturbed) / kTwoPi * std::sin(kTwoPi * x.q));
    return {wrap_unit(x.q + p), p};
}

PhasePoint step_inverse(const MapSpec& spec, const PhasePoint& x, bool perturbed) {
    require_finite(x);
    const double q = wrap_unit(x.q - x.p);
    return {q, wrap_unit(x.p + spec.kick(perturbed) / kTwoPi * std::sin(kTwoPi * q))};
}

Mat2 jacobian(const MapSpec& spec, const PhasePoint& x, bool perturbed) {
    require_finite(x);
    const double shear = spec.kick(perturbed) * std::cos(kTwoPi * x.q);
    return Mat2{{{1.0 - shear, 1.0}, {-shear, 1.0}}};
}

TrajectoryRecord propagate(const MapSpec& spec, const PhasePoint& x0, std::int64_t steps, bool store_orbit) {
    if (steps < 0) throw InvalidInput("propagate: step count must be >= 0, got " + std::to_string(steps));
    require_finite(x0);

    TrajectoryRecord rec;
    rec.start = x0;
    rec.steps = steps;
    if (store_orbit) {
        rec.orbit.emplace();
        rec.orbit->reserve(static_cast<std::size_t>(steps) + 1);
        rec.orbit->push_back(x0);
    }

    PhasePoint x = x0;
    double cos_sum = 0.0;
    for (std::int64_t n = 0; n < steps; ++n) {
        cos_sum += std::cos(kTwoPi * x.q);
        x = step(spec, x, false);
        if (store_orbit) rec.orbit->push_back(x);
    }
    rec.cos_sum = cos_sum;
    rec.delta_s = spec.epsilon() / kFourPiSq * cos_sum;
    return rec;
}

}  // namespace dephase
