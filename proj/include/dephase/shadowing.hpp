#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dephase/dynamics.hpp"

namespace dephase {

enum class OrbitSource { perturbed_map, noisy, external };

struct PseudoOrbit {
    std::vector<PhasePoint> points;
    OrbitSource source = OrbitSource::external;
    // Claimed per-step noise bound.
    double noise_delta = 0.0;
};

struct ShadowResult {
    // True orbit of the target map (when converged).
    std::vector<PhasePoint> shadow_points;
    // max_n |x_n - x~_n| in the torus sup metric.
    double shadow_distance = 0.0;
    // max_n |x_{n+1} - f(x_n)| of shadow_points.
    double residual = 0.0;
    bool converged = false;
    int iterations = 0;
};

inline constexpr std::int64_t kShadowMaxSteps = 10'000;

// max_n |x_{n+1} - f(x_n)| for f = f^0 (perturbed = false) or f^eps,
// using the shortest-wrap sup metric. Throws InvalidInput for orbits
// shorter than two points.
double pseudo_residual(const MapSpec& spec, const PseudoOrbit& orbit, bool perturbed);

// True orbit of f^0 or f^eps of length steps + 1.
PseudoOrbit true_orbit(const MapSpec& spec, const PhasePoint& x0, std::int64_t steps, bool perturbed);

// Orbit of f^eps (or f^0) with independent uniform noise in (-delta, delta)
// added to each coordinate after every step.
PseudoOrbit noisy_orbit(const MapSpec& spec, const PhasePoint& x0, std::int64_t steps, bool perturbed,
                        double delta, std::uint64_t seed);

// Finds a nearby true orbit of the target map by damped Newton iteration on
// the orbit equations x_{n+1} - f(x_n) = 0 for all points at once. The
// system is underdetermined (free endpoints); each iteration takes the
// minimum-norm correction, solving the block-tridiagonal normal equations
// J J^T y = -g and setting dx = J^T y. The step length is halved whenever
// the residual fails to decrease.
// Non-convergence is reported, not thrown. Throws CapacityError for orbits
// longer than kShadowMaxSteps and InvalidInput for tol < 1e-13.
ShadowResult refine_shadow(const MapSpec& spec, const PseudoOrbit& orbit, bool target_perturbed, double tol,
                           int max_iter);

// Conjectured shadowing time t_S ~ eps^{-1/2}.
double shadow_time_estimate(double epsilon);

struct ShadowSurvey {
    std::int64_t orbits = 0;
    std::int64_t steps = 0;
    std::int64_t shadowed = 0;
    double fraction = 0.0;
    double time_estimate = 0.0;
    std::vector<PhasePoint> starts;
    std::vector<ShadowResult> results;
};

// Breakdown statistic: draws `orbits` uniform starting points, builds true
// orbits of f^0 of the given length and tries to shadow each by a true orbit
// of f^eps. Orbits are refined concurrently; results do not depend on the
// worker count.
ShadowSurvey shadow_survey(const MapSpec& spec, std::int64_t orbits, std::int64_t steps, double tol, int max_iter,
                           std::uint64_t seed, unsigned workers = 1);

struct BoundCheck {
    std::int64_t orbits = 0;
    std::int64_t steps = 0;
    double bound = 0.0;
    double worst = 0.0;
    std::int64_t violations = 0;
};

// Every true orbit of f^eps, measured against f^0, must have residual at most
// |eps| sup|V'|. `slack` absorbs floating-point rounding.
BoundCheck check_perturbation_bound(const MapSpec& spec, std::int64_t orbits, std::int64_t steps,
                                    std::uint64_t seed, double slack = 1e-12);

// Noisy f^eps orbits with noise amplitude delta, measured against f^0, must
// have residual at most delta + |eps| sup|V'|.
BoundCheck check_noisy_bound(const MapSpec& spec, std::int64_t orbits, std::int64_t steps, double delta,
                             std::uint64_t seed, double slack = 1e-12);

}  // namespace dephase
