#include "dephase/shadowing.hpp"

#include <cmath>

#include "dephase/errors.hpp"
#include "dephase/parallel.hpp"
#include "dephase/rng.hpp"

namespace dephase {

namespace {

using Vec2 = std::array<double, 2>;

Mat2 transpose(const Mat2& a) { return {{{a[0][0], a[1][0]}, {a[0][1], a[1][1]}}}; }

Mat2 mul(const Mat2& a, const Mat2& b) {
    Mat2 c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
}

Vec2 mul(const Mat2& a, const Vec2& v) { return {a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]}; }

Mat2 sub(const Mat2& a, const Mat2& b) { return {{{a[0][0] - b[0][0], a[0][1] - b[0][1]}, {a[1][0] - b[1][0], a[1][1] - b[1][1]}}}; }

Vec2 sub(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }

Mat2 inverse(const Mat2& a) {
    const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    return {{{a[1][1] / det, -a[0][1] / det}, {-a[1][0] / det, a[0][0] / det}}};
}

// Orbit defects g_n = x_{n+1} - f(x_n), wrapped to the shortest displacement.
std::vector<Vec2> defects(const MapSpec& spec, const std::vector<PhasePoint>& x, bool perturbed) {
    std::vector<Vec2> g(x.size() - 1);
    for (std::size_t n = 0; n + 1 < x.size(); ++n) {
        const PhasePoint fx = step(spec, x[n], perturbed);
        g[n] = {torus_delta(x[n + 1].q, fx.q), torus_delta(x[n + 1].p, fx.p)};
    }
    return g;
}

double sup_norm(const std::vector<Vec2>& g) {
    double m = 0.0;
    for (const auto& v : g) m = std::max({m, std::abs(v[0]), std::abs(v[1])});
    return m;
}

double sq_norm(const std::vector<Vec2>& g) {
    double s = 0.0;
    for (const auto& v : g) s += v[0] * v[0] + v[1] * v[1];
    return s;
}

// Minimum-norm Newton correction for the current orbit.
std::vector<Vec2> newton_correction(const MapSpec& spec, const std::vector<PhasePoint>& x,
                                    const std::vector<Vec2>& g, bool perturbed) {
    const std::size_t m = g.size();  // number of constraints
    std::vector<Mat2> a(m);
    for (std::size_t n = 0; n < m; ++n) a[n] = jacobian(spec, x[n], perturbed);

    // J J^T: diagonal I + A_n A_n^T, sub-diagonal (n, n-1) = -A_n.
    std::vector<Mat2> s_inv(m);
    std::vector<Vec2> r(m);
    for (std::size_t n = 0; n < m; ++n) {
        Mat2 d = mul(a[n], transpose(a[n]));
        d[0][0] += 1.0;
        d[1][1] += 1.0;
        Vec2 rhs = {-g[n][0], -g[n][1]};
        if (n > 0) {
            // L = -A_n, so L S^{-1} L^T = A_n S^{-1} A_n^T and L S^{-1} r = -A_n S^{-1} r.
            const Mat2 as = mul(a[n], s_inv[n - 1]);
            d = sub(d, mul(as, transpose(a[n])));
            const Vec2 t = mul(as, r[n - 1]);
            rhs = {rhs[0] + t[0], rhs[1] + t[1]};
        }
        s_inv[n] = inverse(d);
        r[n] = rhs;
    }
    std::vector<Vec2> y(m);
    for (std::size_t n = m; n-- > 0;) {
        Vec2 rhs = r[n];
        // Upper block (n, n+1) = L_{n+1}^T = -A_{n+1}^T.
        if (n + 1 < m) {
            const Vec2 t = mul(transpose(a[n + 1]), y[n + 1]);
            rhs = {rhs[0] + t[0], rhs[1] + t[1]};
        }
        y[n] = mul(s_inv[n], rhs);
    }

    // dx = J^T y: dx_k = y_{k-1} - A_k^T y_k.
    std::vector<Vec2> dx(x.size(), Vec2{0.0, 0.0});
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (k > 0) dx[k] = y[k - 1];
        if (k < m) dx[k] = sub(dx[k], mul(transpose(a[k]), y[k]));
    }
    return dx;
}

}  // namespace

double pseudo_residual(const MapSpec& spec, const PseudoOrbit& orbit, bool perturbed) {
    if (orbit.points.size() < 2) throw InvalidInput("pseudo-orbit needs at least two points");
    return sup_norm(defects(spec, orbit.points, perturbed));
}

PseudoOrbit true_orbit(const MapSpec& spec, const PhasePoint& x0, std::int64_t steps, bool perturbed) {
    if (steps < 0) throw InvalidInput("orbit length must be >= 0");
    PseudoOrbit o;
    o.source = perturbed ? OrbitSource::perturbed_map : OrbitSource::external;
    o.points.reserve(static_cast<std::size_t>(steps) + 1);
    o.points.push_back({wrap_unit(x0.q), wrap_unit(x0.p)});
    for (std::int64_t n = 0; n < steps; ++n) o.points.push_back(step(spec, o.points.back(), perturbed));
    return o;
}

PseudoOrbit noisy_orbit(const MapSpec& spec, const PhasePoint& x0, std::int64_t steps, bool perturbed, double delta,
                        std::uint64_t seed) {
    if (steps < 0) throw InvalidInput("orbit length must be >= 0");
    if (!(delta >= 0.0)) throw InvalidInput("noise amplitude must be >= 0");
    PseudoOrbit o;
    o.source = OrbitSource::noisy;
    o.noise_delta = delta;
    o.points.reserve(static_cast<std::size_t>(steps) + 1);
    o.points.push_back({wrap_unit(x0.q), wrap_unit(x0.p)});
    CounterStream rng(seed, 0);
    for (std::int64_t n = 0; n < steps; ++n) {
        const PhasePoint fx = step(spec, o.points.back(), perturbed);
        const double uq = delta * (2.0 * rng.uniform_open() - 1.0);
        const double up = delta * (2.0 * rng.uniform_open() - 1.0);
        o.points.push_back({wrap_unit(fx.q + uq), wrap_unit(fx.p + up)});
    }
    return o;
}

ShadowResult refine_shadow(const MapSpec& spec, const PseudoOrbit& orbit, bool target_perturbed, double tol,
                           int max_iter) {
    if (orbit.points.size() < 2) throw InvalidInput("pseudo-orbit needs at least two points");
    if (static_cast<std::int64_t>(orbit.points.size()) - 1 > kShadowMaxSteps)
        throw CapacityError("shadow refinement supports at most " + std::to_string(kShadowMaxSteps) + " steps");
    if (!(tol >= 1e-13)) throw InvalidInput("shadow tolerance must be >= 1e-13");
    if (max_iter < 0) throw InvalidInput("max_iter must be >= 0");

    ShadowResult res;
    std::vector<PhasePoint> x = orbit.points;
    std::vector<Vec2> g = defects(spec, x, target_perturbed);
    double sup = sup_norm(g);
    double energy = sq_norm(g);

    constexpr int kMaxHalvings = 40;
    while (sup >= tol && res.iterations < max_iter) {
        const std::vector<Vec2> dx = newton_correction(spec, x, g, target_perturbed);
        bool accepted = false;
        double damping = 1.0;
        for (int h = 0; h <= kMaxHalvings; ++h, damping *= 0.5) {
            std::vector<PhasePoint> trial(x.size());
            for (std::size_t k = 0; k < x.size(); ++k)
                trial[k] = {wrap_unit(x[k].q + damping * dx[k][0]), wrap_unit(x[k].p + damping * dx[k][1])};
            std::vector<Vec2> gt = defects(spec, trial, target_perturbed);
            const double et = sq_norm(gt);
            if (std::isfinite(et) && et < energy) {
                x = std::move(trial);
                g = std::move(gt);
                energy = et;
                sup = sup_norm(g);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        ++res.iterations;
    }

    res.residual = sup;
    res.converged = sup < tol;
    res.shadow_distance = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k)
        res.shadow_distance = std::max(res.shadow_distance, torus_distance(x[k], orbit.points[k]));
    res.shadow_points = std::move(x);
    return res;
}

double shadow_time_estimate(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw InvalidInput("shadowing-time estimate needs epsilon > 0");
    return 1.0 / std::sqrt(epsilon);
}

ShadowSurvey shadow_survey(const MapSpec& spec, std::int64_t orbits, std::int64_t steps, double tol, int max_iter,
                           std::uint64_t seed, unsigned workers) {
    if (orbits < 1) throw InvalidInput("shadow survey needs at least one orbit");
    if (steps < 1) throw InvalidInput("shadow survey needs at least one step");
    if (steps > kShadowMaxSteps)
        throw CapacityError("shadow refinement supports at most " + std::to_string(kShadowMaxSteps) + " steps");

    ShadowSurvey survey;
    survey.orbits = orbits;
    survey.steps = steps;
    survey.time_estimate = spec.epsilon() != 0.0 ? shadow_time_estimate(std::abs(spec.epsilon())) : INFINITY;
    survey.starts.resize(static_cast<std::size_t>(orbits));
    survey.results.resize(static_cast<std::size_t>(orbits));
    for_each_chunk(static_cast<std::size_t>(orbits), workers, [&](std::size_t i) {
        CounterStream rng(seed, i);
        const PhasePoint x0{rng.uniform(), rng.uniform()};
        survey.starts[i] = x0;
        survey.results[i] = refine_shadow(spec, true_orbit(spec, x0, steps, false), true, tol, max_iter);
    });
    for (const auto& r : survey.results) survey.shadowed += r.converged ? 1 : 0;
    survey.fraction = static_cast<double>(survey.shadowed) / static_cast<double>(orbits);
    return survey;
}

BoundCheck check_perturbation_bound(const MapSpec& spec, std::int64_t orbits, std::int64_t steps, std::uint64_t seed,
                                    double slack) {
    BoundCheck c;
    c.orbits = orbits;
    c.steps = steps;
    c.bound = std::abs(spec.epsilon()) * kSupGradV;
    for (std::int64_t i = 0; i < orbits; ++i) {
        CounterStream rng(seed, static_cast<std::uint64_t>(i));
        const PhasePoint x0{rng.uniform(), rng.uniform()};
        const double r = pseudo_residual(spec, true_orbit(spec, x0, steps, true), false);
        c.worst = std::max(c.worst, r);
        if (r > c.bound + slack) ++c.violations;
    }
    return c;
}

BoundCheck check_noisy_bound(const MapSpec& spec, std::int64_t orbits, std::int64_t steps, double delta,
                             std::uint64_t seed, double slack) {
    BoundCheck c;
    c.orbits = orbits;
    c.steps = steps;
    c.bound = delta + std::abs(spec.epsilon()) * kSupGradV;
    for (std::int64_t i = 0; i < orbits; ++i) {
        CounterStream rng(seed, static_cast<std::uint64_t>(i));
        const PhasePoint x0{rng.uniform(), rng.uniform()};
        const std::uint64_t noise_seed = rng.next_u64();
        const double r = pseudo_residual(spec, noisy_orbit(spec, x0, steps, true, delta, noise_seed), false);
        c.worst = std::max(c.worst, r);
        if (r > c.bound + slack) ++c.violations;
    }
    return c;
}

}  // namespace dephase
