#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

namespace dephase {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kFourPiSq = 4.0 * std::numbers::pi * std::numbers::pi;

// sup_q |dV/dq| for V(q) = -cos(2 pi q) / (4 pi^2).
inline constexpr double kSupGradV = 1.0 / kTwoPi;

// Physical and numerical configuration of the kicked map.
// Positions and momenta live on the unit torus. The unperturbed kick
// potential is W(q) = -(k / 4pi^2) cos(2 pi q), the perturbation is
// V(q) = W(q) / k, and hbar = 1 / (2 pi N) so that the quantized torus has
// exactly N states.
class MapSpec {
public:
    // Throws InvalidInput unless N >= 2 and k, epsilon are finite.
    MapSpec(double k, double epsilon, std::int64_t dim_n);

    double k() const noexcept { return k_; }
    double epsilon() const noexcept { return epsilon_; }
    std::int64_t dim_n() const noexcept { return dim_n_; }
    double hbar() const noexcept { return hbar_; }

    // Effective kick strength: k for f^0, k + epsilon for f^epsilon.
    double kick(bool perturbed) const noexcept { return perturbed ? k_ + epsilon_ : k_; }

    MapSpec with_epsilon(double epsilon) const { return MapSpec(k_, epsilon, dim_n_); }

    friend bool operator==(const MapSpec&, const MapSpec&) = default;

private:
    double k_;
    double epsilon_;
    std::int64_t dim_n_;
    double hbar_;
};

struct PhasePoint {
    double q = 0.0;
    double p = 0.0;

    friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

// Row-major 2x2 matrix acting on (dq, dp).
using Mat2 = std::array<std::array<double, 2>, 2>;

struct TrajectoryRecord {
    PhasePoint start;
    std::int64_t steps = 0;
    // S^eps - S^0 accumulated along the unperturbed orbit.
    double delta_s = 0.0;
    // Sum of cos(2 pi q_m) over kicks m = 0..steps-1; delta_s is
    // (epsilon / 4 pi^2) times this.
    double cos_sum = 0.0;
    std::optional<std::vector<PhasePoint>> orbit;
};

// Reduces x into [0, 1).
double wrap_unit(double x) noexcept;

// Shortest signed displacement a - b on the circle, in [-1/2, 1/2).
double torus_delta(double a, double b) noexcept;

// Sup-norm torus distance between two phase points.
double torus_distance(const PhasePoint& a, const PhasePoint& b) noexcept;

double kick_potential(const MapSpec& spec, double q) noexcept;
double perturbation_potential(double q) noexcept;

// One kick-then-drift step of f^0 (perturbed = false) or f^eps.
PhasePoint step(const MapSpec& spec, const PhasePoint& x, bool perturbed);

// Exact inverse of step().
PhasePoint step_inverse(const MapSpec& spec, const PhasePoint& x, bool perturbed);

// Analytic tangent map of step() at x. Determinant is identically one.
Mat2 jacobian(const MapSpec& spec, const PhasePoint& x, bool perturbed = false);

// Follows the unperturbed orbit from x0 for `steps` kicks and accumulates the
// action difference -epsilon * sum_m V(q_m). The orbit itself never depends
// on spec.epsilon().
TrajectoryRecord propagate(const MapSpec& spec, const PhasePoint& x0, std::int64_t steps,
                           bool store_orbit = false);

}  // namespace dephase
