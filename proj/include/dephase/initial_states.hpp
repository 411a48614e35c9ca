#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "dephase/dynamics.hpp"

namespace dephase {

struct WeightedSample {
    PhasePoint point;
    // Signed in general; nonnegative for every state shipped here.
    double weight = 0.0;
};

enum class SampleMode { grid, monte_carlo, position_only, wigner };

std::string to_string(SampleMode mode);
SampleMode parse_sample_mode(const std::string& name);

// Weighted initial conditions for the phase average, plus what produced them.
struct SampleSet {
    std::vector<WeightedSample> samples;
    // True for deterministic quadratures (no Monte Carlo error).
    bool quadrature = false;
    std::string descriptor;
    std::uint64_t seed = 0;
};

// Source of weighted phase-space samples drawn from a Wigner distribution.
// sample() must be a pure function of (seed, index).
class WignerSampler {
public:
    virtual ~WignerSampler() = default;
    virtual WeightedSample sample(std::uint64_t seed, std::uint64_t index) const = 0;
    virtual std::string describe() const = 0;
};

// Minimum-uncertainty periodized Gaussian. sigma is the position standard
// deviation of |psi|^2; the momentum spread is hbar / (2 sigma).
class GaussianWigner final : public WignerSampler {
public:
    GaussianWigner(const MapSpec& spec, double q0, double p0, double sigma);

    WeightedSample sample(std::uint64_t seed, std::uint64_t index) const override;
    std::string describe() const override;

    double sigma_q() const noexcept { return sigma_q_; }
    double sigma_p() const noexcept { return sigma_p_; }

private:
    double q0_;
    double p0_;
    double sigma_q_;
    double sigma_p_;
};

struct PositionEigenstate {
    double q0 = 0.0;
};

struct GaussianWavepacket {
    double q0 = 0.0;
    double p0 = 0.0;
    double sigma = 0.05;
};

struct WignerState {
    std::shared_ptr<const WignerSampler> sampler;
};

using InitialState = std::variant<PositionEigenstate, GaussianWavepacket, WignerState>;

std::string describe(const InitialState& state);

// Grid index of q0, or InvalidInput if q0 * N is not an integer.
std::int64_t grid_index(const MapSpec& spec, double q0);

// Position eigenstate |q0>: all samples share q0, momenta cover the torus.
// grid mode requires count == N and yields p_j = j / N with weight 1/N;
// monte_carlo draws count uniform momenta with weight 1/count.
SampleSet samples_position_state(const MapSpec& spec, double q0, std::int64_t count, SampleMode mode,
                                 std::uint64_t seed, unsigned workers = 1);

// Gaussian wavepacket. position_only draws q from |psi(q)|^2 with p = p0;
// wigner draws (q, p) from the Gaussian Wigner function.
SampleSet samples_gaussian(const MapSpec& spec, double q0, double p0, double sigma, std::int64_t count,
                           SampleMode mode, std::uint64_t seed, unsigned workers = 1);

// count draws from an arbitrary sampler. Weights are rescaled by 1/count.
SampleSet samples_wigner(const WignerSampler& sampler, std::int64_t count, std::uint64_t seed,
                         unsigned workers = 1);

// Periodized Gaussian density of standard deviation sigma centred at mu,
// summed over image shifts until terms drop below 1e-16.
double wrapped_normal_pdf(double x, double mu, double sigma);

}  // namespace dephase
