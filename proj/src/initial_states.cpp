#include "dephase/initial_states.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dephase/errors.hpp"
#include "dephase/parallel.hpp"
#include "dephase/rng.hpp"

namespace dephase {

namespace {

constexpr std::size_t kSampleChunk = 4096;

void require_count(std::int64_t count) {
    if (count < 1) throw InvalidInput("sample count must be >= 1, got " + std::to_string(count));
}

void require_sigma(double sigma) {
    if (!(sigma > 0.0 && sigma < 0.5))
        throw InvalidInput("wavepacket width sigma must lie in (0, 0.5), got " + std::to_string(sigma));
}

// Fills out[i] = make(i) in parallel. Each index owns its random stream, so
// the result does not depend on the worker count.
template <class Make>
std::vector<WeightedSample> generate(std::int64_t count, unsigned workers, Make&& make) {
    std::vector<WeightedSample> out(static_cast<std::size_t>(count));
    const std::size_t chunks = (out.size() + kSampleChunk - 1) / kSampleChunk;
    for_each_chunk(chunks, workers, [&](std::size_t c) {
        const std::size_t end = std::min(out.size(), (c + 1) * kSampleChunk);
        for (std::size_t i = c * kSampleChunk; i < end; ++i) out[i] = make(static_cast<std::uint64_t>(i));
    });
    return out;
}

std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

std::string to_string(SampleMode mode) {
    switch (mode) {
        case SampleMode::grid: return "grid";
        case SampleMode::monte_carlo: return "monte_carlo";
        case SampleMode::position_only: return "position_only";
        case SampleMode::wigner: return "wigner";
    }
    return "unknown";
}

SampleMode parse_sample_mode(const std::string& name) {
    if (name == "grid") return SampleMode::grid;
    if (name == "monte_carlo") return SampleMode::monte_carlo;
    if (name == "position_only") return SampleMode::position_only;
    if (name == "wigner") return SampleMode::wigner;
    throw InvalidInput("unknown sample mode '" + name + "'");
}

std::int64_t grid_index(const MapSpec& spec, double q0) {
    if (!std::isfinite(q0) || q0 < 0.0 || q0 >= 1.0)
        throw InvalidInput("q0 must lie in [0, 1), got " + fmt_double(q0));
    const double scaled = q0 * static_cast<double>(spec.dim_n());
    const double nearest = std::round(scaled);
    if (std::abs(scaled - nearest) > 1e-9 * std::max(1.0, scaled))
        throw InvalidInput("q0 = " + fmt_double(q0) + " is not on the N = " + std::to_string(spec.dim_n()) +
                           " position grid");
    return static_cast<std::int64_t>(nearest) % spec.dim_n();
}

double wrapped_normal_pdf(double x, double mu, double sigma) {
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    const double d = torus_delta(x, mu);
    double sum = 0.0;
    for (int m = 0;; ++m) {
        double term = 0.0;
        for (const int s : {m, -m}) {
            const double z = (d + s) / sigma;
            term += norm * std::exp(-0.5 * z * z);
            if (m == 0) break;
        }
        sum += term;
        if (m > 0 && term < 1e-16) break;
    }
    return sum;
}

GaussianWigner::GaussianWigner(const MapSpec& spec, double q0, double p0, double sigma)
    : q0_(wrap_unit(q0)), p0_(wrap_unit(p0)), sigma_q_(sigma), sigma_p_(spec.hbar() / (2.0 * sigma)) {
    require_sigma(sigma);
    if (!std::isfinite(q0) || !std::isfinite(p0)) throw InvalidInput("wavepacket centre must be finite");
}

WeightedSample GaussianWigner::sample(std::uint64_t seed, std::uint64_t index) const {
    CounterStream rng(seed, index);
    const double zq = rng.normal();
    const double zp = rng.normal();
    return {{wrap_unit(q0_ + sigma_q_ * zq), wrap_unit(p0_ + sigma_p_ * zp)}, 1.0};
}

std::string GaussianWigner::describe() const {
    return "gaussian_wigner(q0=" + fmt_double(q0_) + ",p0=" + fmt_double(p0_) + ",sigma=" + fmt_double(sigma_q_) + ")";
}

std::string describe(const InitialState& state) {
    struct {
        std::string operator()(const PositionEigenstate& s) const { return "position(q0=" + fmt_double(s.q0) + ")"; }
        std::string operator()(const GaussianWavepacket& s) const {
            return "gaussian(q0=" + fmt_double(s.q0) + ",p0=" + fmt_double(s.p0) + ",sigma=" + fmt_double(s.sigma) + ")";
        }
        std::string operator()(const WignerState& s) const {
            return s.sampler ? s.sampler->describe() : std::string("wigner(null)");
        }
    } visitor;
    return std::visit(visitor, state);
}

SampleSet samples_position_state(const MapSpec& spec, double q0, std::int64_t count, SampleMode mode,
                                 std::uint64_t seed, unsigned workers) {
    require_count(count);
    const std::int64_t j0 = grid_index(spec, q0);
    const double n = static_cast<double>(spec.dim_n());
    const double q = static_cast<double>(j0) / n;

    SampleSet set;
    set.seed = seed;
    set.descriptor = "position(q0=" + fmt_double(q) + ")";
    switch (mode) {
        case SampleMode::grid: {
            if (count != spec.dim_n())
                throw InvalidInput("grid mode needs one sample per momentum grid point: count must equal N = " +
                                   std::to_string(spec.dim_n()) + ", got " + std::to_string(count));
            const double w = 1.0 / n;
            set.samples = generate(count, workers, [&](std::uint64_t j) {
                return WeightedSample{{q, static_cast<double>(j) / n}, w};
            });
            set.quadrature = true;
            break;
        }
        case SampleMode::monte_carlo: {
            const double w = 1.0 / static_cast<double>(count);
            set.samples = generate(count, workers, [&](std::uint64_t i) {
                CounterStream rng(seed, i);
                return WeightedSample{{q, rng.uniform()}, w};
            });
            break;
        }
        default:
            throw InvalidInput("position eigenstates support grid or monte_carlo sampling, not " + to_string(mode));
    }
    return set;
}

SampleSet samples_gaussian(const MapSpec& spec, double q0, double p0, double sigma, std::int64_t count,
                           SampleMode mode, std::uint64_t seed, unsigned workers) {
    require_count(count);
    const GaussianWigner wigner(spec, q0, p0, sigma);
    SampleSet set;
    switch (mode) {
        case SampleMode::wigner:
            set = samples_wigner(wigner, count, seed, workers);
            break;
        case SampleMode::position_only: {
            const double w = 1.0 / static_cast<double>(count);
            const double p = wrap_unit(p0);
            set.samples = generate(count, workers, [&](std::uint64_t i) {
                WeightedSample s = wigner.sample(seed, i);
                return WeightedSample{{s.point.q, p}, w};
            });
            set.seed = seed;
            break;
        }
        default:
            throw InvalidInput("Gaussian wavepackets support position_only or wigner sampling, not " + to_string(mode));
    }
    set.descriptor = describe(InitialState{GaussianWavepacket{q0, p0, sigma}}) + "/" + to_string(mode);
    return set;
}

SampleSet samples_wigner(const WignerSampler& sampler, std::int64_t count, std::uint64_t seed, unsigned workers) {
    require_count(count);
    const double scale = 1.0 / static_cast<double>(count);
    SampleSet set;
    set.seed = seed;
    set.descriptor = sampler.describe();
    set.samples = generate(count, workers, [&](std::uint64_t i) {
        WeightedSample s = sampler.sample(seed, i);
        s.weight *= scale;
        return s;
    });
    return set;
}

}  // namespace dephase
