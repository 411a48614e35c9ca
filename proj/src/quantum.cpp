#include "dephase/quantum.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "dephase/errors.hpp"

namespace dephase {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

std::vector<cplx> kick_phases(const MapSpec& spec, bool perturbed) {
    // exp(-i [W + eps V] / hbar) = exp(i (k + eps) N / (2 pi) cos(2 pi q_j))
    const std::int64_t n = spec.dim_n();
    const double strength = spec.kick(perturbed) * static_cast<double>(n) / kTwoPi;
    std::vector<cplx> out(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j)
        out[j] = std::polar(1.0, strength * std::cos(kTwoPi * static_cast<double>(j) / static_cast<double>(n)));
    return out;
}

std::vector<cplx> drift_phases(const MapSpec& spec) {
    // exp(-i p_m^2 / (2 hbar)) = exp(-i pi m^2 / N); m^2 reduced mod 2N first.
    const std::int64_t n = spec.dim_n();
    std::vector<cplx> out(static_cast<std::size_t>(n));
    for (std::int64_t m = 0; m < n; ++m) {
        const std::int64_t r = (m * m) % (2 * n);
        out[m] = std::polar(1.0, -std::numbers::pi * static_cast<double>(r) / static_cast<double>(n));
    }
    return out;
}

void require_dim(const MapSpec& spec, const QuantumState& psi) {
    if (static_cast<std::int64_t>(psi.dim()) != spec.dim_n())
        throw InvalidInput("state dimension " + std::to_string(psi.dim()) + " does not match N = " +
                           std::to_string(spec.dim_n()));
}

void require_steps(std::int64_t steps) {
    if (steps < 0) throw InvalidInput("step count must be >= 0, got " + std::to_string(steps));
}

FidelityCurve make_curve(Method method, const MapSpec& spec, const std::string& descriptor) {
    FidelityCurve c;
    c.method = method;
    c.spec = spec;
    c.state = descriptor;
    return c;
}

}  // namespace

QuantumState::QuantumState(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.empty()) throw InvalidInput("quantum state must have at least one amplitude");
}

double QuantumState::norm() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

cplx QuantumState::overlap(const QuantumState& other) const {
    if (other.dim() != dim()) throw InvalidInput("overlap of states with different dimensions");
    cplx s = 0.0;
    for (std::size_t j = 0; j < amps_.size(); ++j) s += std::conj(amps_[j]) * other.amps_[j];
    return s;
}

QuantumState build_state(const MapSpec& spec, const InitialState& state) {
    const auto n = static_cast<std::size_t>(spec.dim_n());
    std::vector<cplx> amps(n, cplx{0.0, 0.0});

    if (const auto* pos = std::get_if<PositionEigenstate>(&state)) {
        amps[static_cast<std::size_t>(grid_index(spec, pos->q0))] = 1.0;
        return QuantumState(std::move(amps));
    }
    if (const auto* g = std::get_if<GaussianWavepacket>(&state)) {
        if (!(g->sigma > 0.0 && g->sigma < 0.5))
            throw InvalidInput("wavepacket width sigma must lie in (0, 0.5)");
        if (!std::isfinite(g->q0) || !std::isfinite(g->p0)) throw InvalidInput("wavepacket centre must be finite");
        // psi(q) = sum_m exp(-(x_m)^2 / (4 sigma^2) + i p0 x_m / hbar),  x_m = q + m - q0
        const double inv4s2 = 1.0 / (4.0 * g->sigma * g->sigma);
        const double kwave = g->p0 / spec.hbar();
        for (std::size_t j = 0; j < n; ++j) {
            const double d = torus_delta(static_cast<double>(j) / static_cast<double>(n), g->q0);
            cplx sum = 0.0;
            for (int m = 0;; ++m) {
                double largest = 0.0;
                for (const int s : {m, -m}) {
                    const double x = d + s;
                    const double env = std::exp(-x * x * inv4s2);
                    sum += std::polar(env, kwave * x);
                    largest = std::max(largest, env);
                    if (m == 0) break;
                }
                if (m > 0 && largest < 1e-16) break;
            }
            amps[j] = sum;
        }
        QuantumState psi(std::move(amps));
        const double nrm = psi.norm();
        if (!(nrm > 0.0)) throw InvalidInput("wavepacket has zero norm on the grid");
        for (auto& a : psi.amplitudes()) a /= nrm;
        return psi;
    }
    throw InvalidInput("Wigner-sampler states have no grid wavefunction");
}

struct SplitOperator::Impl {
    MapSpec spec;
    std::vector<cplx> kick0, kick_eps, drift;
    fftw_complex* buf = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    explicit Impl(const MapSpec& s)
        : spec(s), kick0(kick_phases(s, false)), kick_eps(kick_phases(s, true)), drift(drift_phases(s)) {
        const double inv_n = 1.0 / static_cast<double>(s.dim_n());
        for (auto& d : drift) d *= inv_n;  // unnormalized forward/backward pair
        const int n = static_cast<int>(s.dim_n());
        std::lock_guard lock(planner_mutex());
        buf = fftw_alloc_complex(static_cast<std::size_t>(n));
        // FFTW_ESTIMATE picks the same algorithm every run, keeping output bitwise reproducible.
        forward = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        backward = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (buf) fftw_free(buf);
    }

    cplx* data() { return reinterpret_cast<cplx*>(buf); }

    void apply(QuantumState& psi, bool perturbed, bool inverse) {
        require_dim(spec, psi);
        const auto& kick = perturbed ? kick_eps : kick0;
        auto amps = psi.amplitudes();
        cplx* b = data();
        const std::size_t n = amps.size();
        if (!inverse) {
            for (std::size_t j = 0; j < n; ++j) b[j] = kick[j] * amps[j];
            fftw_execute(forward);
            for (std::size_t m = 0; m < n; ++m) b[m] *= drift[m];
            fftw_execute(backward);
            std::memcpy(amps.data(), b, n * sizeof(cplx));
        } else {
            for (std::size_t j = 0; j < n; ++j) b[j] = amps[j];
            fftw_execute(forward);
            for (std::size_t m = 0; m < n; ++m) b[m] *= std::conj(drift[m]);
            fftw_execute(backward);
            for (std::size_t j = 0; j < n; ++j) amps[j] = std::conj(kick[j]) * b[j];
        }
    }
};

SplitOperator::SplitOperator(const MapSpec& spec) : impl_(std::make_unique<Impl>(spec)) {}
SplitOperator::~SplitOperator() = default;
SplitOperator::SplitOperator(SplitOperator&&) noexcept = default;
SplitOperator& SplitOperator::operator=(SplitOperator&&) noexcept = default;

const MapSpec& SplitOperator::spec() const noexcept { return impl_->spec; }
void SplitOperator::step(QuantumState& psi, bool perturbed) { impl_->apply(psi, perturbed, false); }
void SplitOperator::step_inverse(QuantumState& psi, bool perturbed) { impl_->apply(psi, perturbed, true); }

QuantumState step_quantum(const MapSpec& spec, const QuantumState& psi, bool perturbed) {
    SplitOperator op(spec);
    QuantumState out = psi;
    op.step(out, perturbed);
    return out;
}

FidelityCurve exact_fidelity_curve(const MapSpec& spec, const QuantumState& psi0, std::int64_t steps,
                                   const std::string& state_descriptor) {
    require_dim(spec, psi0);
    require_steps(steps);
    SplitOperator op(spec);
    QuantumState free = psi0;
    QuantumState pert = psi0;
    FidelityCurve curve = make_curve(Method::exact, spec, state_descriptor);
    curve.push(1.0);
    for (std::int64_t t = 1; t <= steps; ++t) {
        op.step(free, false);
        op.step(pert, true);
        curve.push(pert.overlap(free));
    }
    return curve;
}

std::vector<cplx> echo_amplitudes(const MapSpec& spec, const QuantumState& psi0, std::int64_t steps) {
    require_dim(spec, psi0);
    require_steps(steps);
    SplitOperator op(spec);
    std::vector<cplx> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    QuantumState forward = psi0;
    out.push_back(psi0.overlap(forward));
    for (std::int64_t t = 1; t <= steps; ++t) {
        op.step(forward, false);
        QuantumState echo = forward;
        for (std::int64_t s = 0; s < t; ++s) op.step_inverse(echo, true);
        out.push_back(psi0.overlap(echo));
    }
    return out;
}

double loschmidt_equivalence(const MapSpec& spec, const QuantumState& psi0, std::int64_t steps) {
    const FidelityCurve fwd = exact_fidelity_curve(spec, psi0, steps);
    const std::vector<cplx> echo = echo_amplitudes(spec, psi0, steps);
    double worst = 0.0;
    for (std::size_t t = 0; t < echo.size(); ++t) worst = std::max(worst, std::abs(fwd.amplitude(t) - echo[t]));
    return worst;
}

std::vector<cplx> dense_step_matrix(const MapSpec& spec, bool perturbed) {
    const std::int64_t n = spec.dim_n();
    if (n > kDenseMaxDim)
        throw CapacityError("dense oracle supports N <= " + std::to_string(kDenseMaxDim) + ", got " + std::to_string(n));
    const double dn = static_cast<double>(n);

    // Twiddles e^{2 pi i r / N} and the drift diagonal, by direct evaluation.
    std::vector<cplx> twiddle(static_cast<std::size_t>(n));
    for (std::int64_t r = 0; r < n; ++r) twiddle[r] = std::polar(1.0, kTwoPi * static_cast<double>(r) / dn);
    std::vector<cplx> drift(static_cast<std::size_t>(n));
    for (std::int64_t m = 0; m < n; ++m)
        drift[m] = std::polar(1.0, -std::numbers::pi * static_cast<double>((m * m) % (2 * n)) / dn);

    // F^{-1} D F is circulant: c_r = (1/N) sum_m d_m e^{2 pi i m r / N}.
    std::vector<cplx> circ(static_cast<std::size_t>(n));
    for (std::int64_t r = 0; r < n; ++r) {
        cplx s = 0.0;
        for (std::int64_t m = 0; m < n; ++m) s += drift[m] * twiddle[(m * r) % n];
        circ[r] = s / dn;
    }

    const double strength = spec.kick(perturbed) * dn / kTwoPi;
    std::vector<cplx> u(static_cast<std::size_t>(n * n));
    for (std::int64_t l = 0; l < n; ++l) {
        const cplx kick = std::polar(1.0, strength * std::cos(kTwoPi * static_cast<double>(l) / dn));
        for (std::int64_t j = 0; j < n; ++j) u[j * n + l] = circ[((j - l) % n + n) % n] * kick;
    }
    return u;
}

FidelityCurve dense_oracle(const MapSpec& spec, const QuantumState& psi0, std::int64_t steps,
                           const std::string& state_descriptor) {
    require_dim(spec, psi0);
    require_steps(steps);
    const auto n = static_cast<std::size_t>(spec.dim_n());
    const std::vector<cplx> u0 = dense_step_matrix(spec, false);
    const std::vector<cplx> ue = dense_step_matrix(spec, true);

    auto matvec = [n](const std::vector<cplx>& m, const std::vector<cplx>& v) {
        std::vector<cplx> out(n);
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0.0;
            for (std::size_t l = 0; l < n; ++l) s += m[j * n + l] * v[l];
            out[j] = s;
        }
        return out;
    };

    std::vector<cplx> free(psi0.amplitudes().begin(), psi0.amplitudes().end());
    std::vector<cplx> pert = free;
    FidelityCurve curve = make_curve(Method::dense, spec, state_descriptor);
    curve.push(1.0);
    for (std::int64_t t = 1; t <= steps; ++t) {
        free = matvec(u0, free);
        pert = matvec(ue, pert);
        cplx o = 0.0;
        for (std::size_t j = 0; j < n; ++j) o += std::conj(pert[j]) * free[j];
        curve.push(o);
    }
    return curve;
}

}  // namespace dephase
