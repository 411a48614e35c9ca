#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "dephase/fidelity_curve.hpp"
#include "dephase/initial_states.hpp"

namespace dephase {

using cplx = std::complex<double>;

// N amplitudes on the position grid q_j = j / N.
class QuantumState {
public:
    explicit QuantumState(std::vector<cplx> amplitudes);

    std::size_t dim() const noexcept { return amps_.size(); }
    std::span<const cplx> amplitudes() const noexcept { return amps_; }
    std::span<cplx> amplitudes() noexcept { return amps_; }

    double norm() const;
    // <this|other>
    cplx overlap(const QuantumState& other) const;

private:
    std::vector<cplx> amps_;
};

// Unit-norm grid state for a position eigenstate or a periodized Gaussian.
// Wigner-sampler states have no wavefunction and are rejected.
QuantumState build_state(const MapSpec& spec, const InitialState& state);

// Quantized kicked map U = exp(-i p^2 / 2 hbar) exp(-i [W(q) + eps V(q)] / hbar)
// applied by transforming to the momentum grid and back. Holds FFT plans and
// phase tables; one instance per thread.
class SplitOperator {
public:
    explicit SplitOperator(const MapSpec& spec);
    ~SplitOperator();
    SplitOperator(SplitOperator&&) noexcept;
    SplitOperator& operator=(SplitOperator&&) noexcept;
    SplitOperator(const SplitOperator&) = delete;
    SplitOperator& operator=(const SplitOperator&) = delete;

    const MapSpec& spec() const noexcept;

    void step(QuantumState& psi, bool perturbed);
    // Applies U^dagger.
    void step_inverse(QuantumState& psi, bool perturbed);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

QuantumState step_quantum(const MapSpec& spec, const QuantumState& psi, bool perturbed);

// O(t) = <psi_eps(t)|psi_0(t)> from two forward evolutions.
FidelityCurve exact_fidelity_curve(const MapSpec& spec, const QuantumState& psi0, std::int64_t steps,
                                   const std::string& state_descriptor = "");

// Echo amplitude <psi| U_eps^{dagger t} U_0^t |psi> for t = 0..steps.
std::vector<cplx> echo_amplitudes(const MapSpec& spec, const QuantumState& psi0, std::int64_t steps);

// max_t |O_forward(t) - O_echo(t)|.
double loschmidt_equivalence(const MapSpec& spec, const QuantumState& psi0, std::int64_t steps);

inline constexpr std::int64_t kDenseMaxDim = 256;

// Explicit N x N one-step unitary, assembled by direct summation (no FFT).
// Row-major, element (j, l) at j * N + l.
std::vector<cplx> dense_step_matrix(const MapSpec& spec, bool perturbed);

// Same curve as exact_fidelity_curve via dense matrix-vector products.
// Throws CapacityError for N > kDenseMaxDim.
FidelityCurve dense_oracle(const MapSpec& spec, const QuantumState& psi0, std::int64_t steps,
                           const std::string& state_descriptor = "");

}  // namespace dephase
