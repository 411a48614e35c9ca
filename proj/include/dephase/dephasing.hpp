#pragma once

#include <cstdint>

#include "dephase/fidelity_curve.hpp"
#include "dephase/initial_states.hpp"

namespace dephase {

// Samples per reduction chunk. Partial sums are formed per chunk in index
// order and combined in chunk order, independent of the worker count.
inline constexpr std::size_t kPhaseChunk = 1024;

// Dephasing-representation estimate of the fidelity amplitude,
//   O_DR(t) = sum_j w_j exp(i dS_j(t) / hbar) / sum_j w_j,
// where dS_j(t) is the action difference along the unperturbed orbit of
// sample j. Sample sets are normalized to unit weight, so the division only
// removes rounding in the weight sum and makes O_DR(0) = 1 exactly.
// Phases are accumulated incrementally (O(count * steps) work). Standard
// errors are zero when the sample set is a quadrature.
FidelityCurve dr_curve(const MapSpec& spec, const SampleSet& samples, std::int64_t steps, unsigned workers = 1);

// True iff curve b is the complex conjugate of curve a at every step to
// within tol. Intended for a pair computed with +eps and -eps on the same
// samples. Throws InvalidInput when the curves are not such a pair.
bool dr_conjugation_check(const FidelityCurve& a, const FidelityCurve& b, double tol = 1e-15);

}  // namespace dephase
