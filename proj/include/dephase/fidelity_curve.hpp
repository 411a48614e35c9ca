#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dephase/dynamics.hpp"

namespace dephase {

enum class Method { dr, exact, dense };

std::string to_string(Method m);
Method parse_method(const std::string& name);

// Fidelity amplitude O(t) and fidelity M(t) = |O(t)|^2 at integer kicks
// t = 0..steps(), with component-wise Monte Carlo standard errors.
struct FidelityCurve {
    Method method = Method::dr;
    MapSpec spec{0.0, 0.0, 2};
    std::string state;
    std::int64_t sample_count = 0;
    std::uint64_t seed = 0;

    std::vector<double> amp_re;
    std::vector<double> amp_im;
    std::vector<double> fidelity;
    std::vector<double> stderr_re;
    std::vector<double> stderr_im;

    std::size_t size() const noexcept { return fidelity.size(); }
    std::int64_t steps() const noexcept { return static_cast<std::int64_t>(size()) - 1; }
    std::complex<double> amplitude(std::size_t t) const { return {amp_re.at(t), amp_im.at(t)}; }

    // First-order propagated standard error of M(t).
    double fidelity_stderr(std::size_t t) const;

    // Appends one step; M is computed as |O|^2.
    void push(std::complex<double> amplitude, double se_re = 0.0, double se_im = 0.0);
};

}  // namespace dephase
