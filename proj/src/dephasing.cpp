#include "dephase/dephasing.hpp"

#include <cmath>

#include "dephase/errors.hpp"
#include "dephase/parallel.hpp"

namespace dephase {

std::string to_string(Method m) {
    switch (m) {
        case Method::dr: return "dr";
        case Method::exact: return "exact";
        case Method::dense: return "dense";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    if (name == "dr") return Method::dr;
    if (name == "exact") return Method::exact;
    if (name == "dense") return Method::dense;
    throw InvalidInput("unknown method '" + name + "'");
}

double FidelityCurve::fidelity_stderr(std::size_t t) const {
    const double re = amp_re.at(t), im = amp_im.at(t);
    const double sr = stderr_re.at(t), si = stderr_im.at(t);
    return 2.0 * std::sqrt(re * re * sr * sr + im * im * si * si);
}

void FidelityCurve::push(std::complex<double> amplitude, double se_re, double se_im) {
    amp_re.push_back(amplitude.real());
    amp_im.push_back(amplitude.imag());
    fidelity.push_back(std::norm(amplitude));
    stderr_re.push_back(se_re);
    stderr_im.push_back(se_im);
}

namespace {

// Per-step weighted moments of cos and sin of the phase.
struct Moments {
    std::vector<double> w, wc, ws, wcc, wss;

    explicit Moments(std::size_t n) : w(n), wc(n), ws(n), wcc(n), wss(n) {}

    void add(const Moments& o) {
        for (std::size_t t = 0; t < w.size(); ++t) {
            w[t] += o.w[t];
            wc[t] += o.wc[t];
            ws[t] += o.ws[t];
            wcc[t] += o.wcc[t];
            wss[t] += o.wss[t];
        }
    }
};

}  // namespace

FidelityCurve dr_curve(const MapSpec& spec, const SampleSet& set, std::int64_t steps, unsigned workers) {
    if (steps < 0) throw InvalidInput("dr_curve: step count must be >= 0, got " + std::to_string(steps));
    if (set.samples.empty()) throw InvalidInput("dr_curve: sample set is empty");

    const auto& samples = set.samples;
    const std::size_t len = static_cast<std::size_t>(steps) + 1;
    // dS / hbar = (eps / 4 pi^2) * sum cos(2 pi q_m) / hbar
    const double action_scale = spec.epsilon() / kFourPiSq;
    const double inv_hbar = 1.0 / spec.hbar();

    const std::size_t chunks = (samples.size() + kPhaseChunk - 1) / kPhaseChunk;
    std::vector<Moments> partial(chunks, Moments(len));

    for_each_chunk(chunks, workers, [&](std::size_t c) {
        Moments& m = partial[c];
        const std::size_t end = std::min(samples.size(), (c + 1) * kPhaseChunk);
        for (std::size_t j = c * kPhaseChunk; j < end; ++j) {
            const double w = samples[j].weight;
            PhasePoint x = samples[j].point;
            double cos_sum = 0.0;
            for (std::size_t t = 0;; ++t) {
                const double phase = action_scale * cos_sum * inv_hbar;
                const double cs = std::cos(phase);
                const double sn = std::sin(phase);
                m.w[t] += w;
                m.wc[t] += w * cs;
                m.ws[t] += w * sn;
                m.wcc[t] += w * cs * cs;
                m.wss[t] += w * sn * sn;
                if (t + 1 == len) break;
                cos_sum += std::cos(kTwoPi * x.q);
                x = step(spec, x, false);
            }
        }
    });

    Moments total(len);
    for (const auto& m : partial) total.add(m);

    FidelityCurve curve;
    curve.method = Method::dr;
    curve.spec = spec;
    curve.state = set.descriptor;
    curve.sample_count = static_cast<std::int64_t>(samples.size());
    curve.seed = set.seed;

    const double n = static_cast<double>(samples.size());
    for (std::size_t t = 0; t < len; ++t) {
        double se_re = 0.0, se_im = 0.0;
        if (!set.quadrature && samples.size() > 1 && total.w[t] != 0.0) {
            // Weighted variance of each phase component, Bessel-corrected.
            const double mc = total.wc[t] / total.w[t];
            const double ms = total.ws[t] / total.w[t];
            const double vc = std::max(0.0, total.wcc[t] / total.w[t] - mc * mc) * n / (n - 1.0);
            const double vs = std::max(0.0, total.wss[t] / total.w[t] - ms * ms) * n / (n - 1.0);
            se_re = std::sqrt(vc / n);
            se_im = std::sqrt(vs / n);
        }
        if (total.w[t] == 0.0) throw InvalidInput("dr_curve: sample weights sum to zero");
        curve.push({total.wc[t] / total.w[t], total.ws[t] / total.w[t]}, se_re, se_im);
    }
    return curve;
}

bool dr_conjugation_check(const FidelityCurve& a, const FidelityCurve& b, double tol) {
    if (a.size() != b.size()) throw InvalidInput("conjugation check: curves have different lengths");
    if (a.method != b.method || a.sample_count != b.sample_count || a.seed != b.seed || a.state != b.state ||
        a.spec.k() != b.spec.k() || a.spec.dim_n() != b.spec.dim_n() ||
        std::abs(a.spec.epsilon()) != std::abs(b.spec.epsilon()))
        throw InvalidInput("conjugation check: curves were not computed from the same samples and map");
    for (std::size_t t = 0; t < a.size(); ++t) {
        if (std::abs(a.amp_re[t] - b.amp_re[t]) > tol) return false;
        if (std::abs(a.amp_im[t] + b.amp_im[t]) > tol) return false;
    }
    return true;
}

}  // namespace dephase
