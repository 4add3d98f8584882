#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "dscm/trace.hpp"

namespace testutil {

using dscm::cplx;
using dscm::SampleTrace;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Complex exponential tone.
inline SampleTrace tone(std::size_t len, double rate, double freq, double phase = 0.0,
                        double amp = 1.0) {
    SampleTrace t;
    t.sample_rate_hz = rate;
    t.samples.resize(len);
    for (std::size_t n = 0; n < len; ++n) {
        const double a = kTwoPi * freq * static_cast<double>(n) / rate + phase;
        t.samples[n] = amp * cplx(std::cos(a), std::sin(a));
    }
    return t;
}

inline double max_abs_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double rel_error(const std::vector<cplx>& got, const std::vector<cplx>& want) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        num += std::norm(got[i] - want[i]);
        den += std::norm(want[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// Energy ratio of (got - want) to want, in dB.
inline double residual_db(const std::vector<cplx>& got, const std::vector<cplx>& want) {
    const double r = rel_error(got, want);
    return 20.0 * std::log10(std::max(r, 1e-300));
}

} // namespace testutil
