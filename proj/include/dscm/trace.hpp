#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dscm/errors.hpp"

namespace dscm {

using cplx = std::complex<double>;

/// Complex-valued sample sequence with a sample rate. The universal signal carrier.
struct SampleTrace {
    std::vector<cplx> samples;
    double sample_rate_hz = 0.0;

    SampleTrace() = default;
    SampleTrace(std::vector<cplx> s, double rate) : samples(std::move(s)), sample_rate_hz(rate) {}
    static SampleTrace zeros(std::size_t len, double rate) {
        return SampleTrace(std::vector<cplx>(len), rate);
    }

    std::size_t size() const { return samples.size(); }
    double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
    double sample_period_s() const { return 1.0 / sample_rate_hz; }

    void validate() const {
        if (samples.empty()) throw ConfigError("SampleTrace: length must be >= 1");
        if (!(sample_rate_hz > 0.0)) throw ConfigError("SampleTrace: sample rate must be positive");
    }
};

/// DFT of an N-sample trace. Bin k maps to frequency k * bin_spacing_hz modulo the
/// sample rate; bins above N/2 are negative frequencies.
struct Spectrum {
    std::vector<cplx> bins;
    double bin_spacing_hz = 0.0;

    std::size_t size() const { return bins.size(); }
    double sample_rate_hz() const { return bin_spacing_hz * static_cast<double>(bins.size()); }

    // Signed frequency of bin k.
    double frequency_hz(std::size_t k) const {
        const std::size_t n = bins.size();
        return (k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n)) *
               bin_spacing_hz;
    }

    // Bin index of a signed frequency, rounded to the nearest bin.
    std::size_t bin_of(double freq_hz) const {
        const auto n = static_cast<long long>(bins.size());
        long long k = static_cast<long long>(std::llround(freq_hz / bin_spacing_hz)) % n;
        if (k < 0) k += n;
        return static_cast<std::size_t>(k);
    }
};

/// Paired X/Y polarization traces of equal length and rate.
struct DualPolFrame {
    SampleTrace x;
    SampleTrace y;

    std::size_t size() const { return x.size(); }
    double sample_rate_hz() const { return x.sample_rate_hz; }

    void validate() const {
        x.validate();
        y.validate();
        if (x.size() != y.size() || x.sample_rate_hz != y.sample_rate_hz)
            throw ConfigError("DualPolFrame: polarizations must share length and rate");
    }
};

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline void require_power_of_two(std::size_t n, const char* who) {
    if (!is_power_of_two(n))
        throw ConfigError(std::string(who) + ": length must be a power of two, got " + std::to_string(n));
}

inline double mean_power(std::span<const cplx> x) {
    double acc = 0.0;
    for (const auto& v : x) acc += std::norm(v);
    return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

inline std::vector<double> real_part(std::span<const cplx> x) {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i].real();
    return r;
}

inline std::vector<double> imag_part(std::span<const cplx> x) {
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i].imag();
    return r;
}

inline std::vector<cplx> combine_iq(std::span<const double> re, std::span<const double> im) {
    std::vector<cplx> r(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) r[i] = cplx(re[i], im[i]);
    return r;
}

} // namespace dscm
