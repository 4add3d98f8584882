#pragma once

#include <span>
#include <vector>

#include "dscm/rng.hpp"
#include "dscm/trace.hpp"

// Foundational signal primitives: spectral transforms, exact band-limited
// delay, rate conversion, seeded noise. All operations are pure functions of
// their inputs and safe to run concurrently.
namespace dscm {

/// DFT of a power-of-two-length trace. S(k) = sum_n x_n exp(-j*2*pi*k*n/N).
Spectrum forward_transform(const SampleTrace& trace);

/// Inverse of forward_transform (includes the 1/N scale).
SampleTrace inverse_transform(const Spectrum& spec);

/// Exact band-limited delay: Y(f) = X(f) * exp(-j*2*pi*f*delay), i.e. the
/// output is x(t - delay) with circular block semantics. |delay| must be
/// less than a quarter of the trace duration.
SampleTrace fractional_delay(const SampleTrace& trace, double delay_s);

/// Delay applied to a real-valued tributary; keeps the result real.
std::vector<double> fractional_delay_real(std::span<const double> x, double sample_rate_hz,
                                          double delay_s);

/// Band-limited rate conversion by spectral resizing. The implied output
/// length must itself be a power of two; content beyond the new Nyquist
/// raises SpectralFitError.
SampleTrace resample(const SampleTrace& trace, double target_rate_hz);

/// i.i.d. circular complex Gaussian samples with total variance `variance`.
SampleTrace gaussian_noise(std::size_t len, double sample_rate_hz, double variance,
                           const RngStream& rng);

/// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

/// Tone power measured from a Hann-windowed periodogram, summed over
/// +-half_width_bins around the bin nearest `freq_hz`. Normalized so a unit
/// amplitude complex exponential reports power 1.
double windowed_tone_power(const SampleTrace& trace, double freq_hz, std::size_t half_width_bins);

inline double wrap_pm_pi(double a) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    a = std::fmod(a, two_pi);
    if (a > two_pi / 2) a -= two_pi;
    if (a <= -two_pi / 2) a += two_pi;
    return a;
}

inline double db_from_power(double p) { return 10.0 * std::log10(p); }
inline double power_from_db(double db) { return std::pow(10.0, db / 10.0); }

} // namespace dscm
