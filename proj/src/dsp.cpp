#include "dscm/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dscm/kernels.hpp"

namespace dscm {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Spectrum forward_transform(const SampleTrace& trace) {
    trace.validate();
    require_power_of_two(trace.size(), "forward_transform");
    Spectrum spec;
    spec.bins = trace.samples;
    spec.bin_spacing_hz = trace.sample_rate_hz / static_cast<double>(trace.size());
    kernel::fft(spec.bins, false);
    return spec;
}

SampleTrace inverse_transform(const Spectrum& spec) {
    require_power_of_two(spec.size(), "inverse_transform");
    SampleTrace out;
    out.samples = spec.bins;
    out.sample_rate_hz = spec.sample_rate_hz();
    kernel::fft(out.samples, true);
    return out;
}

namespace {

// Multiply spectrum bins by exp(-j*2*pi*f_k*delay) with signed bin
// frequencies. The Nyquist bin gets the real factor cos(2*pi*f_nyq*delay)
// so real inputs stay real.
void apply_delay_ramp(Spectrum& spec, double delay_s) {
    const std::size_t n = spec.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (n % 2 == 0 && k == n / 2) {
            const double f = spec.bin_spacing_hz * static_cast<double>(n) / 2.0;
            spec.bins[k] *= std::cos(kTwoPi * f * delay_s);
            continue;
        }
        const double f = spec.frequency_hz(k);
        const double a = -kTwoPi * f * delay_s;
        spec.bins[k] *= cplx(std::cos(a), std::sin(a));
    }
}

} // namespace

SampleTrace fractional_delay(const SampleTrace& trace, double delay_s) {
    trace.validate();
    require_power_of_two(trace.size(), "fractional_delay");
    if (std::abs(delay_s) >= trace.duration_s() / 4.0)
        throw ConfigError("fractional_delay: |delay| must be below a quarter of the trace duration");
    Spectrum spec = forward_transform(trace);
    apply_delay_ramp(spec, delay_s);
    return inverse_transform(spec);
}

std::vector<double> fractional_delay_real(std::span<const double> x, double sample_rate_hz,
                                          double delay_s) {
    SampleTrace t;
    t.sample_rate_hz = sample_rate_hz;
    t.samples.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) t.samples[i] = cplx(x[i], 0.0);
    SampleTrace d = fractional_delay(t, delay_s);
    return real_part(d.samples);
}

SampleTrace resample(const SampleTrace& trace, double target_rate_hz) {
    trace.validate();
    if (!(target_rate_hz > 0.0)) throw ConfigError("resample: target rate must be positive");
    if (target_rate_hz == trace.sample_rate_hz) return trace;
    require_power_of_two(trace.size(), "resample");

    const double ratio = target_rate_hz / trace.sample_rate_hz;
    const double m_real = static_cast<double>(trace.size()) * ratio;
    const auto m = static_cast<std::size_t>(std::llround(m_real));
    if (std::abs(m_real - static_cast<double>(m)) > 1e-6)
        throw ConfigError("resample: rate ratio does not yield an integral output length");
    require_power_of_two(m, "resample(output)");

    Spectrum spec = forward_transform(trace);
    const std::size_t n = spec.size();

    if (m < n) {
        // Downsampling: everything outside the new Nyquist must be (near) empty.
        double cut = 0.0, total = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double p = std::norm(spec.bins[k]);
            total += p;
            const std::size_t dist = std::min(k, n - k);
            if (dist > m / 2) cut += p;
        }
        if (total > 0.0 && cut / total > 1e-9)
            throw SpectralFitError("resample: signal band exceeds the target Nyquist");
    }

    Spectrum out;
    out.bins.assign(m, cplx{});
    out.bin_spacing_hz = target_rate_hz / static_cast<double>(m);
    const std::size_t half = std::min(n, m) / 2;
    const double scale = static_cast<double>(m) / static_cast<double>(n);
    for (std::size_t k = 0; k < half; ++k) out.bins[k] = spec.bins[k] * scale;
    for (std::size_t k = 1; k <= half; ++k) out.bins[m - k] = spec.bins[n - k] * scale;
    // Split the old Nyquist bin symmetrically when upsampling.
    if (m > n) {
        const cplx nyq = spec.bins[n / 2] * (0.5 * scale);
        out.bins[half] = nyq;
        out.bins[m - half] += nyq;
    }
    return inverse_transform(out);
}

SampleTrace gaussian_noise(std::size_t len, double sample_rate_hz, double variance,
                           const RngStream& rng) {
    if (variance < 0.0) throw ConfigError("gaussian_noise: variance must be >= 0");
    SampleTrace out = SampleTrace::zeros(len, sample_rate_hz);
    if (variance > 0.0) kernel::add_gaussian(out.samples, variance, rng, 0);
    return out;
}

std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n)));
    return w;
}

double windowed_tone_power(const SampleTrace& trace, double freq_hz, std::size_t half_width_bins) {
    trace.validate();
    require_power_of_two(trace.size(), "windowed_tone_power");
    const std::size_t n = trace.size();
    const auto w = hann_window(n);
    SampleTrace tapered = trace;
    double w2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        tapered.samples[i] *= w[i];
        w2 += w[i] * w[i];
    }
    Spectrum spec = forward_transform(tapered);
    const std::size_t center = spec.bin_of(freq_hz);
    double acc = 0.0;
    for (std::size_t d = 0; d <= half_width_bins; ++d) {
        acc += std::norm(spec.bins[(center + d) % n]);
        if (d > 0) acc += std::norm(spec.bins[(center + n - d) % n]);
    }
    // Incoherent window normalization: a unit tone integrates to N * sum(w^2).
    return acc / (static_cast<double>(n) * w2);
}

} // namespace dscm
