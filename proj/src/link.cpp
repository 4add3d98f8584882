#include "dscm/link.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dscm/dsp.hpp"
#include "dscm/kernels.hpp"

namespace dscm {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kLaserSubstream = 0x1a5e7;

// Wiener phase track shared by every stage that models the same laser.
std::vector<double> laser_phase_track(std::size_t len, double sample_rate_hz,
                                      const ChannelConfig& cfg) {
    std::vector<double> phi(len, 0.0);
    if (cfg.linewidth_hz <= 0.0) return phi;
    const double sigma = std::sqrt(kTwoPi * cfg.linewidth_hz / sample_rate_hz);
    const RngStream rng = cfg.seed.derive(kLaserSubstream);
    double acc = 0.0;
    for (std::size_t n = 1; n < len; ++n) {
        acc += sigma * rng.gaussian(n);
        phi[n] = acc;
    }
    return phi;
}

} // namespace

double SubcarrierPlan::occupied_band_hz() const {
    double lo = 0.0, hi = 0.0;
    for (double c : centers_hz) {
        lo = std::min(lo, c - sc_band_hz() / 2.0);
        hi = std::max(hi, c + sc_band_hz() / 2.0);
    }
    return hi - lo;
}

int SubcarrierPlan::mirror_index(int sc_index) const {
    const double target = -centers_hz.at(static_cast<std::size_t>(sc_index));
    for (std::size_t i = 0; i < centers_hz.size(); ++i)
        if (std::abs(centers_hz[i] - target) < 1.0) return static_cast<int>(i);
    throw ConfigError("SubcarrierPlan: no mirror subcarrier");
}

void SubcarrierPlan::validate() const {
    if (n_sc < 1 || static_cast<std::size_t>(n_sc) != centers_hz.size())
        throw ConfigError("SubcarrierPlan: centers must match n_sc");
    if (!(per_sc_baud_hz > 0.0)) throw ConfigError("SubcarrierPlan: baud must be positive");
    if (rrc_rolloff < 0.0 || rrc_rolloff >= 1.0)
        throw ConfigError("SubcarrierPlan: roll-off must be in [0, 1)");
    for (int i = 0; i < n_sc; ++i) mirror_index(i);  // symmetric pairs required
    auto sorted = centers_hz;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i] - sorted[i - 1] < sc_band_hz() - 1.0)
            throw ConfigError("SubcarrierPlan: adjacent subcarrier bands overlap");
}

SampleTrace mux_subcarriers(const std::vector<SampleTrace>& baseband_signals,
                            const SubcarrierPlan& plan) {
    plan.validate();
    if (baseband_signals.empty()) throw ConfigError("mux_subcarriers: no inputs");
    if (baseband_signals.size() > plan.centers_hz.size())
        throw ConfigError("mux_subcarriers: more signals than subcarrier centers");
    const auto& first = baseband_signals.front();
    first.validate();
    for (const auto& s : baseband_signals) {
        s.validate();
        if (s.size() != first.size() || s.sample_rate_hz != first.sample_rate_hz)
            throw ConfigError("mux_subcarriers: inputs must share length and rate");
    }
    for (std::size_t i = 0; i < baseband_signals.size(); ++i) {
        const double edge = std::abs(plan.centers_hz[i]) + plan.sc_band_hz() / 2.0;
        if (edge > first.sample_rate_hz / 2.0)
            throw SpectralFitError("mux_subcarriers: composite band exceeds Nyquist");
    }

    SampleTrace out = SampleTrace::zeros(first.size(), first.sample_rate_hz);
    for (std::size_t i = 0; i < baseband_signals.size(); ++i) {
        SampleTrace shifted = baseband_signals[i];
        kernel::phase_ramp(shifted.samples, kTwoPi * plan.centers_hz[i] / first.sample_rate_hz, 0.0);
        for (std::size_t n = 0; n < out.size(); ++n) out.samples[n] += shifted.samples[n];
    }
    return out;
}

SampleTrace apply_laser(const SampleTrace& trace, const ChannelConfig& cfg) {
    trace.validate();
    cfg.validate();
    SampleTrace out = trace;
    if (cfg.linewidth_hz > 0.0) {
        auto phi = laser_phase_track(trace.size(), trace.sample_rate_hz, cfg);
        kernel::phase_apply(out.samples, phi);
    }
    if (cfg.freq_offset_hz != 0.0)
        kernel::phase_ramp(out.samples, kTwoPi * cfg.freq_offset_hz / trace.sample_rate_hz, 0.0);
    return out;
}

double osnr_noise_variance(double signal_power, double sample_rate_hz, const ChannelConfig& cfg) {
    // Noise PSD referred to the 12.5 GHz reference band, spread white over
    // the whole simulation rate.
    const double noise_in_ref = signal_power * power_from_db(-cfg.osnr_db);
    return noise_in_ref * sample_rate_hz / kOsnrReferenceBandHz;
}

RngStream osnr_noise_stream(const ChannelConfig& cfg, std::uint64_t noise_substream) {
    return cfg.seed.derive(0x05e7 + noise_substream);
}

SampleTrace add_osnr_noise(const SampleTrace& trace, const ChannelConfig& cfg,
                           double signal_band_hz, std::size_t active_begin,
                           std::size_t active_end, std::uint64_t noise_substream) {
    trace.validate();
    cfg.validate();
    if (!(signal_band_hz > 0.0)) throw ConfigError("add_osnr_noise: signal band must be positive");
    if (std::isinf(cfg.osnr_db)) return trace;
    if (active_end == 0) active_end = trace.size();
    if (active_begin >= active_end || active_end > trace.size())
        throw ConfigError("add_osnr_noise: bad active span");

    const double p_sig =
        mean_power(std::span<const cplx>(trace.samples).subspan(active_begin, active_end - active_begin));
    const double variance = osnr_noise_variance(p_sig, trace.sample_rate_hz, cfg);

    SampleTrace out = trace;
    kernel::add_gaussian(out.samples, variance, osnr_noise_stream(cfg, noise_substream), 0);
    return out;
}

namespace {

SampleTrace apply_cd_signed(const SampleTrace& trace, const ChannelConfig& cfg, double sign) {
    trace.validate();
    cfg.validate();
    if (!cfg.enable_cd || cfg.fiber_km == 0.0) return trace;
    // D [ps/nm/km] -> s/m^2, L [km] -> m.
    const double d_si = cfg.dispersion_ps_nm_km * 1e-6;
    const double length_m = cfg.fiber_km * 1e3;
    const double coef =
        sign * -std::numbers::pi * kCarrierWavelengthM * kCarrierWavelengthM * d_si * length_m /
        kSpeedOfLightMs;

    Spectrum spec = forward_transform(trace);
    const std::size_t n = spec.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double f = spec.frequency_hz(k);
        const double a = coef * f * f;
        spec.bins[k] *= cplx(std::cos(a), std::sin(a));
    }
    return inverse_transform(spec);
}

} // namespace

SampleTrace apply_cd(const SampleTrace& trace, const ChannelConfig& cfg) {
    return apply_cd_signed(trace, cfg, +1.0);
}

SampleTrace apply_cd_inverse(const SampleTrace& trace, const ChannelConfig& cfg) {
    return apply_cd_signed(trace, cfg, -1.0);
}

double rrc_response(double freq_hz, double baud_hz, double rolloff) {
    const double f = std::abs(freq_hz);
    const double f1 = baud_hz * (1.0 - rolloff) / 2.0;
    const double f2 = baud_hz * (1.0 + rolloff) / 2.0;
    if (f <= f1) return 1.0;
    if (f >= f2) return 0.0;
    // Square root of the raised-cosine taper: sqrt(0.5*(1+cos(x))) = cos(x/2).
    return std::cos(std::numbers::pi / 2.0 * (f - f1) / (f2 - f1));
}

bool rotation_insufficient(const ChannelConfig& cfg, double slot_duration_s, int n_blocks) {
    const double turns = std::abs(cfg.freq_offset_hz) * slot_duration_s * n_blocks;
    return turns < 4.0;
}

SampleTrace select_subcarrier(const SampleTrace& trace, const SubcarrierPlan& plan, int sc_index,
                              const ChannelConfig& cfg) {
    trace.validate();
    plan.validate();
    cfg.validate();
    if (sc_index < 0 || sc_index >= plan.n_sc)
        throw ConfigError("select_subcarrier: invalid subcarrier index");
    require_power_of_two(trace.size(), "select_subcarrier");

    const double center = plan.centers_hz[static_cast<std::size_t>(sc_index)];
    const double target_rate = 2.0 * plan.per_sc_baud_hz;
    if (target_rate > trace.sample_rate_hz)
        throw ConfigError("select_subcarrier: capture rate below 2 samples/symbol");

    // LO mixing: downshift by the subcarrier center plus the offset error and
    // the laser phase noise.
    SampleTrace mixed = trace;
    if (cfg.linewidth_hz > 0.0) {
        auto phi = laser_phase_track(trace.size(), trace.sample_rate_hz, cfg);
        for (auto& p : phi) p = -p;
        kernel::phase_apply(mixed.samples, phi);
    }
    kernel::phase_ramp(mixed.samples, -kTwoPi * (center + cfg.freq_offset_hz) / trace.sample_rate_hz,
                       0.0);

    // Matched root-raised-cosine band filter, then exact spectral decimation.
    Spectrum spec = forward_transform(mixed);
    const std::size_t n = spec.size();
    std::vector<double> gain(n);
    for (std::size_t k = 0; k < n; ++k)
        gain[k] = rrc_response(spec.frequency_hz(k), plan.per_sc_baud_hz, plan.rrc_rolloff);
    kernel::gain_apply(spec.bins, gain);

    const double m_real = static_cast<double>(n) * target_rate / trace.sample_rate_hz;
    const auto m = static_cast<std::size_t>(std::llround(m_real));
    if (std::abs(m_real - static_cast<double>(m)) > 1e-6 || !is_power_of_two(m))
        throw ConfigError("select_subcarrier: capture rate must be a power-of-two divisor of the trace rate");

    Spectrum out;
    out.bins.assign(m, cplx{});
    out.bin_spacing_hz = target_rate / static_cast<double>(m);
    const double scale = static_cast<double>(m) / static_cast<double>(n);
    for (std::size_t k = 0; k < m / 2; ++k) out.bins[k] = spec.bins[k] * scale;
    for (std::size_t k = 1; k <= m / 2; ++k) out.bins[m - k] = spec.bins[n - k] * scale;
    return inverse_transform(out);
}

} // namespace dscm
