#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "dscm/rng.hpp"
#include "dscm/trace.hpp"

// Subcarrier multiplexing, the optical channel (frequency offset, laser
// phase noise, OSNR-calibrated noise, optional chromatic dispersion) and
// LO-based subcarrier selection at the leaf.
namespace dscm {

inline constexpr double kOsnrReferenceBandHz = 12.5e9;
inline constexpr double kCarrierWavelengthM = 1550.12e-9;
inline constexpr double kSpeedOfLightMs = 299792458.0;

struct SubcarrierPlan {
    int n_sc = 4;
    double per_sc_baud_hz = 8e9;
    // Symmetric +- pairs; index 0 is the highest positive center. The default
    // grid is the tightest non-overlapping spacing for 8 GBd at roll-off 0.1.
    std::vector<double> centers_hz = {13.2e9, 4.4e9, -4.4e9, -13.2e9};
    double rrc_rolloff = 0.1;

    double sc_band_hz() const { return per_sc_baud_hz * (1.0 + rrc_rolloff); }
    double occupied_band_hz() const;
    int mirror_index(int sc_index) const;
    void validate() const;
};

struct ChannelConfig {
    double freq_offset_hz = 100e6;  // net LO offset seen at the leaf
    double linewidth_hz = 1e5;      // combined laser linewidth
    double osnr_db = std::numeric_limits<double>::infinity();
    double fiber_km = 0.0;
    double dispersion_ps_nm_km = 16.8;
    bool enable_cd = false;
    RngStream seed;

    void validate() const {
        if (fiber_km < 0.0) throw ConfigError("ChannelConfig: fiber length must be >= 0");
        if (std::isnan(osnr_db)) throw ConfigError("ChannelConfig: OSNR must not be NaN");
    }
};

/// Sum of per-subcarrier basebands shifted to their centers:
/// out = sum_i s_i(t) * exp(j*2*pi*centers[i]*t).
SampleTrace mux_subcarriers(const std::vector<SampleTrace>& baseband_signals,
                            const SubcarrierPlan& plan);

/// Multiplies by exp(j*(2*pi*freq_offset*t + phi(t))) where phi is a Wiener
/// process with increment variance 2*pi*linewidth*T_sample.
SampleTrace apply_laser(const SampleTrace& trace, const ChannelConfig& cfg);

/// Adds circular Gaussian noise calibrated so the in-band SNR satisfies
/// SNR(dB) = OSNR(dB) + 10*log10(12.5 GHz / signal_band_hz). Signal power is
/// measured over [active_begin, active_end) (defaults to the whole trace);
/// noise covers the whole trace. Infinite OSNR is the identity.
/// noise_substream picks an independent stream (e.g. one per polarization).
SampleTrace add_osnr_noise(const SampleTrace& trace, const ChannelConfig& cfg,
                           double signal_band_hz, std::size_t active_begin = 0,
                           std::size_t active_end = 0, std::uint64_t noise_substream = 0);

/// White-noise variance implied by the OSNR bookkeeping for a given signal
/// power at the trace sample rate, and the stream add_osnr_noise draws from.
double osnr_noise_variance(double signal_power, double sample_rate_hz, const ChannelConfig& cfg);
RngStream osnr_noise_stream(const ChannelConfig& cfg, std::uint64_t noise_substream);

/// All-pass chromatic dispersion H(f) = exp(-j*pi*lambda0^2*D*L*f^2/c).
SampleTrace apply_cd(const SampleTrace& trace, const ChannelConfig& cfg);

/// Inverse of apply_cd (genie receiver-side equalization).
SampleTrace apply_cd_inverse(const SampleTrace& trace, const ChannelConfig& cfg);

/// Leaf front end: multiplies by exp(-j*(2*pi*(center+freq_offset)*t + phi)),
/// applies the root-raised-cosine band filter of the subcarrier and resamples
/// to 2 samples/symbol. The same ChannelConfig yields the same laser phase
/// track, so both polarizations see one LO.
SampleTrace select_subcarrier(const SampleTrace& trace, const SubcarrierPlan& plan, int sc_index,
                              const ChannelConfig& cfg);

/// Root-raised-cosine amplitude response at signed frequency f for the given
/// symbol rate and roll-off (unit gain in the flat region).
double rrc_response(double freq_hz, double baud_hz, double rolloff);

/// True when the configured frequency offset rotates the carrier fewer than
/// four full turns over the averaging span, which degrades the power-ratio
/// estimators; the harness warns on it.
bool rotation_insufficient(const ChannelConfig& cfg, double slot_duration_s, int n_blocks);

} // namespace dscm
