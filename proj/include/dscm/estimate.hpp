#pragma once

#include <limits>
#include <span>
#include <vector>

#include "dscm/tfit.hpp"
#include "dscm/trace.hpp"

// Far-end estimation of transmitter and receiver IQ skew and power imbalance
// from received training slots, plus Gram-Schmidt orthogonalization for
// receiver quadrature error.
//
// All timing detectors are spectral correlators over a window of bins around
// each tone. For a real tributary the correlator pairs each bin with its
// conjugate-image bin, so its argument is twice the tone phase at the window
// reference; common phase (LO offset, phase noise, channel response) cancels
// in the differences the estimators take. For complex slot traces the two
// tone windows are correlated against each other, which cancels the common
// phase within a slot; interleaving the tone roles across the two slots then
// cancels the channel's phase-frequency response as well.
namespace dscm {

enum class Tributary { in_phase, quadrature, complex_trace };

struct GodardConfig {
    std::size_t fft_len = 4096;    // samples per slot at 2 samples/symbol
    int n_avg_bins = 32;           // window half-width: 2n bins per tone
    double tone_f1_hz = 2e9;       // signed baseband tone frequencies
    double tone_f2_hz = 4e9;
    enum class Window { hann, rectangular } window = Window::hann;
    double min_tone_snr_db = 10.0;

    std::size_t peak_search_bins() const { return fft_len / 32; }
    void validate() const {
        require_power_of_two(fft_len, "GodardConfig.fft_len");
        if (n_avg_bins < 1 || static_cast<std::size_t>(n_avg_bins) > fft_len / 16)
            throw ConfigError("GodardConfig: need 1 <= n_avg_bins <= fft_len/16");
        if (tone_f1_hz == 0.0 || tone_f2_hz == 0.0 || (tone_f1_hz < 0) != (tone_f2_hz < 0))
            throw ConfigError("GodardConfig: tone frequencies must be nonzero with equal sign");
    }

    /// Config for a leaf that selected the subcarrier at plan.sc_center_hz
    /// (sc_sign=+1) or its mirror (-1).
    static GodardConfig from_plan(const TfitPlan& plan, int sc_sign = +1) {
        GodardConfig cfg;
        cfg.fft_len = static_cast<std::size_t>(plan.slot_len_symbols) * 2;
        cfg.tone_f1_hz = sc_sign * plan.tone_f1_hz;
        cfg.tone_f2_hz = sc_sign * plan.tone_f2_hz;
        return cfg;
    }
};

struct TimingEstimate {
    double tau_s = 0.0;
    double tone_hz = 0.0;  // measured tone frequency (signed)
    SlotId slot = SlotId::t1;
    Tributary tributary = Tributary::complex_trace;
    double tone_snr_db = std::numeric_limits<double>::infinity();
};

/// One block's two active slots for one polarization (t1/t2 on X, t3/t4 on Y).
struct SlotPair {
    SampleTrace first;
    SampleTrace second;
};

/// Timing phase of one tone from the conjugate-image correlator:
/// tau = arg[ sum_W S(k) conj(S(mirror(k))) ] / (2*pi*2*f_measured).
/// The spectrum must contain both tone images (i.e. come from a real
/// tributary, Hann-windowed via slot_spectrum).
TimingEstimate godard_tau(const Spectrum& spec, double tone_hz, const GodardConfig& cfg);

/// Windowed slot DFT used by the detectors.
Spectrum slot_spectrum(const SampleTrace& slot, GodardConfig::Window window);

// --- Receiver-side estimation (raw received slots) ---

/// Q-minus-I timing difference of same-frequency tones, averaged over both
/// tones, both slots and all blocks.
TimingEstimate estimate_rx_skew(std::span<const SlotPair> blocks, const GodardConfig& cfg);

/// Q/I tone power ratio in dB, averaged (in dB) over tones, slots, blocks.
double estimate_rx_imbalance_db(std::span<const SlotPair> blocks, const GodardConfig& cfg);

// --- Transmitter-side estimation (after receiver compensation) ---

struct TxSkewEstimate {
    double tau_s = 0.0;
    // Per-slot intermediates; under a dispersive channel they split by the
    // group-delay difference between the tones while the mean stays put.
    double tau_slot_first_s = 0.0;
    double tau_slot_second_s = 0.0;
    double tone_snr_db = std::numeric_limits<double>::infinity();
};

/// Cross-tone phase difference interleaved across the two slots. sc_center_hz
/// is the signed center of the selected subcarrier; the skew phase scales
/// with the absolute tone frequencies |fc|+f1 and |fc|+f2. Unambiguous range
/// is +-1/(2*(2|fc|+f1+f2)).
TxSkewEstimate estimate_tx_skew(std::span<const SlotPair> blocks, const GodardConfig& cfg,
                                double sc_center_hz);

/// Cross-slot power ratio of same-frequency tones, in dB.
double estimate_tx_imbalance_db(std::span<const SlotPair> blocks, const GodardConfig& cfg);

/// Gram-Schmidt orthogonalization: output tributaries are decorrelated and
/// the Q tributary is rescaled to its input power.
SampleTrace gsop(const SampleTrace& trace);

// --- Whole-capture orchestration ---

struct RxSkewSample {
    int block = 0;
    SlotId slot = SlotId::t1;
    double tone_hz = 0.0;
    double tau_s = 0.0;
    double tone_snr_db = 0.0;
};
struct RxImbalanceSample {
    int block = 0;
    SlotId slot = SlotId::t1;
    double tone_hz = 0.0;
    double ratio_db = 0.0;
};
struct TxSkewSample {
    int block = 0;
    double tau_slot_first_s = 0.0;
    double tau_slot_second_s = 0.0;
    double tau_s = 0.0;
};
struct TxImbalanceSample {
    int block = 0;
    double f1_ratio_db = 0.0;
    double f2_ratio_db = 0.0;
};

struct PolarizationReport {
    double rx_skew_s = 0.0;
    double rx_imbalance_db = 0.0;
    double tx_skew_s = 0.0;
    double tx_imbalance_db = 0.0;
    double tx_skew_slot_first_s = 0.0;
    double tx_skew_slot_second_s = 0.0;
    double min_tone_snr_db = std::numeric_limits<double>::infinity();
    std::vector<RxSkewSample> rx_skew_samples;
    std::vector<RxImbalanceSample> rx_imbalance_samples;
    std::vector<TxSkewSample> tx_skew_samples;
    std::vector<TxImbalanceSample> tx_imbalance_samples;
};

/// All estimator outputs for one leaf capture.
struct EstimateReport {
    PolarizationReport x;
    PolarizationReport y;
    int n_blocks_used = 0;
    double baud_rate_hz = 0.0;
    double sc_center_hz = 0.0;
};

/// Slice the detected frame into per-block slot pairs for one polarization.
/// pol_slot0 is the first active slot index for that polarization (0 for X,
/// 2 for Y).
std::vector<SlotPair> slice_slot_pairs(const SampleTrace& capture, std::size_t frame_offset,
                                       const GodardConfig& cfg, int n_blocks, int pol_slot0);

/// Full leaf-side estimation: receiver skew/imbalance from the raw capture,
/// receiver compensation (including GSOP), then transmitter skew/imbalance,
/// independently per polarization. sc_center_hz is signed.
EstimateReport estimate_leaf(const DualPolFrame& capture, std::size_t frame_offset,
                             const TfitPlan& plan, const GodardConfig& cfg, double sc_center_hz);

} // namespace dscm
