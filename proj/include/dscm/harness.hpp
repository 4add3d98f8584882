#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dscm/estimate.hpp"
#include "dscm/impair.hpp"
#include "dscm/link.hpp"
#include "dscm/payload.hpp"
#include "dscm/tfit.hpp"

// Experiment front end: full-chain trials, parameter sweeps, frame
// detection, CSV emission and plotting.
namespace dscm {

enum class SweepAxis { rx_skew, rx_imbalance, tx_skew, tx_imbalance };

SweepAxis axis_from_string(const std::string& name);
const char* axis_name(SweepAxis axis);
const char* axis_unit(SweepAxis axis);  // "ps" or "dB"

struct SweepGrid {
    SweepAxis axis = SweepAxis::rx_skew;
    double start = -15.0;
    double stop = 15.0;
    double step = 2.5;

    std::vector<double> values() const;
    void validate() const;
};

struct ExperimentConfig {
    TfitPlan tfit;  // sc_center_hz is taken from the subcarrier plan per pair
    SubcarrierPlan subcarriers;
    ChannelConfig channel;
    ImpairmentSet presets;  // companion impairments; the swept axis overrides its slot
    SweepGrid grid;
    int trials = 10;
    std::uint64_t seed = 1;
    int sc_index = 0;      // leaf used for estimation sweeps
    int godard_bins = 32;
    std::size_t payload_symbols = 65536;  // per polarization per subcarrier (BER sweeps)
    std::vector<int> ber_sc_indices = {0, 1};
    std::string out_csv = "sweep.csv";
    // Use the construction-known frame offset instead of envelope detection
    // (diagnostics under dispersive channels).
    bool use_known_offset = false;

    void validate() const;
};

/// Per-trial estimation outcome; errors are estimate minus preset, exactly.
struct SweepRow {
    double preset_value = 0.0;
    int trial = 0;
    std::uint64_t seed = 0;
    // presets actually applied for this row (after the axis override)
    double preset_rx_skew_ps = 0.0, preset_rx_imb_db = 0.0;
    double preset_tx_skew_ps = 0.0, preset_tx_imb_db = 0.0;
    // estimates and errors per polarization
    double est_rx_skew_x_ps = 0.0, est_rx_skew_y_ps = 0.0;
    double est_rx_imb_x_db = 0.0, est_rx_imb_y_db = 0.0;
    double est_tx_skew_x_ps = 0.0, est_tx_skew_y_ps = 0.0;
    double est_tx_imb_x_db = 0.0, est_tx_imb_y_db = 0.0;
    double err_rx_skew_x_ps = 0.0, err_rx_skew_y_ps = 0.0;
    double err_rx_imb_x_db = 0.0, err_rx_imb_y_db = 0.0;
    double err_tx_skew_x_ps = 0.0, err_tx_skew_y_ps = 0.0;
    double err_tx_imb_x_db = 0.0, err_tx_imb_y_db = 0.0;
    double tone_snr_x_db = 0.0, tone_snr_y_db = 0.0;
    std::string status = "ok";
};

struct BerSweepRow {
    double preset_value = 0.0;
    int sc_index = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    std::uint64_t bits_total = 0;
    std::uint64_t bit_errors_no_comp = 0;
    std::uint64_t bit_errors_comp = 0;
    double ber_no_comp = 0.0;
    double ber_comp = 0.0;
    std::string status = "ok";
};

/// Locate the training frame in a 2-samples/symbol capture by the sliding
/// polarization power signature of the slot pattern. Returns the sample
/// offset of slot t1 of the first block. Raises DetectionError when no
/// frame-like signature stands out.
std::size_t frame_detect(const DualPolFrame& capture, const TfitPlan& plan);

/// One full-chain trial (frame build, impairments, channel, selection,
/// detection, estimation). Exposed for tests; sweeps call it per grid point.
struct TrialOutput {
    EstimateReport report;
    std::size_t frame_offset = 0;
    double tone_snr_x_db = 0.0;
    double tone_snr_y_db = 0.0;
};
TrialOutput run_estimation_trial(const ExperimentConfig& cfg, const ImpairmentSet& impairments,
                                 std::uint64_t point_index, int trial);

std::vector<SweepRow> run_estimation_sweep(const ExperimentConfig& cfg);
std::vector<BerSweepRow> run_ber_sweep(const ExperimentConfig& cfg);

/// Companion-impairment presets of the four coexistence panels (a..d).
ExperimentConfig coexist_config(const ExperimentConfig& base, char panel);

void write_sweep_csv(const std::string& path, SweepAxis axis, const std::vector<SweepRow>& rows);
void write_ber_csv(const std::string& path, SweepAxis axis, const std::vector<BerSweepRow>& rows);

/// Render SVG panels from a sweep CSV; returns the written file paths.
std::vector<std::string> emit_plots(const std::string& csv_path, const std::string& out_dir);

// Plain-text key=value configuration (# comments). Unknown keys fail.
ExperimentConfig load_config_file(const std::string& path);
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

} // namespace dscm
