#include "dscm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dscm/compensate.hpp"
#include "dscm/dsp.hpp"
#include "dscm/report_json.hpp"

namespace dscm {

SweepAxis axis_from_string(const std::string& name) {
    if (name == "rx-skew") return SweepAxis::rx_skew;
    if (name == "rx-imbalance") return SweepAxis::rx_imbalance;
    if (name == "tx-skew") return SweepAxis::tx_skew;
    if (name == "tx-imbalance") return SweepAxis::tx_imbalance;
    throw ConfigError("unknown sweep axis: " + name);
}

const char* axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::rx_skew: return "rx-skew";
        case SweepAxis::rx_imbalance: return "rx-imbalance";
        case SweepAxis::tx_skew: return "tx-skew";
        default: return "tx-imbalance";
    }
}

const char* axis_unit(SweepAxis axis) {
    return (axis == SweepAxis::rx_skew || axis == SweepAxis::tx_skew) ? "ps" : "dB";
}

void SweepGrid::validate() const {
    if (step == 0.0 && stop != start) throw ConfigError("SweepGrid: zero step on a non-empty range");
    if (step != 0.0 && (stop - start) / step < 0.0)
        throw ConfigError("SweepGrid: step sign inconsistent with range");
}

std::vector<double> SweepGrid::values() const {
    validate();
    std::vector<double> v;
    if (step == 0.0 || start == stop) {
        v.push_back(start);
        return v;
    }
    const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int i = 0; i < n; ++i) v.push_back(start + i * step);
    return v;
}

void ExperimentConfig::validate() const {
    tfit.validate();
    subcarriers.validate();
    channel.validate();
    grid.validate();
    presets.tx_x.validate();
    presets.tx_y.validate();
    presets.rx_x.validate();
    presets.rx_y.validate();
    if (trials < 1) throw ConfigError("ExperimentConfig: trials must be >= 1");
    if (sc_index < 0 || sc_index >= subcarriers.n_sc)
        throw ConfigError("ExperimentConfig: sc_index out of range");
    if (godard_bins < 1) throw ConfigError("ExperimentConfig: godard_bins must be >= 1");
    if (std::abs(tfit.baud_rate_hz - subcarriers.per_sc_baud_hz) > 1.0)
        throw ConfigError("ExperimentConfig: training and payload baud rates must match");
}

// ---------------------------------------------------------------------------
// Frame detection
// ---------------------------------------------------------------------------

std::size_t frame_detect(const DualPolFrame& capture, const TfitPlan& plan) {
    capture.validate();
    plan.validate();
    const std::size_t n_slot = static_cast<std::size_t>(plan.slot_len_symbols) * 2;
    const std::size_t pattern = 4u * static_cast<std::size_t>(plan.n_blocks) * n_slot;
    const std::size_t len = capture.size();
    if (len < pattern) throw DetectionError("frame_detect: capture shorter than one frame");

    std::vector<double> px(len + 1, 0.0), py(len + 1, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
        px[i + 1] = px[i] + std::norm(capture.x.samples[i]);
        py[i + 1] = py[i] + std::norm(capture.y.samples[i]);
    }
    auto window = [](const std::vector<double>& p, std::size_t a, std::size_t b) {
        return p[b] - p[a];
    };

    double best_score = -1.0;
    std::size_t best = 0;
    for (std::size_t o = 0; o + pattern <= len; ++o) {
        double score = 0.0;
        for (int b = 0; b < plan.n_blocks; ++b) {
            const std::size_t base = o + static_cast<std::size_t>(b) * 4 * n_slot;
            const double x12 = window(px, base, base + 2 * n_slot);
            const double x34 = window(px, base + 2 * n_slot, base + 4 * n_slot);
            const double y12 = window(py, base, base + 2 * n_slot);
            const double y34 = window(py, base + 2 * n_slot, base + 4 * n_slot);
            score += (x12 - x34) + (y34 - y12);
        }
        if (score > best_score) {
            best_score = score;
            best = o;
        }
    }

    const double energy = window(px, best, best + pattern) + window(py, best, best + pattern);
    if (energy <= 0.0 || best_score / energy < 0.25)
        throw DetectionError("frame_detect: no training-frame signature above threshold");
    return best;
}

// ---------------------------------------------------------------------------
// Trial pipeline
// ---------------------------------------------------------------------------

namespace {

struct PairPlans {
    std::vector<TfitPlan> plans;  // one per positive pair center, outermost first
};

PairPlans pair_plans(const ExperimentConfig& cfg) {
    PairPlans out;
    std::vector<double> positive;
    for (double c : cfg.subcarriers.centers_hz)
        if (c > 0.0) positive.push_back(c);
    std::sort(positive.rbegin(), positive.rend());
    for (double c : positive) {
        TfitPlan p = cfg.tfit;
        p.sc_center_hz = c;
        out.plans.push_back(p);
    }
    return out;
}

// Training composite for all subcarrier pairs, both polarizations.
DualPolFrame build_tfit_composite(const ExperimentConfig& cfg) {
    const auto pairs = pair_plans(cfg);
    DualPolFrame composite;
    bool first = true;
    for (const auto& plan : pairs.plans) {
        const double edge = plan.sc_center_hz + plan.tone_f2_hz;
        if (edge > plan.sample_rate_gen_hz() / 2.0)
            throw SpectralFitError("trial: training tones exceed the generation Nyquist");
        DualPolFrame f = build_frame(plan);
        if (first) {
            composite = std::move(f);
            first = false;
        } else {
            for (std::size_t i = 0; i < composite.size(); ++i) {
                composite.x.samples[i] += f.x.samples[i];
                composite.y.samples[i] += f.y.samples[i];
            }
        }
    }
    return composite;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

struct EmittedSignal {
    DualPolFrame padded;        // power-of-two trace at the generation rate
    std::size_t offset = 0;     // frame start within the padded trace
    std::size_t active_len = 0; // frame (+payload) span used for power accounting
};

EmittedSignal place_signal(const DualPolFrame& signal, std::size_t offset, std::size_t pad_to) {
    EmittedSignal out;
    out.offset = offset;
    out.active_len = signal.size();
    out.padded.x = SampleTrace::zeros(pad_to, signal.sample_rate_hz());
    out.padded.y = SampleTrace::zeros(pad_to, signal.sample_rate_hz());
    if (offset + signal.size() > pad_to) throw ConfigError("trial: signal does not fit the padded trace");
    std::copy(signal.x.samples.begin(), signal.x.samples.end(),
              out.padded.x.samples.begin() + static_cast<std::ptrdiff_t>(offset));
    std::copy(signal.y.samples.begin(), signal.y.samples.end(),
              out.padded.y.samples.begin() + static_cast<std::ptrdiff_t>(offset));
    return out;
}

// Transmit impairments, fiber, noise, LO selection and receive impairments
// for one polarization.
SampleTrace leaf_capture_one_pol(const SampleTrace& padded, const IqImpairment& tx_imp,
                                 const IqImpairment& rx_imp, const ExperimentConfig& cfg,
                                 const ChannelConfig& channel, int sc_index,
                                 std::size_t active_begin, std::size_t active_end,
                                 std::uint64_t noise_substream) {
    SampleTrace t = apply_tx_iq(padded, tx_imp);
    t = apply_cd(t, channel);
    t = add_osnr_noise(t, channel, cfg.subcarriers.occupied_band_hz(), active_begin, active_end,
                       noise_substream);
    t = select_subcarrier(t, cfg.subcarriers, sc_index, channel);
    return apply_rx_iq(t, rx_imp);
}

GodardConfig godard_for(const ExperimentConfig& cfg, double center_hz) {
    const int sign = center_hz >= 0.0 ? +1 : -1;
    GodardConfig g = GodardConfig::from_plan(cfg.tfit, sign);
    g.n_avg_bins = cfg.godard_bins;
    return g;
}

TfitPlan plan_for_leaf(const ExperimentConfig& cfg, int sc_index) {
    TfitPlan p = cfg.tfit;
    p.sc_center_hz = std::abs(cfg.subcarriers.centers_hz.at(static_cast<std::size_t>(sc_index)));
    return p;
}

} // namespace

TrialOutput run_estimation_trial(const ExperimentConfig& cfg, const ImpairmentSet& impairments,
                                 std::uint64_t point_index, int trial) {
    cfg.validate();
    const RngStream trial_rng =
        RngStream(cfg.seed, 0).derive(point_index + 1).derive(static_cast<std::uint64_t>(trial) + 1);

    const DualPolFrame tfit = build_tfit_composite(cfg);
    const std::size_t decim = static_cast<std::size_t>(
        std::llround(tfit.sample_rate_hz() / (2.0 * cfg.tfit.baud_rate_hz)));
    const std::size_t pad_to = next_pow2(tfit.size() + tfit.size() / 4);

    // Random placement exercises frame detection; keep room for filter tails.
    const std::size_t budget = pad_to - tfit.size();
    std::size_t offset = trial_rng.derive(11).uniform_int(0, budget > 4096 ? budget - 4096 : 1);
    if (cfg.use_known_offset) offset = (offset / decim) * decim;

    const EmittedSignal emitted = place_signal(tfit, offset, pad_to);

    ChannelConfig channel = cfg.channel;
    channel.seed = trial_rng.derive(12);

    const double center = cfg.subcarriers.centers_hz.at(static_cast<std::size_t>(cfg.sc_index));
    const SampleTrace cap_x =
        leaf_capture_one_pol(emitted.padded.x, impairments.tx_x, impairments.rx_x, cfg, channel,
                             cfg.sc_index, offset, offset + emitted.active_len, 0);
    const SampleTrace cap_y =
        leaf_capture_one_pol(emitted.padded.y, impairments.tx_y, impairments.rx_y, cfg, channel,
                             cfg.sc_index, offset, offset + emitted.active_len, 1);
    const DualPolFrame capture{cap_x, cap_y};

    if (rotation_insufficient(channel, cfg.tfit.slot_duration_s(), cfg.tfit.n_blocks))
        std::cerr << "warning: frequency offset rotates < 4 turns over the training frame; "
                     "power-ratio estimates may degrade\n";

    TrialOutput out;
    out.frame_offset =
        cfg.use_known_offset ? offset / decim : frame_detect(capture, cfg.tfit);

    const TfitPlan leaf_plan = plan_for_leaf(cfg, cfg.sc_index);
    const GodardConfig godard = godard_for(cfg, center);
    out.report = estimate_leaf(capture, out.frame_offset, leaf_plan, godard, center);
    out.tone_snr_x_db = out.report.x.min_tone_snr_db;
    out.tone_snr_y_db = out.report.y.min_tone_snr_db;
    return out;
}

namespace {

ImpairmentSet apply_axis(const ImpairmentSet& base, SweepAxis axis, double value) {
    ImpairmentSet imp = base;
    switch (axis) {
        case SweepAxis::rx_skew:
            imp.rx_x.skew_s = imp.rx_y.skew_s = value * 1e-12;
            break;
        case SweepAxis::rx_imbalance:
            imp.rx_x.gain = imp.rx_y.gain = std::pow(10.0, value / 20.0);
            break;
        case SweepAxis::tx_skew:
            imp.tx_x.skew_s = imp.tx_y.skew_s = value * 1e-12;
            break;
        case SweepAxis::tx_imbalance:
            imp.tx_x.gain = imp.tx_y.gain = std::pow(10.0, value / 20.0);
            break;
    }
    return imp;
}

void fill_row(SweepRow& row, const ImpairmentSet& imp, const EstimateReport& rep) {
    row.preset_rx_skew_ps = imp.rx_x.skew_s * 1e12;
    row.preset_rx_imb_db = imp.rx_x.imbalance_db();
    row.preset_tx_skew_ps = imp.tx_x.skew_s * 1e12;
    row.preset_tx_imb_db = imp.tx_x.imbalance_db();

    row.est_rx_skew_x_ps = rep.x.rx_skew_s * 1e12;
    row.est_rx_skew_y_ps = rep.y.rx_skew_s * 1e12;
    row.est_rx_imb_x_db = rep.x.rx_imbalance_db;
    row.est_rx_imb_y_db = rep.y.rx_imbalance_db;
    row.est_tx_skew_x_ps = rep.x.tx_skew_s * 1e12;
    row.est_tx_skew_y_ps = rep.y.tx_skew_s * 1e12;
    row.est_tx_imb_x_db = rep.x.tx_imbalance_db;
    row.est_tx_imb_y_db = rep.y.tx_imbalance_db;

    row.err_rx_skew_x_ps = row.est_rx_skew_x_ps - imp.rx_x.skew_s * 1e12;
    row.err_rx_skew_y_ps = row.est_rx_skew_y_ps - imp.rx_y.skew_s * 1e12;
    row.err_rx_imb_x_db = row.est_rx_imb_x_db - imp.rx_x.imbalance_db();
    row.err_rx_imb_y_db = row.est_rx_imb_y_db - imp.rx_y.imbalance_db();
    row.err_tx_skew_x_ps = row.est_tx_skew_x_ps - imp.tx_x.skew_s * 1e12;
    row.err_tx_skew_y_ps = row.est_tx_skew_y_ps - imp.tx_y.skew_s * 1e12;
    row.err_tx_imb_x_db = row.est_tx_imb_x_db - imp.tx_x.imbalance_db();
    row.err_tx_imb_y_db = row.est_tx_imb_y_db - imp.tx_y.imbalance_db();
}

} // namespace

std::vector<SweepRow> run_estimation_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto values = cfg.grid.values();
    const std::size_t n_points = values.size();
    const auto n_trials = static_cast<std::size_t>(cfg.trials);
    std::vector<SweepRow> rows(n_points * n_trials);

#ifdef _OPENMP
#pragma omp parallel for collapse(2) schedule(dynamic)
#endif
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(n_points); ++p) {
        for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(n_trials); ++t) {
            const auto pi = static_cast<std::size_t>(p);
            const auto ti = static_cast<std::size_t>(t);
            SweepRow& row = rows[pi * n_trials + ti];
            row.preset_value = values[pi];
            row.trial = static_cast<int>(ti);
            row.seed = cfg.seed;
            const ImpairmentSet imp = apply_axis(cfg.presets, cfg.grid.axis, values[pi]);
            try {
                const TrialOutput out = run_estimation_trial(cfg, imp, pi, static_cast<int>(ti));
                fill_row(row, imp, out.report);
                row.tone_snr_x_db = out.tone_snr_x_db;
                row.tone_snr_y_db = out.tone_snr_y_db;
            } catch (const std::exception& e) {
                row.status = e.what();
                std::replace(row.status.begin(), row.status.end(), ',', ';');
            }
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------
// BER sweep
// ---------------------------------------------------------------------------

namespace {

struct BerLegResult {
    BerResult x;
    BerResult y;
};

struct BerTrialCache {
    DualPolFrame emitted;  // training + payload, both pols, at the generation rate
    PayloadSignal payload_x;
    PayloadSignal payload_y;
    std::size_t frame_len_gen = 0;
    std::size_t active_len = 0;
};

BerTrialCache build_ber_signal(const ExperimentConfig& cfg, const RngStream& rng) {
    BerTrialCache cache;
    const DualPolFrame tfit = build_tfit_composite(cfg);
    cache.frame_len_gen = tfit.size();
    cache.payload_x =
        generate_payload(cfg.payload_symbols, cfg.subcarriers, cfg.tfit.samples_per_symbol_gen,
                         rng.derive(21));
    cache.payload_y =
        generate_payload(cfg.payload_symbols, cfg.subcarriers, cfg.tfit.samples_per_symbol_gen,
                         rng.derive(22));

    const std::size_t total = tfit.size() + cache.payload_x.composite.size();
    cache.active_len = total;
    DualPolFrame sig;
    sig.x = SampleTrace::zeros(total, tfit.sample_rate_hz());
    sig.y = SampleTrace::zeros(total, tfit.sample_rate_hz());
    std::copy(tfit.x.samples.begin(), tfit.x.samples.end(), sig.x.samples.begin());
    std::copy(tfit.y.samples.begin(), tfit.y.samples.end(), sig.y.samples.begin());
    std::copy(cache.payload_x.composite.samples.begin(), cache.payload_x.composite.samples.end(),
              sig.x.samples.begin() + static_cast<std::ptrdiff_t>(tfit.size()));
    std::copy(cache.payload_y.composite.samples.begin(), cache.payload_y.composite.samples.end(),
              sig.y.samples.begin() + static_cast<std::ptrdiff_t>(tfit.size()));

    const std::size_t pad_to = next_pow2(total);
    const EmittedSignal emitted = place_signal(sig, 0, pad_to);
    cache.emitted = emitted.padded;
    return cache;
}

struct LeafProcessed {
    DualPolFrame capture;
    EstimateReport report;
};

LeafProcessed process_leaf(const DualPolFrame& tx_out_x_y, const ExperimentConfig& cfg,
                           const ChannelConfig& channel, const ImpairmentSet& imp, int sc_target,
                           std::size_t active_len, std::uint64_t noise_base, bool estimate) {
    LeafProcessed out;
    SampleTrace x = add_osnr_noise(tx_out_x_y.x, channel, cfg.subcarriers.occupied_band_hz(), 0,
                                   active_len, noise_base + 0);
    SampleTrace y = add_osnr_noise(tx_out_x_y.y, channel, cfg.subcarriers.occupied_band_hz(), 0,
                                   active_len, noise_base + 1);
    x = select_subcarrier(x, cfg.subcarriers, sc_target, channel);
    y = select_subcarrier(y, cfg.subcarriers, sc_target, channel);
    out.capture.x = apply_rx_iq(x, imp.rx_x);
    out.capture.y = apply_rx_iq(y, imp.rx_y);

    if (estimate) {
        const std::size_t detected = frame_detect(out.capture, cfg.tfit);
        const double center = cfg.subcarriers.centers_hz.at(static_cast<std::size_t>(sc_target));
        out.report = estimate_leaf(out.capture, detected, plan_for_leaf(cfg, sc_target),
                                   godard_for(cfg, center), center);
    }
    return out;
}

BerLegResult demod_leaf(const DualPolFrame& capture, const BerTrialCache& cache,
                        const ExperimentConfig& cfg, const ChannelConfig& channel, int sc_target,
                        std::size_t decim) {
    DemodOptions opt;
    opt.first_symbol_sample = cache.frame_len_gen / decim;
    BerLegResult leg;
    leg.x = demodulate(capture.x, cache.payload_x.frames.at(static_cast<std::size_t>(sc_target)),
                       channel, cfg.subcarriers, opt);
    leg.y = demodulate(capture.y, cache.payload_y.frames.at(static_cast<std::size_t>(sc_target)),
                       channel, cfg.subcarriers, opt);
    return leg;
}

} // namespace

std::vector<BerSweepRow> run_ber_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto values = cfg.grid.values();
    const std::size_t n_points = values.size();
    const auto n_trials = static_cast<std::size_t>(cfg.trials);
    const std::size_t n_sc = cfg.ber_sc_indices.size();
    std::vector<BerSweepRow> rows(n_points * n_trials * n_sc);

#ifdef _OPENMP
#pragma omp parallel for collapse(2) schedule(dynamic)
#endif
    for (std::ptrdiff_t p = 0; p < static_cast<std::ptrdiff_t>(n_points); ++p) {
        for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(n_trials); ++t) {
            const auto pi = static_cast<std::size_t>(p);
            const auto ti = static_cast<std::size_t>(t);
            const ImpairmentSet imp = apply_axis(cfg.presets, cfg.grid.axis, values[pi]);
            const RngStream trial_rng =
                RngStream(cfg.seed, 0).derive(0xbe5 + pi).derive(ti + 1);
            try {
                const BerTrialCache cache = build_ber_signal(cfg, trial_rng);
                const std::size_t decim = static_cast<std::size_t>(std::llround(
                    cache.emitted.sample_rate_hz() / (2.0 * cfg.tfit.baud_rate_hz)));

                ChannelConfig channel = cfg.channel;
                channel.seed = trial_rng.derive(31);

                // Leg A: impaired transmission, no compensation anywhere.
                DualPolFrame tx_a;
                tx_a.x = apply_cd(apply_tx_iq(cache.emitted.x, imp.tx_x), channel);
                tx_a.y = apply_cd(apply_tx_iq(cache.emitted.y, imp.tx_y), channel);

                std::vector<LeafProcessed> leaves_a;
                for (std::size_t s = 0; s < n_sc; ++s)
                    leaves_a.push_back(process_leaf(tx_a, cfg, channel, imp,
                                                    cfg.ber_sc_indices[s], cache.active_len,
                                                    100 + 10 * s, true));

                // Hub-side pre-compensation from the leaves' averaged reports.
                CompensationSpec pre_x, pre_y;
                double tx_skew_x = 0.0, tx_skew_y = 0.0, tx_imb_x = 0.0, tx_imb_y = 0.0;
                for (const auto& leaf : leaves_a) {
                    tx_skew_x += leaf.report.x.tx_skew_s;
                    tx_skew_y += leaf.report.y.tx_skew_s;
                    tx_imb_x += leaf.report.x.tx_imbalance_db;
                    tx_imb_y += leaf.report.y.tx_imbalance_db;
                }
                const auto n_leaves = static_cast<double>(leaves_a.size());
                pre_x.tau_s = tx_skew_x / n_leaves;
                pre_y.tau_s = tx_skew_y / n_leaves;
                pre_x.gain_correction = std::pow(10.0, tx_imb_x / n_leaves / 20.0);
                pre_y.gain_correction = std::pow(10.0, tx_imb_y / n_leaves / 20.0);

                // Leg B: pre-compensated re-transmission, fresh noise, leaf-side
                // receiver compensation before demodulation.
                ChannelConfig channel_b = channel;
                channel_b.seed = trial_rng.derive(32);
                DualPolFrame tx_b;
                tx_b.x = apply_cd(apply_tx_iq(precompensate_tx(cache.emitted.x, pre_x), imp.tx_x),
                                  channel_b);
                tx_b.y = apply_cd(apply_tx_iq(precompensate_tx(cache.emitted.y, pre_y), imp.tx_y),
                                  channel_b);

                for (std::size_t s = 0; s < n_sc; ++s) {
                    const int sc_target = cfg.ber_sc_indices[s];
                    BerSweepRow& row = rows[(pi * n_trials + ti) * n_sc + s];
                    row.preset_value = values[pi];
                    row.sc_index = sc_target;
                    row.trial = static_cast<int>(ti);
                    row.seed = cfg.seed;

                    const BerLegResult no_comp =
                        demod_leaf(leaves_a[s].capture, cache, cfg, channel, sc_target, decim);

                    LeafProcessed leaf_b = process_leaf(tx_b, cfg, channel_b, imp, sc_target,
                                                        cache.active_len, 200 + 10 * s, false);
                    const CompensationSpec rx_spec_x{
                        leaves_a[s].report.x.rx_skew_s,
                        std::pow(10.0, leaves_a[s].report.x.rx_imbalance_db / 20.0), true};
                    const CompensationSpec rx_spec_y{
                        leaves_a[s].report.y.rx_skew_s,
                        std::pow(10.0, leaves_a[s].report.y.rx_imbalance_db / 20.0), true};
                    DualPolFrame comp_capture;
                    comp_capture.x = compensate_rx(leaf_b.capture.x, rx_spec_x);
                    comp_capture.y = compensate_rx(leaf_b.capture.y, rx_spec_y);
                    const BerLegResult with_comp =
                        demod_leaf(comp_capture, cache, cfg, channel_b, sc_target, decim);

                    row.bits_total = no_comp.x.bits_total + no_comp.y.bits_total;
                    row.bit_errors_no_comp = no_comp.x.bit_errors + no_comp.y.bit_errors;
                    row.bit_errors_comp = with_comp.x.bit_errors + with_comp.y.bit_errors;
                    row.ber_no_comp = static_cast<double>(row.bit_errors_no_comp) /
                                      static_cast<double>(row.bits_total);
                    row.ber_comp = static_cast<double>(row.bit_errors_comp) /
                                   static_cast<double>(row.bits_total);
                }
            } catch (const std::exception& e) {
                for (std::size_t s = 0; s < n_sc; ++s) {
                    BerSweepRow& row = rows[(pi * n_trials + ti) * n_sc + s];
                    row.preset_value = values[pi];
                    row.sc_index = cfg.ber_sc_indices[s];
                    row.trial = static_cast<int>(ti);
                    row.seed = cfg.seed;
                    row.status = e.what();
                    std::replace(row.status.begin(), row.status.end(), ',', ';');
                }
            }
        }
    }
    return rows;
}

ExperimentConfig coexist_config(const ExperimentConfig& base, char panel) {
    ExperimentConfig cfg = base;
    auto set = [&](double tx_skew_ps, double tx_imb_db, double rx_skew_ps, double rx_imb_db) {
        cfg.presets.tx_x = IqImpairment::with_db(tx_skew_ps * 1e-12, tx_imb_db);
        cfg.presets.tx_y = cfg.presets.tx_x;
        cfg.presets.rx_x = IqImpairment::with_db(rx_skew_ps * 1e-12, rx_imb_db);
        cfg.presets.rx_y = cfg.presets.rx_x;
    };
    switch (panel) {
        case 'a':
            cfg.grid.axis = SweepAxis::rx_skew;
            set(5.0, 1.0, 0.0, -1.0);
            break;
        case 'b':
            cfg.grid.axis = SweepAxis::rx_imbalance;
            set(5.0, 1.0, -5.0, 0.0);
            break;
        case 'c':
            cfg.grid.axis = SweepAxis::tx_skew;
            set(0.0, 1.0, -5.0, -1.0);
            break;
        case 'd':
            cfg.grid.axis = SweepAxis::tx_imbalance;
            set(5.0, 0.0, -5.0, -1.0);
            break;
        default:
            throw ConfigError("coexist panel must be one of a, b, c, d");
    }
    if (cfg.grid.axis == SweepAxis::rx_imbalance || cfg.grid.axis == SweepAxis::tx_imbalance) {
        cfg.grid.start = -3.0;
        cfg.grid.stop = 3.0;
        cfg.grid.step = 0.5;
    } else {
        cfg.grid.start = -15.0;
        cfg.grid.stop = 15.0;
        cfg.grid.step = 2.5;
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace

void write_sweep_csv(const std::string& path, SweepAxis axis, const std::vector<SweepRow>& rows) {
    std::ofstream os(path, std::ios::trunc | std::ios::binary);
    if (!os) throw IoError("cannot open CSV for writing: " + path);
    os << "axis,preset_value_" << axis_unit(axis)
       << ",trial,seed,"
          "preset_rx_skew_ps,preset_rx_imb_db,preset_tx_skew_ps,preset_tx_imb_db,"
          "est_rx_skew_x_ps,est_rx_skew_y_ps,est_rx_imb_x_db,est_rx_imb_y_db,"
          "est_tx_skew_x_ps,est_tx_skew_y_ps,est_tx_imb_x_db,est_tx_imb_y_db,"
          "err_rx_skew_x_ps,err_rx_skew_y_ps,err_rx_imb_x_db,err_rx_imb_y_db,"
          "err_tx_skew_x_ps,err_tx_skew_y_ps,err_tx_imb_x_db,err_tx_imb_y_db,"
          "tone_snr_x_db,tone_snr_y_db,status\n";
    for (const auto& r : rows) {
        os << axis_name(axis) << ',' << fmt(r.preset_value) << ',' << r.trial << ',' << r.seed
           << ',' << fmt(r.preset_rx_skew_ps) << ',' << fmt(r.preset_rx_imb_db) << ','
           << fmt(r.preset_tx_skew_ps) << ',' << fmt(r.preset_tx_imb_db) << ','
           << fmt(r.est_rx_skew_x_ps) << ',' << fmt(r.est_rx_skew_y_ps) << ','
           << fmt(r.est_rx_imb_x_db) << ',' << fmt(r.est_rx_imb_y_db) << ','
           << fmt(r.est_tx_skew_x_ps) << ',' << fmt(r.est_tx_skew_y_ps) << ','
           << fmt(r.est_tx_imb_x_db) << ',' << fmt(r.est_tx_imb_y_db) << ','
           << fmt(r.err_rx_skew_x_ps) << ',' << fmt(r.err_rx_skew_y_ps) << ','
           << fmt(r.err_rx_imb_x_db) << ',' << fmt(r.err_rx_imb_y_db) << ','
           << fmt(r.err_tx_skew_x_ps) << ',' << fmt(r.err_tx_skew_y_ps) << ','
           << fmt(r.err_tx_imb_x_db) << ',' << fmt(r.err_tx_imb_y_db) << ','
           << fmt(r.tone_snr_x_db) << ',' << fmt(r.tone_snr_y_db) << ',' << r.status << '\n';
    }
    if (!os) throw IoError("CSV write failed: " + path);
}

void write_ber_csv(const std::string& path, SweepAxis axis, const std::vector<BerSweepRow>& rows) {
    std::ofstream os(path, std::ios::trunc | std::ios::binary);
    if (!os) throw IoError("cannot open CSV for writing: " + path);
    os << "axis,preset_value_" << axis_unit(axis)
       << ",sc_index,trial,seed,bits_total,bit_errors_no_comp,bit_errors_comp,"
          "ber_no_comp,ber_comp,status\n";
    for (const auto& r : rows) {
        os << axis_name(axis) << ',' << fmt(r.preset_value) << ',' << r.sc_index << ',' << r.trial
           << ',' << r.seed << ',' << r.bits_total << ',' << r.bit_errors_no_comp << ','
           << r.bit_errors_comp << ',' << fmt(r.ber_no_comp) << ',' << fmt(r.ber_comp) << ','
           << r.status << '\n';
    }
    if (!os) throw IoError("CSV write failed: " + path);
}

} // namespace dscm
