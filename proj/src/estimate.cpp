#include "dscm/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dscm/compensate.hpp"
#include "dscm/dsp.hpp"
#include "dscm/kernels.hpp"

namespace dscm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSnrCap = 200.0;

std::size_t wrap_bin(long k, std::size_t n) {
    long m = k % static_cast<long>(n);
    if (m < 0) m += static_cast<long>(n);
    return static_cast<std::size_t>(m);
}

// Median-based per-bin noise floor, excluding the tone neighborhoods. Bin
// powers of Gaussian noise are exponential, so mean = median / ln 2.
double noise_floor_per_bin(const Spectrum& spec, const GodardConfig& cfg, long shift) {
    const std::size_t n = spec.size();
    const long guard = 2 * cfg.n_avg_bins;
    const long b1 = static_cast<long>(spec.bin_of(cfg.tone_f1_hz)) + shift;
    const long b2 = static_cast<long>(spec.bin_of(cfg.tone_f2_hz)) + shift;
    // Stay inside the filtered band: up to ~1.05x the outer tone offset.
    const long outer = std::lround(std::abs(cfg.tone_f2_hz) / spec.bin_spacing_hz);
    const long band =
        std::min<long>(static_cast<long>(n) / 2 - 1, static_cast<long>(1.05 * outer) + guard + 8);
    std::vector<double> floor_bins;
    floor_bins.reserve(n / 2);
    for (long k = -band; k <= band; ++k) {
        const bool near_tone = std::abs(k - b1) <= guard || std::abs(k - b2) <= guard ||
                               std::abs(k + b1 - static_cast<long>(n)) <= guard ||
                               std::abs(k + b2 - static_cast<long>(n)) <= guard ||
                               std::abs(k + b1) <= guard || std::abs(k + b2) <= guard ||
                               std::abs(k - (static_cast<long>(n) - b1)) <= guard ||
                               std::abs(k - (static_cast<long>(n) - b2)) <= guard;
        if (near_tone) continue;
        floor_bins.push_back(std::norm(spec.bins[wrap_bin(k, n)]));
    }
    if (floor_bins.empty()) return 0.0;
    auto mid = floor_bins.begin() + static_cast<std::ptrdiff_t>(floor_bins.size() / 2);
    std::nth_element(floor_bins.begin(), mid, floor_bins.end());
    return *mid / std::numbers::ln2;
}

struct ToneWindow {
    long center;  // aligned bin of the (signed) tone
    double freq_hz;
};

// Common integer bin shift of both tones, from a coarse peak search. One
// shift serves every tributary and slot of a capture so the window kernels
// line up exactly and their phases cancel in differences.
long find_shift(const Spectrum& spec, const GodardConfig& cfg) {
    const std::size_t n = spec.size();
    const long b1 = static_cast<long>(spec.bin_of(cfg.tone_f1_hz));
    const long b2 = static_cast<long>(spec.bin_of(cfg.tone_f2_hz));
    const long radius = static_cast<long>(cfg.peak_search_bins());
    long best = 0;
    double best_score = -1.0;
    for (long d = -radius; d <= radius; ++d) {
        const double score =
            std::norm(spec.bins[wrap_bin(b1 + d, n)]) + std::norm(spec.bins[wrap_bin(b2 + d, n)]);
        if (score > best_score) {
            best_score = score;
            best = d;
        }
    }
    return best;
}

ToneWindow tone_window(const Spectrum& spec, double tone_hz, const GodardConfig&, long shift) {
    const long nominal = static_cast<long>(spec.bin_of(tone_hz));
    const long center = nominal + shift;
    const std::size_t n = spec.size();
    double f = static_cast<double>(wrap_bin(center, n)) * spec.bin_spacing_hz;
    if (f > spec.sample_rate_hz() / 2.0) f -= spec.sample_rate_hz();
    return {center, f};
}

struct MirrorMeasure {
    double arg2 = 0.0;       // twice the tone phase (mod 2*pi)
    double power_net = 0.0;  // floor-subtracted tone power in the window
    double snr_db = kSnrCap;
    double freq_hz = 0.0;
};

// sum_m S(c+m) * conj(S(-c-m)) over m in [-n+1, n]; the conjugate-image
// pairing makes the window kernel square up with twice the tone phase.
MirrorMeasure mirror_measure(const Spectrum& spec, double tone_hz, const GodardConfig& cfg,
                             long shift, double floor_per_bin) {
    const std::size_t n = spec.size();
    const ToneWindow w = tone_window(spec, std::abs(tone_hz), cfg, shift);
    cplx acc{};
    double pwr = 0.0;
    for (long m = -cfg.n_avg_bins + 1; m <= cfg.n_avg_bins; ++m) {
        const cplx a = spec.bins[wrap_bin(w.center + m, n)];
        const cplx b = spec.bins[wrap_bin(-w.center - m, n)];
        acc += a * std::conj(b);
        pwr += std::norm(a);
    }
    MirrorMeasure r;
    r.arg2 = std::arg(acc);
    const double noise = floor_per_bin * (2.0 * cfg.n_avg_bins);
    r.power_net = std::max(pwr - noise, 1e-300);
    r.snr_db = noise > 0.0 ? std::min(db_from_power(r.power_net / noise), kSnrCap) : kSnrCap;
    r.freq_hz = w.freq_hz;
    return r;
}

struct CrossMeasure {
    double arg_f1_minus_f2 = 0.0;
    double power_f1 = 0.0;
    double power_f2 = 0.0;
    double snr_db = kSnrCap;
};

// sum_m U(a1+m) * conj(U(a2+m)); both windows share the shift, so the
// kernels are identical and the argument is exactly the f1-f2 phase
// difference at the slot reference.
CrossMeasure cross_measure(const Spectrum& spec, const GodardConfig& cfg, long shift,
                           double floor_per_bin) {
    const std::size_t n = spec.size();
    const ToneWindow w1 = tone_window(spec, cfg.tone_f1_hz, cfg, shift);
    const ToneWindow w2 = tone_window(spec, cfg.tone_f2_hz, cfg, shift);
    cplx acc{};
    double p1 = 0.0, p2 = 0.0;
    for (long m = -cfg.n_avg_bins + 1; m <= cfg.n_avg_bins; ++m) {
        const cplx a = spec.bins[wrap_bin(w1.center + m, n)];
        const cplx b = spec.bins[wrap_bin(w2.center + m, n)];
        acc += a * std::conj(b);
        p1 += std::norm(a);
        p2 += std::norm(b);
    }
    CrossMeasure r;
    r.arg_f1_minus_f2 = std::arg(acc);
    const double noise = floor_per_bin * (2.0 * cfg.n_avg_bins);
    r.power_f1 = std::max(p1 - noise, 1e-300);
    r.power_f2 = std::max(p2 - noise, 1e-300);
    r.snr_db = noise > 0.0
                   ? std::min(db_from_power(std::min(r.power_f1, r.power_f2) / noise), kSnrCap)
                   : kSnrCap;
    return r;
}

void check_snr(double snr_db, const GodardConfig& cfg, const char* who) {
    if (snr_db < cfg.min_tone_snr_db)
        throw EstimationError(std::string(who) + ": tone power below the confidence threshold",
                              snr_db);
}

SlotId slot_id_of(int pol_slot0, bool second) {
    if (pol_slot0 == 0) return second ? SlotId::t2 : SlotId::t1;
    return second ? SlotId::t4 : SlotId::t3;
}

} // namespace

Spectrum slot_spectrum(const SampleTrace& slot, GodardConfig::Window window) {
    SampleTrace tapered = slot;
    if (window == GodardConfig::Window::hann) {
        const auto w = hann_window(slot.size());
        for (std::size_t i = 0; i < slot.size(); ++i) tapered.samples[i] *= w[i];
    }
    return forward_transform(tapered);
}

TimingEstimate godard_tau(const Spectrum& spec, double tone_hz, const GodardConfig& cfg) {
    cfg.validate();
    if (spec.size() != cfg.fft_len) throw ConfigError("godard_tau: spectrum length != fft_len");
    const long shift = find_shift(spec, cfg);
    const double floor = noise_floor_per_bin(spec, cfg, shift);
    const MirrorMeasure m = mirror_measure(spec, tone_hz, cfg, shift, floor);
    check_snr(m.snr_db, cfg, "godard_tau");
    TimingEstimate est;
    est.tau_s = wrap_pm_pi(m.arg2) / (kTwoPi * 2.0 * m.freq_hz);
    est.tone_hz = m.freq_hz;
    est.tone_snr_db = m.snr_db;
    est.tributary = Tributary::in_phase;
    return est;
}

namespace {

// Shared worker so the public per-operation entry points and the whole-leaf
// estimation produce identical numbers and intermediates.
struct RxEstimator {
    TimingEstimate skew;
    double imbalance_db = 0.0;
    std::vector<RxSkewSample> skew_samples;
    std::vector<RxImbalanceSample> imbalance_samples;
    double min_snr_db = kSnrCap;

    void run(std::span<const SlotPair> blocks, const GodardConfig& cfg, int pol_slot0) {
        cfg.validate();
        if (blocks.empty()) throw ConfigError("estimate_rx: no blocks");
        const double sign = cfg.tone_f1_hz > 0 ? 1.0 : -1.0;

        double tau_acc = 0.0, imb_acc = 0.0;
        int count = 0;
        long shift = 0;
        bool have_shift = false;
        double freq_repr = std::abs(cfg.tone_f2_hz);

        for (std::size_t b = 0; b < blocks.size(); ++b) {
            for (int s = 0; s < 2; ++s) {
                const SampleTrace& slot = s == 0 ? blocks[b].first : blocks[b].second;
                if (slot.size() != cfg.fft_len)
                    throw ConfigError("estimate_rx: slot length != fft_len");
                const Spectrum si = slot_spectrum(
                    SampleTrace{ {combine_iq(real_part(slot.samples),
                                             std::vector<double>(slot.size(), 0.0))},
                                 slot.sample_rate_hz },
                    cfg.window);
                const Spectrum sq = slot_spectrum(
                    SampleTrace{ {combine_iq(imag_part(slot.samples),
                                             std::vector<double>(slot.size(), 0.0))},
                                 slot.sample_rate_hz },
                    cfg.window);
                if (!have_shift) {
                    // One common alignment for every tributary and slot.
                    Spectrum sum = si;
                    for (std::size_t k = 0; k < sum.size(); ++k)
                        sum.bins[k] = std::sqrt(std::norm(si.bins[k]) + std::norm(sq.bins[k]));
                    shift = find_shift(sum, cfg);
                    have_shift = true;
                }
                const double floor_i = noise_floor_per_bin(si, cfg, shift);
                const double floor_q = noise_floor_per_bin(sq, cfg, shift);
                for (double tone : {cfg.tone_f1_hz, cfg.tone_f2_hz}) {
                    const MirrorMeasure mi = mirror_measure(si, tone, cfg, shift, floor_i);
                    const MirrorMeasure mq = mirror_measure(sq, tone, cfg, shift, floor_q);
                    const double snr = std::min(mi.snr_db, mq.snr_db);
                    min_snr_db = std::min(min_snr_db, snr);
                    check_snr(snr, cfg, "estimate_rx");
                    // Q is the Hilbert pair of I: the conjugate-image argument
                    // carries a structural -pi (sign-flipped for a
                    // negative-frequency tone) on top of 2*(2*pi*f*tau).
                    const double tau = wrap_pm_pi(mq.arg2 - mi.arg2 + sign * std::numbers::pi) /
                                       (2.0 * kTwoPi * std::abs(mi.freq_hz));
                    const double ratio_db = db_from_power(mq.power_net / mi.power_net);
                    tau_acc += tau;
                    imb_acc += ratio_db;
                    ++count;
                    skew_samples.push_back({static_cast<int>(b), slot_id_of(pol_slot0, s == 1),
                                            sign * std::abs(mi.freq_hz), tau, snr});
                    imbalance_samples.push_back({static_cast<int>(b),
                                                 slot_id_of(pol_slot0, s == 1),
                                                 sign * std::abs(mi.freq_hz), ratio_db});
                    if (std::abs(tone) == std::abs(cfg.tone_f2_hz)) freq_repr = std::abs(mi.freq_hz);
                }
            }
        }
        skew.tau_s = tau_acc / count;
        skew.tone_hz = sign * freq_repr;
        skew.slot = slot_id_of(pol_slot0, false);
        skew.tributary = Tributary::quadrature;
        skew.tone_snr_db = min_snr_db;
        imbalance_db = imb_acc / count;
    }
};

struct TxEstimator {
    TxSkewEstimate skew;
    double imbalance_db = 0.0;
    std::vector<TxSkewSample> skew_samples;
    std::vector<TxImbalanceSample> imbalance_samples;
    double min_snr_db = kSnrCap;

    void run(std::span<const SlotPair> blocks, const GodardConfig& cfg, double sc_center_hz) {
        cfg.validate();
        if (blocks.empty()) throw ConfigError("estimate_tx: no blocks");
        const double sign = cfg.tone_f1_hz > 0 ? 1.0 : -1.0;
        if (sign * sc_center_hz < 0)
            throw ConfigError("estimate_tx: subcarrier center sign must match tone sign");
        const double f_abs1 = std::abs(cfg.tone_f1_hz) + std::abs(sc_center_hz);
        const double f_abs2 = std::abs(cfg.tone_f2_hz) + std::abs(sc_center_hz);
        const double tau_scale = kTwoPi * (f_abs1 + f_abs2);

        cplx d_acc{};  // circular mean of the per-block wrapped combination
        double b1_acc = 0.0, b2_acc = 0.0;
        double imb_acc = 0.0;
        long shift = 0;
        bool have_shift = false;

        for (std::size_t b = 0; b < blocks.size(); ++b) {
            const SampleTrace& first = blocks[b].first;
            const SampleTrace& second = blocks[b].second;
            if (first.size() != cfg.fft_len || second.size() != cfg.fft_len)
                throw ConfigError("estimate_tx: slot length != fft_len");
            const Spectrum u1 = slot_spectrum(first, cfg.window);
            const Spectrum u2 = slot_spectrum(second, cfg.window);
            if (!have_shift) {
                shift = find_shift(u1, cfg);
                have_shift = true;
            }
            const double floor1 = noise_floor_per_bin(u1, cfg, shift);
            const double floor2 = noise_floor_per_bin(u2, cfg, shift);
            const CrossMeasure c1 = cross_measure(u1, cfg, shift, floor1);
            const CrossMeasure c2 = cross_measure(u2, cfg, shift, floor2);
            const double snr = std::min(c1.snr_db, c2.snr_db);
            min_snr_db = std::min(min_snr_db, snr);
            check_snr(snr, cfg, "estimate_tx");

            // Slot roles swap the tone that rides the delayed tributary; the
            // swapped slot also carries a structural pi between its tones.
            double b1, b2;
            if (sign > 0) {
                b1 = c1.arg_f1_minus_f2;
                b2 = c2.arg_f1_minus_f2 + std::numbers::pi;
            } else {
                b1 = std::numbers::pi - c1.arg_f1_minus_f2;
                b2 = -c2.arg_f1_minus_f2;
            }
            const double d = wrap_pm_pi(b1 - b2);
            const double b2w = wrap_pm_pi(b2);
            const double b1u = b2w + d;  // unwrap slot-one phase relative to slot-two

            d_acc += std::polar(1.0, d);
            b1_acc += b1u;
            b2_acc += b2w;
            skew_samples.push_back({static_cast<int>(b), b1u / (tau_scale / 2.0),
                                    -b2w / (tau_scale / 2.0), d / tau_scale});

            // Same-frequency tone powers across the two slots: the tone that
            // rode the delayed/scaled tributary against its clean twin.
            const double g2_f1 = c1.power_f1 / c2.power_f1;
            const double g2_f2 = c2.power_f2 / c1.power_f2;
            const double f1_db = db_from_power(g2_f1);
            const double f2_db = db_from_power(g2_f2);
            imb_acc += 0.5 * (f1_db + f2_db);
            imbalance_samples.push_back({static_cast<int>(b), f1_db, f2_db});
        }

        const auto nblocks = static_cast<double>(blocks.size());
        skew.tau_s = std::arg(d_acc) / tau_scale;
        skew.tau_slot_first_s = (b1_acc / nblocks) / (tau_scale / 2.0);
        skew.tau_slot_second_s = -(b2_acc / nblocks) / (tau_scale / 2.0);
        skew.tone_snr_db = min_snr_db;
        imbalance_db = imb_acc / nblocks;
    }
};

} // namespace

TimingEstimate estimate_rx_skew(std::span<const SlotPair> blocks, const GodardConfig& cfg) {
    RxEstimator est;
    est.run(blocks, cfg, 0);
    return est.skew;
}

double estimate_rx_imbalance_db(std::span<const SlotPair> blocks, const GodardConfig& cfg) {
    RxEstimator est;
    est.run(blocks, cfg, 0);
    return est.imbalance_db;
}

TxSkewEstimate estimate_tx_skew(std::span<const SlotPair> blocks, const GodardConfig& cfg,
                                double sc_center_hz) {
    TxEstimator est;
    est.run(blocks, cfg, sc_center_hz);
    return est.skew;
}

double estimate_tx_imbalance_db(std::span<const SlotPair> blocks, const GodardConfig& cfg) {
    TxEstimator est;
    est.run(blocks, cfg, 0.0);
    return est.imbalance_db;
}

SampleTrace gsop(const SampleTrace& trace) {
    trace.validate();
    const auto i_in = real_part(trace.samples);
    const auto q_in = imag_part(trace.samples);
    double pii = 0.0, pqq = 0.0, piq = 0.0;
    for (std::size_t n = 0; n < trace.size(); ++n) {
        pii += i_in[n] * i_in[n];
        pqq += q_in[n] * q_in[n];
        piq += i_in[n] * q_in[n];
    }
    const double total = pii + pqq;
    if (total <= 0.0 || pii < 1e-12 * total || pqq < 1e-12 * total)
        throw EstimationError("gsop: degenerate tributary power", -kSnrCap);

    const double rho = piq / pii;
    double p_resid = 0.0;
    for (std::size_t n = 0; n < trace.size(); ++n) {
        const double r = q_in[n] - rho * i_in[n];
        p_resid += r * r;
    }
    if (p_resid < 1e-12 * total)
        throw EstimationError("gsop: tributaries are collinear", -kSnrCap);
    const double scale = std::sqrt(pqq / p_resid);

    SampleTrace out;
    out.sample_rate_hz = trace.sample_rate_hz;
    out.samples.resize(trace.size());
    for (std::size_t n = 0; n < trace.size(); ++n)
        out.samples[n] = cplx(i_in[n], scale * (q_in[n] - rho * i_in[n]));
    return out;
}

std::vector<SlotPair> slice_slot_pairs(const SampleTrace& capture, std::size_t frame_offset,
                                       const GodardConfig& cfg, int n_blocks, int pol_slot0) {
    const std::size_t n = cfg.fft_len;
    std::vector<SlotPair> pairs;
    pairs.reserve(static_cast<std::size_t>(n_blocks));
    for (int b = 0; b < n_blocks; ++b) {
        SlotPair p;
        for (int s = 0; s < 2; ++s) {
            const std::size_t begin =
                frame_offset + (static_cast<std::size_t>(4 * b + pol_slot0 + s)) * n;
            if (begin + n > capture.size())
                throw ConfigError("slice_slot_pairs: capture too short for the frame layout");
            SampleTrace slot;
            slot.sample_rate_hz = capture.sample_rate_hz;
            slot.samples.assign(capture.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                                capture.samples.begin() + static_cast<std::ptrdiff_t>(begin + n));
            (s == 0 ? p.first : p.second) = std::move(slot);
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

namespace {

PolarizationReport estimate_polarization(const SampleTrace& capture, std::size_t frame_offset,
                                         const TfitPlan& plan, const GodardConfig& cfg,
                                         double sc_center_hz, int pol_slot0) {
    PolarizationReport rep;

    auto raw_pairs = slice_slot_pairs(capture, frame_offset, cfg, plan.n_blocks, pol_slot0);
    RxEstimator rx;
    rx.run(raw_pairs, cfg, pol_slot0);
    rep.rx_skew_s = rx.skew.tau_s;
    rep.rx_imbalance_db = rx.imbalance_db;
    rep.rx_skew_samples = std::move(rx.skew_samples);
    rep.rx_imbalance_samples = std::move(rx.imbalance_samples);

    CompensationSpec comp;
    comp.tau_s = rep.rx_skew_s;
    comp.gain_correction = std::pow(10.0, rep.rx_imbalance_db / 20.0);
    comp.apply_gsop_first = true;
    SampleTrace compensated = compensate_rx(capture, comp);

    auto comp_pairs = slice_slot_pairs(compensated, frame_offset, cfg, plan.n_blocks, pol_slot0);
    TxEstimator tx;
    tx.run(comp_pairs, cfg, sc_center_hz);
    rep.tx_skew_s = tx.skew.tau_s;
    rep.tx_skew_slot_first_s = tx.skew.tau_slot_first_s;
    rep.tx_skew_slot_second_s = tx.skew.tau_slot_second_s;
    rep.tx_imbalance_db = tx.imbalance_db;
    rep.tx_skew_samples = std::move(tx.skew_samples);
    rep.tx_imbalance_samples = std::move(tx.imbalance_samples);

    rep.min_tone_snr_db = std::min(rx.min_snr_db, tx.min_snr_db);
    return rep;
}

} // namespace

EstimateReport estimate_leaf(const DualPolFrame& capture, std::size_t frame_offset,
                             const TfitPlan& plan, const GodardConfig& cfg, double sc_center_hz) {
    capture.validate();
    plan.validate();
    cfg.validate();

    // Compensation needs a power-of-two trace; pad a copy when needed.
    DualPolFrame padded = capture;
    if (!is_power_of_two(padded.size())) {
        std::size_t n = 1;
        while (n < padded.size()) n <<= 1;
        padded.x.samples.resize(n, cplx{});
        padded.y.samples.resize(n, cplx{});
    }

    EstimateReport rep;
    rep.x = estimate_polarization(padded.x, frame_offset, plan, cfg, sc_center_hz, 0);
    rep.y = estimate_polarization(padded.y, frame_offset, plan, cfg, sc_center_hz, 2);
    rep.n_blocks_used = plan.n_blocks;
    rep.baud_rate_hz = plan.baud_rate_hz;
    rep.sc_center_hz = sc_center_hz;
    return rep;
}

} // namespace dscm
