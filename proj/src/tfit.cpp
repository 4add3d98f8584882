#include "dscm/tfit.hpp"

#include <cmath>
#include <numbers>

namespace dscm {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool near_integer(double v) { return std::abs(v - std::round(v)) < 1e-9; }

// The two tributary waveforms of the pair composite. With tones defined as
// A*exp(j*(2*pi*f*t + phase)) and the mirrored subcarrier carrying the
// conjugate construction, one tone lands purely on the real tributary and
// the other purely on the imaginary tributary:
//   w_f2(t) = 2A cos(2*pi*(fc+f2)*t + p2)   (real tributary)
//   w_f1(t) = 2A sin(2*pi*(fc+f1)*t + p1)   (imaginary tributary)
// Slot roles swap which waveform rides which tributary.
double wave_cos(const TfitPlan& p, double t) {
    return 2.0 * p.tone_amplitude *
           std::cos(kTwoPi * (p.sc_center_hz + p.tone_f2_hz) * t + p.tone_phase_f2_rad);
}

double wave_sin(const TfitPlan& p, double t) {
    return 2.0 * p.tone_amplitude *
           std::sin(kTwoPi * (p.sc_center_hz + p.tone_f1_hz) * t + p.tone_phase_f1_rad);
}

// Fill one slot's active-polarization samples. `swapped` selects the t2/t4
// role (waveforms interchanged between tributaries). `t0` is the absolute
// time of the slot start so frames stay phase-continuous.
void fill_slot(const TfitPlan& p, std::vector<cplx>& out, std::size_t begin, bool swapped,
               double t0) {
    const double dt = 1.0 / p.sample_rate_gen_hz();
    const std::size_t len = p.slot_samples_gen();
    for (std::size_t n = 0; n < len; ++n) {
        const double t = t0 + static_cast<double>(n) * dt;
        const double wc = wave_cos(p, t);
        const double ws = wave_sin(p, t);
        out[begin + n] = swapped ? cplx(ws, wc) : cplx(wc, ws);
    }
}

} // namespace

void TfitPlan::validate() const {
    if (!(baud_rate_hz > 0.0)) throw ConfigError("TfitPlan: baud rate must be positive");
    if (!(tone_f1_hz > 0.0) || !(tone_f1_hz < tone_f2_hz) || !(tone_f2_hz <= baud_rate_hz))
        throw ConfigError("TfitPlan: tones must satisfy 0 < f1 < f2 <= baud");
    if (slot_len_symbols < 1) throw ConfigError("TfitPlan: slot length must be >= 1 symbol");
    if (n_blocks < 1) throw ConfigError("TfitPlan: n_blocks must be >= 1");
    if (!(tone_amplitude > 0.0)) throw ConfigError("TfitPlan: tone amplitude must be positive");
    if (samples_per_symbol_gen < 2 || samples_per_symbol_gen % 2 != 0)
        throw ConfigError("TfitPlan: samples per symbol must be an even integer >= 2");
    // Whole tone periods per slot keep circular block semantics seamless.
    if (!near_integer(slot_len_symbols * tone_f1_hz / baud_rate_hz) ||
        !near_integer(slot_len_symbols * tone_f2_hz / baud_rate_hz))
        throw ConfigError("TfitPlan: slot must contain whole periods of both tones");
}

DualPolFrame build_slot(const TfitPlan& plan, SlotId slot) {
    plan.validate();
    const std::size_t len = plan.slot_samples_gen();
    DualPolFrame f;
    f.x = SampleTrace::zeros(len, plan.sample_rate_gen_hz());
    f.y = SampleTrace::zeros(len, plan.sample_rate_gen_hz());
    const bool on_y = (slot == SlotId::t3 || slot == SlotId::t4);
    const bool swapped = (slot == SlotId::t2 || slot == SlotId::t4);
    fill_slot(plan, on_y ? f.y.samples : f.x.samples, 0, swapped, 0.0);
    return f;
}

DualPolFrame build_frame(const TfitPlan& plan) {
    plan.validate();
    const std::size_t slot_len = plan.slot_samples_gen();
    const std::size_t total = plan.frame_samples_gen();
    DualPolFrame f;
    f.x = SampleTrace::zeros(total, plan.sample_rate_gen_hz());
    f.y = SampleTrace::zeros(total, plan.sample_rate_gen_hz());
    const double dt = 1.0 / plan.sample_rate_gen_hz();
    for (int b = 0; b < plan.n_blocks; ++b) {
        for (int s = 0; s < 4; ++s) {
            const std::size_t begin = (static_cast<std::size_t>(b) * 4 + static_cast<std::size_t>(s)) * slot_len;
            const bool on_y = (s >= 2);
            const bool swapped = (s % 2 == 1);
            fill_slot(plan, on_y ? f.y.samples : f.x.samples, begin, swapped,
                      static_cast<double>(begin) * dt);
        }
    }
    return f;
}

} // namespace dscm
