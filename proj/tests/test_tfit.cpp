#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dscm/dsp.hpp"
#include "dscm/tfit.hpp"
#include "helpers.hpp"

using namespace dscm;
using namespace testutil;

namespace {

TfitPlan test_plan() {
    TfitPlan p;  // defaults: 8 GBd, f1 = 2 GHz, f2 = 4 GHz, fc = 13.2 GHz, 8 sps
    p.n_blocks = 1;
    return p;
}

SampleTrace tributary_trace(const SampleTrace& t, bool imag) {
    SampleTrace out;
    out.sample_rate_hz = t.sample_rate_hz;
    out.samples.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
        out.samples[i] = cplx(imag ? t.samples[i].imag() : t.samples[i].real(), 0.0);
    return out;
}

} // namespace

TEST_CASE("slot t1 at fc=0: tributaries carry one tone each") {
    TfitPlan p = test_plan();
    p.sc_center_hz = 0.0;
    const DualPolFrame f = build_slot(p, SlotId::t1);
    const SampleTrace re = tributary_trace(f.x, false);
    const SampleTrace im = tributary_trace(f.x, true);
    const double re_f2 = windowed_tone_power(re, p.tone_f2_hz, 8);
    const double re_f1 = windowed_tone_power(re, p.tone_f1_hz, 8);
    const double im_f1 = windowed_tone_power(im, p.tone_f1_hz, 8);
    const double im_f2 = windowed_tone_power(im, p.tone_f2_hz, 8);
    CHECK(re_f2 > 1e3 * re_f1);
    CHECK(im_f1 > 1e3 * im_f2);
}

TEST_CASE("slot t1: Y polarization is identically zero") {
    const DualPolFrame f = build_slot(test_plan(), SlotId::t1);
    for (const auto& v : f.y.samples) CHECK(v == cplx{});
    double px = 0.0;
    for (const auto& v : f.x.samples) px += std::norm(v);
    CHECK(px > 0.0);
}

TEST_CASE("slot t2 equals t1 with tributaries interchanged") {
    const TfitPlan p = test_plan();
    const DualPolFrame t1 = build_slot(p, SlotId::t1);
    const DualPolFrame t2 = build_slot(p, SlotId::t2);
    for (std::size_t i = 0; i < t1.size(); i += 31) {
        CHECK(t2.x.samples[i].real() == doctest::Approx(t1.x.samples[i].imag()).epsilon(1e-12));
        CHECK(t2.x.samples[i].imag() == doctest::Approx(t1.x.samples[i].real()).epsilon(1e-12));
    }
}

TEST_CASE("slots t3/t4 mirror t1/t2 on the other polarization") {
    const TfitPlan p = test_plan();
    const DualPolFrame t1 = build_slot(p, SlotId::t1);
    const DualPolFrame t3 = build_slot(p, SlotId::t3);
    CHECK(max_abs_diff(t3.y.samples, t1.x.samples) == 0.0);
    for (const auto& v : t3.x.samples) CHECK(v == cplx{});
}

TEST_CASE("frame length bookkeeping") {
    TfitPlan p = test_plan();
    p.n_blocks = 3;
    const DualPolFrame f = build_frame(p);
    CHECK(f.size() == 4u * 3u * 2048u * 8u);
    CHECK(f.sample_rate_hz() == p.baud_rate_hz * 8);
}

TEST_CASE("frame spectrum: positive tones only at fc+f1 and fc+f2") {
    TfitPlan p = test_plan();
    p.slot_len_symbols = 512;  // keep the scan cheap
    const DualPolFrame f = build_frame(p);
    SampleTrace x = f.x;
    x.samples.resize(std::size_t(1) << 14, cplx{});  // pad to a power of two

    const double f_lo = p.sc_center_hz + p.tone_f1_hz;
    const double f_hi = p.sc_center_hz + p.tone_f2_hz;
    const double p_lo = windowed_tone_power(x, f_lo, 16);
    const double p_hi = windowed_tone_power(x, f_hi, 16);
    CHECK(p_lo > 1e-3);
    CHECK(p_hi > 1e-3);
    // Scan a frequency comb; everything away from the four tone images
    // (and DC edges of the scan) must be far below the tone level.
    for (double probe = -30e9; probe <= 30e9; probe += 1.1e9) {
        if (std::abs(std::abs(probe) - f_lo) < 2e9 || std::abs(std::abs(probe) - f_hi) < 2e9)
            continue;
        CHECK(windowed_tone_power(x, probe, 16) < 1e-6 * (p_lo + p_hi));
    }
}

TEST_CASE("X-active and Y-active slots carry equal power") {
    TfitPlan p = test_plan();
    p.n_blocks = 2;
    const DualPolFrame f = build_frame(p);
    const std::size_t slot = p.slot_samples_gen();
    double px = 0.0, py = 0.0;
    for (std::size_t b = 0; b < 2; ++b) {
        const std::size_t base = b * 4 * slot;
        for (std::size_t i = 0; i < 2 * slot; ++i) {
            px += std::norm(f.x.samples[base + i]);
            py += std::norm(f.y.samples[base + 2 * slot + i]);
        }
    }
    CHECK(std::abs(px - py) < 1e-9 * px);
}

TEST_CASE("tributary purity: wrong-tone leakage below -80 dB") {
    const TfitPlan p = test_plan();
    const DualPolFrame f = build_slot(p, SlotId::t1);
    SampleTrace re = tributary_trace(f.x, false);
    SampleTrace im = tributary_trace(f.x, true);
    const double re_good = windowed_tone_power(re, p.sc_center_hz + p.tone_f2_hz, 8);
    const double re_bad = windowed_tone_power(re, p.sc_center_hz + p.tone_f1_hz, 8);
    const double im_good = windowed_tone_power(im, p.sc_center_hz + p.tone_f1_hz, 8);
    const double im_bad = windowed_tone_power(im, p.sc_center_hz + p.tone_f2_hz, 8);
    CHECK(10.0 * std::log10(re_bad / re_good) < -80.0);
    CHECK(10.0 * std::log10(im_bad / im_good) < -80.0);
}

TEST_CASE("mirrored-subcarrier pairing isolates each tone") {
    // Commensurate center so every tone sits on an exact DFT bin of a slot.
    TfitPlan p = test_plan();
    p.sc_center_hz = 12.5e9;
    const DualPolFrame f = build_slot(p, SlotId::t1);
    const Spectrum s = forward_transform(f.x);

    const std::size_t up1 = s.bin_of(p.sc_center_hz + p.tone_f1_hz);
    const std::size_t dn1 = s.bin_of(-(p.sc_center_hz + p.tone_f1_hz));
    const std::size_t up2 = s.bin_of(p.sc_center_hz + p.tone_f2_hz);
    const std::size_t dn2 = s.bin_of(-(p.sc_center_hz + p.tone_f2_hz));

    // One subcarrier's baseband is the negated conjugate of its mirror for
    // the quadrature-isolated tone and the plain conjugate for the in-phase
    // one; in DFT terms: S(-F1) = -conj(S(+F1)), S(-F2) = +conj(S(+F2)).
    CHECK(std::abs(s.bins[dn1] + std::conj(s.bins[up1])) < 1e-6 * std::abs(s.bins[up1]));
    CHECK(std::abs(s.bins[dn2] - std::conj(s.bins[up2])) < 1e-6 * std::abs(s.bins[up2]));
}

TEST_CASE("slot interleaving: each tributary sees both tones across t1/t2") {
    TfitPlan p = test_plan();
    p.sc_center_hz = 0.0;
    const DualPolFrame t1 = build_slot(p, SlotId::t1);
    const DualPolFrame t2 = build_slot(p, SlotId::t2);
    auto dominant = [&](const SampleTrace& trib) {
        const double pf1 = windowed_tone_power(trib, p.tone_f1_hz, 8);
        const double pf2 = windowed_tone_power(trib, p.tone_f2_hz, 8);
        return pf1 > pf2 ? p.tone_f1_hz : p.tone_f2_hz;
    };
    const double i_t1 = dominant(tributary_trace(t1.x, false));
    const double i_t2 = dominant(tributary_trace(t2.x, false));
    const double q_t1 = dominant(tributary_trace(t1.x, true));
    const double q_t2 = dominant(tributary_trace(t2.x, true));
    CHECK(i_t1 != i_t2);
    CHECK(q_t1 != q_t2);
    CHECK(i_t1 == q_t2);
    CHECK(i_t2 == q_t1);
}

TEST_CASE("plan validation rejects broken parameters") {
    TfitPlan p = test_plan();
    p.tone_f1_hz = 5e9;  // above f2
    CHECK_THROWS_AS((void)build_slot(p, SlotId::t1), ConfigError);
    p = test_plan();
    p.slot_len_symbols = 3;  // fractional tone periods
    CHECK_THROWS_AS((void)build_frame(p), ConfigError);
    p = test_plan();
    p.n_blocks = 0;
    CHECK_THROWS_AS((void)build_frame(p), ConfigError);
}
