#include "dscm/payload.hpp"

#include <cmath>
#include <numbers>

#include "dscm/dsp.hpp"
#include "dscm/kernels.hpp"

namespace dscm {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kQamScale = 0.31622776601683794;  // 1/sqrt(10)

// Gray 2-bit -> 4-PAM level in {-3,-1,+1,+3}.
int gray_level(std::uint8_t two_bits) {
    switch (two_bits & 0x3) {
        case 0b00: return -3;
        case 0b01: return -1;
        case 0b11: return +1;
        default: return +3;
    }
}

std::uint8_t gray_bits(int level) {
    switch (level) {
        case -3: return 0b00;
        case -1: return 0b01;
        case +1: return 0b11;
        default: return 0b10;
    }
}

int slice_level(double v) {
    if (v < -2.0 * kQamScale) return -3;
    if (v < 0.0) return -1;
    if (v < 2.0 * kQamScale) return +1;
    return +3;
}
} // namespace

cplx qam16_map(std::uint8_t nibble) {
    const int li = gray_level(static_cast<std::uint8_t>(nibble >> 2));
    const int lq = gray_level(nibble);
    return {kQamScale * li, kQamScale * lq};
}

std::uint8_t qam16_demap(cplx received) {
    const auto hi = gray_bits(slice_level(received.real()));
    const auto lo = gray_bits(slice_level(received.imag()));
    return static_cast<std::uint8_t>((hi << 2) | lo);
}

PayloadSignal generate_payload(std::size_t n_symbols, const SubcarrierPlan& plan,
                               int samples_per_symbol, const RngStream& rng) {
    plan.validate();
    if (n_symbols < 1) throw ConfigError("generate_payload: need at least one symbol");
    if (samples_per_symbol < 2) throw ConfigError("generate_payload: need >= 2 samples/symbol");
    const std::size_t trace_len = n_symbols * static_cast<std::size_t>(samples_per_symbol);
    require_power_of_two(trace_len, "generate_payload");
    const double rate = plan.per_sc_baud_hz * samples_per_symbol;

    PayloadSignal out;
    std::vector<SampleTrace> basebands;
    for (int sc = 0; sc < plan.n_sc; ++sc) {
        const RngStream bits_rng = rng.derive(0x9a10ad + static_cast<std::uint64_t>(sc));
        QamFrame frame;
        frame.sc_index = sc;
        frame.symbols.resize(n_symbols);
        frame.bits.resize(4 * n_symbols);
        for (std::size_t k = 0; k < n_symbols; ++k) {
            const auto nibble = static_cast<std::uint8_t>(bits_rng.word(k) & 0xF);
            frame.symbols[k] = qam16_map(nibble);
            for (int b = 0; b < 4; ++b)
                frame.bits[4 * k + static_cast<std::size_t>(b)] =
                    static_cast<std::uint8_t>((nibble >> (3 - b)) & 1);
        }

        // Impulse train -> circular root-raised-cosine shaping.
        SampleTrace shaped = SampleTrace::zeros(trace_len, rate);
        for (std::size_t k = 0; k < n_symbols; ++k)
            shaped.samples[k * static_cast<std::size_t>(samples_per_symbol)] = frame.symbols[k];
        Spectrum spec = forward_transform(shaped);
        std::vector<double> mask(spec.size());
        for (std::size_t k = 0; k < spec.size(); ++k)
            mask[k] = rrc_response(spec.frequency_hz(k), plan.per_sc_baud_hz, plan.rrc_rolloff);
        kernel::gain_apply(spec.bins, mask);
        shaped = inverse_transform(spec);

        const double p = mean_power(shaped.samples);
        const double scale = p > 0.0 ? 1.0 / std::sqrt(p) : 1.0;
        for (auto& v : shaped.samples) v *= scale;

        out.frames.push_back(std::move(frame));
        basebands.push_back(std::move(shaped));
    }

    out.composite = mux_subcarriers(basebands, plan);
    return out;
}

namespace {

// Genie alignment shared by demodulation and SNR measurement: known
// frequency offset removal, global complex gain fit, and decision samples
// on the known timing grid.
struct AlignedSymbols {
    std::vector<cplx> received;  // after offset removal and global gain
    std::vector<cplx> reference;
};

AlignedSymbols align(const SampleTrace& capture, const QamFrame& frame,
                     const ChannelConfig& channel, const DemodOptions& opt) {
    capture.validate();
    const std::size_t n_sym = frame.symbols.size();
    const std::size_t last = opt.first_symbol_sample + 2 * (n_sym - 1);
    if (last >= capture.size()) throw ConfigError("demodulate: capture shorter than the frame");

    SampleTrace work = capture;
    if (channel.enable_cd && channel.fiber_km > 0.0) work = apply_cd_inverse(work, channel);
    if (channel.freq_offset_hz != 0.0)
        kernel::phase_ramp(work.samples, kTwoPi * channel.freq_offset_hz / capture.sample_rate_hz,
                           0.0);

    AlignedSymbols a;
    a.received.resize(n_sym);
    a.reference = frame.symbols;
    cplx num{};
    double den = 0.0;
    for (std::size_t k = 0; k < n_sym; ++k) {
        a.received[k] = work.samples[opt.first_symbol_sample + 2 * k];
        num += a.received[k] * std::conj(frame.symbols[k]);
        den += std::norm(frame.symbols[k]);
    }
    const cplx h0 = den > 0.0 ? num / den : cplx(1.0, 0.0);
    if (std::abs(h0) > 0.0)
        for (auto& v : a.received) v /= h0;
    return a;
}

} // namespace

BerResult demodulate(const SampleTrace& capture, const QamFrame& frame, const ChannelConfig& channel,
                     const SubcarrierPlan& plan, const DemodOptions& opt) {
    (void)plan;
    AlignedSymbols a = align(capture, frame, channel, opt);
    const std::size_t n_sym = a.received.size();

    // Data-aided residual phase over a sliding window (prefix sums).
    std::vector<cplx> prefix(n_sym + 1, cplx{});
    for (std::size_t k = 0; k < n_sym; ++k)
        prefix[k + 1] = prefix[k] + a.received[k] * std::conj(a.reference[k]);
    const auto w = static_cast<std::size_t>(std::max(opt.cpe_half_window, 0));

    BerResult res;
    res.sc_index = frame.sc_index;
    res.bits_total = 4 * n_sym;
    for (std::size_t k = 0; k < n_sym; ++k) {
        const std::size_t lo = k > w ? k - w : 0;
        const std::size_t hi = std::min(k + w + 1, n_sym);
        const cplx corr = prefix[hi] - prefix[lo];
        const double phase = std::abs(corr) > 0.0 ? std::arg(corr) : 0.0;
        const cplx decision = a.received[k] * std::polar(1.0, -phase);
        const std::uint8_t tx_nibble = static_cast<std::uint8_t>(
            (frame.bits[4 * k] << 3) | (frame.bits[4 * k + 1] << 2) | (frame.bits[4 * k + 2] << 1) |
            frame.bits[4 * k + 3]);
        const std::uint8_t rx_nibble = qam16_demap(decision);
        const std::uint8_t diff = tx_nibble ^ rx_nibble;
        res.bit_errors += static_cast<std::uint64_t>(__builtin_popcount(diff));
    }
    res.ber = static_cast<double>(res.bit_errors) / static_cast<double>(res.bits_total);
    return res;
}

double qam16_ber_theoretical(double es_n0_linear) {
    const double x = std::sqrt(es_n0_linear / 10.0);
    return 3.0 / 8.0 * std::erfc(x) + 1.0 / 4.0 * std::erfc(3.0 * x) -
           1.0 / 8.0 * std::erfc(5.0 * x);
}

double measure_decision_snr(const SampleTrace& capture, const QamFrame& frame,
                            const ChannelConfig& channel, const DemodOptions& opt) {
    AlignedSymbols a = align(capture, frame, channel, opt);
    double es = 0.0, n0 = 0.0;
    for (std::size_t k = 0; k < a.received.size(); ++k) {
        es += std::norm(a.reference[k]);
        n0 += std::norm(a.received[k] - a.reference[k]);
    }
    if (n0 <= 0.0) return std::numeric_limits<double>::infinity();
    return es / n0;
}

} // namespace dscm
