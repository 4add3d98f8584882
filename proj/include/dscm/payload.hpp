#pragma once

#include <cstdint>
#include <vector>

#include "dscm/link.hpp"
#include "dscm/rng.hpp"
#include "dscm/trace.hpp"

// 16QAM payload generation and a simplified known-channel demodulator for
// bit-error-rate measurement. The receiver is genie-aided (known frequency
// offset, timing and transmitted symbols for phase tracking), which isolates
// the effect of IQ impairments on the constellation.
namespace dscm {

/// Gray-mapped 16QAM symbols (unit average power) with their source bits.
struct QamFrame {
    std::vector<cplx> symbols;
    std::vector<std::uint8_t> bits;  // 4 bits per symbol, MSB-first per axis pair
    int sc_index = 0;
};

struct BerResult {
    int sc_index = 0;
    std::uint64_t bit_errors = 0;
    std::uint64_t bits_total = 0;
    double ber = 0.0;
};

/// Map 4 bits to a unit-average-power Gray 16QAM point and back.
cplx qam16_map(std::uint8_t nibble);
std::uint8_t qam16_demap(cplx received);

/// Per-subcarrier payloads plus the muxed composite for one polarization.
struct PayloadSignal {
    std::vector<QamFrame> frames;  // one per subcarrier
    SampleTrace composite;         // at plan-rate * samples_per_symbol
};

/// Random bits -> Gray 16QAM -> root-raised-cosine shaping (circular block
/// semantics) -> subcarrier multiplex. n_symbols must make the per-subcarrier
/// trace length a power of two.
PayloadSignal generate_payload(std::size_t n_symbols, const SubcarrierPlan& plan,
                               int samples_per_symbol, const RngStream& rng);

struct DemodOptions {
    std::size_t first_symbol_sample = 0;  // capture index of symbol 0 (2 samples/symbol grid)
    int cpe_half_window = 32;             // data-aided phase tracking half-window, symbols
};

/// Matched filtering already happened in subcarrier selection; this aligns
/// the genie timing grid, removes the known frequency offset, tracks residual
/// common phase against the known symbols, hard-decides and counts errors.
BerResult demodulate(const SampleTrace& capture, const QamFrame& frame, const ChannelConfig& channel,
                     const SubcarrierPlan& plan, const DemodOptions& opt);

/// Exact Gray-coded 16QAM bit error rate over AWGN at symbol SNR Es/N0.
double qam16_ber_theoretical(double es_n0_linear);

/// Decision-point symbol SNR measured against the known symbols (genie).
double measure_decision_snr(const SampleTrace& capture, const QamFrame& frame,
                            const ChannelConfig& channel, const DemodOptions& opt);

} // namespace dscm
