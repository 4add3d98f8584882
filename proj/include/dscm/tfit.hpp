#pragma once

#include <cstddef>
#include <string>

#include "dscm/trace.hpp"

// Training frame of interleaved tones. Each symmetric subcarrier pair
// transmits two tones whose tributary assignment alternates across four
// time slots; the pairing on the mirrored subcarrier isolates each tone
// onto a single electrical tributary of the composite signal.
namespace dscm {

/// Slot roles: t1/t2 are carried on X polarization, t3/t4 on Y.
enum class SlotId { t1, t2, t3, t4 };

inline const char* to_string(SlotId s) {
    switch (s) {
        case SlotId::t1: return "t1";
        case SlotId::t2: return "t2";
        case SlotId::t3: return "t3";
        default: return "t4";
    }
}

/// Full parameterization of the training frame for one subcarrier pair.
struct TfitPlan {
    double baud_rate_hz = 8e9;
    double tone_f1_hz = 2e9;  // defaults to baud/4
    double tone_f2_hz = 4e9;  // defaults to baud/2
    // Intermediate frequency of the positive subcarrier of the pair; the
    // mirrored subcarrier sits at -sc_center_hz.
    double sc_center_hz = 13.2e9;
    int slot_len_symbols = 2048;
    int n_blocks = 3;
    double tone_amplitude = 0.70710678118654752440;
    int samples_per_symbol_gen = 8;
    // Initial tone phases; estimates must be invariant to these.
    double tone_phase_f1_rad = 0.0;
    double tone_phase_f2_rad = 0.0;

    double sample_rate_gen_hz() const { return baud_rate_hz * samples_per_symbol_gen; }
    std::size_t slot_samples_gen() const {
        return static_cast<std::size_t>(slot_len_symbols) * static_cast<std::size_t>(samples_per_symbol_gen);
    }
    std::size_t frame_samples_gen() const {
        return 4u * static_cast<std::size_t>(n_blocks) * slot_samples_gen();
    }
    double slot_duration_s() const { return static_cast<double>(slot_len_symbols) / baud_rate_hz; }

    void validate() const;
};

/// One slot of the training frame (time origin at the slot start).
DualPolFrame build_slot(const TfitPlan& plan, SlotId slot);

/// Concatenation t1|t2|t3|t4 repeated n_blocks times, phase-continuous
/// across the whole frame.
DualPolFrame build_frame(const TfitPlan& plan);

} // namespace dscm
