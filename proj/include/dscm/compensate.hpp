#pragma once

#include "dscm/trace.hpp"

// Inversion of estimated IQ impairments: receiver-side compensation at the
// leaf and transmitter-side pre-compensation at the hub. The delay uses the
// same exact spectral method as the impairment injection, so residuals in
// closed-loop tests measure estimator error, not interpolator error.
namespace dscm {

struct CompensationSpec {
    double tau_s = 0.0;
    double gain_correction = 1.0;  // estimated gain g; the Q tributary is scaled by 1/g
    bool apply_gsop_first = false;

    void validate() const {
        if (!(gain_correction > 0.0))
            throw ConfigError("CompensationSpec: gain correction must be positive");
    }
};

/// Inverse of the receiver model for theta = 0: optional GSOP, then the Q
/// tributary is scaled by 1/gain and delayed by tau.
SampleTrace compensate_rx(const SampleTrace& trace, const CompensationSpec& spec);

/// Hub-side digital pre-distortion: applying the transmitter impairment
/// after this yields the original signal (theta = 0, matched spec).
SampleTrace precompensate_tx(const SampleTrace& trace, const CompensationSpec& spec);

} // namespace dscm
