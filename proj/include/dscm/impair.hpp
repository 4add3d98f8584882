#pragma once

#include <cmath>

#include "dscm/trace.hpp"

// Transceiver IQ impairments: relative delay (skew), amplitude imbalance and
// phase quadrature error between the I and Q tributaries of a complex signal.
// Impairments are frequency-flat; one set per side per polarization.
namespace dscm {

/// One side's, one polarization's IQ impairment.
/// Sign convention: positive skew means the Q tributary is advanced, i.e. the
/// impaired output samples Q(t + skew). Power imbalance in dB is 20*log10(gain).
struct IqImpairment {
    double skew_s = 0.0;
    double gain = 1.0;            // amplitude ratio applied to the Q tributary
    double quad_error_rad = 0.0;  // deviation of the I/Q angle from 90 degrees

    static IqImpairment with_db(double skew_s, double imbalance_db, double quad_error_rad = 0.0) {
        return {skew_s, std::pow(10.0, imbalance_db / 20.0), quad_error_rad};
    }
    double imbalance_db() const { return 20.0 * std::log10(gain); }
    bool is_identity() const { return skew_s == 0.0 && gain == 1.0 && quad_error_rad == 0.0; }

    void validate() const {
        if (!(gain > 0.0)) throw ConfigError("IqImpairment: gain must be positive");
        if (!(std::abs(quad_error_rad) < 1.5707963267948966))
            throw ConfigError("IqImpairment: |quadrature error| must be below 90 degrees");
    }
};

/// The four impairment corners of a link (per polarization, per side).
struct ImpairmentSet {
    IqImpairment tx_x, tx_y, rx_x, rx_y;
};

/// Transmitter model: with Qd(t) = Q(t + skew),
///   I_out = I - gain*sin(theta)*Qd,  Q_out = gain*cos(theta)*Qd.
SampleTrace apply_tx_iq(const SampleTrace& trace, const IqImpairment& imp);

/// Receiver model: with Qd(t) = Q(t + skew), Id(t) = I(t + skew),
///   I_out = I,  Q_out = gain*(cos(theta)*Qd - sin(theta)*Id).
SampleTrace apply_rx_iq(const SampleTrace& trace, const IqImpairment& imp);

} // namespace dscm
