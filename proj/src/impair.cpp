#include "dscm/impair.hpp"

#include <cmath>

#include "dscm/dsp.hpp"

namespace dscm {

SampleTrace apply_tx_iq(const SampleTrace& trace, const IqImpairment& imp) {
    imp.validate();
    if (imp.is_identity()) return trace;
    trace.validate();

    const auto i_in = real_part(trace.samples);
    auto q = imag_part(trace.samples);
    // Q(t + skew) is an advance, i.e. a delay by -skew.
    if (imp.skew_s != 0.0) q = fractional_delay_real(q, trace.sample_rate_hz, -imp.skew_s);

    const double gs = imp.gain * std::sin(imp.quad_error_rad);
    const double gc = imp.gain * std::cos(imp.quad_error_rad);
    SampleTrace out;
    out.sample_rate_hz = trace.sample_rate_hz;
    out.samples.resize(trace.size());
    for (std::size_t n = 0; n < trace.size(); ++n)
        out.samples[n] = cplx(i_in[n] - gs * q[n], gc * q[n]);
    return out;
}

SampleTrace apply_rx_iq(const SampleTrace& trace, const IqImpairment& imp) {
    imp.validate();
    if (imp.is_identity()) return trace;
    trace.validate();

    const auto i_in = real_part(trace.samples);
    auto q = imag_part(trace.samples);
    std::vector<double> id;
    if (imp.skew_s != 0.0) {
        q = fractional_delay_real(q, trace.sample_rate_hz, -imp.skew_s);
        if (imp.quad_error_rad != 0.0)
            id = fractional_delay_real(i_in, trace.sample_rate_hz, -imp.skew_s);
    }
    if (imp.quad_error_rad != 0.0 && id.empty()) id = i_in;

    const double gs = imp.gain * std::sin(imp.quad_error_rad);
    const double gc = imp.gain * std::cos(imp.quad_error_rad);
    SampleTrace out;
    out.sample_rate_hz = trace.sample_rate_hz;
    out.samples.resize(trace.size());
    for (std::size_t n = 0; n < trace.size(); ++n) {
        const double qo = imp.quad_error_rad != 0.0 ? gc * q[n] - gs * id[n] : gc * q[n];
        out.samples[n] = cplx(i_in[n], qo);
    }
    return out;
}

} // namespace dscm
