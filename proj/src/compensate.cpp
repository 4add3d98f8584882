#include "dscm/compensate.hpp"

#include "dscm/dsp.hpp"
#include "dscm/estimate.hpp"

namespace dscm {

namespace {

// Undo Q(t) -> g * Q(t + tau): scale by 1/g and delay by tau.
SampleTrace invert_q_tributary(const SampleTrace& trace, const CompensationSpec& spec) {
    const auto i_in = real_part(trace.samples);
    auto q = imag_part(trace.samples);
    if (spec.tau_s != 0.0) q = fractional_delay_real(q, trace.sample_rate_hz, spec.tau_s);
    const double inv_gain = 1.0 / spec.gain_correction;
    SampleTrace out;
    out.sample_rate_hz = trace.sample_rate_hz;
    out.samples.resize(trace.size());
    for (std::size_t n = 0; n < trace.size(); ++n)
        out.samples[n] = cplx(i_in[n], inv_gain * q[n]);
    return out;
}

} // namespace

SampleTrace compensate_rx(const SampleTrace& trace, const CompensationSpec& spec) {
    spec.validate();
    trace.validate();
    const SampleTrace* src = &trace;
    SampleTrace ortho;
    if (spec.apply_gsop_first) {
        ortho = gsop(trace);
        src = &ortho;
    }
    if (spec.tau_s == 0.0 && spec.gain_correction == 1.0) return *src;
    return invert_q_tributary(*src, spec);
}

SampleTrace precompensate_tx(const SampleTrace& trace, const CompensationSpec& spec) {
    spec.validate();
    trace.validate();
    if (spec.tau_s == 0.0 && spec.gain_correction == 1.0) return trace;
    // The transmitter applies Q(t + tau), an advance; pre-distort with the
    // opposite shift so the cascade is the identity.
    const auto i_in = real_part(trace.samples);
    auto q = imag_part(trace.samples);
    if (spec.tau_s != 0.0) q = fractional_delay_real(q, trace.sample_rate_hz, spec.tau_s);
    const double inv_gain = 1.0 / spec.gain_correction;
    SampleTrace out;
    out.sample_rate_hz = trace.sample_rate_hz;
    out.samples.resize(trace.size());
    for (std::size_t n = 0; n < trace.size(); ++n)
        out.samples[n] = cplx(i_in[n], inv_gain * q[n]);
    return out;
}

} // namespace dscm
