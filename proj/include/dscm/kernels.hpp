#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>

#include "dscm/rng.hpp"

// Data-parallel sample kernels. Each kernel has a serial reference
// implementation (suffix _serial) that the OpenMP variant must match
// bit-for-bit; unit tests and the bench tool compare the two. The OpenMP
// variants fall back to the serial path when already inside a parallel
// region, so sweep workers that parallelize across trials never nest.
namespace dscm::kernel {

using cplx = std::complex<double>;

// In-place radix-2 DIT FFT. inverse=true applies the 1/N scale.
void fft_serial(std::span<cplx> data, bool inverse);
void fft(std::span<cplx> data, bool inverse);

// x[i] *= exp(j * (rad0 + rad_per_sample * i))
void phase_ramp_serial(std::span<cplx> x, double rad_per_sample, double rad0);
void phase_ramp(std::span<cplx> x, double rad_per_sample, double rad0);

// x[i] *= exp(j * phase[i])
void phase_apply_serial(std::span<cplx> x, std::span<const double> phase);
void phase_apply(std::span<cplx> x, std::span<const double> phase);

// x[i] += sigma * g_i where g_i is a unit-variance circular complex Gaussian
// drawn at counter index ctr0 + i. Deterministic for any thread count.
void add_gaussian_serial(std::span<cplx> x, double variance, const RngStream& rng, std::uint64_t ctr0);
void add_gaussian(std::span<cplx> x, double variance, const RngStream& rng, std::uint64_t ctr0);

// x[i] *= gain[i] (real gain mask, e.g. spectral filters)
void gain_apply_serial(std::span<cplx> x, std::span<const double> gain);
void gain_apply(std::span<cplx> x, std::span<const double> gain);

// Sum of |x[i]|^2 with a fixed, chunked accumulation order.
double power_sum_serial(std::span<const cplx> x);
double power_sum(std::span<const cplx> x);

} // namespace dscm::kernel
