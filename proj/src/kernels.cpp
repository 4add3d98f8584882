#include "dscm/kernels.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dscm/errors.hpp"
#include "dscm/trace.hpp"

namespace dscm::kernel {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool use_parallel(std::size_t n, std::size_t threshold) {
#ifdef _OPENMP
    return n >= threshold && omp_get_max_threads() > 1 && !omp_in_parallel();
#else
    (void)n;
    (void)threshold;
    return false;
#endif
}

// Twiddle table for size n: w[k] = exp(-j*2*pi*k/n), k in [0, n/2).
// Cached per size; sweeps reuse a handful of sizes heavily.
std::shared_ptr<const std::vector<cplx>> twiddles(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, std::shared_ptr<const std::vector<cplx>>> cache;
    {
        std::scoped_lock lock(mu);
        if (auto it = cache.find(n); it != cache.end()) return it->second;
    }
    auto table = std::make_shared<std::vector<cplx>>(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double a = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        (*table)[k] = cplx(std::cos(a), std::sin(a));
    }
    std::scoped_lock lock(mu);
    cache.emplace(n, table);
    return table;
}

void bit_reverse_permute(std::span<cplx> x) {
    const std::size_t n = x.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
}

template <bool Parallel>
void fft_impl(std::span<cplx> x, bool inverse) {
    const std::size_t n = x.size();
    require_power_of_two(n, "fft");
    if (n == 1) return;

    bit_reverse_permute(x);
    const auto tw = twiddles(n);
    const auto& w = *tw;

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t stride = n / len;
        const auto groups = static_cast<std::ptrdiff_t>(n / len);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (Parallel && n >= (1u << 16))
#endif
        for (std::ptrdiff_t g = 0; g < groups; ++g) {
            cplx* blk = x.data() + static_cast<std::size_t>(g) * len;
            for (std::size_t k = 0; k < half; ++k) {
                cplx tw_k = w[k * stride];
                if (inverse) tw_k = std::conj(tw_k);
                const cplx t = blk[k + half] * tw_k;
                blk[k + half] = blk[k] - t;
                blk[k] += t;
            }
        }
    }

    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& v : x) v *= inv;
    }
}

} // namespace

void fft_serial(std::span<cplx> data, bool inverse) { fft_impl<false>(data, inverse); }

void fft(std::span<cplx> data, bool inverse) {
    if (use_parallel(data.size(), 1u << 16))
        fft_impl<true>(data, inverse);
    else
        fft_impl<false>(data, inverse);
}

void phase_ramp_serial(std::span<cplx> x, double rad_per_sample, double rad0) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = rad0 + rad_per_sample * static_cast<double>(i);
        x[i] *= cplx(std::cos(a), std::sin(a));
    }
}

void phase_ramp(std::span<cplx> x, double rad_per_sample, double rad0) {
    if (!use_parallel(x.size(), 1u << 14)) {
        phase_ramp_serial(x, rad_per_sample, rad0);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.size()); ++i) {
        const double a = rad0 + rad_per_sample * static_cast<double>(i);
        x[static_cast<std::size_t>(i)] *= cplx(std::cos(a), std::sin(a));
    }
}

void phase_apply_serial(std::span<cplx> x, std::span<const double> phase) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] *= cplx(std::cos(phase[i]), std::sin(phase[i]));
}

void phase_apply(std::span<cplx> x, std::span<const double> phase) {
    if (!use_parallel(x.size(), 1u << 14)) {
        phase_apply_serial(x, phase);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.size()); ++i) {
        const auto k = static_cast<std::size_t>(i);
        x[k] *= cplx(std::cos(phase[k]), std::sin(phase[k]));
    }
}

void add_gaussian_serial(std::span<cplx> x, double variance, const RngStream& rng, std::uint64_t ctr0) {
    const double sigma = std::sqrt(variance);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += sigma * rng.gaussian_pair(ctr0 + i);
}

void add_gaussian(std::span<cplx> x, double variance, const RngStream& rng, std::uint64_t ctr0) {
    if (!use_parallel(x.size(), 1u << 14)) {
        add_gaussian_serial(x, variance, rng, ctr0);
        return;
    }
    const double sigma = std::sqrt(variance);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.size()); ++i) {
        const auto k = static_cast<std::size_t>(i);
        x[k] += sigma * rng.gaussian_pair(ctr0 + k);
    }
}

void gain_apply_serial(std::span<cplx> x, std::span<const double> gain) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] *= gain[i];
}

void gain_apply(std::span<cplx> x, std::span<const double> gain) {
    if (!use_parallel(x.size(), 1u << 14)) {
        gain_apply_serial(x, gain);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(x.size()); ++i) {
        const auto k = static_cast<std::size_t>(i);
        x[k] *= gain[k];
    }
}

namespace {
constexpr std::size_t kChunk = 4096;

// Chunked two-level accumulation keeps the summation order independent of
// the thread count, so serial and parallel results match bit-for-bit.
double power_sum_chunked(std::span<const cplx> x, bool parallel) {
    const std::size_t n = x.size();
    const std::size_t nchunks = (n + kChunk - 1) / kChunk;
    std::vector<double> partial(nchunks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(nchunks); ++c) {
        const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
        const std::size_t end = std::min(begin + kChunk, n);
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i) acc += std::norm(x[i]);
        partial[static_cast<std::size_t>(c)] = acc;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}
} // namespace

double power_sum_serial(std::span<const cplx> x) { return power_sum_chunked(x, false); }

double power_sum(std::span<const cplx> x) {
    return power_sum_chunked(x, use_parallel(x.size(), 1u << 16));
}

} // namespace dscm::kernel
