#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "dscm/dsp.hpp"
#include "dscm/kernels.hpp"
#include "dscm/rng.hpp"
#include "helpers.hpp"

using namespace dscm;
using namespace testutil;

TEST_CASE("forward transform: DC trace concentrates in bin 0") {
    SampleTrace t{std::vector<cplx>(8, cplx(1.0, 0.0)), 8.0};
    const Spectrum s = forward_transform(t);
    CHECK(std::abs(s.bins[0] - cplx(8.0, 0.0)) < 1e-12);
    for (std::size_t k = 1; k < 8; ++k) CHECK(std::abs(s.bins[k]) < 1e-12);
}

TEST_CASE("forward transform: unit tone lands on a single bin") {
    const std::size_t n = 64;
    const double rate = 64e9;
    const std::size_t k0 = 5;
    const SampleTrace t = tone(n, rate, static_cast<double>(k0) * rate / n);
    const Spectrum s = forward_transform(t);
    for (std::size_t k = 0; k < n; ++k) {
        if (k == k0)
            CHECK(std::abs(s.bins[k] - cplx(64.0, 0.0)) < 1e-9);
        else
            CHECK(std::abs(s.bins[k]) < 1e-9);
    }
}

TEST_CASE("forward transform: Parseval vs direct summation oracle") {
    const RngStream rng(7, 1);
    for (const std::size_t n : {std::size_t(256), std::size_t(4096)}) {
        SampleTrace t;
        t.sample_rate_hz = 1e9;
        t.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) t.samples[i] = rng.gaussian_pair(i + n);
        double time_energy = 0.0;
        for (const auto& v : t.samples) time_energy += std::norm(v);
        const Spectrum s = forward_transform(t);
        double spec_energy = 0.0;
        for (const auto& v : s.bins) spec_energy += std::norm(v);
        CHECK(std::abs(time_energy - spec_energy / static_cast<double>(n)) < 1e-9 * time_energy);
    }
}

TEST_CASE("forward transform: inverse round trip to 1e-9 up to 2^20") {
    const RngStream rng(3, 9);
    for (const std::size_t n : {std::size_t(8), std::size_t(1) << 12, std::size_t(1) << 20}) {
        SampleTrace t;
        t.sample_rate_hz = 2e9;
        t.samples.resize(n);
        for (std::size_t i = 0; i < n; ++i) t.samples[i] = rng.gaussian_pair(i);
        const SampleTrace back = inverse_transform(forward_transform(t));
        CHECK(rel_error(back.samples, t.samples) < 1e-9);
    }
}

TEST_CASE("forward transform: non-power-of-two rejected") {
    SampleTrace t{std::vector<cplx>(12, cplx(1.0, 0.0)), 1e9};
    CHECK_THROWS_AS((void)forward_transform(t), ConfigError);
}

TEST_CASE("fractional delay: zero delay is identity") {
    const SampleTrace t = tone(1024, 16e9, 1.5e9, 0.3);
    const SampleTrace d = fractional_delay(t, 0.0);
    CHECK(rel_error(d.samples, t.samples) < 1e-12);
}

TEST_CASE("fractional delay: analytic phase oracle on a tone") {
    const double rate = 16e9;
    const std::size_t n = 4096;
    const double f0 = 2e9;
    const double tau = 3.7e-12;
    const SampleTrace t = tone(n, rate, f0, 0.25);
    const SampleTrace d = fractional_delay(t, tau);
    // Every sample of the delayed tone is rotated by -2*pi*f0*tau.
    const cplx expect_rot = std::polar(1.0, -kTwoPi * f0 * tau);
    for (std::size_t i = 0; i < n; i += 97) {
        const cplx expected = t.samples[i] * expect_rot;
        CHECK(std::abs(std::arg(d.samples[i] / expected)) < 1e-9);
    }
}

TEST_CASE("fractional delay: one sample period circularly shifts") {
    const double rate = 8e9;
    const std::size_t n = 512;
    // Band-limit the signal so the shift is exact across the wrap point.
    SampleTrace t = SampleTrace::zeros(n, rate);
    const RngStream rng(11, 0);
    for (std::size_t i = 0; i < n; ++i) t.samples[i] = rng.gaussian_pair(i);
    Spectrum s = forward_transform(t);
    for (std::size_t k = n / 8; k < n - n / 8; ++k) s.bins[k] = 0.0;
    t = inverse_transform(s);

    const SampleTrace d = fractional_delay(t, 1.0 / rate);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(std::abs(d.samples[i] - t.samples[(i + n - 1) % n]) < 1e-9);
}

TEST_CASE("fractional delay: round trip cancels") {
    const double rate = 16e9;
    SampleTrace t = SampleTrace::zeros(2048, rate);
    const RngStream rng(5, 2);
    for (std::size_t i = 0; i < t.size(); ++i) t.samples[i] = rng.gaussian_pair(i);
    Spectrum s = forward_transform(t);
    for (std::size_t k = t.size() / 4; k < t.size() - t.size() / 4; ++k) s.bins[k] = 0.0;
    t = inverse_transform(s);
    const SampleTrace back = fractional_delay(fractional_delay(t, 8.3e-12), -8.3e-12);
    CHECK(rel_error(back.samples, t.samples) < 1e-9);
}

TEST_CASE("fractional delay: quarter-duration precondition") {
    const SampleTrace t = tone(256, 1e9, 1e8);
    CHECK_THROWS_AS((void)fractional_delay(t, 100e-9), ConfigError);
}

TEST_CASE("resample: unchanged rate is identity") {
    const SampleTrace t = tone(256, 8e9, 1e9);
    const SampleTrace r = resample(t, 8e9);
    CHECK(rel_error(r.samples, t.samples) == 0.0);
}

TEST_CASE("resample: tone keeps its absolute frequency when upsampled 2x") {
    const double rate = 8e9;
    const std::size_t n = 1024;
    const double f0 = rate / 4.0;
    const SampleTrace up = resample(tone(n, rate, f0), 2.0 * rate);
    CHECK(up.size() == 2 * n);
    CHECK(up.sample_rate_hz == 2.0 * rate);
    const SampleTrace want = tone(2 * n, 2.0 * rate, f0);
    CHECK(rel_error(up.samples, want.samples) < 1e-9);
}

TEST_CASE("resample: up-then-down round trip on band-limited noise") {
    const double rate = 16e9;
    SampleTrace t = SampleTrace::zeros(4096, rate);
    const RngStream rng(21, 4);
    for (std::size_t i = 0; i < t.size(); ++i) t.samples[i] = rng.gaussian_pair(i);
    Spectrum s = forward_transform(t);
    for (std::size_t k = t.size() / 8; k < t.size() - t.size() / 8; ++k) s.bins[k] = 0.0;
    t = inverse_transform(s);
    const SampleTrace rt = resample(resample(t, 2.0 * rate), rate);
    CHECK(max_abs_diff(rt.samples, t.samples) < 1e-6);
}

TEST_CASE("resample: band beyond the target Nyquist is rejected") {
    const SampleTrace t = tone(1024, 16e9, 7e9);
    CHECK_THROWS_AS((void)resample(t, 8e9), SpectralFitError);
}

TEST_CASE("gaussian noise: zero variance yields zeros") {
    const SampleTrace t = gaussian_noise(128, 1e9, 0.0, RngStream(1, 1));
    for (const auto& v : t.samples) CHECK(v == cplx{});
}

TEST_CASE("gaussian noise: unit variance moment check at 1e6 samples") {
    const SampleTrace t = gaussian_noise(std::size_t(1) << 20, 1e9, 1.0, RngStream(42, 7));
    const double var = mean_power(t.samples);
    CHECK(var > 0.99);
    CHECK(var < 1.01);
    // Circularity: the pseudo-variance E[z^2] of a proper complex Gaussian is 0.
    cplx pseudo{};
    for (const auto& v : t.samples) pseudo += v * v;
    CHECK(std::abs(pseudo) / static_cast<double>(t.size()) < 0.01);
}

TEST_CASE("gaussian noise: fixed seed reproduces, different stream differs") {
    const SampleTrace a = gaussian_noise(512, 1e9, 1.0, RngStream(9, 3));
    const SampleTrace b = gaussian_noise(512, 1e9, 1.0, RngStream(9, 3));
    const SampleTrace c = gaussian_noise(512, 1e9, 1.0, RngStream(9, 4));
    CHECK(max_abs_diff(a.samples, b.samples) == 0.0);
    CHECK(max_abs_diff(a.samples, c.samples) > 1e-3);
}

TEST_CASE("rng: frozen golden words pin the cross-run contract") {
    const RngStream rng(0x123456789abcdef0ull, 17);
    // Frozen at first implementation; changing the mixer breaks stored seeds.
    CHECK(rng.word(0) == 0xa2880e07f0ba23a8ull);
    CHECK(rng.word(1) == 0x998c8d0af5f82ea0ull);
    CHECK(rng.word(1000000007ull) == 0xb39b3966b6e66497ull);
}

TEST_CASE("kernels: serial and parallel paths match bitwise") {
    const RngStream rng(77, 8);
    std::vector<cplx> a(std::size_t(1) << 16), b;
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng.gaussian_pair(i);
    b = a;
    kernel::fft_serial(a, false);
    kernel::fft(b, false);
    CHECK(max_abs_diff(a, b) == 0.0);

    kernel::phase_ramp_serial(a, 1e-3, 0.5);
    kernel::phase_ramp(b, 1e-3, 0.5);
    CHECK(max_abs_diff(a, b) == 0.0);

    kernel::add_gaussian_serial(a, 0.25, rng, 0);
    kernel::add_gaussian(b, 0.25, rng, 0);
    CHECK(max_abs_diff(a, b) == 0.0);

    CHECK(kernel::power_sum_serial(a) == kernel::power_sum(b));
}

TEST_CASE("windowed tone power: unit tone reports ~1") {
    const SampleTrace t = tone(4096, 16e9, 1.9e9);
    const double p = windowed_tone_power(t, 1.9e9, 8);
    CHECK(p == doctest::Approx(1.0).epsilon(0.01));
}
