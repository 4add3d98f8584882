#pragma once

#include <complex>
#include <cstdint>

namespace dscm {

// Counter-based random stream: every draw is a pure function of
// (seed, stream_id, index), so results do not depend on call order,
// thread count, or platform. Substreams are derived by hashing, which
// lets a sweep hand independent generators to every trial and stage.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id), base_(mix(mix(seed + kC0) ^ mix(stream_id + kC1))) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // Derive an independent stream, e.g. per trial or per noise stage.
    RngStream derive(std::uint64_t substream) const {
        return RngStream(seed_, mix(stream_id_ + kC2) ^ mix(substream + kC3));
    }

    std::uint64_t word(std::uint64_t index) const { return mix(base_ ^ mix(index + kC4)); }

    // Uniform in (0, 1]; never returns 0 so log() is safe.
    double uniform(std::uint64_t index) const {
        return (static_cast<double>(word(index) >> 11) + 1.0) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound).
    std::uint64_t uniform_int(std::uint64_t index, std::uint64_t bound) const {
        return bound ? word(index) % bound : 0;
    }

    // Circular complex Gaussian with E|z|^2 = 1 (Box-Muller, two uniforms per draw).
    std::complex<double> gaussian_pair(std::uint64_t index) const;

    // Real standard normal.
    double gaussian(std::uint64_t index) const;

private:
    static constexpr std::uint64_t kC0 = 0x40463317102055c5ull;
    static constexpr std::uint64_t kC1 = 0x9e3779b97f4a7c15ull;
    static constexpr std::uint64_t kC2 = 0xd1b54a32d192ed03ull;
    static constexpr std::uint64_t kC3 = 0x8cb92ba72f3d8dd7ull;
    static constexpr std::uint64_t kC4 = 0x2545f4914f6cdd1dull;

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t base_;
};

} // namespace dscm
