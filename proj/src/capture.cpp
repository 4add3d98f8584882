#include "dscm/capture.hpp"

#include <cstring>
#include <fstream>
#include <vector>

namespace dscm {

namespace {

template <typename T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T get(std::ifstream& is, const std::string& path) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(v)))
        throw IoError("capture: truncated file " + path);
    return v;
}

} // namespace

void write_capture(const std::string& path, const DualPolFrame& frame) {
    frame.validate();
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("capture: cannot open for writing: " + path);
    os.write(kCaptureMagic, sizeof(kCaptureMagic));
    put<std::uint32_t>(os, kCaptureVersion);
    put<std::uint32_t>(os, 2);
    put<double>(os, frame.sample_rate_hz());
    put<std::uint64_t>(os, frame.size());
    std::vector<float> row(4);
    for (std::size_t n = 0; n < frame.size(); ++n) {
        row[0] = static_cast<float>(frame.x.samples[n].real());
        row[1] = static_cast<float>(frame.x.samples[n].imag());
        row[2] = static_cast<float>(frame.y.samples[n].real());
        row[3] = static_cast<float>(frame.y.samples[n].imag());
        os.write(reinterpret_cast<const char*>(row.data()),
                 static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!os) throw IoError("capture: write failed: " + path);
}

DualPolFrame read_capture(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("capture: cannot open: " + path);
    char magic[8];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kCaptureMagic, sizeof(magic)) != 0)
        throw IoError("capture: bad magic in " + path);
    const auto version = get<std::uint32_t>(is, path);
    if (version != kCaptureVersion) throw IoError("capture: unsupported version in " + path);
    const auto channels = get<std::uint32_t>(is, path);
    if (channels != 2) throw IoError("capture: expected 2 channels (X, Y) in " + path);
    const auto rate = get<double>(is, path);
    const auto count = get<std::uint64_t>(is, path);
    if (rate <= 0.0 || count == 0) throw IoError("capture: bad header in " + path);

    DualPolFrame frame;
    frame.x = SampleTrace::zeros(count, rate);
    frame.y = SampleTrace::zeros(count, rate);
    std::vector<float> row(4);
    for (std::size_t n = 0; n < count; ++n) {
        if (!is.read(reinterpret_cast<char*>(row.data()),
                     static_cast<std::streamsize>(row.size() * sizeof(float))))
            throw IoError("capture: truncated samples in " + path);
        frame.x.samples[n] = cplx(row[0], row[1]);
        frame.y.samples[n] = cplx(row[2], row[3]);
    }
    return frame;
}

} // namespace dscm
