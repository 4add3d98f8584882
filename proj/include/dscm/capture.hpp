#pragma once

#include <string>

#include "dscm/trace.hpp"

// Binary capture file: little-endian header followed by interleaved 32-bit
// float I/Q pairs, sample-major across channels.
//
//   offset  size  field
//   0       8     magic "DSCMCAP1"
//   8       4     u32 version (1)
//   12      4     u32 channel count
//   16      8     f64 sample rate in Hz
//   24      8     u64 samples per channel
//   32      ...   samples: for each sample, for each channel: f32 I, f32 Q
namespace dscm {

inline constexpr char kCaptureMagic[8] = {'D', 'S', 'C', 'M', 'C', 'A', 'P', '1'};
inline constexpr std::uint32_t kCaptureVersion = 1;

void write_capture(const std::string& path, const DualPolFrame& frame);
DualPolFrame read_capture(const std::string& path);

} // namespace dscm
