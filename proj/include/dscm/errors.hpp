#pragma once

#include <stdexcept>
#include <string>

namespace dscm {

// Error taxonomy mirrors the CLI exit codes: config -> 2, detection/estimation -> 3, io -> 4.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Band does not fit the requested rate conversion or mask.
struct SpectralFitError : ConfigError {
    explicit SpectralFitError(const std::string& what) : ConfigError(what) {}
};

struct DetectionError : std::runtime_error {
    explicit DetectionError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a tone is too weak to trust; carries the measured tone SNR.
struct EstimationError : std::runtime_error {
    EstimationError(const std::string& what, double tone_snr_db)
        : std::runtime_error(what), tone_snr_db(tone_snr_db) {}
    double tone_snr_db;
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitEstimation = 3;
inline constexpr int kExitIo = 4;

} // namespace dscm
