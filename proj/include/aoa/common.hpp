#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace aoa {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0; // m/s

// Field of view covered by the learned estimators, degrees.
inline constexpr double kFovMinDeg = -74.0;
inline constexpr double kFovMaxDeg = 74.0;

inline double deg2rad(double deg) { return deg * (kPi / 180.0); }
inline double rad2deg(double rad) { return rad * (180.0 / kPi); }

// Missing or malformed input data (files, frames, records). CLI exit code 3.
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration or an unsupported request. CLI exit code 2.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerically degenerate input (zero-norm feature block, non-finite values).
// CLI exit code 4.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace aoa
