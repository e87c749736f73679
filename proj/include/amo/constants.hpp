#pragma once

namespace amo {

inline constexpr double kSpeedOfLight = 299792458.0;        // m/s
inline constexpr double kHbar = 1.054571817e-34;            // J s
inline constexpr double kAmu = 1.66053906660e-27;           // kg
inline constexpr double kMassRb87 = 86.909180532 * kAmu;    // kg
inline constexpr double kPi = 3.14159265358979323846;

}  // namespace amo
