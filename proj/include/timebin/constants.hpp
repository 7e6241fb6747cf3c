#pragma once

namespace timebin {

/// Vacuum speed of light [m/s].
inline constexpr double speed_of_light = 299792458.0;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

}  // namespace timebin
