#pragma once

namespace capcav {

// Speed of light in vacuum, m/s.
inline constexpr double kSpeedOfLight = 299792458.0;

// Handy unit conversions. Internally lengths are nm unless a name says
// otherwise; rates are ordinary (not angular) frequencies in GHz.
inline constexpr double kNmPerUm = 1000.0;

inline constexpr double kPi = 3.14159265358979323846;

} // namespace capcav
