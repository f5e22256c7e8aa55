#pragma once

namespace nvsense::units {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;

// Internal convention: angular frequencies in rad/us, times in us, fields in
// mT. Configuration files use ordinary-frequency Hz and seconds; these
// helpers live at that boundary.
constexpr double rad_per_us_from_hz(double hz) { return kTwoPi * hz * 1e-6; }
constexpr double hz_from_rad_per_us(double w) { return w * 1e6 / kTwoPi; }
constexpr double khz_from_rad_per_us(double w) { return w * 1e3 / kTwoPi; }
constexpr double us_from_s(double s) { return s * 1e6; }
constexpr double s_from_us(double us) { return us * 1e-6; }
constexpr double rad_from_deg(double deg) { return deg * kPi / 180.0; }
constexpr double deg_from_rad(double rad) { return rad * 180.0 / kPi; }

}  // namespace nvsense::units
