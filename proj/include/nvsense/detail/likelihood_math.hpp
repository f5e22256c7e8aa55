#pragma once

#include <algorithm>
#include <cmath>

namespace nvsense::detail {

// Scalar-type-dependent floor on cos(phi). The gain below has a removable
// singularity at cos(phi) = -1; nudging the argument off the endpoint keeps
// the evaluation finite and perturbs the likelihood by far less than the
// global clamp.
template <typename T>
inline constexpr T kCosPhiFloor = T(-1) + T(1e-12);
template <>
inline constexpr float kCosPhiFloor<float> = -1.0f + 1e-6f;

// [sin(16 phi) / cos(phi / 2)]^2 written in c = cos(phi) on the principal
// branch: (1 - T16(c)^2) / ((1 + c) / 2), with T16 built from four Chebyshev
// doublings. Peaks at 1024 as c -> -1.
template <typename T>
inline T pulse_train_gain(T c) {
    c = std::max(c, kCosPhiFloor<T>);
    T t = T(2) * c * c - T(1);
    t = T(2) * t * t - T(1);
    t = T(2) * t * t - T(1);
    t = T(2) * t * t - T(1);
    return (T(1) - t * t) / ((T(1) + c) * T(0.5));
}

// Per-spin quantities that do not depend on tau.
struct SpinTerm {
    double omega_eff;  // effective precession frequency \tilde\omega
    double axis_z;     // (omega_h cos theta + omega_L) / omega_eff
    double amp;        // (omega_h sin theta / omega_eff)^2
};

inline SpinTerm make_spin_term(double omega_h, double theta, double omega_larmor) {
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    double w2 = omega_h * omega_h + omega_larmor * omega_larmor +
                2.0 * omega_h * omega_larmor * ct;
    const double w = std::sqrt(std::max(w2, 1e-300));
    return SpinTerm{w, (omega_h * ct + omega_larmor) / w, (omega_h * st / w) * (omega_h * st / w)};
}

// One factor of the M product given cos/sin of omega_eff*tau and the Larmor
// terms for this tau.
template <typename T>
inline T nuclear_spin_factor(const SpinTerm& s, T cos_wt, T sin_wt, T cos_l, T sin_l, T sin2_l_half) {
    T cphi = cos_wt * cos_l - T(s.axis_z) * sin_wt * sin_l;
    cphi = std::min(cphi, T(1));
    const T gain = pulse_train_gain(cphi);
    const T modulation = T(s.amp) * ((T(1) - cos_wt) * T(0.5)) * sin2_l_half;
    return T(1) - T(2) * gain * modulation;
}

// cos(3x) + cos(5x) + cos(11x) + cos(13x) = 4 cos(x) cos(4x) cos(8x),
// expressed in c = cos(x) via Chebyshev doublings.
template <typename T>
inline T ac_cosine_comb(T c) {
    const T c2 = T(2) * c * c - T(1);
    const T c4 = T(2) * c2 * c2 - T(1);
    const T c8 = T(2) * c4 * c4 - T(1);
    return T(4) * c * c4 * c8;
}

// Truncated series of J0(a) up to a^order, order even. order = 6 gives
// 1 - a^2/4 + a^4/64 - a^6/2304.
template <typename T>
inline T bessel_j0_truncated(T a, int order) {
    const T q = (a * a) * T(0.25);  // (a/2)^2
    T term = T(1);
    T sum = T(1);
    for (int k = 1; 2 * k <= order; ++k) {
        term *= -q / T(k * k);
        sum += term;
    }
    return sum;
}

template <typename T>
inline T clamp_probability(T p, T eps) {
    return std::clamp(p, eps, T(1) - eps);
}

}  // namespace nvsense::detail
