#include "nvsense/validation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "nvsense/csv.hpp"
#include "nvsense/detail/likelihood_math.hpp"
#include "nvsense/oracle.hpp"

namespace nvsense {

namespace {

std::string describe(double worst, double tol) {
    std::ostringstream ss;
    ss << "max deviation " << csv::format_double(worst) << " (tolerance "
       << csv::format_double(tol) << ")";
    return ss.str();
}

// Periodic trapezoid rule over [0, 2pi); converges spectrally for smooth
// periodic integrands.
template <typename F>
double phase_average(F f, int points) {
    double acc = 0.0;
    for (int i = 0; i < points; ++i) {
        acc += f(units::kTwoPi * (static_cast<double>(i) + 0.5) / points);
    }
    return acc / points;
}

}  // namespace

CheckResult check_nuclear_vs_oracle(int n_sets, int n_taus, double tol, std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int s = 0; s < n_sets; ++s) {
        NuclearModelConfig cfg;
        cfg.n_c = 1 + static_cast<int>(rng.integer(2));
        cfg.t2 = std::numeric_limits<double>::infinity();
        NuclearSpinParams p;
        for (int q = 0; q < cfg.n_c; ++q) {
            p.omega_h.push_back(rng.uniform(cfg.omega_h_lo, cfg.omega_h_hi));
            p.theta.push_back(rng.uniform(0.0, units::kPi));
        }
        for (int t = 0; t < n_taus; ++t) {
            const double tau = rng.uniform(1.0, 10.0);
            const double closed = likelihood_nuclear(p, cfg, tau);
            const double reference = oracle_xy84_population(p, cfg, tau);
            worst = std::max(worst, std::abs(closed - reference));
        }
    }
    return {"nuclear_likelihood_vs_xy84_oracle", worst < tol, describe(worst, tol)};
}

CheckResult check_bessel_truncation(int grid_points, double a_max, double tol) {
    double worst = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double a = a_max * static_cast<double>(i) / (grid_points - 1);
        const double truncated = detail::bessel_j0_truncated(a, 6);
        worst = std::max(worst, std::abs(truncated - std::cyl_bessel_j(0.0, a)));
    }
    return {"bessel_j0_sixth_order_truncation", worst < tol, describe(worst, tol)};
}

CheckResult check_phase_average_quadrature(int grid_points, double a_max, double tol) {
    double worst = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double a = a_max * static_cast<double>(i) / (grid_points - 1);
        const double averaged = phase_average(
            [a](double phi) { return 0.5 * (1.0 + std::cos(a * std::cos(phi))); }, 512);
        const double closed = 0.5 * (1.0 + std::cyl_bessel_j(0.0, a));
        worst = std::max(worst, std::abs(averaged - closed));
    }
    return {"phase_average_equals_bessel_form", worst < tol, describe(worst, tol)};
}

CheckResult check_shot_frequency_nuclear(long n_shots, std::uint64_t seed) {
    NuclearModelConfig cfg;
    NuclearSpinParams p{{units::rad_per_us_from_hz(47.0e3), units::rad_per_us_from_hz(83.8e3)},
                        {units::rad_from_deg(30.0), units::rad_from_deg(21.0)}};
    const double tau = 2.53;
    const double expected = likelihood_nuclear(p, cfg, tau);
    Rng rng(seed);
    long zeros = 0;
    for (long i = 0; i < n_shots; ++i) {
        if (simulate_shot_nuclear(p, cfg, tau, rng) == 0) ++zeros;
    }
    const double freq = static_cast<double>(zeros) / static_cast<double>(n_shots);
    const double sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(n_shots));
    const double dev = std::abs(freq - expected);
    return {"nuclear_shot_frequency_3sigma", dev < 3.0 * sigma, describe(dev, 3.0 * sigma)};
}

CheckResult check_shot_frequency_ac(long n_shots, std::uint64_t seed) {
    AcModelConfig cfg;
    AcFieldParams p{units::rad_per_us_from_hz(500e3), 0.0};
    p.b_field = 0.11 * p.omega / cfg.gamma;
    const double tau = 3.37;
    // Reference: untruncated phase-averaged value.
    const double a = ac_signal_argument(p.omega, p.b_field * cfg.gamma / p.omega, tau);
    const double decay = std::exp(-16.0 * tau / cfg.t2);
    const double expected = 0.5 * (1.0 + std::cyl_bessel_j(0.0, std::abs(a)) * decay);
    Rng rng(seed);
    long zeros = 0;
    for (long i = 0; i < n_shots; ++i) {
        if (simulate_shot_ac(p, cfg, tau, rng) == 0) ++zeros;
    }
    const double freq = static_cast<double>(zeros) / static_cast<double>(n_shots);
    const double sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(n_shots));
    const double dev = std::abs(freq - expected);
    return {"ac_shot_frequency_3sigma", dev < 3.0 * sigma, describe(dev, 3.0 * sigma)};
}

std::vector<CheckResult> run_validation_suite(std::uint64_t seed, bool quick) {
    std::vector<CheckResult> results;
    results.push_back(check_nuclear_vs_oracle(quick ? 40 : 200, quick ? 10 : 20, 1e-6, seed));
    results.push_back(check_bessel_truncation(quick ? 200 : 1000, 0.5, 1e-6));
    results.push_back(check_phase_average_quadrature(quick ? 50 : 200, 0.5, 1e-8));
    results.push_back(check_shot_frequency_nuclear(quick ? 20000 : 100000, seed + 1));
    results.push_back(check_shot_frequency_ac(quick ? 20000 : 100000, seed + 2));
    return results;
}

}  // namespace nvsense
