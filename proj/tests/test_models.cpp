#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "nvsense/detail/likelihood_math.hpp"
#include "nvsense/models.hpp"
#include "nvsense/validation.hpp"

using namespace nvsense;
using units::rad_from_deg;
using units::rad_per_us_from_hz;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("readout noise transform") {
    CHECK(apply_readout_noise(0.37, {1.0, 1.0}) == doctest::Approx(0.37).epsilon(1e-15));
    CHECK(apply_readout_noise(1.0, {0.9, 0.95}) == doctest::Approx(0.9));
    CHECK(apply_readout_noise(0.0, {0.9, 0.95}) == doctest::Approx(0.05));
    // Affine increasing when p0 + p1 > 1.
    const ReadoutFidelity f{0.88, 0.93};
    double prev = -1.0;
    for (double p = 0.0; p <= 1.0; p += 0.125) {
        const double v = apply_readout_noise(p, f);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("pulse-train gain equals the trigonometric form") {
    Rng rng(2);
    for (int i = 0; i < 2000; ++i) {
        const double phi = rng.uniform(1e-4, units::kPi - 1e-4);
        const double direct = std::pow(std::sin(16.0 * phi) / std::cos(0.5 * phi), 2.0);
        const double cheb = detail::pulse_train_gain(std::cos(phi));
        CHECK(cheb == doctest::Approx(direct).epsilon(1e-8));
    }
    // Removable singularity at phi = pi: limit value is 1024.
    CHECK(detail::pulse_train_gain(-1.0) == doctest::Approx(1024.0).epsilon(1e-3));
    CHECK(detail::pulse_train_gain(1.0) == doctest::Approx(0.0));
}

TEST_CASE("ac cosine comb equals the explicit four-term sum") {
    Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const double x = rng.uniform(0.0, units::kTwoPi);
        const double direct =
            std::cos(3 * x) + std::cos(5 * x) + std::cos(11 * x) + std::cos(13 * x);
        CHECK(detail::ac_cosine_comb(std::cos(x)) == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("nuclear likelihood limits") {
    NuclearModelConfig cfg;
    cfg.n_c = 2;
    NuclearSpinParams p{{rad_per_us_from_hz(47e3), rad_per_us_from_hz(83.8e3)}, {0.0, 0.0}};
    for (const double tau : {1.0, 3.5, 9.99}) {
        // theta = 0 kills every product term: M = 1.
        const double expected = 1.0 / 3.0 + (2.0 / 3.0) * std::exp(-64.0 * tau / cfg.t2);
        CHECK(likelihood_nuclear(p, cfg, tau) == doctest::Approx(expected).epsilon(1e-12));
    }
    // tau -> 0+ gives probability 1 (up to the clamp).
    p.theta = {rad_from_deg(30.0), rad_from_deg(21.0)};
    CHECK(likelihood_nuclear(p, cfg, 1e-7) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("nuclear likelihood is invariant under spin permutation and theta reflection") {
    NuclearModelConfig cfg;
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        NuclearSpinParams p{{rng.uniform(cfg.omega_h_lo, cfg.omega_h_hi),
                             rng.uniform(cfg.omega_h_lo, cfg.omega_h_hi)},
                            {rng.uniform(0.0, units::kPi), rng.uniform(0.0, units::kPi)}};
        const double tau = rng.uniform(1.0, 10.0);
        const double base = likelihood_nuclear(p, cfg, tau);

        NuclearSpinParams swapped{{p.omega_h[1], p.omega_h[0]}, {p.theta[1], p.theta[0]}};
        CHECK(likelihood_nuclear(swapped, cfg, tau) == doctest::Approx(base).epsilon(1e-12));

        NuclearSpinParams reflected{p.omega_h,
                                    {units::kTwoPi - p.theta[0], units::kTwoPi - p.theta[1]}};
        CHECK(likelihood_nuclear(reflected, cfg, tau) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("joint M factorizes over spins") {
    NuclearModelConfig cfg;
    Rng rng(7);
    const auto m_of = [&](const NuclearSpinParams& p, const NuclearModelConfig& c, double tau) {
        const double pr = likelihood_nuclear(p, c, tau);
        const double decay = std::exp(-64.0 * tau / c.t2);
        return (pr - 1.0 / 3.0) * 2.0 / decay - 1.0 / 3.0;
    };
    for (int i = 0; i < 100; ++i) {
        NuclearSpinParams joint{{rng.uniform(cfg.omega_h_lo, cfg.omega_h_hi),
                                 rng.uniform(cfg.omega_h_lo, cfg.omega_h_hi)},
                                {rng.uniform(0.1, units::kPi - 0.1),
                                 rng.uniform(0.1, units::kPi - 0.1)}};
        const double tau = rng.uniform(1.0, 10.0);
        NuclearModelConfig single = cfg;
        single.n_c = 1;
        const double m1 = m_of({{joint.omega_h[0]}, {joint.theta[0]}}, single, tau);
        const double m2 = m_of({{joint.omega_h[1]}, {joint.theta[1]}}, single, tau);
        NuclearModelConfig two = cfg;
        const double mj = m_of(joint, two, tau);
        CHECK(mj == doctest::Approx(m1 * m2).epsilon(1e-10));
    }
}

TEST_CASE("likelihoods stay inside the clamp and the outcome law sums to one") {
    NuclearModelConfig ncfg;
    AcModelConfig acfg;
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        NuclearSpinParams p{{rng.uniform(ncfg.omega_h_lo, ncfg.omega_h_hi),
                             rng.uniform(ncfg.omega_h_lo, ncfg.omega_h_hi)},
                            {rng.uniform(0.0, units::kPi), rng.uniform(0.0, units::kPi)}};
        const double tau = rng.uniform(1.0, 10.0);
        const double pr0 = likelihood_nuclear(p, ncfg, tau);
        CHECK(pr0 >= kLikelihoodEps);
        CHECK(pr0 <= 1.0 - kLikelihoodEps);

        AcFieldParams a{rng.uniform(acfg.omega_lo, acfg.omega_hi), 0.0};
        a.b_field = rng.uniform(0.013, 0.177) * a.omega / acfg.gamma;
        const double pr0_ac = likelihood_ac(a, acfg, rng.uniform(0.51, 7.0));
        CHECK(pr0_ac >= kLikelihoodEps);
        CHECK(pr0_ac <= 1.0 - kLikelihoodEps);
    }
}

TEST_CASE("ac likelihood limits and periodicity") {
    AcModelConfig cfg;
    const double omega = rad_per_us_from_hz(500e3);
    AcFieldParams zero_field{omega, 0.0};
    for (const double tau : {0.51, 2.0, 6.8}) {
        const double expected = 0.5 * (1.0 + std::exp(-16.0 * tau / cfg.t2));
        CHECK(likelihood_ac(zero_field, cfg, tau) == doctest::Approx(expected).epsilon(1e-12));
    }
    // omega tau = 2 pi zeroes the filter.
    AcFieldParams strong{omega, 0.1};
    const double tau_zero = units::kTwoPi / omega;
    const double expected = 0.5 * (1.0 + std::exp(-16.0 * tau_zero / cfg.t2));
    CHECK(likelihood_ac(strong, cfg, tau_zero) == doctest::Approx(expected).epsilon(1e-9));

    // a(tau) is 2 pi / omega periodic.
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        const double w = rng.uniform(cfg.omega_lo, cfg.omega_hi);
        const double r = rng.uniform(0.013, 0.177);
        const double tau = rng.uniform(0.51, 7.0);
        const double a1 = ac_signal_argument(w, r, tau);
        const double a2 = ac_signal_argument(w, r, tau + units::kTwoPi / w);
        CHECK(a1 == doctest::Approx(a2).epsilon(1e-9));
    }
}

TEST_CASE("bessel truncation and phase-average oracles") {
    const auto trunc = check_bessel_truncation(400, 0.5, 1e-6);
    CHECK_MESSAGE(trunc.pass, trunc.detail);
    const auto quad = check_phase_average_quadrature(60, 0.5, 1e-8);
    CHECK_MESSAGE(quad.pass, quad.detail);
}

TEST_CASE("batch grid kernels match the scalar path") {
    Rng rng(17);
    std::vector<double> taus;
    for (int j = 0; j < 257; ++j) taus.push_back(1.0 + 0.03 * j);

    SUBCASE("nuclear") {
        NuclearModelConfig cfg;
        const SensingModel model{cfg};
        Rng init(18);
        auto cloud = init_uniform(model_bounds(model), 160, init);
        std::vector<float> grid_f(cloud.n_particles() * taus.size());
        std::vector<double> grid_d(grid_f.size());
        batch_likelihood0_grid<float>(model, cloud.locations.data(), cloud.n_particles(),
                                      taus.data(), static_cast<Eigen::Index>(taus.size()),
                                      grid_f.data(), 2);
        batch_likelihood0_grid<double>(model, cloud.locations.data(), cloud.n_particles(),
                                       taus.data(), static_cast<Eigen::Index>(taus.size()),
                                       grid_d.data(), 2);
        double worst_f = 0.0, worst_d = 0.0;
        for (Eigen::Index k = 0; k < cloud.n_particles(); ++k) {
            for (std::size_t j = 0; j < taus.size(); ++j) {
                const double scalar = likelihood0(model, cloud.locations.row(k).data(), taus[j]);
                worst_f = std::max(worst_f,
                                   std::abs(scalar - grid_f[k * taus.size() + j]));
                worst_d = std::max(worst_d,
                                   std::abs(scalar - grid_d[k * taus.size() + j]));
            }
        }
        CHECK(worst_f < 5e-5);   // single-precision kernel
        CHECK(worst_d < 1e-10);  // recurrence drift only
    }

    SUBCASE("ac") {
        AcModelConfig cfg;
        const SensingModel model{cfg};
        Rng init(19);
        auto cloud = init_uniform(model_bounds(model), 160, init);
        std::vector<double> ac_taus;
        for (int j = 0; j < 300; ++j) ac_taus.push_back(0.51 + 0.02 * j);
        std::vector<float> grid_f(cloud.n_particles() * ac_taus.size());
        batch_likelihood0_grid<float>(model, cloud.locations.data(), cloud.n_particles(),
                                      ac_taus.data(), static_cast<Eigen::Index>(ac_taus.size()),
                                      grid_f.data(), 2);
        double worst = 0.0;
        for (Eigen::Index k = 0; k < cloud.n_particles(); ++k) {
            for (std::size_t j = 0; j < ac_taus.size(); ++j) {
                const double scalar =
                    likelihood0(model, cloud.locations.row(k).data(), ac_taus[j]);
                worst = std::max(worst, std::abs(scalar - grid_f[k * ac_taus.size() + j]));
            }
        }
        CHECK(worst < 5e-5);
    }

    SUBCASE("non-uniform grids fall back to the direct evaluation") {
        NuclearModelConfig cfg;
        const SensingModel model{cfg};
        Rng init(20);
        auto cloud = init_uniform(model_bounds(model), 40, init);
        std::vector<double> ragged;
        for (int j = 0; j < 50; ++j) ragged.push_back(1.0 + 8.0 * init.uniform());
        std::sort(ragged.begin(), ragged.end());
        std::vector<double> grid(cloud.n_particles() * ragged.size());
        batch_likelihood0_grid<double>(model, cloud.locations.data(), cloud.n_particles(),
                                       ragged.data(), static_cast<Eigen::Index>(ragged.size()),
                                       grid.data(), 1);
        for (Eigen::Index k = 0; k < cloud.n_particles(); ++k) {
            for (std::size_t j = 0; j < ragged.size(); ++j) {
                const double scalar =
                    likelihood0(model, cloud.locations.row(k).data(), ragged[j]);
                CHECK(grid[k * ragged.size() + j] == doctest::Approx(scalar).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("shot simulators are deterministic and match their outcome laws") {
    NuclearModelConfig cfg;
    NuclearSpinParams p{{rad_per_us_from_hz(47e3)}, {0.0}};
    cfg.n_c = 1;
    cfg.t2 = kInf;
    SUBCASE("certain outcome") {
        Rng rng(23);
        for (int i = 0; i < 10000; ++i) {
            CHECK(simulate_shot_nuclear(p, cfg, 1e-6, rng) == 0);
        }
    }
    SUBCASE("long-run frequencies") {
        const auto nuclear = check_shot_frequency_nuclear(100000, 31);
        CHECK_MESSAGE(nuclear.pass, nuclear.detail);
        const auto ac = check_shot_frequency_ac(100000, 37);
        CHECK_MESSAGE(ac.pass, ac.detail);
    }
}

TEST_CASE("display mapping and truth ordering") {
    NuclearModelConfig ncfg;
    const SensingModel nuclear{ncfg};
    NuclearSpinParams p{{rad_per_us_from_hz(83.8e3), rad_per_us_from_hz(47e3)},
                        {rad_from_deg(21.0), rad_from_deg(30.0)}};
    const auto truth = display_truth(nuclear, p);
    CHECK(truth[0] == doctest::Approx(47.0));
    CHECK(truth[1] == doctest::Approx(83.8));
    CHECK(truth[2] == doctest::Approx(rad_from_deg(30.0)));
    CHECK(truth[3] == doctest::Approx(rad_from_deg(21.0)));
    const auto names = param_names(nuclear);
    CHECK(names == std::vector<std::string>{"omega_h1", "omega_h2", "theta1", "theta2"});

    AcModelConfig acfg;
    const SensingModel ac{acfg};
    ParticleCloud cloud;
    cloud.locations.resize(1, 2);
    cloud.locations(0, 0) = rad_per_us_from_hz(500e3);
    cloud.locations(0, 1) = 0.1;
    cloud.weights = Eigen::VectorXd::Ones(1);
    cloud.bounds = model_bounds(ac);
    const auto disp = display_cloud(ac, cloud);
    CHECK(disp.locations(0, 0) == doctest::Approx(500.0));
    CHECK(disp.locations(0, 1) ==
          doctest::Approx(0.1 * rad_per_us_from_hz(500e3) / acfg.gamma));
}
