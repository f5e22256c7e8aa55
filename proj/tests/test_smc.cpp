#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "nvsense/models.hpp"
#include "nvsense/particle_cloud.hpp"
#include "nvsense/resampler.hpp"
#include "nvsense/simulator.hpp"
#include "nvsense/units.hpp"

using namespace nvsense;

namespace {

BoundsMatrix box(std::initializer_list<std::pair<double, double>> dims) {
    BoundsMatrix b(static_cast<Eigen::Index>(dims.size()), 2);
    Eigen::Index i = 0;
    for (const auto& [lo, hi] : dims) {
        b(i, 0) = lo;
        b(i, 1) = hi;
        ++i;
    }
    return b;
}

ParticleCloud make_cloud(const std::vector<std::vector<double>>& locs,
                         const std::vector<double>& weights, const BoundsMatrix& bounds) {
    ParticleCloud c;
    c.bounds = bounds;
    c.locations.resize(static_cast<Eigen::Index>(locs.size()),
                       static_cast<Eigen::Index>(locs[0].size()));
    for (std::size_t k = 0; k < locs.size(); ++k) {
        for (std::size_t j = 0; j < locs[k].size(); ++j) {
            c.locations(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = locs[k][j];
        }
    }
    c.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(),
                                                  static_cast<Eigen::Index>(weights.size()));
    return c;
}

double weight_sum(const ParticleCloud& c) { return c.weights.sum(); }

}  // namespace

TEST_CASE("init_uniform samples the box with uniform weights") {
    Rng rng(7);
    const auto cloud = init_uniform(box({{0.0, 1.0}}), 4, rng);
    CHECK(cloud.n_particles() == 4);
    for (Eigen::Index k = 0; k < 4; ++k) {
        CHECK(cloud.locations(k, 0) >= 0.0);
        CHECK(cloud.locations(k, 0) <= 1.0);
        CHECK(cloud.weights[k] == doctest::Approx(0.25));
    }
    CHECK(std::abs(weight_sum(cloud) - 1.0) < 1e-9);
}

TEST_CASE("init_uniform rejects bad input") {
    Rng rng(7);
    CHECK_THROWS_AS(init_uniform(box({{1.0, 1.0}}), 10, rng), std::invalid_argument);
    CHECK_THROWS_AS(init_uniform(box({{2.0, 1.0}}), 10, rng), std::invalid_argument);
    CHECK_THROWS_AS(init_uniform(box({{0.0, 1.0}}), 1, rng), std::invalid_argument);
}

TEST_CASE("init_uniform covers the nuclear and ac default boxes") {
    Rng rng(11);
    SensingModel nuclear = NuclearModelConfig{};
    auto cloud = init_uniform(model_bounds(nuclear), 500, rng);
    const double lo = units::rad_per_us_from_hz(6e3);
    const double hi = units::rad_per_us_from_hz(265e3);
    CHECK(cloud.locations.col(0).minCoeff() >= lo);
    CHECK(cloud.locations.col(0).maxCoeff() <= hi);

    SensingModel ac = AcModelConfig{};
    cloud = init_uniform(model_bounds(ac), 500, rng);
    CHECK(cloud.locations.col(1).minCoeff() >= 0.013);
    CHECK(cloud.locations.col(1).maxCoeff() <= 0.177);
}

TEST_CASE("bayes_update normalizes exactly as forced by the examples") {
    auto cloud = make_cloud({{0.0}, {1.0}}, {0.5, 0.5}, box({{0.0, 1.0}}));
    bayes_update(cloud, Eigen::Vector2d{0.37, 0.37});
    CHECK(cloud.weights[0] == doctest::Approx(0.5).epsilon(1e-12));

    bayes_update(cloud, Eigen::Vector2d{0.8, 0.2});
    CHECK(cloud.weights[0] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(cloud.weights[1] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(std::abs(weight_sum(cloud) - 1.0) < 1e-9);
}

TEST_CASE("sequential updates equal the single product update") {
    Rng rng(3);
    const int n = 64;
    std::vector<std::vector<double>> locs(n, std::vector<double>{0.0});
    std::vector<double> w(n, 1.0 / n);
    auto sequential = make_cloud(locs, w, box({{-1.0, 1.0}}));
    auto product = sequential;

    Eigen::VectorXd combined = Eigen::VectorXd::Ones(n);
    for (int round = 0; round < 3; ++round) {
        Eigen::VectorXd lik(n);
        for (int k = 0; k < n; ++k) lik[k] = rng.uniform(0.01, 1.0);
        combined = combined.cwiseProduct(lik);
        bayes_update(sequential, lik);
    }
    bayes_update(product, combined);
    for (int k = 0; k < n; ++k) {
        CHECK(sequential.weights[k] == doctest::Approx(product.weights[k]).epsilon(1e-12));
    }
}

TEST_CASE("bayes_update order equivalence over permutations") {
    Rng rng(5);
    const int n = 40;
    std::vector<Eigen::VectorXd> liks;
    for (int r = 0; r < 5; ++r) {
        Eigen::VectorXd v(n);
        for (int k = 0; k < n; ++k) v[k] = rng.uniform(1e-6, 1.0);
        liks.push_back(v);
    }
    std::vector<std::vector<double>> locs(n, std::vector<double>{0.0});
    std::vector<double> w(n, 1.0 / n);

    auto forward = make_cloud(locs, w, box({{-1.0, 1.0}}));
    for (const auto& lik : liks) bayes_update(forward, lik);

    auto shuffled = make_cloud(locs, w, box({{-1.0, 1.0}}));
    std::vector<std::size_t> order{4, 2, 0, 3, 1};
    for (const auto i : order) bayes_update(shuffled, liks[i]);

    for (int k = 0; k < n; ++k) {
        CHECK(forward.weights[k] == doctest::Approx(shuffled.weights[k]).epsilon(1e-12));
    }
}

TEST_CASE("bayes_update degenerates on zero posterior mass") {
    auto cloud = make_cloud({{0.0}, {1.0}}, {0.5, 0.5}, box({{0.0, 1.0}}));
    CHECK_THROWS_AS(bayes_update(cloud, Eigen::Vector2d{0.0, 0.0}), DegenerateUpdateError);
}

TEST_CASE("effective sample size") {
    Rng rng(9);
    auto uniform = init_uniform(box({{0.0, 1.0}}), 100, rng);
    CHECK(effective_sample_size(uniform) == doctest::Approx(100.0).epsilon(1e-12));

    auto degenerate = make_cloud({{0.0}, {0.1}, {0.2}}, {1.0, 0.0, 0.0}, box({{0.0, 1.0}}));
    CHECK(effective_sample_size(degenerate) == doctest::Approx(1.0).epsilon(1e-12));

    auto skewed = make_cloud({{0.0}, {1.0}}, {0.8, 0.2}, box({{0.0, 1.0}}));
    CHECK(effective_sample_size(skewed) == doctest::Approx(1.0 / 0.68).epsilon(1e-9));

    // 1 <= ESS <= n_p, with equality at n_p iff uniform.
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng.integer(30));
        Eigen::VectorXd w(n);
        for (int k = 0; k < n; ++k) w[k] = rng.uniform(1e-6, 1.0);
        w /= w.sum();
        ParticleCloud c;
        c.locations = LocationMatrix::Zero(n, 1);
        c.bounds = box({{-1.0, 1.0}});
        c.weights = w;
        const double ess = effective_sample_size(c);
        CHECK(ess >= 1.0 - 1e-12);
        CHECK(ess <= n + 1e-9);
        const bool uniform_w = (w.array() - 1.0 / n).abs().maxCoeff() < 1e-15;
        if (!uniform_w) CHECK(ess < n - 1e-9);
    }
}

TEST_CASE("summarize moments and relative uncertainties") {
    auto identical = make_cloud({{2.0, 3.0}, {2.0, 3.0}}, {0.5, 0.5},
                                box({{0.0, 5.0}, {0.0, 5.0}}));
    auto s = summarize(identical, 0);
    CHECK(s.abs_uncertainty.maxCoeff() == doctest::Approx(0.0).epsilon(1e-12));

    auto pair = make_cloud({{1.0}, {3.0}}, {0.5, 0.5}, box({{0.0, 5.0}}));
    s = summarize(pair, 0);
    CHECK(s.mean[0] == doctest::Approx(2.0));
    CHECK(s.abs_uncertainty[0] == doctest::Approx(1.0));
    CHECK(s.rel_uncertainty[0] == doctest::Approx(0.5));

    auto skewed = make_cloud({{0.0}, {1.0}}, {0.8, 0.2}, box({{0.0, 5.0}}));
    s = summarize(skewed, 0);
    CHECK(s.mean[0] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(s.covariance(0, 0) == doctest::Approx(0.16).epsilon(1e-12));

    auto zero_mean = make_cloud({{-1.0}, {1.0}}, {0.5, 0.5}, box({{-2.0, 2.0}}));
    s = summarize(zero_mean, 0);
    CHECK(std::isinf(s.rel_uncertainty[0]));
}

TEST_CASE("summarize covariance is symmetric PSD with matching diagonal") {
    Rng rng(13);
    auto cloud = init_uniform(box({{0.0, 1.0}, {2.0, 5.0}, {-1.0, 1.0}}), 300, rng);
    Eigen::VectorXd lik(300);
    for (int k = 0; k < 300; ++k) lik[k] = rng.uniform(0.1, 1.0);
    bayes_update(cloud, lik);
    const auto s = summarize(cloud, 0);
    CHECK((s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.covariance);
    CHECK(es.eigenvalues().minCoeff() > -1e-9);
    for (int j = 0; j < 3; ++j) {
        CHECK(s.abs_uncertainty[j] ==
              doctest::Approx(std::sqrt(s.covariance(j, j))).epsilon(1e-9));
    }
}

TEST_CASE("summarize grouped metric is the rms of group relative uncertainties") {
    // Two spins: omega block (cols 0,1), theta block (cols 2,3).
    auto cloud = make_cloud({{1.0, 2.0, 0.5, 0.7}, {1.2, 2.2, 0.6, 0.9}, {0.8, 1.8, 0.4, 0.5}},
                            {0.2, 0.5, 0.3},
                            box({{0.0, 5.0}, {0.0, 5.0}, {0.0, 2.0}, {0.0, 2.0}}));
    const auto s = summarize(cloud, 2);
    REQUIRE(s.mean_rel_per_group.size() == 2);
    const double omega_expected = std::sqrt(
        (s.rel_uncertainty[0] * s.rel_uncertainty[0] + s.rel_uncertainty[1] * s.rel_uncertainty[1]) /
        2.0);
    CHECK(s.mean_rel_per_group[0] == doctest::Approx(omega_expected).epsilon(1e-12));
}

TEST_CASE("liu-west with a = 1 is multinomial resampling at existing locations") {
    Rng rng(17);
    auto cloud = init_uniform(box({{0.0, 1.0}, {0.0, 1.0}}), 64, rng);
    Eigen::VectorXd lik(64);
    for (int k = 0; k < 64; ++k) lik[k] = rng.uniform(0.01, 1.0);
    bayes_update(cloud, lik);
    const auto before = cloud.locations;

    ResamplerConfig cfg;
    cfg.a = 1.0;
    resample_liu_west(cloud, cfg, rng);
    CHECK(cloud.weights[0] == doctest::Approx(1.0 / 64));
    for (Eigen::Index k = 0; k < 64; ++k) {
        bool found = false;
        for (Eigen::Index j = 0; j < 64 && !found; ++j) {
            found = (cloud.locations.row(k) - before.row(j)).cwiseAbs().maxCoeff() == 0.0;
        }
        CHECK(found);
    }
}

TEST_CASE("liu-west collapses to the point for a zero-variance cloud") {
    auto cloud = make_cloud({{0.4, 0.6}, {0.4, 0.6}, {0.4, 0.6}}, {0.2, 0.3, 0.5},
                            box({{0.0, 1.0}, {0.0, 1.0}}));
    Rng rng(21);
    const auto info = resample_liu_west(cloud, {}, rng);
    CHECK(info.pure_contraction_fallback);  // singular covariance
    for (Eigen::Index k = 0; k < 3; ++k) {
        CHECK(cloud.locations(k, 0) == doctest::Approx(0.4).epsilon(1e-12));
        CHECK(cloud.locations(k, 1) == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(cloud.weights[k] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
}

TEST_CASE("liu-west preserves the first two moments in expectation") {
    // Monte-Carlo oracle: averaged output means match the input mean within
    // 3 standard errors; averaged output covariance within 5%.
    Rng rng(23);
    auto cloud = init_uniform(box({{0.2, 0.8}, {0.3, 0.7}}), 400, rng);
    Eigen::VectorXd lik(400);
    for (int k = 0; k < 400; ++k) lik[k] = rng.uniform(0.05, 1.0);
    bayes_update(cloud, lik);
    const auto s_in = summarize(cloud, 0);

    const int reps = 1000;
    Eigen::Vector2d mean_acc = Eigen::Vector2d::Zero();
    Eigen::Matrix2d cov_acc = Eigen::Matrix2d::Zero();
    for (int r = 0; r < reps; ++r) {
        auto copy = cloud;
        Rng rs(1000 + static_cast<std::uint64_t>(r));
        resample_liu_west(copy, {}, rs);
        const auto s_out = summarize(copy, 0);
        mean_acc += s_out.mean;
        cov_acc += s_out.covariance;
    }
    mean_acc /= reps;
    cov_acc /= reps;

    for (int j = 0; j < 2; ++j) {
        // std error of the mean-of-means; per-rep variance is below the input
        // posterior variance, so this bound is conservative.
        const double se = s_in.abs_uncertainty[j] / std::sqrt(static_cast<double>(reps));
        CHECK(std::abs(mean_acc[j] - s_in.mean[j]) < 3.0 * se);
        CHECK(std::abs(cov_acc(j, j) - s_in.covariance(j, j)) < 0.05 * s_in.covariance(j, j));
    }
}

TEST_CASE("liu-west clamps proposals into the bounds") {
    Rng rng(29);
    auto cloud = init_uniform(box({{0.0, 1.0}}), 200, rng);
    // Push all mass toward the upper bound so jitter would overshoot.
    Eigen::VectorXd lik(200);
    for (int k = 0; k < 200; ++k) lik[k] = std::pow(cloud.locations(k, 0), 8.0);
    bayes_update(cloud, lik);
    for (int r = 0; r < 20; ++r) {
        resample_liu_west(cloud, {}, rng);
        CHECK(cloud.locations.minCoeff() >= 0.0);
        CHECK(cloud.locations.maxCoeff() <= 1.0);
    }
}

TEST_CASE("remap sorts spin blocks and folds theta") {
    using units::rad_from_deg;
    using units::rad_per_us_from_hz;
    const double w1 = rad_per_us_from_hz(83.8e3);
    const double w2 = rad_per_us_from_hz(47.0e3);
    auto cloud = make_cloud({{w1, w2, rad_from_deg(21.0), rad_from_deg(30.0)}},
                            {1.0},
                            box({{0.0, 10.0}, {0.0, 10.0}, {0.0, units::kPi}, {0.0, units::kPi}}));
    remap_labels(cloud, 2);
    CHECK(cloud.locations(0, 0) == doctest::Approx(w2));
    CHECK(cloud.locations(0, 1) == doctest::Approx(w1));
    CHECK(cloud.locations(0, 2) == doctest::Approx(rad_from_deg(30.0)));
    CHECK(cloud.locations(0, 3) == doctest::Approx(rad_from_deg(21.0)));

    const auto before = cloud.locations;
    remap_labels(cloud, 2);  // idempotent
    CHECK((cloud.locations - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("theta folding is a likelihood symmetry") {
    NuclearModelConfig cfg;
    cfg.n_c = 1;
    const double omega = units::rad_per_us_from_hz(120e3);
    const double theta = units::rad_from_deg(350.0);
    auto cloud = make_cloud({{omega, theta}}, {1.0},
                            box({{0.0, 10.0}, {0.0, units::kTwoPi}}));
    remap_labels(cloud, 1);
    CHECK(cloud.locations(0, 1) == doctest::Approx(units::rad_from_deg(10.0)).epsilon(1e-12));

    for (const double tau : {1.3, 2.9, 7.4}) {
        const double before = likelihood_nuclear({{omega}, {theta}}, cfg, tau);
        const double after =
            likelihood_nuclear({{omega}, {cloud.locations(0, 1)}}, cfg, tau);
        CHECK(before == doctest::Approx(after).epsilon(1e-12));
    }
}

TEST_CASE("remap leaves the two-spin likelihood invariant on random particles") {
    NuclearModelConfig cfg;
    Rng rng(31);
    auto cloud = init_uniform(model_bounds(SensingModel{cfg}), 50, rng);
    auto mapped = cloud;
    remap_labels(mapped, cfg.n_c);
    for (Eigen::Index k = 0; k < cloud.n_particles(); ++k) {
        for (const double tau : {1.7, 5.2}) {
            const double a = likelihood0(SensingModel{cfg}, cloud.locations.row(k).data(), tau);
            const double b = likelihood0(SensingModel{cfg}, mapped.locations.row(k).data(), tau);
            CHECK(a == doctest::Approx(b).epsilon(1e-12));
        }
    }
}

TEST_CASE("smc posterior matches a brute-force grid posterior on a 2-D model") {
    // 200 fixed-control updates of the AC model; oracle = 50x50 grid Bayes.
    AcModelConfig ac;
    const SensingModel model{ac};
    const auto bounds = model_bounds(model);
    GroundTruth truth = make_truth(AcFieldParams{units::rad_per_us_from_hz(700e3), 0.0});
    std::get<AcFieldParams>(truth.params).b_field =
        0.09 * std::get<AcFieldParams>(truth.params).omega / ac.gamma;

    Rng control_rng(41);
    Rng shot_rng(42);
    std::vector<std::pair<double, int>> events;
    for (int i = 0; i < 200; ++i) {
        const double tau = 0.51 + 0.01 * static_cast<double>(control_rng.integer(650));
        const int d = simulate_shot_ac(std::get<AcFieldParams>(truth.params), ac, tau, shot_rng);
        events.emplace_back(tau, d);
    }

    // Grid posterior.
    const int g = 50;
    Eigen::MatrixXd logpost = Eigen::MatrixXd::Zero(g, g);
    std::vector<double> omegas(g), ratios(g);
    for (int i = 0; i < g; ++i) {
        omegas[i] = bounds(0, 0) + (bounds(0, 1) - bounds(0, 0)) * (i + 0.5) / g;
        ratios[i] = bounds(1, 0) + (bounds(1, 1) - bounds(1, 0)) * (i + 0.5) / g;
    }
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) {
            const double loc[2] = {omegas[i], ratios[j]};
            for (const auto& [tau, d] : events) {
                const double p0 = likelihood0(model, loc, tau);
                logpost(i, j) += std::log(d == 0 ? p0 : 1.0 - p0);
            }
        }
    }
    const double lmax = logpost.maxCoeff();
    double norm = 0.0, mean_omega = 0.0, mean_ratio = 0.0, m2_omega = 0.0, m2_ratio = 0.0;
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) {
            const double w = std::exp(logpost(i, j) - lmax);
            norm += w;
            mean_omega += w * omegas[i];
            mean_ratio += w * ratios[j];
        }
    }
    mean_omega /= norm;
    mean_ratio /= norm;
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) {
            const double w = std::exp(logpost(i, j) - lmax) / norm;
            m2_omega += w * (omegas[i] - mean_omega) * (omegas[i] - mean_omega);
            m2_ratio += w * (ratios[j] - mean_ratio) * (ratios[j] - mean_ratio);
        }
    }

    // SMC with the same event stream.
    Rng init_rng(43);
    Rng resample_rng(44);
    auto cloud = init_uniform(bounds, 2000, init_rng);
    for (const auto& [tau, d] : events) {
        Eigen::VectorXd lik(cloud.n_particles());
        for (Eigen::Index k = 0; k < cloud.n_particles(); ++k) {
            const double p0 = likelihood0(model, cloud.locations.row(k).data(), tau);
            lik[k] = d == 0 ? p0 : 1.0 - p0;
        }
        bayes_update(cloud, lik);
        if (effective_sample_size(cloud) < 0.5 * static_cast<double>(cloud.n_particles())) {
            resample_liu_west(cloud, {}, resample_rng);
        }
        CHECK(std::abs(weight_sum(cloud) - 1.0) < 1e-9);
    }
    const auto s = summarize(cloud, 0);
    CHECK(std::abs(s.mean[0] - mean_omega) < 3.0 * std::sqrt(m2_omega));
    CHECK(std::abs(s.mean[1] - mean_ratio) < 3.0 * std::sqrt(m2_ratio));
}
