#include "nvsense/resampler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "nvsense/units.hpp"

namespace nvsense {

namespace {

// Inverse-CDF multinomial draw of one ancestor index.
Eigen::Index draw_ancestor(const std::vector<double>& cumulative, double u) {
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    Eigen::Index idx = static_cast<Eigen::Index>(it - cumulative.begin());
    if (idx >= static_cast<Eigen::Index>(cumulative.size())) {
        idx = static_cast<Eigen::Index>(cumulative.size()) - 1;
    }
    return idx;
}

}  // namespace

ResampleInfo resample_liu_west(ParticleCloud& cloud, const ResamplerConfig& cfg, Rng& rng) {
    if (!(cfg.a > 0.0 && cfg.a <= 1.0)) {
        throw std::invalid_argument("resample_liu_west: contraction a must be in (0, 1]");
    }
    const Eigen::Index n = cloud.n_particles();
    const Eigen::Index d = cloud.dim();

    const Eigen::VectorXd mean = cloud.locations.transpose() * cloud.weights;
    Eigen::MatrixXd centered = cloud.locations.rowwise() - mean.transpose();
    Eigen::MatrixXd cov = centered.transpose() * cloud.weights.asDiagonal() * centered;
    cov = 0.5 * (cov + cov.transpose().eval());

    const double jitter_var = 1.0 - cfg.a * cfg.a;
    ResampleInfo info;
    Eigen::MatrixXd chol = Eigen::MatrixXd::Zero(d, d);
    bool with_jitter = jitter_var > 0.0;
    if (with_jitter) {
        Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() == Eigen::Success && cov.trace() > 0.0) {
            chol = llt.matrixL();
        } else {
            info.pure_contraction_fallback = true;
            with_jitter = false;
        }
    }

    std::vector<double> cumulative(static_cast<std::size_t>(n));
    double acc = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        acc += cloud.weights[k];
        cumulative[static_cast<std::size_t>(k)] = acc;
    }

    const double jitter_scale = std::sqrt(jitter_var);
    LocationMatrix fresh(n, d);
    Eigen::VectorXd z(d);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index j = draw_ancestor(cumulative, rng.uniform() * acc);
        fresh.row(k) = cfg.a * cloud.locations.row(j) + (1.0 - cfg.a) * mean.transpose();
        if (with_jitter) {
            for (Eigen::Index i = 0; i < d; ++i) z[i] = rng.normal();
            fresh.row(k) += (jitter_scale * (chol * z)).transpose();
        }
        for (Eigen::Index i = 0; i < d; ++i) {
            fresh(k, i) = std::clamp(fresh(k, i), cloud.bounds(i, 0), cloud.bounds(i, 1));
        }
    }

    cloud.locations = std::move(fresh);
    cloud.weights.setConstant(1.0 / static_cast<double>(n));
    return info;
}

void remap_labels(ParticleCloud& cloud, int n_c) {
    if (n_c <= 0) return;
    const Eigen::Index d = cloud.dim();
    if (d != 2 * n_c) {
        throw std::invalid_argument("remap_labels: cloud dimension does not match 2*n_c");
    }
    std::vector<std::pair<double, double>> blocks(static_cast<std::size_t>(n_c));
    for (Eigen::Index k = 0; k < cloud.n_particles(); ++k) {
        for (int q = 0; q < n_c; ++q) {
            double theta = cloud.locations(k, n_c + q);
            if (theta > units::kPi) theta = units::kTwoPi - theta;
            blocks[static_cast<std::size_t>(q)] = {cloud.locations(k, q), theta};
        }
        std::sort(blocks.begin(), blocks.end());
        for (int q = 0; q < n_c; ++q) {
            cloud.locations(k, q) = blocks[static_cast<std::size_t>(q)].first;
            cloud.locations(k, n_c + q) = blocks[static_cast<std::size_t>(q)].second;
        }
    }
}

}  // namespace nvsense
