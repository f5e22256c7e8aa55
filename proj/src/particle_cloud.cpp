#include "nvsense/particle_cloud.hpp"

#include <cmath>
#include <limits>

namespace nvsense {

ParticleCloud init_uniform(const BoundsMatrix& bounds, Eigen::Index n_particles, Rng& rng) {
    const Eigen::Index d = bounds.rows();
    if (n_particles < 2) {
        throw std::invalid_argument("init_uniform: need at least 2 particles");
    }
    for (Eigen::Index j = 0; j < d; ++j) {
        if (!(bounds(j, 0) < bounds(j, 1))) {
            throw std::invalid_argument("init_uniform: bounds must satisfy lo < hi");
        }
    }
    ParticleCloud cloud;
    cloud.bounds = bounds;
    cloud.locations.resize(n_particles, d);
    for (Eigen::Index k = 0; k < n_particles; ++k) {
        for (Eigen::Index j = 0; j < d; ++j) {
            cloud.locations(k, j) = rng.uniform(bounds(j, 0), bounds(j, 1));
        }
    }
    cloud.weights = Eigen::VectorXd::Constant(n_particles, 1.0 / static_cast<double>(n_particles));
    return cloud;
}

void bayes_update(ParticleCloud& cloud, const Eigen::VectorXd& likelihoods) {
    if (likelihoods.size() != cloud.weights.size()) {
        throw std::invalid_argument("bayes_update: likelihood vector size mismatch");
    }
    // Accumulate the normalization in double regardless of how the
    // likelihoods were produced.
    double norm = 0.0;
    for (Eigen::Index k = 0; k < cloud.weights.size(); ++k) {
        cloud.weights[k] *= likelihoods[k];
        norm += cloud.weights[k];
    }
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw DegenerateUpdateError("bayes_update: posterior mass vanished");
    }
    cloud.weights /= norm;
}

double effective_sample_size(const ParticleCloud& cloud) {
    const double w2 = cloud.weights.squaredNorm();
    return 1.0 / w2;
}

PosteriorSummary summarize(const ParticleCloud& cloud, int n_c) {
    const Eigen::Index d = cloud.dim();
    PosteriorSummary s;
    s.mean = cloud.locations.transpose() * cloud.weights;
    Eigen::MatrixXd centered = cloud.locations.rowwise() - s.mean.transpose();
    s.covariance = centered.transpose() * cloud.weights.asDiagonal() * centered;
    s.covariance = 0.5 * (s.covariance + s.covariance.transpose().eval());  // symmetrize fp noise
    s.abs_uncertainty = s.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
    s.rel_uncertainty.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        s.rel_uncertainty[j] = s.mean[j] == 0.0
                                   ? std::numeric_limits<double>::infinity()
                                   : s.abs_uncertainty[j] / std::abs(s.mean[j]);
    }
    if (n_c > 0 && 2 * n_c == d) {
        s.mean_rel_per_group.resize(2);
        for (int g = 0; g < 2; ++g) {
            double acc = 0.0;
            for (int q = 0; q < n_c; ++q) {
                const double r = s.rel_uncertainty[g * n_c + q];
                acc += r * r;
            }
            s.mean_rel_per_group[g] = std::sqrt(acc / n_c);
        }
    } else {
        s.mean_rel_per_group = s.rel_uncertainty;
    }
    return s;
}

}  // namespace nvsense
