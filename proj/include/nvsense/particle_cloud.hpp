#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "nvsense/rng.hpp"

namespace nvsense {

// Row k holds the parameter vector of particle k, so per-particle access is
// contiguous.
using LocationMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using BoundsMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;

// Weighted particle set representing the posterior over model parameters.
// Invariants: weights >= 0 summing to 1 (within 1e-9), every location inside
// `bounds`, and the particle count is constant for the lifetime of a run.
struct ParticleCloud {
    LocationMatrix locations;  // n_p x d
    Eigen::VectorXd weights;   // n_p
    BoundsMatrix bounds;       // d x 2 columns (lo, hi)

    Eigen::Index n_particles() const { return locations.rows(); }
    Eigen::Index dim() const { return locations.cols(); }
};

// Posterior moments plus the grouped relative-uncertainty figures used by the
// benchmark metrics. For a nuclear model with n_C spins the groups are the
// omega block and the theta block; with n_C = 0 each dimension is its own
// group.
struct PosteriorSummary {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    Eigen::VectorXd abs_uncertainty;       // sqrt(diag covariance)
    Eigen::VectorXd rel_uncertainty;       // abs / |mean|, +inf when mean == 0
    Eigen::VectorXd mean_rel_per_group;    // rms of rel_uncertainty per group
};

// Raised when a Bayes update would leave zero posterior mass.
class DegenerateUpdateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Uniform prior over the bounds box; weights 1/n_p.
ParticleCloud init_uniform(const BoundsMatrix& bounds, Eigen::Index n_particles, Rng& rng);

// w_k' = w_k L_k / sum_j w_j L_j. Locations untouched. Throws
// DegenerateUpdateError when the posterior mass vanishes.
void bayes_update(ParticleCloud& cloud, const Eigen::VectorXd& likelihoods);

// 1 / sum w_k^2, in [1, n_p]; equals n_p iff the weights are uniform.
double effective_sample_size(const ParticleCloud& cloud);

// Weighted mean/covariance and derived uncertainties. n_c > 0 groups the
// first n_c dims (omega) and last n_c dims (theta); n_c = 0 is per-dimension.
PosteriorSummary summarize(const ParticleCloud& cloud, int n_c);

}  // namespace nvsense
