#pragma once

#include "nvsense/particle_cloud.hpp"

namespace nvsense {

struct ResamplerConfig {
    double a = 0.98;                      // Liu-West contraction, in (0, 1]
    double ess_threshold_fraction = 0.5;  // resample when ESS < fraction * n_p
    bool remap = true;                    // label remapping after resampling
};

struct ResampleInfo {
    // Covariance was not usable for jitter; the resampler fell back to pure
    // contraction (eta = 0). Callers surface this in the run log.
    bool pure_contraction_fallback = false;
};

// Liu-West resampling: ancestor j drawn with probability w_j, new location
// a*x_j + (1-a)*mu + eta with eta ~ N(0, (1-a^2) Sigma), where mu/Sigma are
// the pre-resampling moments. Locations are clamped into the cloud bounds and
// weights reset to 1/n_p. The particle count never changes.
ResampleInfo resample_liu_west(ParticleCloud& cloud, const ResamplerConfig& cfg, Rng& rng);

// Per-particle label canonicalization for the nuclear model: sort the
// (omega_hq, theta_q) spin blocks by ascending omega_hq and fold each theta
// into [0, pi] via theta -> 2pi - theta. The likelihood is invariant under
// both operations, so the represented posterior is unchanged. No-op when
// n_c == 0 (AC model).
void remap_labels(ParticleCloud& cloud, int n_c);

}  // namespace nvsense
