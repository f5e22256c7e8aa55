#pragma once

#include <cstdint>
#include <vector>

#include "nvsense/models.hpp"
#include "nvsense/particle_cloud.hpp"
#include "nvsense/rng.hpp"

namespace nvsense {

// Finite candidate set of inter-pulse half-intervals, strictly increasing,
// uniform spacing.
struct ControlGrid {
    std::vector<double> taus;  // us
    double step = 0.0;         // us
};

// Inclusive endpoints; |taus| = round((hi - lo) / step) + 1.
ControlGrid make_control_grid(double lo, double hi, double step);

// Index of tau in the grid (1e-9 us tolerance); throws when absent.
Eigen::Index grid_index(const ControlGrid& grid, double tau);

enum class UtilityKind {
    CrossEntropy,        // the default expected-information-gain form
    MutualInformation,   // BALD variant: H(predictive) - E[H(likelihood)]
};

enum class KernelPrecision { Single, Double };

struct EigOptions {
    KernelPrecision precision = KernelPrecision::Single;
    UtilityKind utility = UtilityKind::CrossEntropy;
    int threads = 0;  // <= 0: OpenMP default
};

struct EigTable {
    std::vector<double> values;  // nats, one per control
    Eigen::Index argmax_index = 0;
    long generated_from_shot = 0;  // index of the last outcome included in D'
};

struct BatchPolicy {
    int n_batch = 15;
    double p_exponent = 6.0;
    // Sample Pr(tau) ∝ (E - min E)^p when true; raw E^p when false.
    bool floor_subtract = true;
};

// Pr(1 | D', tau) = sum_k w_k Pr(1 | x_k, tau).
double predicted_probability(const ParticleCloud& cloud, const SensingModel& model, double tau);

// Utility for every control in one call (n_p * |C| kernel evaluations).
// Likelihoods are evaluated at `precision`; the log accumulations always run
// in double with a fixed-block reduction, so results are independent of the
// thread count.
EigTable eig_table(const ParticleCloud& cloud, const SensingModel& model, const ControlGrid& grid,
                   const EigOptions& options = {}, long generated_from_shot = 0);

// Tau at the argmax; ties break toward the smallest tau.
double select_optimal(const EigTable& table, const ControlGrid& grid);

// n_batch i.i.d. draws with probability proportional to the policy weighting;
// falls back to uniform draws when every weight vanishes.
std::vector<double> sample_batch(const EigTable& table, const ControlGrid& grid,
                                 const BatchPolicy& policy, Rng& rng);

struct ThroughputReport {
    Eigen::Index n_particles = 0;
    Eigen::Index grid_size = 0;
    KernelPrecision precision = KernelPrecision::Single;
    long calls = 0;
    double seconds = 0.0;
    double evals_per_second = 0.0;
    double latency_us = 0.0;             // per eig_table call
    double evals_per_measurement = 0.0;  // n_p * |C| / n_batch
    double max_shot_rate_hz = 0.0;
};

// Sustained full-grid eig_table throughput on a synthetic uniform cloud.
ThroughputReport throughput_bench(const SensingModel& model, Eigen::Index n_particles,
                                  const ControlGrid& grid, double min_seconds,
                                  const EigOptions& options, int n_batch, std::uint64_t seed);

}  // namespace nvsense
