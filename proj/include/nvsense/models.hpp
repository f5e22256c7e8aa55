#pragma once

#include <string>
#include <variant>
#include <vector>

#include "nvsense/particle_cloud.hpp"
#include "nvsense/rng.hpp"
#include "nvsense/units.hpp"

namespace nvsense {

// Probabilities of faithfully reporting |0> and |1>. p0 + p1 > 1 keeps the
// readout informative.
struct ReadoutFidelity {
    double p0 = 1.0;
    double p1 = 1.0;
};

// Pr(report 0) = (p0 + p1 - 1) * p_ideal + (1 - p1); affine increasing in
// p_ideal whenever the readout is informative.
double apply_readout_noise(double p_ideal, const ReadoutFidelity& f);

// Probability clamp applied to every likelihood so the information-gain logs
// stay finite.
inline constexpr double kLikelihoodEps = 1e-9;

// ---------------------------------------------------------------------------
// Nuclear-spin model: probe under an XY8-4 train (32 pi pulses, total
// evolution 64 tau) coupled to n_C carbon spins via hyperfine magnitudes
// omega_h and angles theta.
// ---------------------------------------------------------------------------

struct NuclearSpinParams {
    std::vector<double> omega_h;  // rad/us
    std::vector<double> theta;    // rad
};

struct NuclearModelConfig {
    int n_c = 2;
    double omega_larmor = units::rad_per_us_from_hz(429.4e3);
    double t2 = 3000.0;  // us
    ReadoutFidelity fidelity;
    // Prior support.
    double omega_h_lo = units::rad_per_us_from_hz(6e3);
    double omega_h_hi = units::rad_per_us_from_hz(265e3);
    double theta_lo = 0.0;
    double theta_hi = units::kPi;
};

// Pr(0 | (omega_h, theta), tau), readout noise included, clamped into
// [eps, 1-eps].
double likelihood_nuclear(const NuclearSpinParams& params, const NuclearModelConfig& cfg,
                          double tau);

// ---------------------------------------------------------------------------
// AC-magnetometry model: probe under an XY8 train (16 tau total) sensing an
// oscillating field of angular frequency omega and magnitude B. The initial
// phase is averaged out, leaving a Bessel-function signal that the inference
// path truncates at sixth order. Particle coordinates are (omega, B*gamma/
// omega): the dimensionless field ratio makes the prior support a box.
// ---------------------------------------------------------------------------

struct AcFieldParams {
    double omega;    // rad/us
    double b_field;  // mT
};

struct AcModelConfig {
    double gamma = units::rad_per_us_from_hz(28.03e6);  // rad/us per mT
    double t2 = 170.0;                                  // us
    ReadoutFidelity fidelity;
    int bessel_order = 6;  // truncation order of J0 (even)
    // Prior support: omega and the ratio B*gamma/omega.
    double omega_lo = units::rad_per_us_from_hz(79.6e3);
    double omega_hi = units::rad_per_us_from_hz(1.35e6);
    double ratio_lo = 0.013;
    double ratio_hi = 0.177;
};

// Signal argument a(tau) = (16 B gamma / omega) sin^3(omega tau / 2) *
// [cos(3x) + cos(5x) + cos(11x) + cos(13x)], x = omega tau / 2.
double ac_signal_argument(double omega, double ratio, double tau);

// Phase-averaged Pr(0 | (omega, B), tau) with the truncated J0, readout noise
// included, clamped.
double likelihood_ac(const AcFieldParams& params, const AcModelConfig& cfg, double tau);

// ---------------------------------------------------------------------------
// Shot simulators. The AC simulator keeps the exact fixed-phase physics
// (fresh uniform phase per shot, untruncated cosine) while inference uses the
// phase-averaged truncated likelihood above.
// ---------------------------------------------------------------------------

int simulate_shot_nuclear(const NuclearSpinParams& params, const NuclearModelConfig& cfg,
                          double tau, Rng& rng);
int simulate_shot_ac(const AcFieldParams& params, const AcModelConfig& cfg, double tau, Rng& rng);

// ---------------------------------------------------------------------------
// Model handle used by the estimator stack. Particle coordinates:
//   nuclear: (omega_h[0..n_c), theta[0..n_c))          dim = 2 n_c
//   ac:      (omega, B*gamma/omega)                    dim = 2
// ---------------------------------------------------------------------------

using SensingModel = std::variant<NuclearModelConfig, AcModelConfig>;

int model_dim(const SensingModel& model);
int model_n_c(const SensingModel& model);  // 0 for the AC model
BoundsMatrix model_bounds(const SensingModel& model);
bool is_nuclear(const SensingModel& model);

// Pr(0) at one particle location (internal coordinates).
double likelihood0(const SensingModel& model, const double* loc, double tau);

// Batched Pr(0) over a uniform tau grid: out[k * n_tau + j] for particle k at
// tau_j. Rows are independent, so the grid layout is safe for arbitrary
// data-parallel partitioning; results do not depend on the thread count.
template <typename T>
void batch_likelihood0_grid(const SensingModel& model, const double* locs, Eigen::Index n_p,
                            const double* taus, Eigen::Index n_tau, T* out, int threads);

extern template void batch_likelihood0_grid<float>(const SensingModel&, const double*,
                                                   Eigen::Index, const double*, Eigen::Index,
                                                   float*, int);
extern template void batch_likelihood0_grid<double>(const SensingModel&, const double*,
                                                    Eigen::Index, const double*, Eigen::Index,
                                                    double*, int);

// Reporting helpers: clouds and truth vectors mapped to display coordinates
// (frequencies in kHz, angles in rad, fields in mT).
std::vector<std::string> param_names(const SensingModel& model);
ParticleCloud display_cloud(const SensingModel& model, const ParticleCloud& cloud);
std::vector<double> display_truth(const SensingModel& model, const NuclearSpinParams& p);
std::vector<double> display_truth(const SensingModel& model, const AcFieldParams& p);

}  // namespace nvsense
