#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nvsense/models.hpp"

namespace nvsense {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Closed-form nuclear likelihood (ideal readout, T2 -> inf) against the
// piecewise-unitary XY8-4 oracle on seeded random parameter sets with
// n_c in {1, 2}.
CheckResult check_nuclear_vs_oracle(int n_sets, int n_taus, double tol, std::uint64_t seed);

// Truncated J0 series against the reference Bessel function on a in
// [0, a_max], and the phase-average identity: quadrature of the fixed-phase
// probability equals (1 + J0(a)) / 2.
CheckResult check_bessel_truncation(int grid_points, double a_max, double tol);
CheckResult check_phase_average_quadrature(int grid_points, double a_max, double tol);

// Long-run simulator outcome frequencies against the model probabilities
// (binomial 3-sigma), nuclear against the closed form and AC against the
// untruncated phase-averaged value.
CheckResult check_shot_frequency_nuclear(long n_shots, std::uint64_t seed);
CheckResult check_shot_frequency_ac(long n_shots, std::uint64_t seed);

std::vector<CheckResult> run_validation_suite(std::uint64_t seed, bool quick);

}  // namespace nvsense
