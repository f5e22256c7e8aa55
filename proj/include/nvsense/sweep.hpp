#pragma once

#include <cstdint>
#include <vector>

#include "nvsense/simulator.hpp"

namespace nvsense {

// Benchmark truth generation: a deterministic grid over the swept parameters
// crossed with seeded draws for the randomized ones.
struct SweepSpec {
    bool nuclear = true;
    int n_c = 2;

    // Nuclear: omega_h grid per spin (rad/us); theta drawn uniform on
    // [0, 2pi) and folded into [0, pi]. `unordered_combos` enumerates
    // strictly-increasing index tuples (C(points, n_c) combinations) instead
    // of the full ordered cross (points^n_c).
    double omega_lo = 0.0;
    double omega_hi = 0.0;
    int points_per_spin = 30;
    bool unordered_combos = false;

    // AC: omega grid crossed with a grid of field ratios B*gamma/omega.
    double ac_omega_lo = 0.0;
    double ac_omega_hi = 0.0;
    int omega_points = 20;
    double ratio_lo = 0.031;
    double ratio_hi = 0.169;
    int ratio_points = 20;
    double gamma = 0.0;  // rad/us per mT, converts ratio to B

    // Seeded subset of the full enumeration (0 keeps everything).
    long subset = 0;
    // When > 0 the generated count must match exactly.
    long n_bench_expected = 0;
};

std::vector<GroundTruth> generate_sweep(const SweepSpec& spec, std::uint64_t seed);

}  // namespace nvsense
