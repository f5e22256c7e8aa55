#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "nvsense/eig.hpp"
#include "nvsense/models.hpp"
#include "nvsense/rng.hpp"

namespace nvsense {

// One single-shot event. probe_time is the evolution time of the sequence
// (64 tau nuclear, 16 tau AC); wall_time additionally carries readout/
// initialization overhead and any time the instrument spent waiting for
// controls, so wall_time >= probe_time always.
struct ShotRecord {
    long shot_index = 0;  // 1-based
    int batch_id = 0;
    double tau = 0.0;           // us
    int outcome = 0;            // bit
    double probe_time = 0.0;    // us
    double wall_time = 0.0;     // us
};

// Hidden true parameters of a run; never visible to the estimator.
struct GroundTruth {
    std::variant<NuclearSpinParams, AcFieldParams> params;
    std::uint64_t seed = 0;
};

GroundTruth make_truth(NuclearSpinParams params, std::uint64_t seed = 0);
GroundTruth make_truth(AcFieldParams params, std::uint64_t seed = 0);

// The virtual instrument: a serial probe accepting "submit tau -> receive
// bit". A hardware driver could stand in behind the same narrow contract.
class ShotSimulator {
public:
    ShotSimulator(const SensingModel& model, const GroundTruth& truth, const ControlGrid& grid,
                  double overhead_us, std::uint64_t shot_seed);

    // tau must be a grid point; throws otherwise.
    ShotRecord run_shot(double tau, int batch_id);

    long shots_run() const { return count_; }
    double total_probe_time() const { return total_probe_; }

private:
    SensingModel model_;
    GroundTruth truth_;
    ControlGrid grid_;
    double overhead_us_;
    Rng rng_;
    long count_ = 0;
    double total_probe_ = 0.0;
};

// Per-tau shot counts and outcome means; grid points with zero shots are
// absent rather than reported as zero.
struct ShotHistogram {
    std::vector<double> taus;
    std::vector<long> counts;
    std::vector<double> mean_outcome;  // \bar d_tau
};

ShotHistogram shot_histogram(const std::vector<ShotRecord>& records, const ControlGrid& grid);

}  // namespace nvsense
