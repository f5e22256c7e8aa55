#pragma once

#include <string>
#include <vector>

#include "nvsense/eig.hpp"
#include "nvsense/resampler.hpp"
#include "nvsense/simulator.hpp"

namespace nvsense {

enum class RunMode { Sync, Async, NonAdaptive };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

struct RunConfig {
    RunMode mode = RunMode::Sync;
    long n_shot_max = 1050;
    // Async data lag T: the batch covering shots i..i+n_batch-1 is optimized
    // from outcomes 1..i-1-T only. Must be >= n_batch.
    int delay_shots = 15;
    double stop_rel_uncertainty = 0.0;  // 0 disables the early-stop criterion
    double overhead_us = 0.0;           // initialization + readout per shot
    double eig_latency_us = 0.0;        // simulated optimizer latency per batch
    std::vector<long> checkpoints;      // empty: default geometric schedule
    std::uint64_t seed = 1;
    Eigen::Index n_particles = 3200;
    ControlGrid grid;
    ResamplerConfig resampler;
    BatchPolicy policy;
    EigOptions eig;
    bool record_shots = true;
};

// 75, 150, 300, ... doubling below n_shot_max, with n_shot_max appended.
std::vector<long> default_checkpoints(long n_shot_max);

struct BatchRecord {
    int batch_id = 0;
    long first_shot_index = 0;
    long generated_from_shot = 0;  // watermark: last outcome visible to the optimizer
    double ready_time_us = 0.0;    // virtual time the controls became available
    bool stalled = false;          // measurement loop had to wait for this batch
    std::vector<double> taus;
};

struct CheckpointRecord {
    long n_shot = 0;
    PosteriorSummary summary;             // display coordinates
    std::vector<double> truth_rel_err;    // |mean - truth| / |truth| per parameter
};

struct RunTrace {
    std::vector<ShotRecord> shots;  // empty when record_shots is off
    std::vector<BatchRecord> batches;
    std::vector<CheckpointRecord> checkpoints;
    double total_probe_us = 0.0;
    double total_wall_us = 0.0;
    double total_compute_us = 0.0;  // simulated optimizer busy time
    long stall_count = 0;
    long resample_count = 0;
    long shots_run = 0;
    long updates_applied = 0;  // bayes updates; equals shots_run on success
    bool failed = false;
    std::string failure_message;
    bool resampler_fallback_flagged = false;
    PosteriorSummary final_summary;       // display coordinates
    ParticleCloud final_display_cloud;    // posterior particles, display coordinates
    std::vector<double> truth_display;
    std::vector<std::string> parameter_names;
};

// The real-time loop: (i) prior, (ii) optimal controls via the utility table,
// (iii) measure + Bayes update (+ Liu-West resampling on the ESS trigger),
// (iv) stop at n_shot_max or the uncertainty target. Mode selects synchronous
// optimization, the asynchronous pipeline with lagged data, or uniformly
// random control draws with the same estimator.
RunTrace run_experiment(const RunConfig& cfg, const SensingModel& model, const GroundTruth& truth);

}  // namespace nvsense
