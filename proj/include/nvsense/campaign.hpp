#pragma once

#include <string>
#include <vector>

#include "nvsense/orchestrator.hpp"
#include "nvsense/sweep.hpp"

namespace nvsense {

// Extract of one run: grouped relative uncertainties and ground-truth errors
// at every checkpoint, plus resource totals.
struct CampaignRun {
    RunMode mode = RunMode::Sync;
    long run_index = 0;
    bool failed = false;
    std::vector<double> truth_display;
    struct Point {
        long n_shot = 0;
        std::vector<double> group_rel;      // rms relative uncertainty per group
        std::vector<double> group_err;      // rms ground-truth relative error per group
    };
    std::vector<Point> points;
    std::vector<double> final_param_rel_err;  // per-parameter truth errors at the end
    double total_probe_us = 0.0;
    double total_wall_us = 0.0;
    double total_compute_us = 0.0;
    long stall_count = 0;
};

struct MedianCurve {
    RunMode mode = RunMode::Sync;
    std::string metric;
    std::vector<long> n_shots;
    std::vector<double> medians;
};

struct BenchmarkReport {
    std::vector<CampaignRun> runs;
    std::vector<MedianCurve> curves;
    std::vector<std::string> group_metric_names;  // e.g. {omega_h_rms, theta_rms}
    long failed_runs = 0;
};

// Lower-median convention: for even counts the lower of the two middle values,
// so aggregation is deterministic.
double lower_median(std::vector<double> values);

// One run per (mode, combination). Runs share nothing but read-only configs;
// a worker pool of `workers` threads executes them (workers <= 1 is serial,
// and per-run results are identical either way). When workers > 1 the
// in-run kernel parallelism is disabled so the pool scales cleanly.
BenchmarkReport run_campaign(const std::vector<GroundTruth>& sweep, const SensingModel& model,
                             const RunConfig& base, const std::vector<RunMode>& modes,
                             int workers, std::uint64_t campaign_seed);

// Median over runs that reached the checkpoint, per mode / metric / n_shot.
std::vector<MedianCurve> aggregate_medians(const std::vector<CampaignRun>& runs,
                                           const std::vector<std::string>& metric_names);

// Lookup helper; throws when the curve or checkpoint is missing.
double median_at(const BenchmarkReport& report, RunMode mode, const std::string& metric,
                 long n_shot);

}  // namespace nvsense
