#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nvsense/campaign.hpp"
#include "nvsense/orchestrator.hpp"

namespace nvsense::csv {

// All writers emit a header row and "%.10g" numbers, so a (config, seed)
// pair reproduces every file byte-for-byte.

void write_shots(const std::filesystem::path& path, const std::vector<ShotRecord>& shots);
void write_checkpoints(const std::filesystem::path& path, const RunTrace& trace);
void write_batches(const std::filesystem::path& path, const std::vector<BatchRecord>& batches);
void write_posterior(const std::filesystem::path& path, const ParticleCloud& cloud,
                     const std::vector<std::string>& names);
void write_report(const std::filesystem::path& path, const BenchmarkReport& report);
void write_runs_summary(const std::filesystem::path& path, const BenchmarkReport& report,
                        const std::vector<std::string>& param_names);
void write_throughput(const std::filesystem::path& path, const ThroughputReport& report);
void write_manifest(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& entries);

// shots.csv / checkpoints.csv / batches.csv / posterior.csv under `dir`.
void write_run_outputs(const std::filesystem::path& dir, const RunTrace& trace);

std::string format_double(double v);

}  // namespace nvsense::csv
