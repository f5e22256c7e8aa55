#include "nvsense/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nvsense::csv {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_shots(const std::filesystem::path& path, const std::vector<ShotRecord>& shots) {
    auto out = open_out(path);
    out << "shot_index,batch_id,tau_us,outcome,probe_time_us,wall_time_us\n";
    for (const auto& s : shots) {
        out << s.shot_index << ',' << s.batch_id << ',' << format_double(s.tau) << ','
            << s.outcome << ',' << format_double(s.probe_time) << ','
            << format_double(s.wall_time) << '\n';
    }
}

void write_checkpoints(const std::filesystem::path& path, const RunTrace& trace) {
    auto out = open_out(path);
    out << "n_shot,param_name,mean,abs_unc,rel_unc,truth_rel_err\n";
    for (const auto& cp : trace.checkpoints) {
        for (std::size_t j = 0; j < trace.parameter_names.size(); ++j) {
            const auto idx = static_cast<Eigen::Index>(j);
            out << cp.n_shot << ',' << trace.parameter_names[j] << ','
                << format_double(cp.summary.mean[idx]) << ','
                << format_double(cp.summary.abs_uncertainty[idx]) << ','
                << format_double(cp.summary.rel_uncertainty[idx]) << ','
                << format_double(cp.truth_rel_err[j]) << '\n';
        }
    }
}

void write_batches(const std::filesystem::path& path, const std::vector<BatchRecord>& batches) {
    auto out = open_out(path);
    out << "batch_id,first_shot_index,generated_from_shot,ready_time_us,stalled,n_controls\n";
    for (const auto& b : batches) {
        out << b.batch_id << ',' << b.first_shot_index << ',' << b.generated_from_shot << ','
            << format_double(b.ready_time_us) << ',' << (b.stalled ? 1 : 0) << ','
            << b.taus.size() << '\n';
    }
}

void write_posterior(const std::filesystem::path& path, const ParticleCloud& cloud,
                     const std::vector<std::string>& names) {
    auto out = open_out(path);
    out << "weight";
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (Eigen::Index k = 0; k < cloud.n_particles(); ++k) {
        out << format_double(cloud.weights[k]);
        for (Eigen::Index j = 0; j < cloud.dim(); ++j) {
            out << ',' << format_double(cloud.locations(k, j));
        }
        out << '\n';
    }
}

void write_report(const std::filesystem::path& path, const BenchmarkReport& report) {
    auto out = open_out(path);
    out << "mode,n_shot,metric,median\n";
    for (const auto& c : report.curves) {
        for (std::size_t i = 0; i < c.n_shots.size(); ++i) {
            out << to_string(c.mode) << ',' << c.n_shots[i] << ',' << c.metric << ','
                << format_double(c.medians[i]) << '\n';
        }
    }
}

void write_runs_summary(const std::filesystem::path& path, const BenchmarkReport& report,
                        const std::vector<std::string>& param_names) {
    auto out = open_out(path);
    out << "mode,run_index,failed";
    for (const auto& n : param_names) out << ",truth_" << n;
    for (const auto& n : param_names) out << ",final_err_" << n;
    out << ",total_probe_us,total_wall_us,total_compute_us,stall_count\n";
    for (const auto& r : report.runs) {
        out << to_string(r.mode) << ',' << r.run_index << ',' << (r.failed ? 1 : 0);
        for (std::size_t j = 0; j < param_names.size(); ++j) {
            out << ',' << (j < r.truth_display.size() ? format_double(r.truth_display[j]) : "");
        }
        for (std::size_t j = 0; j < param_names.size(); ++j) {
            out << ','
                << (j < r.final_param_rel_err.size() ? format_double(r.final_param_rel_err[j])
                                                     : "");
        }
        out << ',' << format_double(r.total_probe_us) << ',' << format_double(r.total_wall_us)
            << ',' << format_double(r.total_compute_us) << ',' << r.stall_count << '\n';
    }
}

void write_throughput(const std::filesystem::path& path, const ThroughputReport& report) {
    auto out = open_out(path);
    out << "n_p,grid,precision,evals_per_s,latency_us\n";
    out << report.n_particles << ',' << report.grid_size << ','
        << (report.precision == KernelPrecision::Single ? "f32" : "f64") << ','
        << format_double(report.evals_per_second) << ',' << format_double(report.latency_us)
        << '\n';
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
    auto out = open_out(path);
    for (const auto& [k, v] : entries) out << k << '=' << v << '\n';
}

void write_run_outputs(const std::filesystem::path& dir, const RunTrace& trace) {
    std::filesystem::create_directories(dir);
    if (!trace.shots.empty()) write_shots(dir / "shots.csv", trace.shots);
    write_checkpoints(dir / "checkpoints.csv", trace);
    write_batches(dir / "batches.csv", trace.batches);
    write_posterior(dir / "posterior.csv", trace.final_display_cloud, trace.parameter_names);
}

}  // namespace nvsense::csv
