#include "nvsense/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

namespace nvsense {

double lower_median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("lower_median: empty input");
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

namespace {

std::vector<std::string> group_base_names(const SensingModel& model) {
    if (is_nuclear(model)) return {"omega_h", "theta"};
    return {"omega", "b"};
}

// rms of the per-parameter truth errors within each group.
std::vector<double> group_errors(const std::vector<double>& per_param, int n_c) {
    if (n_c <= 0) return per_param;
    std::vector<double> out(2, 0.0);
    for (int g = 0; g < 2; ++g) {
        double acc = 0.0;
        for (int q = 0; q < n_c; ++q) {
            const double e = per_param[static_cast<std::size_t>(g * n_c + q)];
            acc += e * e;
        }
        out[static_cast<std::size_t>(g)] = std::sqrt(acc / n_c);
    }
    return out;
}

CampaignRun extract_run(const RunTrace& trace, RunMode mode, long run_index, int n_c) {
    CampaignRun row;
    row.mode = mode;
    row.run_index = run_index;
    row.failed = trace.failed;
    row.truth_display = trace.truth_display;
    for (const auto& cp : trace.checkpoints) {
        CampaignRun::Point pt;
        pt.n_shot = cp.n_shot;
        pt.group_rel.assign(cp.summary.mean_rel_per_group.data(),
                            cp.summary.mean_rel_per_group.data() +
                                cp.summary.mean_rel_per_group.size());
        pt.group_err = group_errors(cp.truth_rel_err, n_c);
        row.points.push_back(std::move(pt));
    }
    if (!trace.checkpoints.empty()) {
        row.final_param_rel_err = trace.checkpoints.back().truth_rel_err;
    }
    row.total_probe_us = trace.total_probe_us;
    row.total_wall_us = trace.total_wall_us;
    row.total_compute_us = trace.total_compute_us;
    row.stall_count = trace.stall_count;
    return row;
}

}  // namespace

std::vector<MedianCurve> aggregate_medians(const std::vector<CampaignRun>& runs,
                                           const std::vector<std::string>& metric_names) {
    std::vector<MedianCurve> curves;
    std::vector<RunMode> modes;
    for (const auto& r : runs) {
        if (std::find(modes.begin(), modes.end(), r.mode) == modes.end()) modes.push_back(r.mode);
    }
    for (const RunMode mode : modes) {
        // metric index -> (n_shot -> values over runs)
        std::vector<std::map<long, std::vector<double>>> rel_values(metric_names.size());
        std::vector<std::map<long, std::vector<double>>> err_values(metric_names.size());
        for (const auto& r : runs) {
            if (r.mode != mode || r.failed) continue;
            for (const auto& pt : r.points) {
                for (std::size_t g = 0; g < metric_names.size() && g < pt.group_rel.size(); ++g) {
                    rel_values[g][pt.n_shot].push_back(pt.group_rel[g]);
                    err_values[g][pt.n_shot].push_back(pt.group_err[g]);
                }
            }
        }
        for (std::size_t g = 0; g < metric_names.size(); ++g) {
            MedianCurve rel{mode, metric_names[g] + "_rms", {}, {}};
            for (const auto& [n_shot, vals] : rel_values[g]) {
                rel.n_shots.push_back(n_shot);
                rel.medians.push_back(lower_median(vals));
            }
            MedianCurve err{mode, metric_names[g] + "_err", {}, {}};
            for (const auto& [n_shot, vals] : err_values[g]) {
                err.n_shots.push_back(n_shot);
                err.medians.push_back(lower_median(vals));
            }
            curves.push_back(std::move(rel));
            curves.push_back(std::move(err));
        }
        // delta_rms = max over the group uncertainty medians, per checkpoint
        if (!metric_names.empty()) {
            MedianCurve delta{mode, "delta_rms", {}, {}};
            const MedianCurve& first = curves[curves.size() - 2 * metric_names.size()];
            for (std::size_t i = 0; i < first.n_shots.size(); ++i) {
                double m = 0.0;
                for (std::size_t g = 0; g < metric_names.size(); ++g) {
                    const MedianCurve& c = curves[curves.size() - 2 * (metric_names.size() - g)];
                    if (i < c.medians.size()) m = std::max(m, c.medians[i]);
                }
                delta.n_shots.push_back(first.n_shots[i]);
                delta.medians.push_back(m);
            }
            curves.push_back(std::move(delta));
        }
    }
    return curves;
}

double median_at(const BenchmarkReport& report, RunMode mode, const std::string& metric,
                 long n_shot) {
    for (const auto& c : report.curves) {
        if (c.mode != mode || c.metric != metric) continue;
        for (std::size_t i = 0; i < c.n_shots.size(); ++i) {
            if (c.n_shots[i] == n_shot) return c.medians[i];
        }
    }
    throw std::invalid_argument("median_at: no value for " + metric + " at n_shot " +
                                std::to_string(n_shot));
}

BenchmarkReport run_campaign(const std::vector<GroundTruth>& sweep, const SensingModel& model,
                             const RunConfig& base, const std::vector<RunMode>& modes,
                             int workers, std::uint64_t campaign_seed) {
    if (sweep.empty() || modes.empty()) {
        throw std::invalid_argument("run_campaign: empty sweep or mode list");
    }
    const int n_c = model_n_c(model);
    const std::size_t n_jobs = sweep.size() * modes.size();
    std::vector<CampaignRun> rows(n_jobs);
    const int n_workers = std::max(1, workers);

    std::atomic<std::size_t> cursor{0};
    const auto work = [&]() {
        while (true) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= n_jobs) return;
            const std::size_t mode_idx = i / sweep.size();
            const std::size_t run_idx = i % sweep.size();
            RunConfig cfg = base;
            cfg.mode = modes[mode_idx];
            cfg.seed = derive_seed(campaign_seed, mode_idx, run_idx);
            if (n_workers > 1) cfg.eig.threads = 1;
            try {
                const RunTrace trace = run_experiment(cfg, model, sweep[run_idx]);
                rows[i] = extract_run(trace, cfg.mode, static_cast<long>(run_idx), n_c);
                rows[i].failed = rows[i].failed || trace.failed;
            } catch (const std::exception&) {
                rows[i].mode = cfg.mode;
                rows[i].run_index = static_cast<long>(run_idx);
                rows[i].failed = true;
            }
        }
    };

    if (n_workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    BenchmarkReport report;
    report.group_metric_names = group_base_names(model);
    report.runs = std::move(rows);
    for (const auto& r : report.runs) {
        if (r.failed) ++report.failed_runs;
    }
    report.curves = aggregate_medians(report.runs, report.group_metric_names);
    return report;
}

}  // namespace nvsense
