#include "nvsense/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace nvsense {

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::Sync: return "sync";
        case RunMode::Async: return "async";
        case RunMode::NonAdaptive: return "nonadaptive";
    }
    return "?";
}

RunMode run_mode_from_string(const std::string& name) {
    if (name == "sync") return RunMode::Sync;
    if (name == "async") return RunMode::Async;
    if (name == "nonadaptive") return RunMode::NonAdaptive;
    throw std::invalid_argument("unknown run mode: " + name);
}

std::vector<long> default_checkpoints(long n_shot_max) {
    std::vector<long> cps;
    for (long c = 75; c < n_shot_max; c *= 2) cps.push_back(c);
    if (n_shot_max > 0 && (cps.empty() || cps.back() != n_shot_max)) cps.push_back(n_shot_max);
    return cps;
}

namespace {

std::vector<long> normalize_checkpoints(std::vector<long> cps, long n_shot_max) {
    std::erase_if(cps, [&](long c) { return c <= 0 || c > n_shot_max; });
    std::sort(cps.begin(), cps.end());
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    if (n_shot_max > 0 && (cps.empty() || cps.back() != n_shot_max)) cps.push_back(n_shot_max);
    return cps;
}

std::vector<double> truth_rel_errors(const Eigen::VectorXd& mean,
                                     const std::vector<double>& truth) {
    std::vector<double> err(truth.size());
    for (std::size_t j = 0; j < truth.size(); ++j) {
        err[j] = truth[j] == 0.0
                     ? std::numeric_limits<double>::infinity()
                     : std::abs(mean[static_cast<Eigen::Index>(j)] - truth[j]) / std::abs(truth[j]);
    }
    return err;
}

}  // namespace

RunTrace run_experiment(const RunConfig& cfg, const SensingModel& model, const GroundTruth& truth) {
    if (cfg.n_shot_max < 0) throw std::invalid_argument("run_experiment: n_shot_max < 0");
    if (cfg.grid.taus.empty()) throw std::invalid_argument("run_experiment: empty control grid");
    if (cfg.policy.n_batch < 1) throw std::invalid_argument("run_experiment: n_batch < 1");
    if (cfg.mode == RunMode::Async && cfg.delay_shots != 0 &&
        cfg.delay_shots < cfg.policy.n_batch) {
        // T = 0 is allowed as the degenerate case that reproduces sync.
        throw std::invalid_argument("run_experiment: async delay must be 0 or >= n_batch");
    }

    const int n_c = model_n_c(model);
    RunTrace trace;
    trace.parameter_names = param_names(model);
    trace.truth_display =
        std::visit([&](const auto& p) { return display_truth(model, p); }, truth.params);

    Rng init_rng(derive_seed(cfg.seed, rng_stream::kInit));
    Rng batch_rng(derive_seed(cfg.seed, rng_stream::kBatch));
    Rng resample_rng(derive_seed(cfg.seed, rng_stream::kResample));
    ShotSimulator sim(model, truth, cfg.grid, cfg.overhead_us,
                      derive_seed(cfg.seed, rng_stream::kShots));

    ParticleCloud cloud = init_uniform(model_bounds(model), cfg.n_particles, init_rng);
    if (cfg.resampler.remap) remap_labels(cloud, n_c);

    const auto record_checkpoint = [&](long n_shot) {
        CheckpointRecord cp;
        cp.n_shot = n_shot;
        cp.summary = summarize(display_cloud(model, cloud), n_c);
        cp.truth_rel_err = truth_rel_errors(cp.summary.mean, trace.truth_display);
        trace.checkpoints.push_back(std::move(cp));
    };

    if (cfg.n_shot_max == 0) {
        record_checkpoint(0);
        trace.final_summary = trace.checkpoints.back().summary;
        trace.final_display_cloud = display_cloud(model, cloud);
        return trace;
    }

    const std::vector<long> checkpoints =
        normalize_checkpoints(cfg.checkpoints.empty() ? default_checkpoints(cfg.n_shot_max)
                                                      : cfg.checkpoints,
                              cfg.n_shot_max);
    std::size_t next_cp = 0;

    const int n_batch = cfg.policy.n_batch;
    const auto grid_size = static_cast<std::uint64_t>(cfg.grid.taus.size());

    // Virtual timeline. m_time is the completion time of the last shot;
    // pending_wait folds optimizer/compute waits into the next shot's wall
    // time so that the wall-time total equals the simulated clock.
    double m_time = 0.0;
    double opt_free = 0.0;
    double pending_wait = 0.0;
    std::vector<double> outcome_time;

    // Cloud snapshots for the async optimizer, keyed by watermark (the shot
    // count they include). Captured right after the watermark outcome (and
    // any resampling it triggered) is applied.
    std::map<long, ParticleCloud> snapshots;
    long next_snapshot_at = -1;
    ParticleCloud prior_cloud;
    if (cfg.mode == RunMode::Async) {
        outcome_time.assign(static_cast<std::size_t>(cfg.n_shot_max) + 1, 0.0);
        prior_cloud = cloud;
        for (long b = 1;; ++b) {
            const long w = b * n_batch - cfg.delay_shots;
            if (w > 0) {
                next_snapshot_at = w;
                break;
            }
        }
    }

    bool stop = false;
    long shots_done = 0;
    int batch_id = 0;
    Eigen::VectorXd lik(cfg.n_particles);

    while (!stop && !trace.failed && shots_done < cfg.n_shot_max) {
        const long first_shot = shots_done + 1;
        BatchRecord brec;
        brec.batch_id = batch_id;
        brec.first_shot_index = first_shot;

        if (cfg.mode == RunMode::NonAdaptive) {
            brec.taus.resize(static_cast<std::size_t>(n_batch));
            for (auto& tau : brec.taus) {
                tau = cfg.grid.taus[static_cast<std::size_t>(batch_rng.integer(grid_size))];
            }
            brec.generated_from_shot = 0;
            brec.ready_time_us = m_time;
        } else if (cfg.mode == RunMode::Sync) {
            const EigTable table = eig_table(cloud, model, cfg.grid, cfg.eig, shots_done);
            brec.taus = sample_batch(table, cfg.grid, cfg.policy, batch_rng);
            brec.generated_from_shot = shots_done;
            trace.total_compute_us += cfg.eig_latency_us;
            pending_wait += cfg.eig_latency_us;
            brec.ready_time_us = m_time + cfg.eig_latency_us;
        } else {
            const long watermark = std::max<long>(0, first_shot - 1 - cfg.delay_shots);
            const ParticleCloud& snap =
                watermark == 0 ? prior_cloud : snapshots.at(watermark);
            const EigTable table = eig_table(snap, model, cfg.grid, cfg.eig, watermark);
            brec.taus = sample_batch(table, cfg.grid, cfg.policy, batch_rng);
            brec.generated_from_shot = watermark;
            snapshots.erase(snapshots.begin(), snapshots.upper_bound(watermark));

            const double data_ready =
                watermark == 0 ? 0.0 : outcome_time[static_cast<std::size_t>(watermark)];
            const double ready = std::max(opt_free, data_ready) + cfg.eig_latency_us;
            opt_free = ready;
            trace.total_compute_us += cfg.eig_latency_us;
            brec.ready_time_us = ready;
            if (ready > m_time) {
                pending_wait += ready - m_time;
                if (batch_id > 0) {
                    brec.stalled = true;
                    ++trace.stall_count;
                }
            }
        }

        for (const double tau : brec.taus) {
            if (stop || shots_done >= cfg.n_shot_max) break;
            ShotRecord rec = sim.run_shot(tau, batch_id);
            rec.wall_time += pending_wait;
            pending_wait = 0.0;
            m_time += rec.wall_time;
            trace.total_probe_us += rec.probe_time;
            trace.total_wall_us = m_time;

            for (Eigen::Index k = 0; k < cloud.n_particles(); ++k) {
                const double p0 = likelihood0(model, cloud.locations.row(k).data(), tau);
                lik[k] = rec.outcome == 0 ? p0 : 1.0 - p0;
            }
            try {
                bayes_update(cloud, lik);
                ++trace.updates_applied;
            } catch (const DegenerateUpdateError& e) {
                trace.failed = true;
                trace.failure_message = e.what();
            }
            ++shots_done;
            trace.shots_run = shots_done;
            if (cfg.record_shots) trace.shots.push_back(rec);
            if (cfg.mode == RunMode::Async) {
                outcome_time[static_cast<std::size_t>(shots_done)] = m_time;
            }
            if (trace.failed) break;

            if (effective_sample_size(cloud) <
                cfg.resampler.ess_threshold_fraction * static_cast<double>(cloud.n_particles())) {
                const ResampleInfo info = resample_liu_west(cloud, cfg.resampler, resample_rng);
                if (cfg.resampler.remap) remap_labels(cloud, n_c);
                ++trace.resample_count;
                trace.resampler_fallback_flagged |= info.pure_contraction_fallback;
            }
            if (cfg.mode == RunMode::Async && shots_done == next_snapshot_at) {
                snapshots.emplace(shots_done, cloud);
                next_snapshot_at += n_batch;
            }
            if (next_cp < checkpoints.size() && shots_done == checkpoints[next_cp]) {
                record_checkpoint(shots_done);
                ++next_cp;
            }
            if (cfg.stop_rel_uncertainty > 0.0) {
                const PosteriorSummary s = summarize(display_cloud(model, cloud), n_c);
                if (s.mean_rel_per_group.maxCoeff() < cfg.stop_rel_uncertainty) stop = true;
            }
        }
        trace.batches.push_back(std::move(brec));
        ++batch_id;
    }

    trace.final_display_cloud = display_cloud(model, cloud);
    trace.final_summary = summarize(trace.final_display_cloud, n_c);
    if (trace.checkpoints.empty() || trace.checkpoints.back().n_shot != shots_done) {
        record_checkpoint(shots_done);
    }
    return trace;
}

}  // namespace nvsense
