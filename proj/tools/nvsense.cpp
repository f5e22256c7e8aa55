// Command-line front end: single sensing runs, benchmark campaigns, the
// throughput microbenchmark, and the numerical validation suite.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <thread>

#include "nvsense/config.hpp"
#include "nvsense/csv.hpp"
#include "nvsense/validation.hpp"
#include "nvsense/version.hpp"

namespace fs = std::filesystem;
using namespace nvsense;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CliOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::string mode;
    std::uint64_t seed = 0;
    bool seed_set = false;
    long shots = -1;
    int workers = -1;
    double seconds = 0.0;
};

AppConfig load_or_default(const CliOptions& opt, bool nuclear_default) {
    AppConfig cfg = opt.config_path.empty() ? default_config(nuclear_default)
                                            : load_config(opt.config_path);
    if (opt.seed_set) {
        cfg.run.seed = opt.seed;
        cfg.manifest.emplace_back("cli.seed", std::to_string(opt.seed));
    }
    if (!opt.mode.empty()) {
        cfg.run.mode = run_mode_from_string(opt.mode);
        cfg.manifest.emplace_back("cli.mode", opt.mode);
    }
    if (opt.shots >= 0) {
        cfg.run.n_shot_max = opt.shots;
        cfg.manifest.emplace_back("cli.shots", std::to_string(opt.shots));
    }
    if (opt.workers >= 0) {
        cfg.workers = opt.workers;
        cfg.manifest.emplace_back("cli.workers", std::to_string(opt.workers));
    }
    cfg.manifest.emplace_back("code.version", kVersion);
    return cfg;
}

int run_single(const CliOptions& opt, bool nuclear) {
    AppConfig cfg = load_or_default(opt, nuclear);
    if (is_nuclear(cfg.model) != nuclear) {
        std::cerr << "error: config model.kind does not match the subcommand\n";
        return kExitUsage;
    }
    if (!cfg.has_truth) {
        std::cerr << "error: single runs need a [truth] section in the config\n";
        return kExitUsage;
    }
    const RunTrace trace = run_experiment(cfg.run, cfg.model, cfg.truth);
    const fs::path out(opt.out_dir);
    csv::write_run_outputs(out, trace);
    csv::write_manifest(out / "manifest.txt", cfg.manifest);

    std::cout << "shots " << trace.shots_run << ", resamples " << trace.resample_count
              << ", probe " << trace.total_probe_us * 1e-6 << " s, wall "
              << trace.total_wall_us * 1e-6 << " s\n";
    for (std::size_t j = 0; j < trace.parameter_names.size(); ++j) {
        const auto idx = static_cast<Eigen::Index>(j);
        std::cout << "  " << trace.parameter_names[j] << ": mean "
                  << csv::format_double(trace.final_summary.mean[idx]) << ", rel_unc "
                  << csv::format_double(trace.final_summary.rel_uncertainty[idx])
                  << ", truth_err "
                  << csv::format_double(trace.checkpoints.back().truth_rel_err[j]) << "\n";
    }
    if (trace.failed) {
        std::cerr << "run failed: " << trace.failure_message << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

int run_benchmark(const CliOptions& opt) {
    AppConfig cfg = load_or_default(opt, true);
    if (!cfg.has_sweep) {
        std::cerr << "error: benchmark needs a [sweep] section in the config\n";
        return kExitUsage;
    }
    const auto sweep = generate_sweep(cfg.sweep, cfg.run.seed);
    int workers = cfg.workers;
    if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
    cfg.run.record_shots = false;

    const BenchmarkReport report =
        run_campaign(sweep, cfg.model, cfg.run, cfg.campaign_modes, workers, cfg.run.seed);

    const fs::path out(opt.out_dir);
    csv::write_report(out / "report.csv", report);
    csv::write_runs_summary(out / "runs.csv", report, param_names(cfg.model));
    cfg.manifest.emplace_back("campaign.n_bench", std::to_string(sweep.size()));
    cfg.manifest.emplace_back("campaign.effective_workers", std::to_string(workers));
    csv::write_manifest(out / "manifest.txt", cfg.manifest);

    std::cout << "campaign: " << sweep.size() << " combinations x " << cfg.campaign_modes.size()
              << " modes, " << report.failed_runs << " failed\n";
    for (const auto& curve : report.curves) {
        if (curve.metric != "delta_rms" || curve.medians.empty()) continue;
        std::cout << "  " << to_string(curve.mode) << " delta_rms at n_shot "
                  << curve.n_shots.back() << ": " << csv::format_double(curve.medians.back())
                  << "\n";
    }
    return report.failed_runs == 0 ? kExitOk : kExitRuntime;
}

int run_throughput(const CliOptions& opt) {
    AppConfig cfg = load_or_default(opt, true);
    const double seconds = opt.seconds > 0.0 ? opt.seconds : cfg.throughput_seconds;
    const ThroughputReport report =
        throughput_bench(cfg.model, cfg.run.n_particles, cfg.run.grid, seconds, cfg.run.eig,
                         cfg.run.policy.n_batch, cfg.run.seed);
    const fs::path out(opt.out_dir);
    csv::write_throughput(out / "throughput.csv", report);
    cfg.manifest.emplace_back("throughput.calls", std::to_string(report.calls));
    cfg.manifest.emplace_back("throughput.evals_per_measurement",
                              csv::format_double(report.evals_per_measurement));
    cfg.manifest.emplace_back("throughput.max_shot_rate_hz",
                              csv::format_double(report.max_shot_rate_hz));
    csv::write_manifest(out / "manifest.txt", cfg.manifest);

    std::cout << "n_p=" << report.n_particles << " grid=" << report.grid_size << " precision="
              << (report.precision == KernelPrecision::Single ? "f32" : "f64")
              << "\n  evals/s: " << csv::format_double(report.evals_per_second)
              << "\n  latency: " << csv::format_double(report.latency_us)
              << " us/call\n  evals/measurement: "
              << csv::format_double(report.evals_per_measurement)
              << "\n  implied max shot rate: " << csv::format_double(report.max_shot_rate_hz)
              << " Hz\n";
    return kExitOk;
}

int run_validate(const CliOptions& opt) {
    const std::uint64_t seed = opt.seed_set ? opt.seed : 20260809;
    bool all_pass = true;
    for (const auto& check : run_validation_suite(seed, /*quick=*/true)) {
        std::cout << (check.pass ? "PASS" : "FAIL") << "  " << check.name << ": " << check.detail
                  << "\n";
        all_pass = all_pass && check.pass;
    }
    return all_pass ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian adaptive single-spin sensing: simulator and benchmarks"};
    app.set_version_flag("--version", kVersion);
    app.fallthrough();
    app.require_subcommand(1);

    CliOptions opt;
    app.add_option("--config", opt.config_path, "JSON config file");
    app.add_option("--out", opt.out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", opt.seed, "master seed override")
        ->each([&](const std::string&) { opt.seed_set = true; });
    app.add_option("--mode", opt.mode, "run mode: sync|async|nonadaptive");
    app.add_option("--shots", opt.shots, "override n_shot_max");
    app.add_option("--workers", opt.workers, "campaign worker threads (0 = hardware)");
    app.add_option("--seconds", opt.seconds, "throughput measurement window");

    auto* nuclear = app.add_subcommand("sense-nuclear", "single nuclear-spin sensing run");
    auto* ac = app.add_subcommand("sense-ac", "single AC-field sensing run");
    auto* benchmark = app.add_subcommand("benchmark", "sweep campaign with median curves");
    auto* throughput = app.add_subcommand("throughput", "utility-table kernel benchmark");
    auto* validate = app.add_subcommand("validate", "numerical oracle suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (nuclear->parsed()) return run_single(opt, true);
        if (ac->parsed()) return run_single(opt, false);
        if (benchmark->parsed()) return run_benchmark(opt);
        if (throughput->parsed()) return run_throughput(opt);
        if (validate->parsed()) return run_validate(opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
