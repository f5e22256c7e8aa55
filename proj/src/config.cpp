#include "nvsense/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nvsense/csv.hpp"
#include "nvsense/units.hpp"

namespace nvsense {

namespace {

using nlohmann::json;

std::string to_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return csv::format_double(v.get<double>());
    return v.dump();
}

// One config section with unknown-key detection and effective-value capture.
class Section {
public:
    Section(const json& root, std::string name,
            std::vector<std::pair<std::string, std::string>>* manifest)
        : name_(std::move(name)), manifest_(manifest) {
        if (root.contains(name_)) {
            if (!root[name_].is_object()) throw ConfigError("section '" + name_ + "' must be an object");
            obj_ = root[name_];
        }
    }

    template <typename T>
    T get(const std::string& key, T fallback) {
        T value = fallback;
        if (obj_.contains(key)) {
            try {
                value = obj_[key].get<T>();
            } catch (const json::exception&) {
                throw ConfigError("bad value for '" + name_ + "." + key + "'");
            }
            seen_.insert(key);
        }
        record(key, json(value));
        return value;
    }

    bool has(const std::string& key) const { return obj_.contains(key); }

    void mark_seen(const std::string& key) { seen_.insert(key); }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return obj_.at(key);
    }

    void record(const std::string& key, const json& v) {
        if (manifest_ != nullptr) manifest_->emplace_back(name_ + "." + key, to_text(v));
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.contains(it.key())) {
                throw ConfigError("unknown key '" + name_ + "." + it.key() + "'");
            }
        }
    }

private:
    std::string name_;
    json obj_ = json::object();
    std::set<std::string> seen_;
    std::vector<std::pair<std::string, std::string>>* manifest_;
};

std::pair<double, double> get_range(Section& s, const std::string& key, double lo, double hi) {
    if (s.has(key)) {
        const auto& v = s.raw(key);
        if (!v.is_array() || v.size() != 2) {
            throw ConfigError("'" + key + "' must be a [lo, hi] pair");
        }
        lo = v[0].get<double>();
        hi = v[1].get<double>();
    }
    s.record(key, json::array({lo, hi}));
    return {lo, hi};
}

KernelPrecision precision_from_string(const std::string& s) {
    if (s == "f32") return KernelPrecision::Single;
    if (s == "f64") return KernelPrecision::Double;
    throw ConfigError("eig.precision must be 'f32' or 'f64'");
}

UtilityKind utility_from_string(const std::string& s) {
    if (s == "mutual_info") return UtilityKind::MutualInformation;
    if (s == "cross_entropy") return UtilityKind::CrossEntropy;
    throw ConfigError("eig.utility must be 'mutual_info' or 'cross_entropy'");
}

AppConfig parse_json(const json& root) {
    if (!root.is_object()) throw ConfigError("config root must be an object");
    static const std::set<std::string> known_sections = {
        "model", "grid", "smc", "eig", "run", "truth", "sweep", "campaign", "throughput"};
    for (auto it = root.begin(); it != root.end(); ++it) {
        if (!known_sections.contains(it.key())) {
            throw ConfigError("unknown section '" + it.key() + "'");
        }
    }

    AppConfig app;
    auto* manifest = &app.manifest;

    Section model(root, "model", manifest);
    const std::string kind = model.get<std::string>("kind", "nuclear");
    const bool nuclear = kind == "nuclear";
    if (!nuclear && kind != "ac") throw ConfigError("model.kind must be 'nuclear' or 'ac'");

    if (nuclear) {
        NuclearModelConfig m;
        m.n_c = model.get<int>("n_c", 2);
        if (m.n_c < 1) throw ConfigError("model.n_c must be >= 1");
        m.omega_larmor = units::rad_per_us_from_hz(model.get<double>("omega_larmor_hz", 429.4e3));
        m.t2 = units::us_from_s(model.get<double>("t2_s", 3e-3));
        if (!(m.omega_larmor > 0.0)) throw ConfigError("model.omega_larmor_hz must be positive");
        if (!(m.t2 > 0.0)) throw ConfigError("model.t2_s must be positive");
        m.fidelity.p0 = model.get<double>("p0", 1.0);
        m.fidelity.p1 = model.get<double>("p1", 1.0);
        auto [olo, ohi] = get_range(model, "prior_omega_h_hz", 6e3, 265e3);
        m.omega_h_lo = units::rad_per_us_from_hz(olo);
        m.omega_h_hi = units::rad_per_us_from_hz(ohi);
        auto [tlo, thi] = get_range(model, "prior_theta_rad", 0.0, units::kPi);
        m.theta_lo = tlo;
        m.theta_hi = thi;
        app.model = m;
    } else {
        AcModelConfig m;
        m.gamma = units::rad_per_us_from_hz(model.get<double>("gamma_hz_per_mt", 28.03e6));
        m.t2 = units::us_from_s(model.get<double>("t2_s", 170e-6));
        if (!(m.gamma > 0.0)) throw ConfigError("model.gamma_hz_per_mt must be positive");
        if (!(m.t2 > 0.0)) throw ConfigError("model.t2_s must be positive");
        m.fidelity.p0 = model.get<double>("p0", 1.0);
        m.fidelity.p1 = model.get<double>("p1", 1.0);
        m.bessel_order = model.get<int>("bessel_order", 6);
        if (m.bessel_order < 2 || m.bessel_order % 2 != 0) {
            throw ConfigError("model.bessel_order must be a positive even order");
        }
        auto [olo, ohi] = get_range(model, "prior_omega_hz", 79.6e3, 1.35e6);
        m.omega_lo = units::rad_per_us_from_hz(olo);
        m.omega_hi = units::rad_per_us_from_hz(ohi);
        auto [rlo, rhi] = get_range(model, "prior_ratio", 0.013, 0.177);
        m.ratio_lo = rlo;
        m.ratio_hi = rhi;
        app.model = m;
    }
    if (!(std::visit([](const auto& m) { return m.fidelity.p0 + m.fidelity.p1; }, app.model) >
          1.0)) {
        throw ConfigError("readout fidelities must satisfy p0 + p1 > 1");
    }
    model.finish();

    Section grid(root, "grid", manifest);
    const double tau_lo = grid.get<double>("tau_lo_s", nuclear ? 1e-6 : 0.51e-6);
    const double tau_hi = grid.get<double>("tau_hi_s", nuclear ? 10e-6 : 7e-6);
    const double tau_step = grid.get<double>("tau_step_s", 1e-8);
    app.run.grid = make_control_grid(units::us_from_s(tau_lo), units::us_from_s(tau_hi),
                                     units::us_from_s(tau_step));
    grid.finish();

    Section smc(root, "smc", manifest);
    app.run.n_particles = smc.get<long>("n_particles", 3200);
    app.run.resampler.a = smc.get<double>("liu_west_a", 0.98);
    app.run.resampler.ess_threshold_fraction = smc.get<double>("ess_threshold_fraction", 0.5);
    app.run.resampler.remap = smc.get<bool>("remap", true);
    if (!(app.run.resampler.a > 0.0 && app.run.resampler.a <= 1.0)) {
        throw ConfigError("smc.liu_west_a must be in (0, 1]");
    }
    if (!(app.run.resampler.ess_threshold_fraction > 0.0 &&
          app.run.resampler.ess_threshold_fraction < 1.0)) {
        throw ConfigError("smc.ess_threshold_fraction must be in (0, 1)");
    }
    smc.finish();

    Section eig(root, "eig", manifest);
    app.run.policy.n_batch = eig.get<int>("n_batch", nuclear ? 15 : 30);
    app.run.policy.p_exponent = eig.get<double>("p_exponent", 6.0);
    const std::string utility = eig.get<std::string>("utility", "mutual_info");
    app.run.eig.utility = utility_from_string(utility);
    // The cross-entropy utility never reaches zero, so its batch weighting
    // subtracts the grid minimum by default; mutual information has a
    // natural zero already.
    app.run.policy.floor_subtract = eig.get<bool>(
        "floor_subtract", app.run.eig.utility == UtilityKind::CrossEntropy);
    app.run.eig.precision = precision_from_string(eig.get<std::string>("precision", "f32"));
    app.run.eig.threads = eig.get<int>("threads", 0);
    if (app.run.policy.n_batch < 1) throw ConfigError("eig.n_batch must be >= 1");
    if (app.run.policy.p_exponent < 0.0) throw ConfigError("eig.p_exponent must be >= 0");
    eig.finish();

    Section run(root, "run", manifest);
    app.run.mode = run_mode_from_string(run.get<std::string>("mode", "sync"));
    app.run.n_shot_max = run.get<long>("n_shot_max", 1050);
    app.run.delay_shots = run.get<int>("delay_shots", app.run.policy.n_batch);
    app.run.stop_rel_uncertainty = run.get<double>("stop_rel_uncertainty", 0.0);
    app.run.overhead_us = units::us_from_s(run.get<double>("overhead_s", 0.0));
    app.run.eig_latency_us = units::us_from_s(run.get<double>("eig_latency_s", 0.0));
    app.run.checkpoints = run.get<std::vector<long>>("checkpoints", {});
    app.run.record_shots = run.get<bool>("record_shots", true);
    app.run.seed = run.get<std::uint64_t>("seed", 1);
    run.finish();

    if (root.contains("truth")) {
        Section truth(root, "truth", manifest);
        app.has_truth = true;
        if (nuclear) {
            NuclearSpinParams p;
            const auto& m = std::get<NuclearModelConfig>(app.model);
            if (!truth.has("omega_h_hz")) throw ConfigError("truth.omega_h_hz is required");
            for (const auto& v : truth.raw("omega_h_hz")) {
                p.omega_h.push_back(units::rad_per_us_from_hz(v.get<double>()));
            }
            truth.record("omega_h_hz", truth.raw("omega_h_hz"));
            if (truth.has("theta_deg")) {
                for (const auto& v : truth.raw("theta_deg")) {
                    p.theta.push_back(units::rad_from_deg(v.get<double>()));
                }
                truth.record("theta_deg", truth.raw("theta_deg"));
            } else if (truth.has("theta_rad")) {
                for (const auto& v : truth.raw("theta_rad")) p.theta.push_back(v.get<double>());
                truth.record("theta_rad", truth.raw("theta_rad"));
            } else {
                throw ConfigError("truth needs theta_deg or theta_rad");
            }
            if (static_cast<int>(p.omega_h.size()) != m.n_c ||
                p.theta.size() != p.omega_h.size()) {
                throw ConfigError("truth parameter counts must match model.n_c");
            }
            app.truth = make_truth(std::move(p));
        } else {
            AcFieldParams p{};
            p.omega = units::rad_per_us_from_hz(truth.get<double>("omega_hz", 500e3));
            p.b_field = truth.get<double>("b_mt", 0.1);
            app.truth = make_truth(p);
        }
        truth.finish();
    }

    if (root.contains("sweep")) {
        Section sweep(root, "sweep", manifest);
        app.has_sweep = true;
        SweepSpec& s = app.sweep;
        s.nuclear = nuclear;
        if (nuclear) {
            const auto& m = std::get<NuclearModelConfig>(app.model);
            s.n_c = m.n_c;
            s.omega_lo = units::rad_per_us_from_hz(sweep.get<double>("omega_lo_hz", 19.0e3));
            s.omega_hi = units::rad_per_us_from_hz(sweep.get<double>("omega_hi_hz", 83.4e3));
            s.points_per_spin = sweep.get<int>("points_per_spin", m.n_c == 3 ? 20 : 30);
            s.unordered_combos = sweep.get<bool>("unordered", m.n_c == 3);
        } else {
            const auto& m = std::get<AcModelConfig>(app.model);
            s.gamma = m.gamma;
            s.ac_omega_lo = units::rad_per_us_from_hz(sweep.get<double>("omega_lo_hz", 111e3));
            s.ac_omega_hi = units::rad_per_us_from_hz(sweep.get<double>("omega_hi_hz", 1.27e6));
            s.omega_points = sweep.get<int>("omega_points", 20);
            s.ratio_lo = sweep.get<double>("ratio_lo", 0.031);
            s.ratio_hi = sweep.get<double>("ratio_hi", 0.169);
            s.ratio_points = sweep.get<int>("ratio_points", 20);
        }
        s.subset = sweep.get<long>("subset", 0);
        s.n_bench_expected = sweep.get<long>("expected", 0);
        sweep.finish();
    }

    {
        Section campaign(root, "campaign", manifest);
        const auto mode_names =
            campaign.get<std::vector<std::string>>("modes", {"sync", "nonadaptive"});
        for (const auto& m : mode_names) app.campaign_modes.push_back(run_mode_from_string(m));
        app.workers = campaign.get<int>("workers", 0);
        campaign.finish();
    }

    {
        Section thr(root, "throughput", manifest);
        app.throughput_seconds = thr.get<double>("min_seconds", 2.0);
        thr.finish();
    }

    return app;
}

}  // namespace

AppConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_json(root);
}

AppConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

AppConfig default_config(bool nuclear) {
    if (nuclear) {
        return parse_config(R"({"model": {"kind": "nuclear"},
                                "truth": {"omega_h_hz": [47000, 83800], "theta_deg": [30, 21]}})");
    }
    return parse_config(R"({"model": {"kind": "ac"},
                            "eig": {"n_batch": 30},
                            "run": {"n_shot_max": 1500},
                            "truth": {"omega_hz": 500000, "b_mt": 0.01}})");
}

}  // namespace nvsense
