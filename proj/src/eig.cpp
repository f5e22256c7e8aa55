#include "nvsense/eig.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "nvsense/detail/eig_reduce.hpp"

namespace nvsense {

ControlGrid make_control_grid(double lo, double hi, double step) {
    if (!(lo > 0.0) || !(step > 0.0) || !(hi >= lo)) {
        throw std::invalid_argument("make_control_grid: need 0 < lo <= hi and step > 0");
    }
    const auto n = static_cast<Eigen::Index>(std::floor((hi - lo) / step + 0.5)) + 1;
    ControlGrid grid;
    grid.step = step;
    grid.taus.resize(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        grid.taus[static_cast<std::size_t>(j)] = lo + static_cast<double>(j) * step;
    }
    return grid;
}

Eigen::Index grid_index(const ControlGrid& grid, double tau) {
    auto it = std::lower_bound(grid.taus.begin(), grid.taus.end(), tau - 1e-9);
    if (it != grid.taus.end() && std::abs(*it - tau) < 1e-9) {
        return static_cast<Eigen::Index>(it - grid.taus.begin());
    }
    throw std::invalid_argument("grid_index: tau is not a grid point");
}

double predicted_probability(const ParticleCloud& cloud, const SensingModel& model, double tau) {
    double p0_bar = 0.0;
    for (Eigen::Index k = 0; k < cloud.n_particles(); ++k) {
        p0_bar += cloud.weights[k] * likelihood0(model, cloud.locations.row(k).data(), tau);
    }
    return 1.0 - p0_bar;
}

namespace {

double utility_from_sums(const detail::EigSums& s, UtilityKind kind) {
    if (kind == UtilityKind::CrossEntropy) {
        return -(1.0 - s.p_bar) * s.log_1mp - s.p_bar * s.log_p;
    }
    const double p = std::clamp(s.p_bar, kLikelihoodEps, 1.0 - kLikelihoodEps);
    const double h_pred = -p * std::log(p) - (1.0 - p) * std::log1p(-p);
    return h_pred + s.p_log_p + s.q_log_q;
}

}  // namespace

EigTable eig_table(const ParticleCloud& cloud, const SensingModel& model, const ControlGrid& grid,
                   const EigOptions& options, long generated_from_shot) {
    const Eigen::Index n_p = cloud.n_particles();
    const auto n_tau = static_cast<Eigen::Index>(grid.taus.size());
    if (n_tau == 0) throw std::invalid_argument("eig_table: empty control grid");

    std::vector<detail::EigSums> sums(static_cast<std::size_t>(n_tau));
    const bool mi = options.utility == UtilityKind::MutualInformation;
    if (options.precision == KernelPrecision::Single) {
        std::vector<float> buf(static_cast<std::size_t>(n_p * n_tau));
        batch_likelihood0_grid<float>(model, cloud.locations.data(), n_p, grid.taus.data(), n_tau,
                                      buf.data(), options.threads);
        detail::eig_reduce_grid<float>(buf.data(), cloud.weights.data(), n_p, n_tau, mi,
                                       options.threads, sums.data());
    } else {
        std::vector<double> buf(static_cast<std::size_t>(n_p * n_tau));
        batch_likelihood0_grid<double>(model, cloud.locations.data(), n_p, grid.taus.data(), n_tau,
                                       buf.data(), options.threads);
        detail::eig_reduce_grid<double>(buf.data(), cloud.weights.data(), n_p, n_tau, mi,
                                        options.threads, sums.data());
    }

    EigTable table;
    table.generated_from_shot = generated_from_shot;
    table.values.resize(static_cast<std::size_t>(n_tau));
    Eigen::Index best = 0;
    for (Eigen::Index j = 0; j < n_tau; ++j) {
        const double e = utility_from_sums(sums[static_cast<std::size_t>(j)], options.utility);
        table.values[static_cast<std::size_t>(j)] = e;
        if (e > table.values[static_cast<std::size_t>(best)]) best = j;
    }
    table.argmax_index = best;
    return table;
}

double select_optimal(const EigTable& table, const ControlGrid& grid) {
    if (table.values.empty() || table.values.size() != grid.taus.size()) {
        throw std::invalid_argument("select_optimal: table/grid mismatch");
    }
    return grid.taus[static_cast<std::size_t>(table.argmax_index)];
}

std::vector<double> sample_batch(const EigTable& table, const ControlGrid& grid,
                                 const BatchPolicy& policy, Rng& rng) {
    const std::size_t n = table.values.size();
    if (n != grid.taus.size() || n == 0) {
        throw std::invalid_argument("sample_batch: table/grid mismatch");
    }
    std::vector<double> cdf(n);
    const double floor =
        policy.floor_subtract ? *std::min_element(table.values.begin(), table.values.end()) : 0.0;
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double base = table.values[j] - floor;
        total += base > 0.0 ? std::pow(base, policy.p_exponent) : 0.0;
        cdf[j] = total;
    }

    std::vector<double> batch(static_cast<std::size_t>(policy.n_batch));
    if (!(total > 0.0) || !std::isfinite(total)) {
        for (auto& tau : batch) tau = grid.taus[rng.integer(n)];
        return batch;
    }
    for (auto& tau : batch) {
        const double u = rng.uniform() * total;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
        if (idx >= n) idx = n - 1;
        tau = grid.taus[idx];
    }
    return batch;
}

ThroughputReport throughput_bench(const SensingModel& model, Eigen::Index n_particles,
                                  const ControlGrid& grid, double min_seconds,
                                  const EigOptions& options, int n_batch, std::uint64_t seed) {
    Rng rng(derive_seed(seed, rng_stream::kInit));
    const BoundsMatrix bounds = model_bounds(model);
    ParticleCloud cloud;  // built directly so n_particles = 1 is allowed here
    cloud.bounds = bounds;
    cloud.locations.resize(n_particles, bounds.rows());
    for (Eigen::Index k = 0; k < n_particles; ++k) {
        for (Eigen::Index j = 0; j < bounds.rows(); ++j) {
            cloud.locations(k, j) = rng.uniform(bounds(j, 0), bounds(j, 1));
        }
    }
    cloud.weights = Eigen::VectorXd::Constant(n_particles, 1.0 / static_cast<double>(n_particles));

    using clock = std::chrono::steady_clock;
    eig_table(cloud, model, grid, options);  // warm-up

    const auto t0 = clock::now();
    long calls = 0;
    double elapsed = 0.0;
    do {
        eig_table(cloud, model, grid, options);
        ++calls;
        elapsed = std::chrono::duration<double>(clock::now() - t0).count();
    } while (elapsed < min_seconds || calls < 3);

    ThroughputReport r;
    r.n_particles = n_particles;
    r.grid_size = static_cast<Eigen::Index>(grid.taus.size());
    r.precision = options.precision;
    r.calls = calls;
    r.seconds = elapsed;
    const double evals = static_cast<double>(calls) * static_cast<double>(n_particles) *
                         static_cast<double>(r.grid_size);
    r.evals_per_second = evals / elapsed;
    r.latency_us = elapsed / static_cast<double>(calls) * 1e6;
    r.evals_per_measurement = static_cast<double>(n_particles) * static_cast<double>(r.grid_size) /
                              static_cast<double>(n_batch);
    r.max_shot_rate_hz = r.evals_per_second / r.evals_per_measurement;
    return r;
}

}  // namespace nvsense
