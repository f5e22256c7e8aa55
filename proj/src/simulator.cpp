#include "nvsense/simulator.hpp"

#include <stdexcept>

namespace nvsense {

GroundTruth make_truth(NuclearSpinParams params, std::uint64_t seed) {
    return GroundTruth{std::move(params), seed};
}

GroundTruth make_truth(AcFieldParams params, std::uint64_t seed) {
    return GroundTruth{params, seed};
}

ShotSimulator::ShotSimulator(const SensingModel& model, const GroundTruth& truth,
                             const ControlGrid& grid, double overhead_us, std::uint64_t shot_seed)
    : model_(model), truth_(truth), grid_(grid), overhead_us_(overhead_us), rng_(shot_seed) {
    const bool nuclear_truth = std::holds_alternative<NuclearSpinParams>(truth_.params);
    if (nuclear_truth != is_nuclear(model)) {
        throw std::invalid_argument("ShotSimulator: truth kind does not match the model");
    }
}

ShotRecord ShotSimulator::run_shot(double tau, int batch_id) {
    grid_index(grid_, tau);  // contract: tau must come from the grid

    ShotRecord rec;
    rec.shot_index = ++count_;
    rec.batch_id = batch_id;
    rec.tau = tau;
    if (const auto* p = std::get_if<NuclearSpinParams>(&truth_.params)) {
        rec.outcome = simulate_shot_nuclear(*p, std::get<NuclearModelConfig>(model_), tau, rng_);
        rec.probe_time = 64.0 * tau;
    } else {
        rec.outcome = simulate_shot_ac(std::get<AcFieldParams>(truth_.params),
                                       std::get<AcModelConfig>(model_), tau, rng_);
        rec.probe_time = 16.0 * tau;
    }
    rec.wall_time = rec.probe_time + overhead_us_;
    total_probe_ += rec.probe_time;
    return rec;
}

ShotHistogram shot_histogram(const std::vector<ShotRecord>& records, const ControlGrid& grid) {
    if (records.empty()) throw std::invalid_argument("shot_histogram: no records");
    std::vector<long> counts(grid.taus.size(), 0);
    std::vector<double> sums(grid.taus.size(), 0.0);
    for (const auto& rec : records) {
        const auto j = static_cast<std::size_t>(grid_index(grid, rec.tau));
        counts[j] += 1;
        sums[j] += static_cast<double>(rec.outcome);
    }
    ShotHistogram h;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        if (counts[j] == 0) continue;
        h.taus.push_back(grid.taus[j]);
        h.counts.push_back(counts[j]);
        h.mean_outcome.push_back(sums[j] / static_cast<double>(counts[j]));
    }
    return h;
}

}  // namespace nvsense
