#include "nvsense/sweep.hpp"

#include <algorithm>
#include <stdexcept>

#include "nvsense/units.hpp"

namespace nvsense {

namespace {

std::vector<double> linear_grid(double lo, double hi, int points) {
    if (points < 1 || !(hi >= lo)) throw std::invalid_argument("sweep: bad grid range");
    std::vector<double> g(static_cast<std::size_t>(points));
    if (points == 1) {
        g[0] = lo;
        return g;
    }
    for (int i = 0; i < points; ++i) {
        g[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) /
                                                  static_cast<double>(points - 1);
    }
    return g;
}

// All index tuples, either the full ordered cross or strictly increasing.
void enumerate_tuples(int points, int arity, bool unordered,
                      std::vector<std::vector<int>>& out) {
    std::vector<int> idx(static_cast<std::size_t>(arity), 0);
    if (unordered) {
        for (int i = 0; i < arity; ++i) idx[static_cast<std::size_t>(i)] = i;
        if (arity > points) throw std::invalid_argument("sweep: arity exceeds grid points");
    }
    while (true) {
        out.push_back(idx);
        int pos = arity - 1;
        while (pos >= 0) {
            const int limit = unordered ? points - (arity - pos) : points - 1;
            if (idx[static_cast<std::size_t>(pos)] < limit) {
                ++idx[static_cast<std::size_t>(pos)];
                if (unordered) {
                    for (int p = pos + 1; p < arity; ++p) {
                        idx[static_cast<std::size_t>(p)] = idx[static_cast<std::size_t>(p - 1)] + 1;
                    }
                } else {
                    for (int p = pos + 1; p < arity; ++p) idx[static_cast<std::size_t>(p)] = 0;
                }
                break;
            }
            --pos;
        }
        if (pos < 0) break;
    }
}

}  // namespace

std::vector<GroundTruth> generate_sweep(const SweepSpec& spec, std::uint64_t seed) {
    std::vector<GroundTruth> truths;

    if (spec.nuclear) {
        const auto omegas = linear_grid(spec.omega_lo, spec.omega_hi, spec.points_per_spin);
        std::vector<std::vector<int>> tuples;
        enumerate_tuples(spec.points_per_spin, spec.n_c, spec.unordered_combos, tuples);
        truths.reserve(tuples.size());
        for (std::size_t i = 0; i < tuples.size(); ++i) {
            const std::uint64_t truth_seed = derive_seed(seed, rng_stream::kSweep, i);
            Rng rng(truth_seed);
            NuclearSpinParams p;
            for (const int j : tuples[i]) {
                p.omega_h.push_back(omegas[static_cast<std::size_t>(j)]);
            }
            for (int q = 0; q < spec.n_c; ++q) {
                double theta = rng.uniform(0.0, units::kTwoPi);
                if (theta > units::kPi) theta = units::kTwoPi - theta;  // fold, likelihood-invariant
                p.theta.push_back(theta);
            }
            truths.push_back(make_truth(std::move(p), truth_seed));
        }
    } else {
        if (!(spec.gamma > 0.0)) throw std::invalid_argument("sweep: AC sweep needs gamma");
        const auto omegas = linear_grid(spec.ac_omega_lo, spec.ac_omega_hi, spec.omega_points);
        const auto ratios = linear_grid(spec.ratio_lo, spec.ratio_hi, spec.ratio_points);
        truths.reserve(omegas.size() * ratios.size());
        std::size_t i = 0;
        for (const double omega : omegas) {
            for (const double ratio : ratios) {
                const std::uint64_t truth_seed = derive_seed(seed, rng_stream::kSweep, i++);
                truths.push_back(
                    make_truth(AcFieldParams{omega, ratio * omega / spec.gamma}, truth_seed));
            }
        }
    }

    if (spec.subset > 0 && spec.subset < static_cast<long>(truths.size())) {
        // Seeded Fisher-Yates prefix, then restored to enumeration order.
        std::vector<std::size_t> order(truths.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng rng(derive_seed(seed, rng_stream::kSweep, 0x5e1ec7u));
        for (std::size_t i = 0; i < order.size() - 1; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.integer(order.size() - i));
            std::swap(order[i], order[j]);
        }
        order.resize(static_cast<std::size_t>(spec.subset));
        std::sort(order.begin(), order.end());
        std::vector<GroundTruth> picked;
        picked.reserve(order.size());
        for (const std::size_t i : order) picked.push_back(std::move(truths[i]));
        truths = std::move(picked);
    }

    if (spec.n_bench_expected > 0 &&
        static_cast<long>(truths.size()) != spec.n_bench_expected) {
        throw std::invalid_argument("generate_sweep: combination count " +
                                    std::to_string(truths.size()) + " != expected " +
                                    std::to_string(spec.n_bench_expected));
    }
    return truths;
}

}  // namespace nvsense
