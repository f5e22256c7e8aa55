#include "nvsense/models.hpp"

#include <cmath>
#include <stdexcept>

#include "nvsense/detail/likelihood_math.hpp"

namespace nvsense {

double apply_readout_noise(double p_ideal, const ReadoutFidelity& f) {
    return (f.p0 + f.p1 - 1.0) * p_ideal + (1.0 - f.p1);
}

double likelihood_nuclear(const NuclearSpinParams& params, const NuclearModelConfig& cfg,
                          double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("likelihood_nuclear: tau must be positive");
    const double cos_l = std::cos(cfg.omega_larmor * tau);
    const double sin_l = std::sin(cfg.omega_larmor * tau);
    const double sin2_l_half = (1.0 - cos_l) * 0.5;
    double m = 1.0;
    for (std::size_t q = 0; q < params.omega_h.size(); ++q) {
        const auto s = detail::make_spin_term(params.omega_h[q], params.theta[q], cfg.omega_larmor);
        const double cw = std::cos(s.omega_eff * tau);
        const double sw = std::sin(s.omega_eff * tau);
        m *= detail::nuclear_spin_factor(s, cw, sw, cos_l, sin_l, sin2_l_half);
    }
    const double decay = std::exp(-64.0 * tau / cfg.t2);
    const double p0 = cfg.fidelity.p0;
    const double p1 = cfg.fidelity.p1;
    const double pr = (p0 - 2.0 * p1 + 2.0) / 3.0 + 0.5 * (p0 + p1 - 1.0) * (m + 1.0 / 3.0) * decay;
    return detail::clamp_probability(pr, kLikelihoodEps);
}

double ac_signal_argument(double omega, double ratio, double tau) {
    const double x = 0.5 * omega * tau;
    const double s = std::sin(x);
    return 16.0 * ratio * s * s * s * detail::ac_cosine_comb(std::cos(x));
}

double likelihood_ac(const AcFieldParams& params, const AcModelConfig& cfg, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("likelihood_ac: tau must be positive");
    const double ratio = params.b_field * cfg.gamma / params.omega;
    const double a = ac_signal_argument(params.omega, ratio, tau);
    const double j0t = detail::bessel_j0_truncated(a, cfg.bessel_order);
    const double decay = std::exp(-16.0 * tau / cfg.t2);
    const double p0 = cfg.fidelity.p0;
    const double p1 = cfg.fidelity.p1;
    const double pr = 0.5 * (p0 - p1 + 1.0) + 0.5 * (p0 + p1 - 1.0) * j0t * decay;
    return detail::clamp_probability(pr, kLikelihoodEps);
}

int simulate_shot_nuclear(const NuclearSpinParams& params, const NuclearModelConfig& cfg,
                          double tau, Rng& rng) {
    const double pr0 = likelihood_nuclear(params, cfg, tau);
    return rng.bernoulli(pr0) ? 0 : 1;
}

int simulate_shot_ac(const AcFieldParams& params, const AcModelConfig& cfg, double tau, Rng& rng) {
    // Exact single-shot physics: fresh uniform phase, untruncated cosine. The
    // inference likelihood above matches this only in the many-shot average.
    const double ratio = params.b_field * cfg.gamma / params.omega;
    const double a = ac_signal_argument(params.omega, ratio, tau);
    const double phase = rng.uniform(0.0, units::kTwoPi);
    const double decay = std::exp(-16.0 * tau / cfg.t2);
    const double p_ideal = 0.5 + 0.5 * std::cos(a * std::cos(8.0 * params.omega * tau + phase)) * decay;
    const double pr0 = apply_readout_noise(p_ideal, cfg.fidelity);
    return rng.bernoulli(pr0) ? 0 : 1;
}

int model_dim(const SensingModel& model) {
    return std::visit(
        [](const auto& cfg) -> int {
            if constexpr (std::is_same_v<std::decay_t<decltype(cfg)>, NuclearModelConfig>) {
                return 2 * cfg.n_c;
            } else {
                return 2;
            }
        },
        model);
}

int model_n_c(const SensingModel& model) {
    if (const auto* n = std::get_if<NuclearModelConfig>(&model)) return n->n_c;
    return 0;
}

bool is_nuclear(const SensingModel& model) {
    return std::holds_alternative<NuclearModelConfig>(model);
}

BoundsMatrix model_bounds(const SensingModel& model) {
    if (const auto* n = std::get_if<NuclearModelConfig>(&model)) {
        BoundsMatrix b(2 * n->n_c, 2);
        for (int q = 0; q < n->n_c; ++q) {
            b(q, 0) = n->omega_h_lo;
            b(q, 1) = n->omega_h_hi;
            b(n->n_c + q, 0) = n->theta_lo;
            b(n->n_c + q, 1) = n->theta_hi;
        }
        return b;
    }
    const auto& a = std::get<AcModelConfig>(model);
    BoundsMatrix b(2, 2);
    b(0, 0) = a.omega_lo;
    b(0, 1) = a.omega_hi;
    b(1, 0) = a.ratio_lo;
    b(1, 1) = a.ratio_hi;
    return b;
}

double likelihood0(const SensingModel& model, const double* loc, double tau) {
    if (const auto* n = std::get_if<NuclearModelConfig>(&model)) {
        NuclearSpinParams p;
        p.omega_h.assign(loc, loc + n->n_c);
        p.theta.assign(loc + n->n_c, loc + 2 * n->n_c);
        return likelihood_nuclear(p, *n, tau);
    }
    const auto& a = std::get<AcModelConfig>(model);
    AcFieldParams p{loc[0], loc[1] * loc[0] / a.gamma};
    return likelihood_ac(p, a, tau);
}

std::vector<std::string> param_names(const SensingModel& model) {
    std::vector<std::string> names;
    if (const auto* n = std::get_if<NuclearModelConfig>(&model)) {
        for (int q = 1; q <= n->n_c; ++q) names.push_back("omega_h" + std::to_string(q));
        for (int q = 1; q <= n->n_c; ++q) names.push_back("theta" + std::to_string(q));
    } else {
        names = {"omega", "B"};
    }
    return names;
}

ParticleCloud display_cloud(const SensingModel& model, const ParticleCloud& cloud) {
    ParticleCloud out = cloud;
    if (const auto* n = std::get_if<NuclearModelConfig>(&model)) {
        for (int q = 0; q < n->n_c; ++q) {
            out.locations.col(q) *= units::khz_from_rad_per_us(1.0);
            out.bounds.row(q) *= units::khz_from_rad_per_us(1.0);
        }
        return out;
    }
    const auto& a = std::get<AcModelConfig>(model);
    // (omega, ratio) -> (omega in kHz, B in mT)
    for (Eigen::Index k = 0; k < out.n_particles(); ++k) {
        const double omega = cloud.locations(k, 0);
        const double ratio = cloud.locations(k, 1);
        out.locations(k, 0) = units::khz_from_rad_per_us(omega);
        out.locations(k, 1) = ratio * omega / a.gamma;
    }
    out.bounds(0, 0) = units::khz_from_rad_per_us(a.omega_lo);
    out.bounds(0, 1) = units::khz_from_rad_per_us(a.omega_hi);
    out.bounds(1, 0) = a.ratio_lo * a.omega_lo / a.gamma;
    out.bounds(1, 1) = a.ratio_hi * a.omega_hi / a.gamma;
    return out;
}

std::vector<double> display_truth(const SensingModel& model, const NuclearSpinParams& p) {
    const auto* n = std::get_if<NuclearModelConfig>(&model);
    if (n == nullptr) throw std::invalid_argument("display_truth: model/params mismatch");
    // Canonical label order: spin blocks sorted by ascending omega_h, theta
    // folded into [0, pi], matching remap_labels.
    std::vector<std::pair<double, double>> blocks;
    for (std::size_t q = 0; q < p.omega_h.size(); ++q) {
        double theta = p.theta[q];
        if (theta > units::kPi) theta = units::kTwoPi - theta;
        blocks.emplace_back(p.omega_h[q], theta);
    }
    std::sort(blocks.begin(), blocks.end());
    std::vector<double> out;
    for (const auto& b : blocks) out.push_back(units::khz_from_rad_per_us(b.first));
    for (const auto& b : blocks) out.push_back(b.second);
    return out;
}

std::vector<double> display_truth(const SensingModel& model, const AcFieldParams& p) {
    if (!std::holds_alternative<AcModelConfig>(model)) {
        throw std::invalid_argument("display_truth: model/params mismatch");
    }
    return {units::khz_from_rad_per_us(p.omega), p.b_field};
}

}  // namespace nvsense
