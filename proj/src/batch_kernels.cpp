// Data-parallel likelihood grid kernels. This translation unit is compiled
// with aggressive math flags (see CMakeLists); everything here is branch-light
// polynomial work on clamped, finite values.

#include <cmath>
#include <vector>

#include "nvsense/detail/eig_reduce.hpp"
#include "nvsense/detail/likelihood_math.hpp"
#include "nvsense/models.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nvsense {

namespace {

constexpr int kMaxSpins = 8;

int effective_threads(int requested) {
#ifdef _OPENMP
    if (requested > 0) return requested;
    return omp_get_max_threads();
#else
    (void)requested;
    return 1;
#endif
}

bool uniform_step(const double* taus, Eigen::Index n_tau, double* step_out) {
    if (n_tau < 2) {
        *step_out = 0.0;
        return true;
    }
    const double step = taus[1] - taus[0];
    for (Eigen::Index j = 1; j + 1 < n_tau; ++j) {
        if (std::abs(taus[j + 1] - taus[j] - step) > 1e-9) return false;
    }
    *step_out = step;
    return true;
}

template <typename T>
void nuclear_grid(const NuclearModelConfig& cfg, const double* locs, Eigen::Index n_p,
                  const double* taus, Eigen::Index n_tau, T* out, int threads) {
    const int nc = cfg.n_c;
    const double p0 = cfg.fidelity.p0;
    const double p1 = cfg.fidelity.p1;
    const T offset = T((p0 - 2.0 * p1 + 2.0) / 3.0);
    const T scale = T(0.5 * (p0 + p1 - 1.0));
    const T eps = T(kLikelihoodEps);
    const T third = T(1.0 / 3.0);

    // Per-tau tables shared by all particles.
    std::vector<T> cos_l(n_tau), sin_l(n_tau), sin2_lh(n_tau), decay(n_tau);
    for (Eigen::Index j = 0; j < n_tau; ++j) {
        const double cl = std::cos(cfg.omega_larmor * taus[j]);
        cos_l[j] = T(cl);
        sin_l[j] = T(std::sin(cfg.omega_larmor * taus[j]));
        sin2_lh[j] = T((1.0 - cl) * 0.5);
        decay[j] = T(std::exp(-64.0 * taus[j] / cfg.t2));
    }

    double step = 0.0;
    const bool uniform = uniform_step(taus, n_tau, &step);
    const int nthreads = effective_threads(threads);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
    for (Eigen::Index k = 0; k < n_p; ++k) {
        detail::SpinTerm term[kMaxSpins];
        // Phase state per spin; kept in double so the recurrence drift over a
        // full grid stays far below the output precision.
        double cw[kMaxSpins], sw[kMaxSpins], cd[kMaxSpins], sd[kMaxSpins];
        const double* loc = locs + k * 2 * nc;
        for (int q = 0; q < nc; ++q) {
            term[q] = detail::make_spin_term(loc[q], loc[nc + q], cfg.omega_larmor);
            cw[q] = std::cos(term[q].omega_eff * taus[0]);
            sw[q] = std::sin(term[q].omega_eff * taus[0]);
            cd[q] = std::cos(term[q].omega_eff * step);
            sd[q] = std::sin(term[q].omega_eff * step);
        }
        T* row = out + k * n_tau;
        if (uniform) {
            for (Eigen::Index j = 0; j < n_tau; ++j) {
                T m = T(1);
                for (int q = 0; q < nc; ++q) {
                    m *= detail::nuclear_spin_factor(term[q], T(cw[q]), T(sw[q]), cos_l[j],
                                                     sin_l[j], sin2_lh[j]);
                    const double c_next = cw[q] * cd[q] - sw[q] * sd[q];
                    sw[q] = sw[q] * cd[q] + cw[q] * sd[q];
                    cw[q] = c_next;
                }
                row[j] = detail::clamp_probability(offset + scale * (m + third) * decay[j], eps);
            }
        } else {
            for (Eigen::Index j = 0; j < n_tau; ++j) {
                T m = T(1);
                for (int q = 0; q < nc; ++q) {
                    const double ang = term[q].omega_eff * taus[j];
                    m *= detail::nuclear_spin_factor(term[q], T(std::cos(ang)), T(std::sin(ang)),
                                                     cos_l[j], sin_l[j], sin2_lh[j]);
                }
                row[j] = detail::clamp_probability(offset + scale * (m + third) * decay[j], eps);
            }
        }
    }
}

template <typename T>
void ac_grid(const AcModelConfig& cfg, const double* locs, Eigen::Index n_p, const double* taus,
             Eigen::Index n_tau, T* out, int threads) {
    const double p0 = cfg.fidelity.p0;
    const double p1 = cfg.fidelity.p1;
    const T offset = T(0.5 * (p0 - p1 + 1.0));
    const T scale = T(0.5 * (p0 + p1 - 1.0));
    const T eps = T(kLikelihoodEps);
    const int order = cfg.bessel_order;

    std::vector<T> decay(n_tau);
    for (Eigen::Index j = 0; j < n_tau; ++j) {
        decay[j] = T(std::exp(-16.0 * taus[j] / cfg.t2));
    }

    double step = 0.0;
    const bool uniform = uniform_step(taus, n_tau, &step);
    const int nthreads = effective_threads(threads);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
    for (Eigen::Index k = 0; k < n_p; ++k) {
        const double omega = locs[2 * k];
        const T drive = T(16.0 * locs[2 * k + 1]);  // 16 * (B gamma / omega)
        double cx = std::cos(0.5 * omega * taus[0]);
        double sx = std::sin(0.5 * omega * taus[0]);
        const double cd = std::cos(0.5 * omega * step);
        const double sd = std::sin(0.5 * omega * step);
        T* row = out + k * n_tau;
        for (Eigen::Index j = 0; j < n_tau; ++j) {
            T c, s;
            if (uniform) {
                c = T(cx);
                s = T(sx);
                const double c_next = cx * cd - sx * sd;
                sx = sx * cd + cx * sd;
                cx = c_next;
            } else {
                const double x = 0.5 * omega * taus[j];
                c = T(std::cos(x));
                s = T(std::sin(x));
            }
            const T a = drive * s * s * s * detail::ac_cosine_comb(c);
            const T j0t = detail::bessel_j0_truncated(a, order);
            row[j] = detail::clamp_probability(offset + scale * j0t * decay[j], eps);
        }
    }
}

}  // namespace

template <typename T>
void batch_likelihood0_grid(const SensingModel& model, const double* locs, Eigen::Index n_p,
                            const double* taus, Eigen::Index n_tau, T* out, int threads) {
    if (const auto* n = std::get_if<NuclearModelConfig>(&model)) {
        if (n->n_c > kMaxSpins) {
            throw std::invalid_argument("batch_likelihood0_grid: too many spins");
        }
        nuclear_grid<T>(*n, locs, n_p, taus, n_tau, out, threads);
        return;
    }
    ac_grid<T>(std::get<AcModelConfig>(model), locs, n_p, taus, n_tau, out, threads);
}

template void batch_likelihood0_grid<float>(const SensingModel&, const double*, Eigen::Index,
                                            const double*, Eigen::Index, float*, int);
template void batch_likelihood0_grid<double>(const SensingModel&, const double*, Eigen::Index,
                                             const double*, Eigen::Index, double*, int);

namespace detail {

namespace {
constexpr Eigen::Index kReduceBlock = 256;
}

template <typename T>
void eig_reduce_grid(const T* grid, const double* weights, Eigen::Index n_p, Eigen::Index n_tau,
                     bool mi_terms, int threads, EigSums* out) {
    const Eigen::Index n_blocks = (n_p + kReduceBlock - 1) / kReduceBlock;
    std::vector<EigSums> partial(static_cast<std::size_t>(n_blocks * n_tau));
    const int nthreads = effective_threads(threads);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nthreads)
#endif
    for (Eigen::Index b = 0; b < n_blocks; ++b) {
        EigSums* ps = partial.data() + b * n_tau;
        const Eigen::Index k_end = std::min(n_p, (b + 1) * kReduceBlock);
        for (Eigen::Index k = b * kReduceBlock; k < k_end; ++k) {
            const double w = weights[k];
            const T* row = grid + k * n_tau;
            if (mi_terms) {
                for (Eigen::Index j = 0; j < n_tau; ++j) {
                    const double p = static_cast<double>(row[j]);
                    const double lp = static_cast<double>(std::log(row[j]));
                    const double lq = static_cast<double>(std::log1p(-row[j]));
                    ps[j].p_bar += w * p;
                    ps[j].log_p += w * lp;
                    ps[j].log_1mp += w * lq;
                    ps[j].p_log_p += w * p * lp;
                    ps[j].q_log_q += w * (1.0 - p) * lq;
                }
            } else {
                for (Eigen::Index j = 0; j < n_tau; ++j) {
                    ps[j].p_bar += w * static_cast<double>(row[j]);
                    ps[j].log_p += w * static_cast<double>(std::log(row[j]));
                    ps[j].log_1mp += w * static_cast<double>(std::log1p(-row[j]));
                }
            }
        }
    }

    for (Eigen::Index j = 0; j < n_tau; ++j) out[j] = EigSums{};
    for (Eigen::Index b = 0; b < n_blocks; ++b) {
        const EigSums* ps = partial.data() + b * n_tau;
        for (Eigen::Index j = 0; j < n_tau; ++j) {
            out[j].p_bar += ps[j].p_bar;
            out[j].log_p += ps[j].log_p;
            out[j].log_1mp += ps[j].log_1mp;
            out[j].p_log_p += ps[j].p_log_p;
            out[j].q_log_q += ps[j].q_log_q;
        }
    }
}

template void eig_reduce_grid<float>(const float*, const double*, Eigen::Index, Eigen::Index,
                                     bool, int, EigSums*);
template void eig_reduce_grid<double>(const double*, const double*, Eigen::Index, Eigen::Index,
                                      bool, int, EigSums*);

}  // namespace detail

}  // namespace nvsense
