#pragma once

#include <Eigen/Core>

namespace nvsense::detail {

// Per-control accumulations over particles, all carried in double.
struct EigSums {
    double p_bar = 0.0;     // sum w p
    double log_p = 0.0;     // sum w log p
    double log_1mp = 0.0;   // sum w log(1 - p)
    double p_log_p = 0.0;   // sum w p log p          (mutual-information terms)
    double q_log_q = 0.0;   // sum w (1 - p) log(1 - p)
};

// Two-stage reduction over the particle x control grid: fixed 256-particle
// blocks produce partials that are combined in block order, so the result is
// independent of the thread count.
template <typename T>
void eig_reduce_grid(const T* grid, const double* weights, Eigen::Index n_p, Eigen::Index n_tau,
                     bool mi_terms, int threads, EigSums* out);

extern template void eig_reduce_grid<float>(const float*, const double*, Eigen::Index,
                                            Eigen::Index, bool, int, EigSums*);
extern template void eig_reduce_grid<double>(const double*, const double*, Eigen::Index,
                                             Eigen::Index, bool, int, EigSums*);

}  // namespace nvsense::detail
