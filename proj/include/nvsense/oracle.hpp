#pragma once

#include "nvsense/models.hpp"

namespace nvsense {

// Population of |0> after the full XY8-4 sequence (pi/2 wrappers, 32 pi
// pulses, free blocks tau, 2tau, ..., 2tau, tau per unit, 64 tau total),
// computed by piecewise matrix propagation of probe (x) nuclei. Pure probe
// dephasing commutes with the conditional evolution and only damps the probe
// coherence, so it enters as a single factor exp(-64 tau / T2) applied before
// the closing pulse. Test-scale only: refuses n_c > 3.
double oracle_xy84_population(const NuclearSpinParams& params, const NuclearModelConfig& cfg,
                              double tau);

}  // namespace nvsense
