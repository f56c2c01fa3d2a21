#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qgrav/loops.hpp"
#include "qgrav/meanfield.hpp"
#include "qgrav/params.hpp"

namespace qgrav::precision {

struct PrecisionReport {
    double delta_phi = 0;
    double delta_np = 0;
    double variance_per_run = 0;
    double n_runs_unit_precision = 0;
    NoiseScheme scheme = NoiseScheme::quantum;
    std::string loop_name;
    Deformation model = Deformation::none;
};

// Photon-number uncertainty for the configured scheme. Quantum scheme:
// sqrt((sinh^2(2r)/2 + |alpha|^2 e^{-2r}) / R); classical scheme:
// epsilon N_p e^{-r} (drift, scaled by amplitude squeezing).
double photon_noise(const ExperimentParams& params);

// Phase uncertainty including squeezing and the distortion of the outgoing
// state: sqrt(e^{2r} / (4(N_p - sinh^2 r)) + sin^2(Theta(N_p)/2)).
double phase_noise(const ExperimentParams& params, const loops::LoopExponent& exp,
                   const meanfield::EvalOptions& opt);

// First-order variance propagation from (Phi_T, N_p) onto the deformation
// parameter of `model`, for one of the registered loop presets. The
// inversion is built from the composed phase budget itself.
PrecisionReport propagate(Deformation model, const std::string& loop_name,
                          const ExperimentParams& params);

std::vector<std::pair<double, double>> nr_vs_squeezing(Deformation model,
                                                       const std::string& loop_name,
                                                       const ExperimentParams& params,
                                                       const std::vector<double>& r_grid);

struct SqueezedMoments {
    double N_p = 0;
    double dNp = 0;
    double dPhi = 0;
};
// Closed-form moments of an ideal displaced squeezed state.
SqueezedMoments squeezed_moments(std::complex<double> alpha, double r);

// The composed-and-cached exponent a preset name maps to (also used by the
// scenario runner and the acceptance suite).
const loops::LoopExponent& preset_exponent(const std::string& loop_name, Deformation model);
// Normalization of the beta deformation used for a given preset's precision
// analysis (vertex-loop results are published in the h-based normalization).
BetaForm preset_beta_form(const std::string& loop_name);

}  // namespace qgrav::precision
