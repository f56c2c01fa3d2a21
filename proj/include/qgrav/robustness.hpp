#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qgrav/loops.hpp"
#include "qgrav/meanfield.hpp"
#include "qgrav/params.hpp"

namespace qgrav::robustness {

// Area-preserving side fluctuations, encoded as an S-shaped tooth of height
// and width eps inserted into one pulse of the loop: the edge is split, the
// path detours +eps, crosses, detours -eps, and rejoins, so the net
// displacement and the swept area are both unchanged. The four archetypes
// pick which side of the rectangle carries the tooth.
enum class FluctPattern { opposite_x, adjacent_x, opposite_p, p_side };

struct FluctuationCase {
    // one entry per rectangle of the composite path (a single entry for the
    // plain square or vertex loops); disengaged entries leave that rectangle
    // untouched
    std::vector<std::optional<FluctPattern>> assignment;
    double epsilon = 0.0;
};

// Named cases for the published fluctuation scenarios.
FluctuationCase case_one_of_four(FluctPattern pattern, double eps, size_t loop_index = 3);
FluctuationCase case_all_opposite(double eps);   // each loop, side opposite its start
FluctuationCase case_x_parallel(double eps);     // deformations on X-parallel sides only
FluctuationCase case_p_parallel(double eps);     // deformations on P-parallel sides only
FluctuationCase case_single_loop(FluctPattern pattern, double eps);  // square/vertex paths

// Apply the tooth of `pattern` to one loop.
loops::LoopSpec deform(const loops::LoopSpec& loop, FluctPattern pattern);

struct FluctuationResult {
    Poly deviation;            // eps-graded pure-n deviation of the loop exponent
    Mono leading{};            // largest estimated deviation term
    Coeff leading_coefficient; // exact coefficient of that term
    double phase_deviation = 0;  // numeric phase of the leading term at params
};

// Composes the deformed path for `model`'s registered loop (the composite
// path for gamma, the vertex loop otherwise; a single-entry assignment on
// the gamma model deforms the plain square) and returns the fluctuation-
// induced exponent deviation with its leading term.
FluctuationResult fluctuation_phase(Deformation model, const FluctuationCase& fc,
                                    const ExperimentParams& params);

// Largest eps with |leading phase deviation| below the model's signal phase
// at qg_target.
double epsilon_threshold(Deformation model, const FluctuationCase& fc,
                         const ExperimentParams& params, double qg_target = 1.0);

struct ImpurityState {
    double epsilon = 0.0;  // mixing weight of (|0>+|1>)/sqrt2 into the thermal state
};

struct ImpurityResult {
    double phase_correction = 0;  // eps (alpha0/alpha') sin(Theta0 - Phi_QM)
    double theta_minus_phi = 0;
    double amplitude_ratio = 0;   // alpha0 / alpha'
    bool admissible = false;      // correction below the signal phase
};

ImpurityResult impure_thermal_phase(Deformation model, const ImpurityState& impurity,
                                    const loops::LoopExponent& exp,
                                    const ExperimentParams& params,
                                    BetaForm beta_form = BetaForm::hbar_based);

}  // namespace qgrav::robustness
