#pragma once

#include <complex>
#include <string>
#include <vector>

#include "qgrav/loops.hpp"
#include "qgrav/params.hpp"

namespace qgrav::meanfield {

using cdbl = std::complex<double>;

enum class Method { exact_sum, saddle_point };

struct MeanFieldResult {
    double amplitude = 0;        // |alpha'|
    double phase = 0;            // Phi_T, unwrapped
    double phase_principal = 0;  // Phi_T mod 2pi in (-pi, pi]
    Method method = Method::saddle_point;
    long long window_lo = 0, window_hi = 0;  // populated for exact sums
};

// One contribution C * N_p^n_power to the total phase. `coefficient` is the
// exact prefactor before the lambda0/k/deformation numerics are substituted;
// pure-n exponent terms c_m n^m enter as m*c_m*N^(m-1), displacement pairs
// (j,l) as (l-j) Im(g_j^* g_l) N^(j+l-1).
struct PhaseItem {
    std::string descriptor;
    int n_power = 0;
    int lambda_pow = 0, k_pow = 0, qg_pow = 0, eps_pow = 0;
    Coeff coefficient;   // real element of Q(sqrt2)
    double phase = 0;    // numeric value at the given parameters
    bool is_qg() const { return qg_pow > 0; }
};

struct PhaseBudget {
    Deformation model = Deformation::none;
    std::vector<PhaseItem> items;
    double min_uncertainty = 0;

    double qg_phase() const {
        double s = 0;
        for (const auto& it : items)
            if (it.is_qg()) s += it.phase;
        return s;
    }
    double qm_phase() const {
        double s = 0;
        for (const auto& it : items)
            if (!it.is_qg()) s += it.phase;
        return s;
    }
    double total_phase() const { return qg_phase() + qm_phase(); }
};

struct EvalOptions {
    Deformation model = Deformation::none;
    BetaForm beta_form = BetaForm::hbar_based;
    double qg_value = 1.0;   // unit quantum-gravity parameter by default
    double n_runs = 1.0;     // sets the minimum-uncertainty entry
    double eps_value = 0.0;  // numeric value for eps-graded terms
};

// Large-N_p phase and amplitude of <a> from a splittable loop exponent,
// itemized per monomial.
PhaseBudget saddle_phase(const loops::LoopExponent& exp, const ExperimentParams& params,
                         const EvalOptions& opt);

MeanFieldResult saddle_result(const loops::LoopExponent& exp, const ExperimentParams& params,
                              const EvalOptions& opt);

// Mechanical state entering the windowed sum: a thermal state, or the fixed
// (|0>+|1>)/sqrt2 superposition used in the state-preparation analysis.
enum class MechState { thermal, plus_superposition };

// Poisson-weighted evaluation of <a> over a window of +-window_sigmas
// standard deviations around N_p, with compensated deterministic summation.
MeanFieldResult exact_sum(const loops::LoopExponent& exp, const ExperimentParams& params,
                          const EvalOptions& opt, double window_sigmas = 10.0,
                          MechState mech = MechState::thermal, int threads = 1);

// Phase spread of the distorted outgoing state:
// sqrt(1/(4 N_p) + sin^2(Theta(N_p)/2)) with Theta the doubly-differenced
// pure-n phase.
double distortion_spread(const loops::LoopExponent& exp, const ExperimentParams& params,
                         const EvalOptions& opt);
// The half-angle Theta(N_p)/2 itself (useful for squeezed-state noise).
double distortion_half_angle(const loops::LoopExponent& exp, const ExperimentParams& params,
                             const EvalOptions& opt);

// Overlap <-chi^*, m | upsilon^*, m'> of two displaced Fock states.
cdbl displaced_fock_overlap(cdbl chi, cdbl upsilon, int m, int mprime);

}  // namespace qgrav::meanfield
