#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qgrav/loops.hpp"
#include "qgrav/params.hpp"

namespace qgrav::designer {

// The two parametrized five-pulse rectangle families. The triplet (a, b, c)
// sets the rectangle dimensions and the starting point on it.
enum class Family { U_X, U_P };

struct ParamLoop {
    Family family = Family::U_X;
    Rat a{0}, b{1}, c{1};
};

loops::LoopSpec realize(const ParamLoop& loop);

struct DesignProblem {
    std::vector<ParamLoop> loops;
    std::vector<bool> dagger;        // per-loop conjugation flags
    int m_targets = 0;               // leading QM monomials to cancel
    ExperimentParams ordering_params;
    Deformation model = Deformation::gamma;
};

// Exponent of the composite path at the problem's current parameter values.
// Coefficients are polynomial functions of (a_i, b_i, c_i); this evaluates
// them at a point.
Poly compose_parametric(const DesignProblem& problem, int bch_order, int k_order);

struct RankedTerm {
    Mono mono;
    Coeff coefficient;
    double magnitude = 0;
};

// Terms ordered by descending substituted magnitude (n -> N_p, ladder
// factors -> sqrt(nbar+1)); exact ties break on the monomial key.
std::vector<RankedTerm> order_terms(const Poly& exponent, const ExperimentParams& params,
                                    Deformation model);

struct SolveOptions {
    int n_starts = 64;
    unsigned seed = 12345;
    int bch_order = 4;
    int k_order = 1;
    double box = 3.0;              // uniform start range [-box, box]
    int max_rational_den = 24;
    double residual_tol = 1e-12;
    int max_iterations = 400;
    double qg_floor_fraction = 1e-2;  // vs the square loop's signal coefficient
};

struct Solution {
    std::vector<Rat> params;     // exact values when `exact`
    std::vector<double> values;  // numeric parameter vector
    bool exact = false;
    double residual = 0.0;
    std::vector<loops::LoopSpec> as_loops;  // realized loop specs
};

// Find parameter sets zeroing the top m_targets QM coefficients while the
// deformation signal stays bounded away from zero. Rational solutions are
// re-verified with exact arithmetic.
std::vector<Solution> solve_cancellation(const DesignProblem& problem,
                                         const SolveOptions& options = SolveOptions{});

}  // namespace qgrav::designer
