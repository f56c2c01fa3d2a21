#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qgrav/algebra.hpp"
#include "qgrav/params.hpp"

namespace qgrav::loops {

struct PulseStep {
    char axis = 'X';   // 'X' or 'P'
    Rat scale{0};      // signed multiple of the base pulse strength
    int eps_pow = 0;   // fluctuation bookkeeping power carried by this step
    friend bool operator==(const PulseStep&, const PulseStep&) = default;
};

struct LoopSpec {
    std::string name;
    std::vector<PulseStep> steps;
    bool allow_open = false;

    // Net displacement per axis must vanish for a closed loop.
    void validate() const;
    Rat net(char axis) const;

    std::string to_json() const;
    static LoopSpec from_json(const std::string& text);
};

// Presets: "square", "gamma-fourloop", "beta-vertex", "mu-vertex".
LoopSpec preset(const std::string& name);
// The four rectangles of the composite gamma path plus their dagger flags.
std::pair<std::vector<LoopSpec>, std::vector<bool>> gamma_fourloop_parts();

// H_axis = n lambda0 (Q - k Q^2 + k^2 Q^3 - ...) truncated at k_order.
std::pair<Poly, Poly> build_hamiltonians(int k_order, const AlgebraContext& ctx);

struct Provenance {
    int bch_order = 0;
    int k_order = 0;
    std::vector<double> pruned_magnitudes;
};

struct LoopExponent {
    Poly exponent;
    Provenance provenance;
};

constexpr int kMaxBchOrder = 8;

// i * scale * H_axis for one pulse.
Poly step_exponent(const PulseStep& step, const Poly& h_x, const Poly& h_p);

// Left-to-right BCH fold of the pulse factors, exact for every term whose
// lambda grading is at most bch_order.
LoopExponent compose(const LoopSpec& loop, Deformation model, int bch_order, int k_order,
                     Truncation trunc = Truncation{});

// Compose pre-built exponents U_1^(d1) U_2^(d2) ... (dagger = negated
// exponent), with the series cut at combine_bch_order. Mirrors evaluating
// each rectangle to a fixed order first and then joining the rectangles.
LoopExponent compose_parts(const std::vector<LoopSpec>& parts, const std::vector<bool>& dagger,
                           Deformation model, int loop_bch_order, int combine_bch_order,
                           int k_order, Truncation trunc = Truncation{});

// Phase-contribution estimate used for pruning and ranking: a pure n^p term
// enters the measured phase as p |c| N^(p-1); a displacement term scales the
// same way times sqrt(nbar+1) per ladder factor; words of two or more ladder
// operators only contribute at second order and get the squared estimate.
double term_phase_estimate(const Mono& m, double abs_coeff, const TermWeights& weights);

// Drop terms whose estimated phase contribution is below threshold; the
// dropped magnitudes are appended to the provenance.
LoopExponent prune(const LoopExponent& exp, const TermWeights& weights, double threshold);

// Drop exactly the terms the exponential splitter cannot factor (mechanical
// words of length two or more), independent of magnitude.
LoopExponent prune_to_splittable(const LoopExponent& exp, const TermWeights& weights);

inline double min_phase_uncertainty(double N_p, double n_runs) {
    return 1.0 / (2.0 * std::sqrt(N_p * n_runs));
}

struct RequiredOrders {
    int bch_order;
    int k_order;
};

// Smallest series order m with k^(m-2) lambda0^m N_p^(m-1) below the minimum
// phase uncertainty for n_runs repetitions; k_order = m - 2.
RequiredOrders required_orders(const ExperimentParams& params, double n_runs);

}  // namespace qgrav::loops
