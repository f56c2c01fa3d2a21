#include "qgrav/robustness.hpp"

#include <algorithm>
#include <cmath>

#include "qgrav/precision.hpp"

namespace qgrav::robustness {

namespace {

// list index of the n-th pulse on `axis` (n = 0 or 1)
size_t axis_edge(const loops::LoopSpec& loop, char axis, int which) {
    int seen = 0;
    for (size_t i = 0; i < loop.steps.size(); ++i) {
        if (loop.steps[i].axis == axis && loop.steps[i].eps_pow == 0) {
            if (seen == which) return i;
            ++seen;
        }
    }
    throw config_error("loop has no such edge");
}

size_t pattern_edge(const loops::LoopSpec& loop, FluctPattern pattern) {
    switch (pattern) {
        case FluctPattern::adjacent_x: return axis_edge(loop, 'P', 0);
        case FluctPattern::opposite_x: return axis_edge(loop, 'P', 1);
        case FluctPattern::p_side: return axis_edge(loop, 'X', 0);
        case FluctPattern::opposite_p: return axis_edge(loop, 'X', 1);
    }
    throw config_error("unknown fluctuation pattern");
}

std::string model_loop(Deformation model) {
    switch (model) {
        case Deformation::gamma: return "gamma-fourloop";
        case Deformation::beta: return "beta-vertex";
        case Deformation::mu: return "mu-vertex";
        default: throw config_error("fluctuation analysis needs a deformation model");
    }
}

}  // namespace

loops::LoopSpec deform(const loops::LoopSpec& loop, FluctPattern pattern) {
    size_t edge = pattern_edge(loop, pattern);
    loops::LoopSpec out;
    out.name = loop.name + "+fluct";
    for (size_t i = 0; i < loop.steps.size(); ++i) {
        const loops::PulseStep& st = loop.steps[i];
        if (i != edge) {
            out.steps.push_back(st);
            continue;
        }
        char a = st.axis, b = (st.axis == 'X') ? 'P' : 'X';
        Rat half = st.scale * Rat(1, 2);
        out.steps.push_back({a, half});
        out.steps.push_back({b, Rat(1), 1});
        out.steps.push_back({a, Rat(1), 1});
        out.steps.push_back({b, Rat(-2), 1});
        out.steps.push_back({a, Rat(1), 1});
        out.steps.push_back({b, Rat(1), 1});
        out.steps.push_back({a, half});
        out.steps.push_back({a, Rat(-2), 1});  // keep the edge total at st.scale
    }
    out.validate();
    return out;
}

FluctuationCase case_one_of_four(FluctPattern pattern, double eps, size_t loop_index) {
    FluctuationCase fc;
    fc.assignment.assign(4, std::nullopt);
    fc.assignment.at(loop_index) = pattern;
    fc.epsilon = eps;
    return fc;
}

FluctuationCase case_all_opposite(double eps) {
    FluctuationCase fc;
    fc.assignment = {FluctPattern::opposite_x, FluctPattern::opposite_x,
                     FluctPattern::opposite_p, FluctPattern::opposite_p};
    fc.epsilon = eps;
    return fc;
}

FluctuationCase case_x_parallel(double eps) {
    FluctuationCase fc;
    fc.assignment = {FluctPattern::opposite_x, FluctPattern::opposite_x,
                     FluctPattern::adjacent_x, FluctPattern::adjacent_x};
    fc.epsilon = eps;
    return fc;
}

FluctuationCase case_p_parallel(double eps) {
    FluctuationCase fc;
    fc.assignment = {FluctPattern::p_side, FluctPattern::p_side, FluctPattern::opposite_p,
                     FluctPattern::opposite_p};
    fc.epsilon = eps;
    return fc;
}

FluctuationCase case_single_loop(FluctPattern pattern, double eps) {
    FluctuationCase fc;
    fc.assignment = {pattern};
    fc.epsilon = eps;
    return fc;
}

FluctuationResult fluctuation_phase(Deformation model, const FluctuationCase& fc,
                                    const ExperimentParams& params) {
    params.validate();
    loops::LoopExponent composed;
    if (fc.assignment.size() == 4) {
        auto [parts, dagger] = loops::gamma_fourloop_parts();
        for (size_t i = 0; i < 4; ++i)
            if (fc.assignment[i]) parts[i] = deform(parts[i], *fc.assignment[i]);
        composed = loops::compose_parts(parts, dagger, model, 5, 3, 2);
    } else if (fc.assignment.size() == 1) {
        loops::LoopSpec base = loops::preset(model == Deformation::gamma ? "square"
                                                                         : model_loop(model));
        if (fc.assignment[0]) base = deform(base, *fc.assignment[0]);
        composed = loops::compose(base, model, 5, 2);
    } else {
        throw config_error("fluctuation assignment must cover one loop or all four");
    }

    TermWeights w = TermWeights::from(params, model);
    w.eps = fc.epsilon;

    FluctuationResult res;
    res.deviation = Poly(composed.exponent.context());
    double best = -1.0;
    composed.exponent.for_each([&](const Mono& m, const Coeff& c) {
        if (m.eps_pow == 0 || m.word_length() != 0 || m.qg_pow != 0) return;
        res.deviation.add_term(m, c);
        double est = loops::term_phase_estimate(m, std::abs(c.to_complex()), w);
        if (est > best) {
            best = est;
            res.leading = m;
            res.leading_coefficient = c;
        }
    });
    if (best < 0) {
        res.phase_deviation = 0.0;
        return res;
    }
    double weight = std::pow(params.lambda0(), res.leading.lambda_pow) *
                    std::pow(params.k(), res.leading.k_pow) *
                    std::pow(fc.epsilon, res.leading.eps_pow);
    // phase of a pure-n exponent term via the derivative rule
    res.phase_deviation = (Coeff::i() * res.leading_coefficient).to_complex().real() *
                          res.leading.n_pow * weight *
                          std::pow(params.N_p, res.leading.n_pow - 1);
    return res;
}

double epsilon_threshold(Deformation model, const FluctuationCase& fc,
                         const ExperimentParams& params, double qg_target) {
    FluctuationCase unit = fc;
    unit.epsilon = 1.0;
    FluctuationResult res = fluctuation_phase(model, unit, params);
    if (res.leading.eps_pow == 0 || res.phase_deviation == 0.0)
        throw config_error("no fluctuation deviation to invert");

    // leading signal term of the model's registered loop at the target value
    meanfield::EvalOptions opt;
    opt.model = model;
    opt.qg_value = qg_target;
    auto exp = loops::prune_to_splittable(
        precision::preset_exponent(model_loop(model), model), TermWeights::from(params, model));
    auto budget = meanfield::saddle_phase(exp, params, opt);
    double qg_phase = 0;
    for (const auto& it : budget.items)
        if (it.is_qg()) qg_phase = std::max(qg_phase, std::abs(it.phase));
    if (qg_phase == 0) throw config_error("registered loop has no signal phase");
    return std::pow(qg_phase / std::abs(res.phase_deviation), 1.0 / res.leading.eps_pow);
}

ImpurityResult impure_thermal_phase(Deformation model, const ImpurityState& impurity,
                                    const loops::LoopExponent& exp,
                                    const ExperimentParams& params, BetaForm beta_form) {
    params.validate();
    Poly lad = exp.exponent.context().basis == Basis::ladder ? exp.exponent
                                                             : to_ladder(exp.exponent);
    SplitForm sf = split_ladder_exponent(lad);

    double qg_scale = deformation_scale(model, params, beta_form);
    const double N = params.N_p;
    std::map<int, std::complex<double>> g;
    for (const auto& [j, amp] : sf.g) {
        auto v = amp.numeric(params.lambda0(), params.k(), qg_scale, 0.0);
        if (v != std::complex<double>{0, 0}) g[j] = v;
    }
    double theta = 0;
    double z2 = 0;
    for (const auto& [j, gj] : g) theta += double(j) * gj.imag() * std::pow(N, j - 1);
    for (const auto& [j, gj] : g)
        for (const auto& [l, gl] : g)
            z2 += double(j) * double(l) * (std::conj(gj) * gl).real() *
                  std::pow(N, j + l - 2);

    ImpurityResult res;
    res.theta_minus_phi = theta;
    res.amplitude_ratio = std::exp(z2 * (params.nbar - 0.5));
    res.phase_correction = impurity.epsilon * res.amplitude_ratio * std::sin(theta);

    meanfield::EvalOptions opt;
    opt.model = model;
    opt.beta_form = beta_form;
    auto budget = meanfield::saddle_phase(exp, params, opt);
    res.admissible = std::abs(res.phase_correction) < std::abs(budget.qg_phase());
    return res;
}

}  // namespace qgrav::robustness
