#include "qgrav/precision.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace qgrav::precision {

double photon_noise(const ExperimentParams& params) {
    params.validate();
    if (params.scheme == NoiseScheme::classical)
        return params.epsilon * params.N_p * std::exp(-params.r);
    double sh = std::sinh(params.r);
    double alpha2 = params.N_p - sh * sh;
    double s2r = std::sinh(2 * params.r);
    double var = 0.5 * s2r * s2r + alpha2 * std::exp(-2 * params.r);
    return std::sqrt(var / params.R);
}

double phase_noise(const ExperimentParams& params, const loops::LoopExponent& exp,
                   const meanfield::EvalOptions& opt) {
    params.validate();
    double sh = std::sinh(params.r);
    double alpha2 = params.N_p - sh * sh;
    double half = meanfield::distortion_half_angle(exp, params, opt);
    double s = std::sin(half);
    return std::sqrt(std::exp(2 * params.r) / (4 * alpha2) + s * s);
}

const loops::LoopExponent& preset_exponent(const std::string& loop_name, Deformation model) {
    static std::mutex mtx;
    static std::map<std::pair<std::string, int>, loops::LoopExponent> cache;
    std::lock_guard<std::mutex> lk(mtx);
    auto key = std::make_pair(loop_name, int(model));
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    loops::LoopExponent exp;
    if (loop_name == "gamma-fourloop") {
        auto [parts, dagger] = loops::gamma_fourloop_parts();
        exp = loops::compose_parts(parts, dagger, model, 6, 3, 2);
    } else if (loop_name == "square" || loop_name == "beta-vertex" || loop_name == "mu-vertex") {
        exp = loops::compose(loops::preset(loop_name), model, 6, 2);
    } else {
        throw unknown_loop_inversion("no registered inversion for loop '" + loop_name + "'");
    }
    return cache.emplace(key, std::move(exp)).first->second;
}

BetaForm preset_beta_form(const std::string& loop_name) {
    return loop_name == "square" ? BetaForm::hbar_based : BetaForm::h_based;
}

PrecisionReport propagate(Deformation model, const std::string& loop_name,
                          const ExperimentParams& params) {
    params.validate();
    if (model == Deformation::none) throw config_error("propagate needs a deformation model");
    meanfield::EvalOptions opt;
    opt.model = model;
    opt.beta_form = preset_beta_form(loop_name);
    opt.qg_value = 1.0;
    loops::LoopExponent exp = loops::prune_to_splittable(
        preset_exponent(loop_name, model), TermWeights::from(params, model, opt.beta_form));
    meanfield::PhaseBudget budget = meanfield::saddle_phase(exp, params, opt);

    // Phi_T(N; p) = p G(N) + Q(N); inverting and propagating at p = 0 gives
    //   var = (dPhi^2 + Q'(N)^2 dN^2) / G(N)^2.
    const double N = params.N_p;
    double G = 0, Qprime = 0;
    for (const auto& it : budget.items) {
        if (it.is_qg()) G += it.phase;
        else Qprime += it.n_power * it.phase / N;
    }
    if (G == 0)
        throw unknown_loop_inversion("loop '" + loop_name + "' carries no " +
                                     std::string(name(model)) + " signal to invert");

    meanfield::EvalOptions null_opt = opt;
    null_opt.qg_value = 0.0;  // null hypothesis
    double dphi = phase_noise(params, exp, null_opt);
    double dnp = photon_noise(params);

    PrecisionReport rep;
    rep.delta_phi = dphi;
    rep.delta_np = dnp;
    rep.variance_per_run = (dphi * dphi + Qprime * Qprime * dnp * dnp) / (G * G);
    rep.n_runs_unit_precision = std::ceil(rep.variance_per_run);
    rep.scheme = params.scheme;
    rep.loop_name = loop_name;
    rep.model = model;
    return rep;
}

std::vector<std::pair<double, double>> nr_vs_squeezing(Deformation model,
                                                       const std::string& loop_name,
                                                       const ExperimentParams& params,
                                                       const std::vector<double>& r_grid) {
    std::vector<std::pair<double, double>> out;
    out.reserve(r_grid.size());
    for (double r : r_grid) {
        ExperimentParams p = params;
        p.r = r;
        double sh = std::sinh(r);
        if (!(sh * sh < p.N_p)) throw config_error("r grid exceeds sinh^2(r) < N_p");
        PrecisionReport rep = propagate(model, loop_name, p);
        out.emplace_back(r, rep.variance_per_run);
    }
    return out;
}

SqueezedMoments squeezed_moments(std::complex<double> alpha, double r) {
    SqueezedMoments m;
    double a2 = std::norm(alpha);
    double sh = std::sinh(r);
    m.N_p = a2 + sh * sh;
    double phi = std::arg(alpha == std::complex<double>{0, 0} ? std::complex<double>{1, 0}
                                                              : alpha);
    double s2r = std::sinh(2 * r);
    double cs = std::cos(phi), sn = std::sin(phi);
    m.dNp = std::sqrt(0.5 * s2r * s2r +
                      a2 * (std::exp(2 * r) * sn * sn + std::exp(-2 * r) * cs * cs));
    m.dPhi = std::exp(r) / (2 * std::sqrt(m.N_p - sh * sh));
    return m;
}

}  // namespace qgrav::precision
