#include "qgrav/loops.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace qgrav::loops {

using nlohmann::json;

Rat LoopSpec::net(char axis) const {
    Rat s(0);
    for (const PulseStep& st : steps)
        if (st.axis == axis && st.eps_pow == 0) s += st.scale;
    return s;
}

void LoopSpec::validate() const {
    for (const PulseStep& st : steps) {
        if (st.axis != 'X' && st.axis != 'P') throw config_error("pulse axis must be X or P");
        if (st.scale.is_zero()) throw config_error("pulse scale must be nonzero");
    }
    if (allow_open) return;
    // eps-tagged steps must close among themselves as well
    Rat ex(0), ep(0);
    for (const PulseStep& st : steps)
        if (st.eps_pow > 0) (st.axis == 'X' ? ex : ep) += st.scale;
    if (!net('X').is_zero() || !net('P').is_zero() || !ex.is_zero() || !ep.is_zero())
        throw config_error("loop does not close; set allow_open for open paths");
}

std::string LoopSpec::to_json() const {
    json j;
    j["name"] = name;
    j["steps"] = json::array();
    for (const PulseStep& st : steps) {
        json s;
        s["axis"] = std::string(1, st.axis);
        s["num"] = (long long)st.scale.num();
        s["den"] = (long long)st.scale.den();
        if (st.eps_pow) s["eps_pow"] = st.eps_pow;
        j["steps"].push_back(s);
    }
    if (allow_open) j["allow_open"] = true;
    return j.dump(2);
}

LoopSpec LoopSpec::from_json(const std::string& text) {
    json j = json::parse(text);
    LoopSpec spec;
    spec.name = j.value("name", "");
    spec.allow_open = j.value("allow_open", false);
    for (const auto& s : j.at("steps")) {
        PulseStep st;
        std::string ax = s.at("axis").get<std::string>();
        if (ax.size() != 1) throw config_error("bad axis in loop json");
        st.axis = ax[0];
        st.scale = Rat(s.at("num").get<long long>(), s.at("den").get<long long>());
        st.eps_pow = s.value("eps_pow", 0);
        spec.steps.push_back(st);
    }
    spec.validate();
    return spec;
}

namespace {

LoopSpec make(const std::string& name, std::vector<PulseStep> steps) {
    LoopSpec s;
    s.name = name;
    s.steps = std::move(steps);
    s.validate();
    return s;
}

}  // namespace

LoopSpec preset(const std::string& name) {
    if (name == "square")
        return make(name, {{'P', Rat(1)}, {'X', Rat(-1)}, {'P', Rat(-1)}, {'X', Rat(1)}});
    if (name == "beta-vertex" || name == "mu-vertex")
        return make(name, {{'X', Rat(-1)}, {'P', Rat(-1)}, {'X', Rat(1)}, {'P', Rat(1)}});
    if (name == "gamma-fourloop") {
        auto [parts, dagger] = gamma_fourloop_parts();
        LoopSpec all;
        all.name = name;
        for (size_t i = 0; i < parts.size(); ++i) {
            std::vector<PulseStep> steps = parts[i].steps;
            if (dagger[i]) {
                std::reverse(steps.begin(), steps.end());
                for (PulseStep& st : steps) st.scale = -st.scale;
            }
            all.steps.insert(all.steps.end(), steps.begin(), steps.end());
        }
        all.validate();
        return all;
    }
    throw config_error("unknown loop preset: " + name);
}

std::pair<std::vector<LoopSpec>, std::vector<bool>> gamma_fourloop_parts() {
    std::vector<LoopSpec> parts;
    parts.push_back(make("u1", {{'X', Rat(-2)},
                                {'P', Rat(-1)},
                                {'X', Rat(1)},
                                {'P', Rat(1)},
                                {'X', Rat(1)}}));
    parts.push_back(make("u2", {{'X', Rat(-7, 3)},
                                {'P', Rat(-1)},
                                {'X', Rat(1)},
                                {'P', Rat(1)},
                                {'X', Rat(4, 3)}}));
    parts.push_back(make("u3", {{'P', Rat(2, 3)},
                                {'X', Rat(-1)},
                                {'P', Rat(-1)},
                                {'X', Rat(1)},
                                {'P', Rat(1, 3)}}));
    parts.push_back(make("u4", {{'P', Rat(1)}, {'X', Rat(-1)}, {'P', Rat(-1)}, {'X', Rat(1)}}));
    return {parts, {false, true, true, false}};
}

std::pair<Poly, Poly> build_hamiltonians(int k_order, const AlgebraContext& ctx) {
    if (k_order < 0) throw config_error("k_order must be non-negative");
    Poly hx(ctx), hp(ctx);
    for (int j = 0; j <= k_order; ++j) {
        Coeff c(Rat(j % 2 == 0 ? 1 : -1));
        Mono mx{1, 0, j + 1, j, 1, 0, 0};  // n lambda k^j X^{j+1}
        Mono mp{1, j + 1, 0, j, 1, 0, 0};
        hx.add_term(mx, c);
        hp.add_term(mp, c);
    }
    return {hx, hp};
}

Poly step_exponent(const PulseStep& step, const Poly& h_x, const Poly& h_p) {
    const Poly& h = step.axis == 'X' ? h_x : h_p;
    Poly scale(h.context());
    Mono m;
    m.eps_pow = step.eps_pow;
    scale.add_term(m, Coeff(Rat(0), step.scale));
    return h * scale;
}

LoopExponent compose(const LoopSpec& loop, Deformation model, int bch_order, int k_order,
                     Truncation trunc) {
    loop.validate();
    if (bch_order < 1 || bch_order > kMaxBchOrder)
        throw order_out_of_range("bch_order outside the precomputed table", bch_order);
    trunc.max_lambda_power = std::min(trunc.max_lambda_power, bch_order);
    AlgebraContext ctx{Basis::quadrature, model, trunc};
    auto [hx, hp] = build_hamiltonians(k_order, ctx);

    Poly z(ctx);
    bool first = true;
    for (const PulseStep& st : loop.steps) {
        Poly s = step_exponent(st, hx, hp);
        if (first) {
            z = std::move(s);
            first = false;
        } else {
            z = bch_combine(z, s, bch_order);
        }
    }
    return LoopExponent{std::move(z), Provenance{bch_order, k_order, {}}};
}

LoopExponent compose_parts(const std::vector<LoopSpec>& parts, const std::vector<bool>& dagger,
                           Deformation model, int loop_bch_order, int combine_bch_order,
                           int k_order, Truncation trunc) {
    if (parts.size() != dagger.size()) throw config_error("compose_parts: size mismatch");
    if (combine_bch_order < 1 || combine_bch_order > kMaxBchOrder)
        throw order_out_of_range("combine order outside the precomputed table", combine_bch_order);
    AlgebraContext ctx{Basis::quadrature, model, trunc};
    std::vector<Poly> exps;
    for (size_t i = 0; i < parts.size(); ++i) {
        LoopExponent e = compose(parts[i], model, loop_bch_order, k_order, trunc);
        // re-embed the (lambda <= loop_bch_order)-exact exponent in the full context
        Poly lifted(ctx);
        e.exponent.for_each([&](const Mono& m, const Coeff& c) { lifted.add_term(m, c); });
        exps.push_back(dagger[i] ? -lifted : lifted);
    }
    Poly z(ctx);
    bool first = true;
    for (const Poly& e : exps) {
        if (first) {
            z = e;
            first = false;
        } else {
            z = bch_combine(z, e, combine_bch_order);
        }
    }
    return LoopExponent{std::move(z),
                        Provenance{std::max(loop_bch_order, combine_bch_order), k_order, {}}};
}

double term_phase_estimate(const Mono& m, double abs_coeff, const TermWeights& weights) {
    if (m.n_pow == 0) return 0.0;  // constant exponent terms cancel in U^dag a U
    double base = abs_coeff * std::pow(weights.lambda0, m.lambda_pow) *
                  std::pow(weights.k, m.k_pow) * double(m.n_pow) *
                  std::pow(weights.N_p, m.n_pow - 1) *
                  std::pow(std::sqrt(weights.nbar + 1.0), m.word_length());
    if (m.qg_pow) base *= weights.qg;
    if (m.eps_pow) base *= std::pow(weights.eps, m.eps_pow);
    // off-diagonal mechanical words average out at first order and only feed
    // the phase quadratically; number-diagonal words keep their first-order
    // thermal expectation
    if (m.word_length() >= 2 && m.l_pow != m.r_pow) return base * base;
    return base;
}

LoopExponent prune(const LoopExponent& exp, const TermWeights& weights, double threshold) {
    if (!(threshold >= 0)) throw config_error("prune threshold must be non-negative");
    LoopExponent out;
    out.provenance = exp.provenance;
    out.exponent = Poly(exp.exponent.context());
    exp.exponent.for_each([&](const Mono& m, const Coeff& c) {
        double mag = term_phase_estimate(m, std::abs(c.to_complex()), weights);
        if (threshold > 0 && mag < threshold) out.provenance.pruned_magnitudes.push_back(mag);
        else out.exponent.add_term(m, c);
    });
    std::sort(out.provenance.pruned_magnitudes.begin(), out.provenance.pruned_magnitudes.end(),
              std::greater<double>());
    return out;
}

LoopExponent prune_to_splittable(const LoopExponent& exp, const TermWeights& weights) {
    // splittability is a ladder-basis notion; convert before dropping words
    Poly lad = exp.exponent.context().basis == Basis::ladder ? exp.exponent
                                                             : to_ladder(exp.exponent);
    LoopExponent out;
    out.provenance = exp.provenance;
    out.exponent = Poly(lad.context());
    lad.for_each([&](const Mono& m, const Coeff& c) {
        if (m.word_length() >= 2)
            out.provenance.pruned_magnitudes.push_back(
                term_phase_estimate(m, std::abs(c.to_complex()), weights));
        else out.exponent.add_term(m, c);
    });
    std::sort(out.provenance.pruned_magnitudes.begin(), out.provenance.pruned_magnitudes.end(),
              std::greater<double>());
    return out;
}

RequiredOrders required_orders(const ExperimentParams& params, double n_runs) {
    params.validate();
    if (n_runs < 1) throw config_error("n_runs must be >= 1");
    const double log_thr = std::log(min_phase_uncertainty(params.N_p, n_runs));
    const double lk = std::log(params.k());
    const double ll = std::log(params.lambda0());
    const double ln = std::log(params.N_p);
    for (int m = 2; m <= 200; ++m) {
        double lhs = (m - 2) * lk + m * ll + (m - 1) * ln;
        if (lhs < log_thr) {
            if (m > kMaxBchOrder)
                throw order_out_of_range("required series order exceeds the table", m);
            return {m, m - 2};
        }
    }
    throw order_out_of_range("required series order exceeds the table", 200);
}

}  // namespace qgrav::loops
