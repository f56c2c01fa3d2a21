#include "qgrav/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "qgrav/designer.hpp"
#include "qgrav/meanfield.hpp"
#include "qgrav/oracle.hpp"
#include "qgrav/precision.hpp"
#include "qgrav/robustness.hpp"

namespace qgrav {

ExperimentParams params_preset(const std::string& name) {
    ExperimentParams p;  // omega_m, lambda_L, L carry the shared defaults
    if (name == "pikovski-mu") {
        p.finesse = 1e5;
        p.mass = 1e-11;
        p.N_p = 1e8;
    } else if (name == "pikovski-gamma") {
        p.finesse = 2e5;
        p.mass = 1e-9;
        p.N_p = 5e10;
    } else if (name == "pikovski-beta") {
        p.finesse = 4e5;
        p.mass = 1e-7;
        p.N_p = 1e14;
        p.lambda_L = 532e-9;
    } else if (name == "improved-mu") {
        p.finesse = 1e5;
        p.mass = 1e-10;
        p.N_p = 1e9;
    } else {
        throw config_error("unknown parameter preset: " + name);
    }
    return p;
}

}  // namespace qgrav

namespace qgrav::scenario {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Deformation model_from(const std::string& s) {
    if (s == "beta") return Deformation::beta;
    if (s == "gamma") return Deformation::gamma;
    if (s == "mu") return Deformation::mu;
    if (s == "none") return Deformation::none;
    throw config_error("unknown model: " + s);
}

ExperimentParams params_from_json(const json& j) {
    ExperimentParams p;
    if (j.contains("preset")) p = params_preset(j.at("preset").get<std::string>());
    auto set = [&](const char* key, double& field) {
        if (j.contains(key)) field = j.at(key).get<double>();
    };
    set("finesse", p.finesse);
    set("mass", p.mass);
    set("omega_m", p.omega_m);
    set("lambda_L", p.lambda_L);
    set("cavity_length", p.cavity_length);
    set("N_p", p.N_p);
    set("nbar", p.nbar);
    set("epsilon", p.epsilon);
    set("r", p.r);
    set("R", p.R);
    if (j.contains("scheme")) {
        std::string s = j.at("scheme").get<std::string>();
        if (s == "quantum") p.scheme = NoiseScheme::quantum;
        else if (s == "classical") p.scheme = NoiseScheme::classical;
        else throw config_error("unknown scheme: " + s);
    }
    p.validate();
    return p;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string csv() const {
        std::string out;
        for (size_t i = 0; i < columns.size(); ++i)
            out += columns[i] + (i + 1 < columns.size() ? "," : "\n");
        for (const auto& row : rows)
            for (size_t i = 0; i < row.size(); ++i)
                out += row[i] + (i + 1 < row.size() ? "," : "\n");
        return out;
    }
    std::string as_json() const {
        json arr = json::array();
        for (const auto& row : rows) {
            json obj;
            for (size_t i = 0; i < columns.size(); ++i) obj[columns[i]] = row[i];
            arr.push_back(obj);
        }
        return arr.dump(2) + "\n";
    }
};

std::string provenance(const ScenarioConfig& c) {
    return std::string(name(c.model)) + "|" + c.loop_name + "|bch" +
           std::to_string(c.bch_order) + "|k" + std::to_string(c.k_order) + "|" +
           name(c.params.scheme);
}

loops::LoopExponent scenario_exponent(const ScenarioConfig& c) {
    if (c.inline_loop) return loops::compose(*c.inline_loop, c.model, c.bch_order, c.k_order);
    if (c.loop_name == "gamma-fourloop") {
        auto [parts, dagger] = loops::gamma_fourloop_parts();
        return loops::compose_parts(parts, dagger, c.model, c.bch_order, 3, c.k_order);
    }
    return loops::compose(loops::preset(c.loop_name), c.model, c.bch_order, c.k_order);
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    ScenarioConfig c;
    c.version = j.value("version", 1);
    if (c.version != 1) throw config_error("unsupported config version");
    if (j.contains("model")) c.model = model_from(j.at("model").get<std::string>());
    if (j.contains("loop")) {
        if (j.at("loop").is_string()) {
            c.loop_name = j.at("loop").get<std::string>();
            loops::preset(c.loop_name);  // existence check
        } else {
            c.inline_loop = loops::LoopSpec::from_json(j.at("loop").dump());
            c.loop_name = c.inline_loop->name.empty() ? "inline" : c.inline_loop->name;
        }
    }
    if (j.contains("params")) c.params = params_from_json(j.at("params"));
    if (j.contains("analysis"))
        for (const auto& a : j.at("analysis")) c.analyses.push_back(a.get<std::string>());
    if (j.contains("output")) {
        c.output.format = j.at("output").value("format", "csv");
        c.output.path = j.at("output").value("path", ".");
        if (c.output.format != "csv" && c.output.format != "json")
            throw config_error("output format must be csv or json");
    }
    c.seed = j.value("seed", 12345u);
    if (j.contains("r_grid"))
        for (const auto& r : j.at("r_grid")) c.r_grid.push_back(r.get<double>());
    if (j.contains("design")) {
        c.design.loops = j.at("design").value("loops", 1);
        c.design.m_targets = j.at("design").value("m_targets", 1);
        c.design.n_starts = j.at("design").value("n_starts", 64);
    }
    c.bch_order = j.value("bch_order", 6);
    c.k_order = j.value("k_order", 2);
    c.threads = j.value("threads", 1);
    return c;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw config_error("cannot write " + tmp);
        out << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw config_error("cannot rename " + tmp + " to " + path);
}

namespace {

Table phase_budget_table(const ScenarioConfig& c) {
    meanfield::EvalOptions opt;
    opt.model = c.model;
    opt.beta_form = precision::preset_beta_form(c.loop_name);
    auto exp = loops::prune_to_splittable(scenario_exponent(c),
                                          TermWeights::from(c.params, c.model, opt.beta_form));
    auto budget = meanfield::saddle_phase(exp, c.params, opt);
    Table t;
    t.columns = {"term", "n_power", "phase", "is_qg", "provenance"};
    for (const auto& it : budget.items)
        t.rows.push_back({it.descriptor, std::to_string(it.n_power), fmt(it.phase),
                          it.is_qg() ? "1" : "0", provenance(c)});
    t.rows.push_back({"total_qg", "-", fmt(budget.qg_phase()), "1", provenance(c)});
    t.rows.push_back({"total_qm", "-", fmt(budget.qm_phase()), "0", provenance(c)});
    t.rows.push_back({"min_uncertainty", "-", fmt(budget.min_uncertainty), "0", provenance(c)});
    return t;
}

Table precision_table(const ScenarioConfig& c) {
    Table t;
    t.columns = {"scheme",       "delta_phi", "delta_np", "variance_per_run",
                 "n_runs",       "provenance"};
    for (NoiseScheme scheme : {NoiseScheme::quantum, NoiseScheme::classical}) {
        ExperimentParams p = c.params;
        p.scheme = scheme;
        auto rep = precision::propagate(c.model, c.loop_name, p);
        ScenarioConfig cc = c;
        cc.params = p;
        t.rows.push_back({name(scheme), fmt(rep.delta_phi), fmt(rep.delta_np),
                          fmt(rep.variance_per_run), fmt(rep.n_runs_unit_precision),
                          provenance(cc)});
    }
    return t;
}

Table sweep_table(const ScenarioConfig& c) {
    std::vector<double> grid = c.r_grid;
    if (grid.empty())
        for (double r = -4.0; r <= 4.0 + 1e-9; r += 0.1) grid.push_back(r);
    auto curve = precision::nr_vs_squeezing(c.model, c.loop_name, c.params, grid);
    Table t;
    t.columns = {"r", "variance_per_run", "log10_n_runs", "provenance"};
    for (auto& [r, nr] : curve)
        t.rows.push_back({fmt(r), fmt(nr), fmt(std::log10(std::max(nr, 1.0))), provenance(c)});
    return t;
}

Table design_table(const ScenarioConfig& c) {
    designer::DesignProblem problem;
    problem.model = c.model;
    problem.ordering_params = c.params;
    problem.m_targets = c.design.m_targets;
    if (c.design.loops == 4) {
        problem.loops = {designer::ParamLoop{designer::Family::U_X},
                         designer::ParamLoop{designer::Family::U_X},
                         designer::ParamLoop{designer::Family::U_P},
                         designer::ParamLoop{designer::Family::U_P}};
        problem.dagger = {false, true, true, false};
    } else if (c.design.loops == 1) {
        problem.loops = {designer::ParamLoop{designer::Family::U_P}};
        problem.dagger = {false};
    } else {
        throw config_error("design.loops must be 1 or 4");
    }
    designer::SolveOptions opts;
    opts.n_starts = c.design.n_starts;
    opts.seed = c.seed;
    auto sols = designer::solve_cancellation(problem, opts);
    Table t;
    t.columns = {"solution", "exact", "residual", "parameters", "loops_json", "provenance"};
    for (size_t i = 0; i < sols.size(); ++i) {
        std::string params;
        for (double v : sols[i].values) params += (params.empty() ? "" : ";") + fmt(v);
        std::string loops_json;
        for (const auto& ls : sols[i].as_loops)
            loops_json += (loops_json.empty() ? "" : ";") + ls.to_json();
        // flatten for csv
        for (auto& ch : loops_json)
            if (ch == '\n' || ch == ',') ch = ' ';
        t.rows.push_back({std::to_string(i), sols[i].exact ? "1" : "0", fmt(sols[i].residual),
                          params, loops_json, provenance(c)});
    }
    return t;
}

Table robustness_table(const ScenarioConfig& c) {
    Table t;
    t.columns = {"case", "leading_term", "phase_deviation", "epsilon_threshold", "provenance"};
    struct Case {
        std::string name;
        robustness::FluctuationCase fc;
    };
    std::vector<Case> cases;
    double eps = 1e-4;
    if (c.model == Deformation::gamma) {
        cases.push_back({"one-of-four-opposite-x",
                         robustness::case_one_of_four(robustness::FluctPattern::opposite_x, eps)});
        cases.push_back({"one-of-four-opposite-p",
                         robustness::case_one_of_four(robustness::FluctPattern::opposite_p, eps)});
        cases.push_back({"all-opposite", robustness::case_all_opposite(eps)});
        cases.push_back({"x-parallel", robustness::case_x_parallel(eps)});
        cases.push_back({"p-parallel", robustness::case_p_parallel(eps)});
    } else {
        cases.push_back({"single-opposite-x",
                         robustness::case_single_loop(robustness::FluctPattern::opposite_x, eps)});
        cases.push_back({"single-opposite-p",
                         robustness::case_single_loop(robustness::FluctPattern::opposite_p, eps)});
    }
    for (auto& cs : cases) {
        auto res = robustness::fluctuation_phase(c.model, cs.fc, c.params);
        double thr = robustness::epsilon_threshold(c.model, cs.fc, c.params);
        std::string lead = "eps^" + std::to_string(res.leading.eps_pow) + " k^" +
                           std::to_string(res.leading.k_pow) + " n^" +
                           std::to_string(res.leading.n_pow) + " lambda^" +
                           std::to_string(res.leading.lambda_pow - res.leading.eps_pow) + " x " +
                           res.leading_coefficient.str();
        t.rows.push_back({cs.name, lead, fmt(res.phase_deviation), fmt(thr), provenance(c)});
    }
    // impurity correction of the registered loop at eps = 1e-3
    auto exp = loops::prune_to_splittable(
        precision::preset_exponent(c.loop_name, c.model),
        TermWeights::from(c.params, c.model, precision::preset_beta_form(c.loop_name)));
    auto imp = robustness::impure_thermal_phase(c.model, {1e-3}, exp, c.params,
                                                precision::preset_beta_form(c.loop_name));
    t.rows.push_back({"impure-thermal-1e-3",
                      "theta-phi=" + fmt(imp.theta_minus_phi), fmt(imp.phase_correction),
                      imp.admissible ? "admissible" : "in-admissible", provenance(c)});
    return t;
}

}  // namespace

namespace detail {

std::vector<OracleComparison> oracle_comparison(unsigned seed, int n_loops, int threads) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const Rat scales[6] = {Rat(1), Rat(-1), Rat(1, 2), Rat(-1, 2), Rat(1, 3), Rat(-1, 3)};

    std::vector<OracleComparison> out;
    while ((int)out.size() < n_loops) {
        OracleComparison oc;
        oc.lambda0 = 0.01 + 0.09 * uni(rng);
        oc.nbar = 2.0 * uni(rng);
        int model_pick = int(rng() % 4);
        oc.model = model_pick == 0   ? Deformation::none
                   : model_pick == 1 ? Deformation::beta
                   : model_pick == 2 ? Deformation::gamma
                                     : Deformation::mu;
        bool with_k = (rng() % 2) == 0 && oc.model == Deformation::none;
        oc.k = with_k ? 5e-4 * (0.2 + uni(rng)) : 0.0;
        oc.strength = oc.model == Deformation::none ? 0.0 : 2e-4 * (0.5 + uni(rng));

        // random closed loop
        loops::LoopSpec loop;
        loop.name = "random";
        Rat nx(0), np(0);
        int steps = 4 + int(rng() % 3);
        double partial_max = 0, px = 0, pp = 0;
        for (int s = 0; s < steps; ++s) {
            loops::PulseStep st;
            st.axis = (s % 2 == 0) ? 'X' : 'P';
            st.scale = scales[rng() % 6];
            (st.axis == 'X' ? nx : np) += st.scale;
            (st.axis == 'X' ? px : pp) += st.scale.to_double();
            partial_max = std::max({partial_max, std::abs(px), std::abs(pp)});
            loop.steps.push_back(st);
        }
        if (!nx.is_zero()) {
            loop.steps.push_back({'X', -nx});
            px = 0;
        }
        if (!np.is_zero()) loop.steps.push_back({'P', -np});
        loop.validate();
        partial_max = std::max(partial_max, 1.0);

        // keep the mechanical excursion within a tractable cutoff
        double np_cap = std::pow(5.0 / (oc.lambda0 * partial_max), 2.0) / 4.0;
        oc.N_p = std::floor(4.0 + uni(rng) * (std::min(25.0, np_cap) - 4.0));
        if (oc.N_p < 4) continue;
        double n_top = oc.N_p + 10 * std::sqrt(oc.N_p);
        double chi_max = oc.lambda0 * partial_max * n_top / std::sqrt(2.0);
        int dim_mech = std::max(48, int(chi_max * chi_max + 8 * chi_max + 24));
        if (dim_mech > 120) continue;

        ExperimentParams p;
        p.N_p = oc.N_p;
        p.nbar = oc.nbar;
        p.finesse = oc.lambda0 * p.lambda_L / (4 * p.x0());
        p.cavity_length = oc.k > 0 ? p.x0() / oc.k : p.cavity_length;

        oracle::FockConfig cfg;
        cfg.dim_light = int(n_top) + 4;
        cfg.dim_mech = dim_mech;
        cfg.model = oc.model;
        cfg.strength = oc.strength;
        cfg.lambda0 = oc.lambda0;
        cfg.k = oc.k;
        cfg.k_order = oc.k > 0 ? 2 : 0;

        auto sim = oracle::simulate_loop(loop, cfg, std::sqrt(oc.N_p), oc.nbar);

        meanfield::EvalOptions opt;
        opt.model = oc.model;
        opt.qg_value =
            oc.model == Deformation::none ? 0.0 : oc.strength / deformation_scale(oc.model, p);
        auto composed = loops::compose(loop, oc.model, 6, cfg.k_order);
        TermWeights w = TermWeights::from(p, oc.model);
        w.qg = oc.strength;
        auto pruned = loops::prune_to_splittable(composed, w);
        auto exact = meanfield::exact_sum(pruned, p, opt, 10.0, meanfield::MechState::thermal,
                                          threads);
        auto budget = meanfield::saddle_phase(pruned, p, opt);

        double pruned_sum = 0;
        for (double m : pruned.provenance.pruned_magnitudes) pruned_sum += m;
        double saddle_corr = 0;
        for (const auto& it : budget.items)
            saddle_corr +=
                std::abs(it.phase) * double(it.n_power + 1) * double(it.n_power + 1) / p.N_p;
        double rep2 = oc.strength * oc.strength * oc.lambda0 * oc.lambda0 * oc.N_p * 4.0;

        oc.loop = loop;
        oc.oracle_phase = sim.phase;
        oc.exact_phase = exact.phase_principal;
        oc.saddle_ph = budget.total_phase();
        oc.exact_diff = std::abs(std::remainder(sim.phase - exact.phase, 2 * M_PI));
        oc.saddle_diff = std::abs(std::remainder(sim.phase - oc.saddle_ph, 2 * M_PI));
        oc.exact_tol = std::max(1e-6, 10 * (pruned_sum + rep2));
        oc.saddle_tol = std::max(1e-6, 10 * (pruned_sum + rep2 + saddle_corr));
        oc.pass = oc.exact_diff <= oc.exact_tol && oc.saddle_diff <= oc.saddle_tol;
        out.push_back(std::move(oc));
    }
    return out;
}

}  // namespace detail

std::string oracle_check_csv(unsigned seed, int n_loops, int threads) {
    auto comps = detail::oracle_comparison(seed, n_loops, threads);
    Table t;
    t.columns = {"model",      "lambda0",    "k",         "N_p",       "nbar",
                 "oracle",     "exact_sum",  "saddle",    "exact_diff", "exact_tol",
                 "saddle_diff", "saddle_tol", "pass"};
    for (const auto& oc : comps)
        t.rows.push_back({name(oc.model), fmt(oc.lambda0), fmt(oc.k), fmt(oc.N_p), fmt(oc.nbar),
                          fmt(oc.oracle_phase), fmt(oc.exact_phase), fmt(oc.saddle_ph),
                          fmt(oc.exact_diff), fmt(oc.exact_tol), fmt(oc.saddle_diff),
                          fmt(oc.saddle_tol), oc.pass ? "1" : "0"});
    return t.csv();
}

std::string sweep_csv(Deformation model, const std::string& loop_name,
                      const ExperimentParams& params, const std::vector<double>& r_grid) {
    ScenarioConfig c;
    c.model = model;
    c.loop_name = loop_name;
    c.params = params;
    c.r_grid = r_grid;
    return sweep_table(c).csv();
}

std::string table_csv(int which, int threads) {
    (void)threads;
    const std::pair<Deformation, const char*> models[] = {{Deformation::mu, "pikovski-mu"},
                                                          {Deformation::gamma, "pikovski-gamma"},
                                                          {Deformation::beta, "pikovski-beta"}};
    Table t;
    if (which == 1) {
        t.columns = {"preset", "finesse", "mass_kg", "omega_m", "lambda_L_m", "cavity_length_m",
                     "N_p", "lambda0", "k"};
        for (auto& [model, preset] : models) {
            ExperimentParams p = params_preset(preset);
            t.rows.push_back({preset, fmt(p.finesse), fmt(p.mass), fmt(p.omega_m),
                              fmt(p.lambda_L), fmt(p.cavity_length), fmt(p.N_p),
                              fmt(p.lambda0()), fmt(p.k())});
        }
        ExperimentParams p = params_preset("improved-mu");
        t.rows.push_back({"improved-mu", fmt(p.finesse), fmt(p.mass), fmt(p.omega_m),
                          fmt(p.lambda_L), fmt(p.cavity_length), fmt(p.N_p), fmt(p.lambda0()),
                          fmt(p.k())});
    } else if (which == 2) {
        t.columns = {"model", "qg_phase", "qm_leading", "qm_higher_order", "min_uncertainty"};
        for (auto& [model, preset] : models) {
            ExperimentParams p = params_preset(preset);
            meanfield::EvalOptions opt;
            opt.model = model;
            opt.beta_form = BetaForm::h_based;
            opt.n_runs = 1e4;
            auto exp = loops::prune_to_splittable(
                precision::preset_exponent("square", model),
                TermWeights::from(p, model, opt.beta_form));
            auto budget = meanfield::saddle_phase(exp, p, opt);
            double lead = 0, extras = 0;
            for (const auto& it : budget.items) {
                if (it.is_qg()) continue;
                (it.k_pow == 0 && it.lambda_pow == 2 ? lead : extras) += it.phase;
            }
            t.rows.push_back({name(model), fmt(budget.qg_phase()), fmt(lead), fmt(extras),
                              fmt(budget.min_uncertainty)});
        }
    } else if (which == 3) {
        t.columns = {"model", "scheme", "variance_per_run", "n_runs"};
        for (auto& [model, preset] : models) {
            for (NoiseScheme scheme : {NoiseScheme::quantum, NoiseScheme::classical}) {
                ExperimentParams p = params_preset(preset);
                p.scheme = scheme;
                auto rep = precision::propagate(model, "square", p);
                t.rows.push_back({name(model), name(scheme), fmt(rep.variance_per_run),
                                  fmt(rep.n_runs_unit_precision)});
            }
        }
    } else if (which == 4) {
        t.columns = {"case", "model", "leading_term", "coefficient"};
        struct Row {
            const char* label;
            Deformation model;
            robustness::FluctuationCase fc;
        };
        std::vector<Row> rows;
        for (auto& [model, preset] : models)
            rows.push_back({"one-of-four-opposite-x", model,
                            robustness::case_one_of_four(robustness::FluctPattern::opposite_x,
                                                          1e-4)});
        for (auto& [model, preset] : models)
            rows.push_back({"one-of-four-opposite-p", model,
                            robustness::case_one_of_four(robustness::FluctPattern::opposite_p,
                                                          1e-4)});
        rows.push_back({"all-opposite", Deformation::gamma, robustness::case_all_opposite(1e-4)});
        rows.push_back({"x-parallel", Deformation::gamma, robustness::case_x_parallel(1e-4)});
        rows.push_back({"p-parallel", Deformation::gamma, robustness::case_p_parallel(1e-4)});
        for (auto& row : rows) {
            ExperimentParams p = params_preset(row.model == Deformation::mu
                                                   ? "pikovski-mu"
                                                   : (row.model == Deformation::gamma
                                                          ? "pikovski-gamma"
                                                          : "pikovski-beta"));
            auto res = robustness::fluctuation_phase(row.model, row.fc, p);
            std::string lead = "eps^" + std::to_string(res.leading.eps_pow) + " k^" +
                               std::to_string(res.leading.k_pow) + " n^" +
                               std::to_string(res.leading.n_pow) + " lambda^" +
                               std::to_string(res.leading.lambda_pow - res.leading.eps_pow);
            t.rows.push_back({row.label, name(row.model), lead,
                              (Coeff::i() * res.leading_coefficient).str()});
        }
    } else {
        throw config_error("tables takes 1, 2, 3 or 4");
    }
    return t.csv();
}

std::vector<std::string> run(const ScenarioConfig& c) {
    c.params.validate();
    std::vector<std::string> written;
    for (const std::string& a : c.analyses) {
        Table t;
        if (a == "phase_budget") t = phase_budget_table(c);
        else if (a == "precision") t = precision_table(c);
        else if (a == "nr_vs_squeezing") t = sweep_table(c);
        else if (a == "design") t = design_table(c);
        else if (a == "robustness") t = robustness_table(c);
        else if (a == "oracle_check") {
            std::string csv = oracle_check_csv(c.seed, 8, c.threads);
            std::string path = c.output.path + "/oracle_check." + c.output.format;
            if (c.output.format == "csv") write_file_atomic(path, csv);
            else {
                // reparse rows into json mirror
                Table ot;
                std::istringstream ss(csv);
                std::string line;
                std::getline(ss, line);
                std::stringstream hs(line);
                std::string cell;
                while (std::getline(hs, cell, ',')) ot.columns.push_back(cell);
                while (std::getline(ss, line)) {
                    std::vector<std::string> row;
                    std::stringstream rs(line);
                    while (std::getline(rs, cell, ',')) row.push_back(cell);
                    ot.rows.push_back(row);
                }
                write_file_atomic(path, ot.as_json());
            }
            written.push_back(path);
            continue;
        } else {
            throw config_error("unknown analysis: " + a);
        }
        std::string path = c.output.path + "/" + a + "." + c.output.format;
        write_file_atomic(path, c.output.format == "csv" ? t.csv() : t.as_json());
        written.push_back(path);
    }
    return written;
}

}  // namespace qgrav::scenario
