// Acceptance suite: one pass/fail line per criterion, with the failing
// entries spelled out. Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "qgrav/designer.hpp"
#include "qgrav/meanfield.hpp"
#include "qgrav/oracle.hpp"
#include "qgrav/precision.hpp"
#include "qgrav/robustness.hpp"
#include "qgrav/scenario.hpp"

using namespace qgrav;

namespace {

struct Criterion {
    int id;
    bool pass = true;
    std::vector<std::string> notes;

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back(what);
        }
    }
    void expect_factor(double value, double expected, double factor, const std::string& what) {
        double v = std::abs(value);
        bool ok = v > 0 && v >= expected / factor && v <= expected * factor;
        char buf[160];
        snprintf(buf, sizeof buf, "%s: got %.3e, expected %.1e within x%.1f", what.c_str(), v,
                 expected, factor);
        expect(ok, buf);
    }
};

double now_s() {
    using clock = std::chrono::steady_clock;
    static auto t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

loops::LoopExponent splittable(const std::string& loop, Deformation model,
                               const ExperimentParams& p, BetaForm bf = BetaForm::hbar_based) {
    return loops::prune_to_splittable(precision::preset_exponent(loop, model),
                                      TermWeights::from(p, model, bf));
}

Coeff exact_at(const meanfield::PhaseBudget& b, int u, int lam, int k, int qg) {
    Coeff sum;
    for (const auto& it : b.items)
        if (it.n_power == u && it.lambda_pow == lam && it.k_pow == k && it.qg_pow == qg)
            sum += it.coefficient;
    return sum;
}

// ----- criterion 1: phase-magnitude table -------------------------------

Criterion criterion1() {
    Criterion c{1};
    struct Row {
        Deformation model;
        const char* preset;
        double qg, lead, extras;
    };
    const Row rows[] = {{Deformation::mu, "pikovski-mu", 1e-4, 4e2, 0.2},
                        {Deformation::gamma, "pikovski-gamma", 4e-9, 1e4, 45},
                        {Deformation::beta, "pikovski-beta", 3e-10, 1e6, 7e5}};
    for (const Row& row : rows) {
        ExperimentParams p = params_preset(row.preset);
        meanfield::EvalOptions opt;
        opt.model = row.model;
        opt.beta_form = BetaForm::h_based;
        auto budget =
            meanfield::saddle_phase(splittable("square", row.model, p, opt.beta_form), p, opt);
        double lead = 0, extras = 0;
        for (const auto& it : budget.items) {
            if (it.is_qg()) continue;
            (it.k_pow == 0 && it.lambda_pow == 2 ? lead : extras) += it.phase;
        }
        std::string nm = name(row.model);
        c.expect_factor(budget.qg_phase(), row.qg, 2.0, nm + " signal phase");
        c.expect_factor(lead, row.lead, 2.0, nm + " leading QM phase");
        c.expect_factor(extras, row.extras, 2.0, nm + " higher-order QM phase");
    }
    return c;
}

// ----- criterion 2: single-loop run counts ------------------------------

Criterion criterion2() {
    Criterion c{2};
    struct Row {
        Deformation model;
        const char* preset;
        double quantum, classical;
    };
    const Row rows[] = {{Deformation::mu, "pikovski-mu", 1e5, 1e5},
                        {Deformation::gamma, "pikovski-gamma", 1e14, 5e16},
                        {Deformation::beta, "pikovski-beta", 1e19, 1e25}};
    for (const Row& row : rows) {
        ExperimentParams p = params_preset(row.preset);
        auto q = precision::propagate(row.model, "square", p);
        p.scheme = NoiseScheme::classical;
        auto cl = precision::propagate(row.model, "square", p);
        std::string nm = name(row.model);
        c.expect_factor(q.variance_per_run, row.quantum, 3.0, nm + " quantum N_r");
        c.expect_factor(cl.variance_per_run, row.classical, 3.0, nm + " classical N_r");
    }
    return c;
}

// ----- criterion 3: composite gamma path --------------------------------

Criterion criterion3() {
    Criterion c{3};
    ExperimentParams p = params_preset("pikovski-gamma");
    auto q = precision::propagate(Deformation::gamma, "gamma-fourloop", p);
    p.scheme = NoiseScheme::classical;
    auto cl = precision::propagate(Deformation::gamma, "gamma-fourloop", p);
    c.expect_factor(q.variance_per_run, 6e5, 2.0, "four-loop variance (quantum)");
    c.expect_factor(cl.variance_per_run, 6e5, 2.0, "four-loop variance (classical)");
    double rel = std::abs(q.variance_per_run - cl.variance_per_run) /
                 std::abs(q.variance_per_run);
    {
        char buf[160];
        snprintf(buf, sizeof buf, "scheme identity: relative difference %.3e (< 1e-6 required)",
                 rel);
        c.expect(rel < 1e-6, buf);
    }
    p.scheme = NoiseScheme::quantum;
    std::vector<double> grid;
    for (double r = -4.0; r <= 1.0 + 1e-9; r += 0.1) grid.push_back(r);
    auto curve = precision::nr_vs_squeezing(Deformation::gamma, "gamma-fourloop", p, grid);
    size_t best = 0;
    for (size_t i = 1; i < curve.size(); ++i)
        if (curve[i].second < curve[best].second) best = i;
    {
        char buf[160];
        snprintf(buf, sizeof buf, "sweep minimum at r=%.2f (required in [-2.8, -1.8])",
                 curve[best].first);
        c.expect(curve[best].first > -2.8 && curve[best].first < -1.8, buf);
    }
    c.expect_factor(curve[best].second, 2e4, 3.0, "minimum N_r over squeezing");
    return c;
}

// ----- criterion 4: vertex-loop run counts ------------------------------

Criterion criterion4() {
    Criterion c{4};
    {
        ExperimentParams p = params_preset("pikovski-beta");
        auto q = precision::propagate(Deformation::beta, "beta-vertex", p);
        c.expect_factor(q.variance_per_run, 1e18, 3.0, "beta vertex quantum");
        p.scheme = NoiseScheme::classical;
        auto cl = precision::propagate(Deformation::beta, "beta-vertex", p);
        c.expect_factor(cl.variance_per_run, 1e24, 3.0, "beta vertex classical");
        p.r = 3.0;
        auto cls = precision::propagate(Deformation::beta, "beta-vertex", p);
        c.expect_factor(cls.variance_per_run, 1e21, 3.0, "beta vertex classical r=3");
        p.scheme = NoiseScheme::quantum;
        auto qs = precision::propagate(Deformation::beta, "beta-vertex", p);
        c.expect_factor(qs.variance_per_run, 1e15, 3.0, "beta vertex quantum r=3");
    }
    {
        ExperimentParams p = params_preset("improved-mu");
        auto q = precision::propagate(Deformation::mu, "mu-vertex", p);
        c.expect_factor(q.variance_per_run, 2.2, 3.0, "mu vertex quantum");
        p.scheme = NoiseScheme::classical;
        auto cl = precision::propagate(Deformation::mu, "mu-vertex", p);
        c.expect_factor(cl.variance_per_run, 22.0, 3.0, "mu vertex classical");
        p.scheme = NoiseScheme::quantum;
        p.r = -3.0;
        auto qs = precision::propagate(Deformation::mu, "mu-vertex", p);
        c.expect_factor(qs.variance_per_run, 1e-3, 3.0, "mu vertex quantum r=-3");
    }
    return c;
}

// ----- criterion 5: symbolic goldens ------------------------------------

Criterion criterion5() {
    Criterion c{5};
    auto isq = [](long long q, int ipow, int spow) { return Coeff::make(Rat(q), ipow, spow); };
    {
        auto e = loops::compose(loops::preset("square"), Deformation::none, 6, 2);
        Poly lad = to_ladder(e.exponent);
        c.expect(lad.coefficient({3, 0, 0, 1, 3, 0, 0}) == isq(2, 1, 0),
                 "square exponent n^3 coefficient (-2 k lam^3 under -i)");
        c.expect(lad.coefficient({4, 0, 0, 2, 4, 0, 0}) == isq(-4, 1, 0),
                 "square exponent n^4 coefficient (4 k^2 lam^4 under -i)");
        c.expect(lad.coefficient({2, 0, 1, 1, 2, 0, 0}) == isq(1, 0, 1) + isq(1, 1, 1),
                 "square exponent sqrt2 k lam^2 n^2 ladder term");
        c.expect(lad.coefficient({3, 0, 1, 2, 3, 0, 0}) == isq(-7, 0, -1) + isq(-7, 1, -1),
                 "square exponent (7/sqrt2) k^2 lam^3 n^3 ladder term");
    }
    {
        ExperimentParams p = params_preset("pikovski-gamma");
        meanfield::EvalOptions opt;
        opt.model = Deformation::gamma;
        auto budget =
            meanfield::saddle_phase(splittable("gamma-fourloop", Deformation::gamma, p), p, opt);
        c.expect(exact_at(budget, 2, 3, 0, 1) == Coeff(1), "four-loop signal coefficient 1");
        c.expect(exact_at(budget, 4, 5, 3, 0) == Coeff(Rat(-200, 3)),
                 "four-loop N^4 coefficient -200/3");
        c.expect(exact_at(budget, 5, 6, 4, 0) == Coeff(144), "four-loop N^5 coefficient 144");
        c.expect(exact_at(budget, 6, 7, 5, 0) == Coeff(Rat(4840, 9)),
                 "four-loop N^6 coefficient 4840/9");
    }
    return c;
}

// ----- criterion 6: oracle equivalence ----------------------------------

Criterion criterion6() {
    Criterion c{6};
    auto comps = scenario::detail::oracle_comparison(20250808, 50);
    int fails = 0;
    for (const auto& oc : comps) {
        if (!oc.pass) {
            ++fails;
            char buf[200];
            snprintf(buf, sizeof buf,
                     "%s loop lam=%.3f k=%.1e Np=%g: exact diff %.2e (tol %.2e), saddle diff "
                     "%.2e (tol %.2e)",
                     name(oc.model), oc.lambda0, oc.k, oc.N_p, oc.exact_diff, oc.exact_tol,
                     oc.saddle_diff, oc.saddle_tol);
            c.expect(false, buf);
        }
    }
    char buf[120];
    snprintf(buf, sizeof buf, "%d/%zu desk-scale loops agree within tolerance",
             (int)comps.size() - fails, comps.size());
    c.notes.insert(c.notes.begin(), buf);
    return c;
}

// ----- criterion 7: squeezed-state moments ------------------------------

Criterion criterion7() {
    Criterion c{7};
    for (double r : {-1.5, -0.7, 0.0, 0.8, 1.5}) {
        for (double a : {2.5, 4.0}) {
            auto cf = precision::squeezed_moments({a, 0.0}, r);
            int dim = std::max(340, int(cf.N_p + 16 * cf.dNp + 220));
            auto mm = oracle::squeezed_state_moments({a, 0.0}, r, dim);
            char what[96];
            snprintf(what, sizeof what, "alpha=%.1f r=%+.1f", a, r);
            c.expect(std::abs(mm.N_p - cf.N_p) < 1e-8, std::string(what) + " N_p");
            c.expect(std::abs(mm.dNp - cf.dNp) < 1e-8, std::string(what) + " dN_p");
            c.expect(std::abs(mm.dPhi - cf.dPhi) < 1e-8, std::string(what) + " dPhi");
        }
    }
    return c;
}

// ----- criterion 8: fluctuations and thresholds -------------------------

Criterion criterion8() {
    Criterion c{8};
    using robustness::FluctPattern;
    ExperimentParams gp = params_preset("pikovski-gamma");

    // leading fluctuation terms against the published six
    struct TermCheck {
        const char* label;
        Deformation model;
        robustness::FluctuationCase fc;
        int k_pow, n_pow;
        Rat coeff_times_i;  // magnitude of the published coefficient
    };
    std::vector<TermCheck> checks = {
        {"one-of-four (a), gamma", Deformation::gamma,
         robustness::case_one_of_four(FluctPattern::opposite_x, 0), 1, 3, Rat(4)},
        {"one-of-four (a), beta", Deformation::beta,
         robustness::case_one_of_four(FluctPattern::opposite_x, 0), 1, 3, Rat(4)},
        {"one-of-four (a), mu", Deformation::mu,
         robustness::case_one_of_four(FluctPattern::opposite_x, 0), 1, 3, Rat(4)},
        {"one-of-four (c), gamma", Deformation::gamma,
         robustness::case_one_of_four(FluctPattern::opposite_p, 0), 2, 4, Rat(1)},
        {"all-opposite, gamma", Deformation::gamma, robustness::case_all_opposite(0), 2, 4,
         Rat(16, 3)},
        {"p-parallel, gamma", Deformation::gamma, robustness::case_p_parallel(0), 2, 4,
         Rat(4, 3)},
    };
    for (auto& tc : checks) {
        auto res = robustness::fluctuation_phase(tc.model, tc.fc, gp);
        Coeff mag = Coeff::i() * res.leading_coefficient;
        bool shape_ok = res.leading.eps_pow == 3 && res.leading.k_pow == tc.k_pow &&
                        res.leading.n_pow == tc.n_pow;
        bool coeff_ok = mag == Coeff(tc.coeff_times_i) || mag == -Coeff(tc.coeff_times_i);
        char buf[200];
        snprintf(buf, sizeof buf,
                 "%s: leading term eps^%d k^%d n^%d coeff %s (published: k^%d n^%d coeff %s)",
                 tc.label, res.leading.eps_pow, res.leading.k_pow, res.leading.n_pow,
                 mag.str().c_str(), tc.k_pow, tc.n_pow, tc.coeff_times_i.str().c_str());
        c.expect(shape_ok && coeff_ok, buf);
    }

    // admissible fluctuation thresholds
    {
        double thr = robustness::epsilon_threshold(
            Deformation::gamma, robustness::case_one_of_four(FluctPattern::opposite_x, 0), gp);
        c.expect_factor(thr, 1e-4, 3.0, "gamma fluctuation threshold");
    }
    {
        ExperimentParams p = params_preset("pikovski-beta");
        double thr = robustness::epsilon_threshold(
            Deformation::beta, robustness::case_single_loop(FluctPattern::opposite_x, 0), p);
        c.expect_factor(thr, 1e-6, 3.0, "beta fluctuation threshold");
    }
    {
        ExperimentParams p = params_preset("pikovski-mu");
        double thr = robustness::epsilon_threshold(
            Deformation::mu, robustness::case_single_loop(FluctPattern::opposite_x, 0), p);
        bool ok = thr >= 1e2 / 3.0 && thr <= 1e3 * 3.0;
        char buf[120];
        snprintf(buf, sizeof buf, "mu fluctuation threshold: got %.3e, expected 1e2..1e3 x3",
                 thr);
        c.expect(ok, buf);
    }
    return c;
}

// ----- criterion 9: randomized invariant suites -------------------------

Criterion criterion9() {
    Criterion c{9};
    const int kRuns = 1000;
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> small(-3, 3);

    auto random_poly = [&](const AlgebraContext& ctx, int max_deg) {
        Poly p(ctx);
        int terms = 1 + int(rng() % 3);
        for (int t = 0; t < terms; ++t) {
            Mono m;
            m.n_pow = int(rng() % (max_deg + 1));
            m.l_pow = int(rng() % (max_deg + 1));
            m.r_pow = int(rng() % (max_deg + 1));
            m.lambda_pow = 1;
            p.add_term(m, Coeff(Rat(small(rng)), Rat(small(rng))));
        }
        return p;
    };

    {  // antisymmetry across all models
        int bad = 0;
        for (int it = 0; it < kRuns; ++it) {
            Deformation mdl = Deformation(1 + it % 3);
            AlgebraContext ctx{Basis::quadrature, mdl, Truncation{}};
            Poly a = random_poly(ctx, 2), b = random_poly(ctx, 2);
            if (!(commutator(a, b) == -commutator(b, a))) ++bad;
        }
        c.expect(bad == 0, "antisymmetry failures: " + std::to_string(bad));
    }
    {  // Jacobi identity for the undeformed model
        int bad = 0;
        Truncation t;
        t.max_word_length = 9;
        AlgebraContext ctx{Basis::quadrature, Deformation::none, t};
        for (int it = 0; it < kRuns; ++it) {
            Poly a = random_poly(ctx, 2), b = random_poly(ctx, 2), cc = random_poly(ctx, 2);
            Poly j = commutator(a, commutator(b, cc)) + commutator(b, commutator(cc, a)) +
                     commutator(cc, commutator(a, b));
            if (!j.empty()) ++bad;
        }
        c.expect(bad == 0, "jacobi failures: " + std::to_string(bad));
    }
    {  // loop closure at zero cavity ratio
        const Rat scales[6] = {Rat(1), Rat(-1), Rat(1, 2), Rat(-1, 2), Rat(1, 3), Rat(-1, 3)};
        int bad = 0;
        for (int it = 0; it < kRuns; ++it) {
            loops::LoopSpec loop;
            loop.name = "rnd";
            Rat nx(0), np(0);
            for (int s = 0; s < 4; ++s) {
                loops::PulseStep st;
                st.axis = (s % 2 == 0) ? 'X' : 'P';
                st.scale = scales[rng() % 6];
                (st.axis == 'X' ? nx : np) += st.scale;
                loop.steps.push_back(st);
            }
            if (!nx.is_zero()) loop.steps.push_back({'X', -nx});
            if (!np.is_zero()) loop.steps.push_back({'P', -np});
            auto e = loops::compose(loop, Deformation::none, 4, 0);
            bool pure = true;
            e.exponent.for_each([&](const Mono& m, const Coeff&) {
                if (m.word_length() != 0) pure = false;
            });
            if (!pure) ++bad;
        }
        c.expect(bad == 0, "closure failures: " + std::to_string(bad));
    }
    {  // oracle unitarity
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        int bad = 0;
        for (int it = 0; it < kRuns; ++it) {
            oracle::FockConfig cfg;
            cfg.dim_light = 12;
            cfg.dim_mech = 10 + int(rng() % 8);
            cfg.lambda0 = 0.01 + 0.05 * uni(rng);
            cfg.k = 1e-3 * uni(rng);
            cfg.k_order = int(rng() % 3);
            cfg.model = Deformation(int(rng() % 4));
            cfg.strength = cfg.model == Deformation::none ? 0.0 : 1e-4 * uni(rng);
            if (oracle::unitarity_defect(loops::preset("square"), cfg, 8) > 1e-9) ++bad;
        }
        c.expect(bad == 0, "unitarity failures: " + std::to_string(bad));
    }
    {  // mean-field normalization on random splittable exponents
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        int bad = 0;
        AlgebraContext ctx{Basis::ladder, Deformation::none, Truncation{}};
        for (int it = 0; it < kRuns; ++it) {
            ExperimentParams p;
            p.N_p = 50 + 900 * uni(rng);
            p.nbar = 2 * uni(rng);
            loops::LoopExponent e;
            e.exponent = Poly(ctx);
            e.exponent.add_term({2, 0, 0, 0, 2, 0, 0},
                                Coeff::make(Rat(-(1 + (long long)(rng() % 4))), 1, 0));
            Coeff g(Rat(small(rng)), Rat(small(rng)));
            if (!g.is_zero()) {
                e.exponent.add_term({2, 0, 1, 1, 2, 0, 0}, -g);
                e.exponent.add_term({2, 1, 0, 1, 2, 0, 0}, g.conj());
            }
            meanfield::EvalOptions opt;
            auto res = meanfield::exact_sum(e, p, opt, 8.0);
            if (res.amplitude > std::sqrt(p.N_p) * (1 + 1e-9)) ++bad;
        }
        c.expect(bad == 0, "normalization failures: " + std::to_string(bad));
    }
    {  // inversion soundness across presets and models
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        int bad = 0;
        const char* loops_for[4] = {nullptr, "beta-vertex", "gamma-fourloop", "mu-vertex"};
        for (int it = 0; it < kRuns; ++it) {
            Deformation mdl = Deformation(1 + it % 3);
            ExperimentParams p = params_preset(mdl == Deformation::mu ? "improved-mu"
                                               : mdl == Deformation::gamma ? "pikovski-gamma"
                                                                           : "pikovski-beta");
            p.N_p *= 0.5 + uni(rng);
            meanfield::EvalOptions opt;
            opt.model = mdl;
            opt.beta_form = BetaForm::h_based;
            auto budget = meanfield::saddle_phase(
                splittable(loops_for[int(mdl)], mdl, p, opt.beta_form), p, opt);
            double G = 0, Q = 0;
            for (const auto& itb : budget.items) (itb.is_qg() ? G : Q) += itb.phase;
            double p0 = -2.0 + 4.0 * uni(rng);
            double recovered = (p0 * G + Q - Q) / G;
            // float round-trip error grows with the conditioning Q/G
            double tol = 1e-12 * (1.0 + std::abs(Q / G)) + 1e-9;
            if (std::abs(recovered - p0) > tol * std::max(1.0, std::abs(p0))) ++bad;
        }
        c.expect(bad == 0, "inversion failures: " + std::to_string(bad));
    }
    {  // determinism of ranking and windowed sums
        int bad = 0;
        ExperimentParams p = params_preset("pikovski-gamma");
        p.N_p = 1e6;
        auto exp = splittable("square", Deformation::gamma, p);
        meanfield::EvalOptions opt;
        opt.model = Deformation::gamma;
        auto ref = meanfield::exact_sum(exp, p, opt, 8.0, meanfield::MechState::thermal, 1);
        for (int it = 0; it < kRuns; ++it) {
            int threads = 1 + it % 4;
            auto res = meanfield::exact_sum(exp, p, opt, 8.0, meanfield::MechState::thermal,
                                            threads);
            if (res.phase != ref.phase || res.amplitude != ref.amplitude) ++bad;
        }
        c.expect(bad == 0, "determinism failures: " + std::to_string(bad));
    }
    return c;
}

}  // namespace

int main() {
    int failed = 0;
    struct Entry {
        const char* label;
        Criterion (*run)();
    };
    const Entry entries[] = {
        {"phase-magnitude table reproduction", criterion1},
        {"single-loop run-count table reproduction", criterion2},
        {"composite gamma path precision", criterion3},
        {"vertex-loop precision (beta, improved mu)", criterion4},
        {"exact symbolic coefficients", criterion5},
        {"oracle equivalence at desk scale", criterion6},
        {"squeezed-state moments vs dense states", criterion7},
        {"fluctuation terms and admissible thresholds", criterion8},
        {"randomized invariant suites (1000 each)", criterion9},
    };
    for (const Entry& e : entries) {
        double t0 = now_s();
        Criterion crit = e.run();
        double dt = now_s() - t0;
        printf("[%s] criterion %d: %s (%.1fs)\n", crit.pass ? "PASS" : "FAIL", crit.id, e.label,
               dt);
        for (const std::string& n : crit.notes) printf("         - %s\n", n.c_str());
        if (!crit.pass) ++failed;
        fflush(stdout);
    }
    printf("%d/9 criteria passed\n", 9 - failed);
    return failed;
}
