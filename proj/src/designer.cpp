#include "qgrav/designer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace qgrav::designer {

namespace {

constexpr size_t kMaxLoops = 4;

template <class C>
std::pair<PolyT<C>, PolyT<C>> hamiltonians(int k_order, const AlgebraContext& ctx) {
    PolyT<C> hx(ctx), hp(ctx);
    for (int j = 0; j <= k_order; ++j) {
        C c = scalar_traits<C>::from_rat(Rat(j % 2 == 0 ? 1 : -1));
        hx.add_term({1, 0, j + 1, j, 1, 0, 0}, c);
        hp.add_term({1, j + 1, 0, j, 1, 0, 0}, c);
    }
    return {hx, hp};
}

// five-pulse list of a family member with numeric parameters
struct NumStep {
    char axis;
    double scale;
};
std::vector<NumStep> family_steps(Family fam, double a, double b, double c) {
    if (fam == Family::U_X)
        return {{'X', -a}, {'P', -c}, {'X', b}, {'P', c}, {'X', -(b - a)}};
    return {{'P', a}, {'X', -c}, {'P', -b}, {'X', c}, {'P', b - a}};
}

// composite exponent over complex<double> coefficients at a numeric point
PolyD compose_numeric(const DesignProblem& problem, const std::vector<double>& x, int bch_order,
                      int k_order) {
    Truncation trunc;
    trunc.max_lambda_power = bch_order;
    AlgebraContext ctx{Basis::quadrature, problem.model, trunc};
    auto [hx, hp] = hamiltonians<std::complex<double>>(k_order, ctx);
    PolyD total(ctx);
    bool first_loop = true;
    for (size_t li = 0; li < problem.loops.size(); ++li) {
        PolyD z(ctx);
        bool first = true;
        for (const NumStep& st :
             family_steps(problem.loops[li].family, x[3 * li], x[3 * li + 1], x[3 * li + 2])) {
            const PolyD& h = st.axis == 'X' ? hx : hp;
            PolyD s = h.scaled(std::complex<double>(0, st.scale));
            if (first) {
                z = std::move(s);
                first = false;
            } else {
                z = bch_combine(z, s, bch_order);
            }
        }
        if (problem.dagger[li]) z = -z;
        if (first_loop) {
            total = std::move(z);
            first_loop = false;
        } else {
            total = bch_combine(total, z, bch_order);
        }
    }
    return total;
}

double magnitude(const Mono& m, double abs_coeff, const TermWeights& w) {
    return w.term_magnitude(m, abs_coeff);
}

}  // namespace

loops::LoopSpec realize(const ParamLoop& pl) {
    loops::LoopSpec spec;
    spec.name = pl.family == Family::U_X ? "u_x" : "u_p";
    auto push = [&](char axis, Rat scale) {
        if (!scale.is_zero()) spec.steps.push_back({axis, scale});
    };
    if (pl.family == Family::U_X) {
        push('X', -pl.a);
        push('P', -pl.c);
        push('X', pl.b);
        push('P', pl.c);
        push('X', -(pl.b - pl.a));
    } else {
        push('P', pl.a);
        push('X', -pl.c);
        push('P', -pl.b);
        push('X', pl.c);
        push('P', pl.b - pl.a);
    }
    spec.validate();
    return spec;
}

Poly compose_parametric(const DesignProblem& problem, int bch_order, int k_order) {
    if (problem.loops.empty() || problem.loops.size() > kMaxLoops)
        throw symbolic_budget_exceeded("parametric composition supports 1 to 4 loops");
    if (problem.loops.size() != problem.dagger.size())
        throw config_error("dagger flags must match the loop count");
    std::vector<loops::LoopSpec> parts;
    for (const ParamLoop& pl : problem.loops) parts.push_back(realize(pl));
    return loops::compose_parts(parts, problem.dagger, problem.model, bch_order, bch_order,
                                k_order)
        .exponent;
}

std::vector<RankedTerm> order_terms(const Poly& exponent, const ExperimentParams& params,
                                    Deformation model) {
    TermWeights w = TermWeights::from(params, model);
    std::vector<RankedTerm> out;
    exponent.for_each([&](const Mono& m, const Coeff& c) {
        out.push_back({m, c, magnitude(m, std::abs(c.to_complex()), w)});
    });
    std::sort(out.begin(), out.end(), [](const RankedTerm& a, const RankedTerm& b) {
        if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
        return a.mono.key() < b.mono.key();  // deterministic tie break
    });
    return out;
}

std::vector<Solution> solve_cancellation(const DesignProblem& problem,
                                         const SolveOptions& options) {
    if (problem.loops.empty() || problem.loops.size() > kMaxLoops)
        throw symbolic_budget_exceeded("cancellation solving supports 1 to 4 loops");
    if (problem.m_targets < 0) throw config_error("m_targets must be non-negative");
    const size_t dim = 3 * problem.loops.size();
    TermWeights w = TermWeights::from(problem.ordering_params, problem.model);

    // reference signal coefficient: the plain square loop
    double qg_ref = 0;
    {
        DesignProblem square;
        square.loops = {ParamLoop{Family::U_P, Rat(1), Rat(1), Rat(1)}};
        square.dagger = {false};
        square.model = problem.model;
        PolyD sq = compose_numeric(square, {1, 1, 1}, options.bch_order, options.k_order);
        sq.for_each([&](const Mono& m, const std::complex<double>& c) {
            if (m.qg_pow) qg_ref += magnitude(m, std::abs(c), w);
        });
    }
    if (qg_ref == 0) throw config_error("square reference carries no signal coefficient");

    // target monomials: top-m QM terms at a generic parameter point, each
    // normalized by its magnitude there so the objective starts at O(1)
    std::vector<uint32_t> targets;
    std::vector<double> target_scale;
    {
        std::vector<double> generic(dim);
        for (size_t i = 0; i < dim; ++i) generic[i] = 1.0 + 0.1 * double(i) + 0.013 * double(i * i);
        PolyD g = compose_numeric(problem, generic, options.bch_order, options.k_order);
        std::vector<RankedTerm> ranked;
        g.for_each([&](const Mono& m, const std::complex<double>& c) {
            if (m.qg_pow == 0) ranked.push_back({m, Coeff(), magnitude(m, std::abs(c), w)});
        });
        std::sort(ranked.begin(), ranked.end(), [](const RankedTerm& a, const RankedTerm& b) {
            if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
            return a.mono.key() < b.mono.key();
        });
        for (int i = 0; i < problem.m_targets && i < (int)ranked.size(); ++i) {
            targets.push_back(ranked[i].mono.key());
            target_scale.push_back(1.0 / std::max(ranked[i].magnitude, 1e-300));
        }
    }

    auto objective = [&](const std::vector<double>& x) {
        PolyD z = compose_numeric(problem, x, options.bch_order, options.k_order);
        double f = 0;
        for (size_t t = 0; t < targets.size(); ++t) {
            Mono m = Mono::from_key(targets[t]);
            double mag = magnitude(m, std::abs(z.coefficient(m)), w) * target_scale[t];
            f += mag * mag;
        }
        double qg = 0;
        z.for_each([&](const Mono& m, const std::complex<double>& c) {
            if (m.qg_pow) qg += magnitude(m, std::abs(c), w);
        });
        double floor = options.qg_floor_fraction * qg_ref;
        if (qg < floor) f += (floor - qg) / std::max(qg_ref, 1e-300);
        return f;
    };

    // smooth residual vector for the Gauss-Newton polish: real and imaginary
    // parts of each target coefficient, scaled like the ranking magnitudes
    auto residuals = [&](const std::vector<double>& x) {
        PolyD z = compose_numeric(problem, x, options.bch_order, options.k_order);
        std::vector<double> r;
        r.reserve(2 * targets.size());
        for (size_t t = 0; t < targets.size(); ++t) {
            Mono m = Mono::from_key(targets[t]);
            double scale = magnitude(m, 1.0, w) * target_scale[t];
            std::complex<double> c = z.coefficient(m);
            r.push_back(c.real() * scale);
            r.push_back(c.imag() * scale);
        }
        return r;
    };
    auto polish = [&](std::vector<double> x) {
        const size_t n = x.size();
        double lm = 1e-8;
        for (int it = 0; it < 30; ++it) {
            std::vector<double> r0 = residuals(x);
            double ssq = 0;
            for (double v : r0) ssq += v * v;
            if (ssq < 1e-28) break;
            const size_t m = r0.size();
            // finite-difference Jacobian
            std::vector<std::vector<double>> jac(m, std::vector<double>(n, 0.0));
            for (size_t j = 0; j < n; ++j) {
                auto xp = x;
                double h = 1e-6 * (1.0 + std::abs(x[j]));
                xp[j] += h;
                auto rp = residuals(xp);
                for (size_t i = 0; i < m; ++i) jac[i][j] = (rp[i] - r0[i]) / h;
            }
            // damped normal equations
            std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
            std::vector<double> b(n, 0.0);
            for (size_t i = 0; i < m; ++i)
                for (size_t j = 0; j < n; ++j) {
                    b[j] -= jac[i][j] * r0[i];
                    for (size_t kk = 0; kk < n; ++kk) a[j][kk] += jac[i][j] * jac[i][kk];
                }
            for (size_t j = 0; j < n; ++j) a[j][j] += lm;
            // gaussian elimination
            for (size_t col = 0; col < n; ++col) {
                size_t piv = col;
                for (size_t i = col + 1; i < n; ++i)
                    if (std::abs(a[i][col]) > std::abs(a[piv][col])) piv = i;
                std::swap(a[col], a[piv]);
                std::swap(b[col], b[piv]);
                if (std::abs(a[col][col]) < 1e-300) return x;
                for (size_t i = col + 1; i < n; ++i) {
                    double f = a[i][col] / a[col][col];
                    for (size_t kk = col; kk < n; ++kk) a[i][kk] -= f * a[col][kk];
                    b[i] -= f * b[col];
                }
            }
            std::vector<double> dx(n, 0.0);
            for (size_t col = n; col-- > 0;) {
                double s = b[col];
                for (size_t kk = col + 1; kk < n; ++kk) s -= a[col][kk] * dx[kk];
                dx[col] = s / a[col][col];
            }
            std::vector<double> xn = x;
            for (size_t j = 0; j < n; ++j) xn[j] += dx[j];
            auto rn = residuals(xn);
            double ssqn = 0;
            for (double v : rn) ssqn += v * v;
            if (ssqn < ssq) {
                x = xn;
                lm = std::max(lm * 0.3, 1e-12);
            } else {
                lm *= 10;
                if (lm > 1e4) break;
            }
        }
        return x;
    };

    // Nelder-Mead from many deterministic starts
    std::mt19937 rng(options.seed);
    std::uniform_real_distribution<double> uni(-options.box, options.box);
    std::vector<Solution> found;

    auto nelder_mead = [&](std::vector<double> x0) {
        const double alpha = 1.0, gamma_e = 2.0, rho = 0.5, sigma = 0.5;
        size_t n = x0.size();
        std::vector<std::pair<double, std::vector<double>>> simplex;
        simplex.push_back({objective(x0), x0});
        for (size_t i = 0; i < n; ++i) {
            auto v = x0;
            v[i] += 0.25;
            simplex.push_back({objective(v), v});
        }
        for (int it = 0; it < options.max_iterations; ++it) {
            std::sort(simplex.begin(), simplex.end(),
                      [](auto& a, auto& b) { return a.first < b.first; });
            if (simplex.front().first < options.residual_tol * 1e-4) break;
            if (std::abs(simplex.front().first - simplex.back().first) <
                1e-16 * (1 + simplex.front().first))
                break;
            std::vector<double> centroid(n, 0.0);
            for (size_t i = 0; i < n; ++i)
                for (size_t j = 0; j + 1 < simplex.size(); ++j)
                    centroid[i] += simplex[j].second[i] / double(n);
            auto blend = [&](double t) {
                std::vector<double> v(n);
                for (size_t i = 0; i < n; ++i)
                    v[i] = centroid[i] + t * (centroid[i] - simplex.back().second[i]);
                return v;
            };
            auto xr = blend(alpha);
            double fr = objective(xr);
            if (fr < simplex.front().first) {
                auto xe = blend(gamma_e);
                double fe = objective(xe);
                simplex.back() = fe < fr ? std::make_pair(fe, xe) : std::make_pair(fr, xr);
            } else if (fr < simplex[simplex.size() - 2].first) {
                simplex.back() = {fr, xr};
            } else {
                auto xc = blend(-rho);
                double fc = objective(xc);
                if (fc < simplex.back().first) simplex.back() = {fc, xc};
                else
                    for (size_t j = 1; j < simplex.size(); ++j) {
                        for (size_t i = 0; i < n; ++i)
                            simplex[j].second[i] = simplex[0].second[i] +
                                                   sigma * (simplex[j].second[i] -
                                                            simplex[0].second[i]);
                        simplex[j].first = objective(simplex[j].second);
                    }
            }
        }
        std::sort(simplex.begin(), simplex.end(),
                  [](auto& a, auto& b) { return a.first < b.first; });
        return simplex.front();
    };

    auto rationalize = [&](double v) -> std::optional<Rat> {
        // continued fractions with bounded denominator
        long long p0 = 1, q0 = 0, p1 = (long long)std::floor(v), q1 = 1;
        double x = v;
        for (int i = 0; i < 24; ++i) {
            double frac = x - std::floor(x);
            if (std::abs(double(p1) / double(q1) - v) < 1e-9) break;
            if (frac < 1e-12) break;
            x = 1.0 / frac;
            long long a = (long long)std::floor(x);
            long long p2 = a * p1 + p0, q2 = a * q1 + q0;
            if (q2 > options.max_rational_den) break;
            p0 = p1;
            q0 = q1;
            p1 = p2;
            q1 = q2;
        }
        if (q1 <= options.max_rational_den && std::abs(double(p1) / double(q1) - v) < 1e-6)
            return Rat(p1, q1);
        return std::nullopt;
    };

    auto verify_exact = [&](const std::vector<Rat>& params) -> std::optional<Solution> {
        DesignProblem exact = problem;
        for (size_t li = 0; li < exact.loops.size(); ++li) {
            exact.loops[li].a = params[3 * li];
            exact.loops[li].b = params[3 * li + 1];
            exact.loops[li].c = params[3 * li + 2];
        }
        Poly z;
        try {
            z = compose_parametric(exact, options.bch_order, options.k_order);
        } catch (const config_error&) {
            return std::nullopt;  // degenerate loop (zero-scale pulse)
        }
        for (uint32_t key : targets)
            if (!z.coefficient(Mono::from_key(key)).is_zero()) return std::nullopt;
        double qg = 0;
        z.for_each([&](const Mono& m, const Coeff& c) {
            if (m.qg_pow) qg += magnitude(m, std::abs(c.to_complex()), w);
        });
        if (qg < options.qg_floor_fraction * qg_ref) return std::nullopt;
        Solution s;
        s.params = params;
        s.exact = true;
        s.residual = 0.0;
        for (size_t li = 0; li < exact.loops.size(); ++li) {
            s.values.push_back(params[3 * li].to_double());
            s.values.push_back(params[3 * li + 1].to_double());
            s.values.push_back(params[3 * li + 2].to_double());
            s.as_loops.push_back(realize(exact.loops[li]));
        }
        return s;
    };

    if (problem.m_targets == 0) {
        // nothing to cancel: the plain rectangle qualifies
        std::vector<Rat> params;
        for (size_t li = 0; li < problem.loops.size(); ++li) {
            params.push_back(Rat(1));
            params.push_back(Rat(1));
            params.push_back(Rat(1));
        }
        if (auto s = verify_exact(params)) return {*s};
        throw no_solution("signal floor unreachable even without targets", 0);
    }

    for (int start = 0; start < options.n_starts; ++start) {
        std::vector<double> x0(dim);
        for (double& v : x0) v = uni(rng);
        auto [fbest, xbest] = nelder_mead(x0);
        if (fbest > 1e-2) continue;   // nowhere near the manifold
        xbest = polish(xbest);
        fbest = objective(xbest);
        // a nearby rational point may verify exactly even when the float
        // optimum is only loosely converged
        if (fbest > std::max(options.residual_tol, 1e-7)) continue;
        std::vector<Rat> rat;
        bool all_rational = true;
        for (double v : xbest) {
            auto r = rationalize(v);
            if (!r) {
                all_rational = false;
                break;
            }
            rat.push_back(*r);
        }
        if (all_rational) {
            if (auto s = verify_exact(rat)) {
                found.push_back(*s);
                continue;
            }
        }
        if (fbest > options.residual_tol) continue;
        Solution s;
        s.values = xbest;
        s.exact = false;
        s.residual = fbest;
        found.push_back(std::move(s));
    }

    // deterministic dedup on sorted parameter tuples
    std::sort(found.begin(), found.end(), [](const Solution& a, const Solution& b) {
        return a.values < b.values;
    });
    std::vector<Solution> unique;
    for (auto& s : found) {
        bool dup = false;
        for (const auto& u : unique) {
            double d = 0;
            for (size_t i = 0; i < s.values.size(); ++i)
                d = std::max(d, std::abs(s.values[i] - u.values[i]));
            if (d < 1e-6) {
                dup = true;
                break;
            }
        }
        if (!dup) unique.push_back(std::move(s));
    }
    if (unique.empty()) {
        // report the largest feasible target count
        int max_m = 0;
        for (int m = problem.m_targets - 1; m >= 1; --m) {
            DesignProblem relaxed = problem;
            relaxed.m_targets = m;
            SolveOptions cheap = options;
            cheap.n_starts = std::max(8, options.n_starts / 4);
            if (!solve_cancellation(relaxed, cheap).empty()) {
                max_m = m;
                break;
            }
        }
        throw no_solution("no parameter set cancels the requested terms", max_m);
    }
    return unique;
}

}  // namespace qgrav::designer
