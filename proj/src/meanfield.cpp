#include "qgrav/meanfield.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace qgrav::meanfield {

namespace {

// dense polynomial in the photon number n
struct NPoly {
    std::vector<cdbl> c;

    double eval_im(double n) const {
        double v = 0;
        for (size_t i = c.size(); i-- > 0;) v = v * n + c[i].imag();
        return v;
    }
    double eval_re(double n) const {
        double v = 0;
        for (size_t i = c.size(); i-- > 0;) v = v * n + c[i].real();
        return v;
    }
    void add(int pow, cdbl v) {
        if (int(c.size()) <= pow) c.resize(pow + 1, cdbl{0, 0});
        c[pow] += v;
    }
    NPoly operator+(const NPoly& o) const {
        NPoly r = *this;
        for (size_t i = 0; i < o.c.size(); ++i) r.add(int(i), o.c[i]);
        return r;
    }
    NPoly operator*(const NPoly& o) const {
        NPoly r;
        if (c.empty() || o.c.empty()) return r;
        r.c.assign(c.size() + o.c.size() - 1, cdbl{0, 0});
        for (size_t i = 0; i < c.size(); ++i)
            for (size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
        return r;
    }
    NPoly scaled(cdbl s) const {
        NPoly r = *this;
        for (auto& v : r.c) v *= s;
        return r;
    }
    // p(n+1) via binomial expansion, so differences never cancel
    // catastrophically at large n
    NPoly shifted() const {
        NPoly r;
        r.c.assign(c.size(), cdbl{0, 0});
        for (size_t m = 0; m < c.size(); ++m) {
            double binom = 1.0;
            for (size_t j = 0; j <= m; ++j) {
                r.c[j] += c[m] * binom;
                binom = binom * double(m - j) / double(j + 1);
            }
        }
        return r;
    }
    NPoly delta() const {
        NPoly r = shifted();
        for (size_t i = 0; i < c.size(); ++i) r.c[i] -= c[i];
        return r;
    }
    NPoly re_part() const {
        NPoly r = *this;
        for (auto& v : r.c) v = cdbl{v.real(), 0};
        return r;
    }
    NPoly im_part() const {
        NPoly r = *this;
        for (auto& v : r.c) v = cdbl{v.imag(), 0};
        return r;
    }
};

double grading_weight(int lambda_pow, int k_pow, int qg_pow, int eps_pow,
                      const ExperimentParams& p, const EvalOptions& opt) {
    double w = std::pow(p.lambda0(), lambda_pow) * std::pow(p.k(), k_pow);
    if (qg_pow) w *= deformation_scale(opt.model, p, opt.beta_form) * opt.qg_value;
    if (eps_pow) w *= std::pow(opt.eps_value, eps_pow);
    return w;
}

struct NumericSplit {
    NPoly S;                // pure-n exponent
    std::map<int, cdbl> g;  // displacement amplitudes
};

NumericSplit numeric_split(const SplitForm& sf, const ExperimentParams& p,
                           const EvalOptions& opt) {
    NumericSplit ns;
    sf.pure_n.for_each([&](const Mono& m, const Coeff& c) {
        ns.S.add(m.n_pow, c.to_complex() * grading_weight(m.lambda_pow, m.k_pow, m.qg_pow,
                                                          m.eps_pow, p, opt));
    });
    double qg = deformation_scale(opt.model, p, opt.beta_form) * opt.qg_value;
    for (const auto& [j, amp] : sf.g) {
        cdbl v = amp.numeric(p.lambda0(), p.k(), qg, opt.eps_value);
        if (v != cdbl{0, 0}) ns.g[j] = v;
    }
    return ns;
}

std::string grading_tag(int lambda_pow, int k_pow, int qg_pow, int eps_pow) {
    std::string s;
    auto app = [&](const char* nm, int pw) {
        if (pw > 0) {
            if (!s.empty()) s += " ";
            s += nm;
            if (pw > 1) s += "^" + std::to_string(pw);
        }
    };
    app("qg", qg_pow);
    app("lambda0", lambda_pow);
    app("k", k_pow);
    app("eps", eps_pow);
    return s;
}

SplitForm ladder_split(const loops::LoopExponent& exp) {
    Poly lad = exp.exponent.context().basis == Basis::ladder ? exp.exponent
                                                             : to_ladder(exp.exponent);
    return split_ladder_exponent(lad);
}

}  // namespace

PhaseBudget saddle_phase(const loops::LoopExponent& exp, const ExperimentParams& params,
                         const EvalOptions& opt) {
    SplitForm sf = ladder_split(exp);

    PhaseBudget budget;
    budget.model = opt.model;
    budget.min_uncertainty = loops::min_phase_uncertainty(params.N_p, opt.n_runs);

    const double N = params.N_p;

    // pure-n terms: c_m n^m contributes m c_m N^(m-1)
    sf.pure_n.for_each([&](const Mono& m, const Coeff& d) {
        if (m.n_pow == 0) return;  // a constant phase cancels between U and U^dag
        PhaseItem it;
        it.coefficient = (Coeff::i() * d) * Coeff(Rat(m.n_pow));
        it.n_power = m.n_pow - 1;
        it.lambda_pow = m.lambda_pow;
        it.k_pow = m.k_pow;
        it.qg_pow = m.qg_pow;
        it.eps_pow = m.eps_pow;
        it.phase = it.coefficient.to_complex().real() *
                   grading_weight(m.lambda_pow, m.k_pow, m.qg_pow, m.eps_pow, params, opt) *
                   std::pow(N, it.n_power);
        it.descriptor = "pure n^" + std::to_string(m.n_pow) + " [" +
                        grading_tag(m.lambda_pow, m.k_pow, m.qg_pow, m.eps_pow) + "]";
        budget.items.push_back(std::move(it));
    });

    // displacement pairs: (l-j) Im(g_j^* g_l) N^(j+l-1)
    for (auto it1 = sf.g.begin(); it1 != sf.g.end(); ++it1) {
        for (auto it2 = std::next(it1); it2 != sf.g.end(); ++it2) {
            int j = it1->first, l = it2->first;
            for (const auto& [ka, ca] : it1->second.parts) {
                for (const auto& [kb, cb] : it2->second.parts) {
                    int qg = std::get<2>(ka) + std::get<2>(kb);
                    if (qg > 1) continue;
                    Coeff z = ca.conj() * cb;
                    Coeff im;
                    im.a = z.c;  // Im(z) as a real element of Q(sqrt2)
                    im.b = z.d;
                    if (im.is_zero()) continue;
                    PhaseItem item;
                    item.coefficient = im * Coeff(Rat(l - j));
                    item.n_power = j + l - 1;
                    item.lambda_pow = std::get<0>(ka) + std::get<0>(kb);
                    item.k_pow = std::get<1>(ka) + std::get<1>(kb);
                    item.qg_pow = qg;
                    item.eps_pow = std::get<3>(ka) + std::get<3>(kb);
                    item.phase = item.coefficient.to_complex().real() *
                                 grading_weight(item.lambda_pow, item.k_pow, item.qg_pow,
                                                item.eps_pow, params, opt) *
                                 std::pow(N, item.n_power);
                    item.descriptor = "cross(" + std::to_string(j) + "," + std::to_string(l) +
                                      ") [" +
                                      grading_tag(item.lambda_pow, item.k_pow, item.qg_pow,
                                                  item.eps_pow) +
                                      "]";
                    budget.items.push_back(std::move(item));
                }
            }
        }
    }
    return budget;
}

MeanFieldResult saddle_result(const loops::LoopExponent& exp, const ExperimentParams& params,
                              const EvalOptions& opt) {
    SplitForm sf = ladder_split(exp);
    NumericSplit ns = numeric_split(sf, params, opt);
    PhaseBudget budget = saddle_phase(exp, params, opt);

    const double N = params.N_p;
    cdbl zeta{0, 0};
    for (const auto& [j, gj] : ns.g) zeta += gj * double(j) * std::pow(N, j - 1);
    double z2 = std::norm(zeta);
    MeanFieldResult res;
    res.method = Method::saddle_point;
    res.amplitude = std::sqrt(N) * std::exp(-0.5 * z2 - z2 * params.nbar);
    res.phase = budget.total_phase();
    res.phase_principal = std::remainder(res.phase, 2 * M_PI);
    return res;
}

namespace {

struct Neumaier {
    double s = 0, comp = 0;
    void add(double x) {
        double t = s + x;
        if (std::abs(s) >= std::abs(x)) comp += (s - t) + x;
        else comp += (x - t) + s;
        s = t;
    }
    double get() const { return s + comp; }
    void merge(const Neumaier& o) {
        add(o.s);
        comp += o.comp;
    }
};

}  // namespace

MeanFieldResult exact_sum(const loops::LoopExponent& exp, const ExperimentParams& params,
                          const EvalOptions& opt, double window_sigmas, MechState mech,
                          int threads) {
    MeanFieldResult res;
    res.method = Method::exact_sum;
    if (params.N_p <= 0) return res;  // no carrier, empty signal

    SplitForm sf = ladder_split(exp);
    NumericSplit ns = numeric_split(sf, params, opt);

    const double N = params.N_p;
    const double sigma = std::sqrt(N);
    long long lo = std::max(0LL, (long long)std::floor(N - window_sigmas * sigma));
    long long hi = (long long)std::ceil(N + window_sigmas * sigma);
    if (hi - lo + 1 > (long long)5e8)
        throw window_too_large("exact_sum window holds more than 5e8 terms");
    res.window_lo = lo;
    res.window_hi = hi;

    // scalar exponent T(n) and combined displacement zeta(n); the large
    // w(n)-type phases only ever enter through their discrete differences
    NPoly T = ns.S.delta();
    NPoly kappa;   // -1/2 sum_{j<l} s_jl n^{j+l}
    NPoly cross2;  // +1/2 sum_{j<l} s_jl Delta_j Delta_l
    NPoly zeta;    // sum_j g_j Delta_j
    std::map<int, NPoly> delta_j;
    for (const auto& [j, gj] : ns.g) {
        NPoly nj;
        nj.add(j, 1.0);
        delta_j[j] = nj.delta();
        zeta = zeta + delta_j[j].scaled(gj);
    }
    for (auto it1 = ns.g.begin(); it1 != ns.g.end(); ++it1) {
        for (auto it2 = std::next(it1); it2 != ns.g.end(); ++it2) {
            int j = it1->first, l = it2->first;
            cdbl s_jl =
                std::conj(it1->second) * it2->second - it1->second * std::conj(it2->second);
            NPoly nl;
            nl.add(l, 1.0);
            T = T + (delta_j[j] * nl).scaled(s_jl);  // exchange factor: s_jl n^l Delta_j
            kappa.add(j + l, -0.5 * s_jl);
            cross2 = cross2 + (delta_j[j] * delta_j[l]).scaled(0.5 * s_jl);
        }
    }
    T = T + kappa.delta() + cross2;
    NPoly zeta_norm = zeta.re_part() * zeta.re_part() + zeta.im_part() * zeta.im_part();

    const double phi0 = T.eval_im(N);
    const double logN = std::log(N);

    const long long count = hi - lo + 1;
    const long long block = 1 << 14;
    const long long nblocks = (count + block - 1) / block;
    std::vector<Neumaier> bre(nblocks), bim(nblocks), bp(nblocks);

    auto run_block = [&](long long b) {
        long long from = lo + b * block;
        long long to = std::min(hi, from + block - 1);
        Neumaier re, im, pw;
        for (long long n = from; n <= to; ++n) {
            double dn = double(n);
            double logp = -N + dn * logN - std::lgamma(dn + 1.0);
            double re_t = T.eval_re(dn);
            double z2 = zeta_norm.eval_re(dn);
            double phase = T.eval_im(dn) - phi0;
            double w;
            cdbl factor;
            if (mech == MechState::thermal) {
                w = std::exp(logp + re_t - z2 * (params.nbar + 0.5));
                factor = cdbl{std::cos(phase), std::sin(phase)};
            } else {
                // <psi| D |psi> for |psi> = (|0> + |1>)/sqrt2
                w = std::exp(logp + re_t - 0.5 * z2);
                double im_z = zeta.eval_im(dn);
                factor = cdbl{std::cos(phase), std::sin(phase)} * cdbl{1.0 - 0.5 * z2, -im_z};
            }
            re.add(w * factor.real());
            im.add(w * factor.imag());
            pw.add(std::exp(logp));
        }
        bre[b] = re;
        bim[b] = im;
        bp[b] = pw;
    };

    if (threads <= 1 || nblocks == 1) {
        for (long long b = 0; b < nblocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        std::atomic<long long> next{0};
        long long nt = std::min<long long>(threads, nblocks);
        for (long long t = 0; t < nt; ++t)
            pool.emplace_back([&] {
                long long b;
                while ((b = next.fetch_add(1)) < nblocks) run_block(b);
            });
        for (auto& th : pool) th.join();
    }
    // fixed-order merge: the result does not depend on the worker count
    Neumaier sre, sim, sp;
    for (long long b = 0; b < nblocks; ++b) {
        sre.merge(bre[b]);
        sim.merge(bim[b]);
        sp.merge(bp[b]);
    }

    double norm = sp.get();
    cdbl total{sre.get(), sim.get()};
    if (norm > 0) total /= norm;
    res.amplitude = std::sqrt(N) * std::abs(total);
    res.phase = -(phi0 + std::atan2(total.imag(), total.real()));
    res.phase_principal = std::remainder(res.phase, 2 * M_PI);
    return res;
}

static NPoly pure_phase_poly(const loops::LoopExponent& exp, const ExperimentParams& params,
                             const EvalOptions& opt) {
    NumericSplit ns = numeric_split(ladder_split(exp), params, opt);
    return ns.S.im_part();
}

double distortion_half_angle(const loops::LoopExponent& exp, const ExperimentParams& params,
                             const EvalOptions& opt) {
    NPoly f = pure_phase_poly(exp, params, opt);
    NPoly theta = f.delta().delta();
    return 0.5 * theta.eval_re(params.N_p);
}

double distortion_spread(const loops::LoopExponent& exp, const ExperimentParams& params,
                         const EvalOptions& opt) {
    double half = distortion_half_angle(exp, params, opt);
    double s = std::sin(half);
    return std::sqrt(1.0 / (4.0 * params.N_p) + s * s);
}

cdbl displaced_fock_overlap(cdbl chi, cdbl upsilon, int m, int mprime) {
    if (m < 0 || mprime < 0) throw config_error("fock indices must be non-negative");
    auto cpow = [](cdbl b, int e) -> cdbl {
        cdbl r{1, 0};
        for (int i = 0; i < e; ++i) r *= b;
        return r;
    };
    cdbl pref =
        std::exp(-chi * std::conj(upsilon) - 0.5 * (std::norm(chi) + std::norm(upsilon)));
    cdbl u = std::conj(upsilon) + std::conj(chi);
    cdbl v = -chi - upsilon;
    cdbl sum{0, 0};
    int jmax = std::min(m, mprime);
    for (int j = 0; j <= jmax; ++j) {
        double logw = 0.5 * (std::lgamma(m + 1.0) + std::lgamma(mprime + 1.0)) -
                      std::lgamma(j + 1.0) - std::lgamma(m - j + 1.0) -
                      std::lgamma(mprime - j + 1.0);
        sum += std::exp(logw) * cpow(u, m - j) * cpow(v, mprime - j);
    }
    return pref * sum;
}

}  // namespace qgrav::meanfield
