#include "qgrav/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace qgrav::oracle {

CMat CMat::dagger() const {
    CMat r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

double CMat::inf_norm() const {
    double best = 0;
    for (int i = 0; i < n; ++i) {
        double row = 0;
        for (int j = 0; j < n; ++j) row += std::abs((*this)(i, j));
        best = std::max(best, row);
    }
    return best;
}

CMat operator*(const CMat& x, const CMat& y) {
    CMat r(x.n);
    const int n = x.n;
    for (int i = 0; i < n; ++i) {
        for (int kk = 0; kk < n; ++kk) {
            cdbl v = x(i, kk);
            if (v == cdbl{0, 0}) continue;
            const cdbl* yr = &y.a[size_t(kk) * n];
            cdbl* rr = &r.a[size_t(i) * n];
            for (int j = 0; j < n; ++j) rr[j] += v * yr[j];
        }
    }
    return r;
}

CMat operator+(const CMat& x, const CMat& y) {
    CMat r = x;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
    return r;
}

CMat operator-(const CMat& x, const CMat& y) {
    CMat r = x;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
    return r;
}

CMat CMat::scaled(cdbl s) const {
    CMat r = *this;
    for (auto& v : r.a) v *= s;
    return r;
}

namespace {

// Solve D X = N with partial pivoting (in place on copies).
CMat lu_solve(CMat d, CMat nmat) {
    const int n = d.n;
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::abs(d(col, col));
        for (int i = col + 1; i < n; ++i)
            if (std::abs(d(i, col)) > best) {
                best = std::abs(d(i, col));
                piv = i;
            }
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(d(col, j), d(piv, j));
                std::swap(nmat(col, j), nmat(piv, j));
            }
        cdbl dd = d(col, col);
        for (int i = col + 1; i < n; ++i) {
            cdbl f = d(i, col) / dd;
            if (f == cdbl{0, 0}) continue;
            for (int j = col; j < n; ++j) d(i, j) -= f * d(col, j);
            for (int j = 0; j < n; ++j) nmat(i, j) -= f * nmat(col, j);
        }
    }
    for (int col = n - 1; col >= 0; --col) {
        cdbl dd = d(col, col);
        for (int j = 0; j < n; ++j) {
            cdbl s = nmat(col, j);
            for (int kk = col + 1; kk < n; ++kk) s -= d(col, kk) * nmat(kk, j);
            nmat(col, j) = s / dd;
        }
    }
    return nmat;
}

}  // namespace

CMat expm(const CMat& m) {
    const int p = 6;
    double norm = m.inf_norm();
    int s = 0;
    if (norm > 0.5) s = std::max(0, (int)std::ceil(std::log2(norm / 0.5)));
    CMat a = m.scaled(std::ldexp(1.0, -s));

    // [6/6] Pade
    CMat num = CMat::identity(m.n), den = CMat::identity(m.n), pw = CMat::identity(m.n);
    double c = 1.0;
    for (int j = 1; j <= p; ++j) {
        c *= double(p - j + 1) / double(j * (2 * p - j + 1));
        pw = pw * a;
        num = num + pw.scaled(c);
        den = den + pw.scaled((j % 2) ? -c : c);
    }
    CMat r = lu_solve(den, num);
    for (int i = 0; i < s; ++i) r = r * r;
    return r;
}

void hermitian_eig(const CMat& m, std::vector<double>& eigs, CMat& vecs) {
    const int n = m.n;
    CMat a = m;
    vecs = CMat::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += std::norm(a(i, j));
        if (off < 1e-28) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                cdbl apq = a(p, q);
                if (std::abs(apq) < 1e-300) continue;
                double app = a(p, p).real(), aqq = a(q, q).real();
                double absq = std::abs(apq);
                cdbl phase = apq / absq;
                double theta = 0.5 * std::atan2(2 * absq, app - aqq);
                double cth = std::cos(theta), sth = std::sin(theta);
                cdbl s = sth * phase;
                // columns p and q of A and V transform by the rotation
                for (int i = 0; i < n; ++i) {
                    cdbl aip = a(i, p), aiq = a(i, q);
                    a(i, p) = cth * aip + std::conj(s) * aiq;
                    a(i, q) = -s * aip + cth * aiq;
                    cdbl vip = vecs(i, p), viq = vecs(i, q);
                    vecs(i, p) = cth * vip + std::conj(s) * viq;
                    vecs(i, q) = -s * vip + cth * viq;
                }
                for (int j = 0; j < n; ++j) {
                    cdbl apj = a(p, j), aqj = a(q, j);
                    a(p, j) = cth * apj + s * aqj;
                    a(q, j) = -std::conj(s) * apj + cth * aqj;
                }
            }
        }
    }
    eigs.resize(n);
    for (int i = 0; i < n; ++i) eigs[i] = a(i, i).real();
}

namespace {

CMat ladder_down(int dim) {
    CMat a(dim);
    for (int j = 1; j < dim; ++j) a(j - 1, j) = std::sqrt(double(j));
    return a;
}

CMat base_position(int dim) {
    CMat a = ladder_down(dim);
    return (a + a.dagger()).scaled(1.0 / std::sqrt(2.0));
}

CMat base_momentum(int dim) {
    CMat a = ladder_down(dim);
    return (a.dagger() - a).scaled(cdbl{0, 1.0 / std::sqrt(2.0)});
}

}  // namespace

CMat mech_position(const FockConfig& cfg) {
    CMat x = base_position(cfg.dim_mech);
    if (cfg.model == Deformation::mu) x = x.scaled(1.0 + cfg.strength);
    return x;
}

CMat mech_momentum(const FockConfig& cfg) {
    CMat p0 = base_momentum(cfg.dim_mech);
    if (cfg.model == Deformation::beta) {
        // p = p0 + (beta/3) p0^3 realizes [x,p] = i(1 + beta p0^2)
        return p0 + (p0 * p0 * p0).scaled(cfg.strength / 3.0);
    }
    if (cfg.model == Deformation::gamma) {
        // p = p0 - (gamma/2) p0^2 realizes [x,p] = i(1 - gamma p0)
        return p0 - (p0 * p0).scaled(cfg.strength / 2.0);
    }
    return p0;
}

namespace {

CMat hamiltonian_of(const CMat& q, double k, int k_order) {
    CMat pw = q;
    CMat h = q;
    double kj = 1.0;
    for (int j = 1; j <= k_order; ++j) {
        kj *= -k;
        pw = pw * q;
        h = h + pw.scaled(kj);
    }
    return h;
}

struct AxisExp {
    std::vector<double> eigs;
    CMat vecs;
    CMat exp_scaled(double theta) const {
        const int n = vecs.n;
        CMat d = vecs;  // columns scaled by the eigen-phases: V e^{i theta L}
        for (int j = 0; j < n; ++j) {
            cdbl ph = std::exp(cdbl{0, theta * eigs[j]});
            for (int i = 0; i < n; ++i) d(i, j) *= ph;
        }
        return d * vecs.dagger();
    }
};

struct LoopEngine {
    FockConfig cfg;
    AxisExp ax_x, ax_p;
    std::vector<loops::PulseStep> steps;

    explicit LoopEngine(const loops::LoopSpec& loop, const FockConfig& c) : cfg(c) {
        steps = loop.steps;
        CMat hx = hamiltonian_of(mech_position(cfg), cfg.k, cfg.k_order);
        CMat hp = hamiltonian_of(mech_momentum(cfg), cfg.k, cfg.k_order);
        hermitian_eig(hx, ax_x.eigs, ax_x.vecs);
        hermitian_eig(hp, ax_p.eigs, ax_p.vecs);
    }

    // U_n: product over pulses of exp(i scale lambda0 n H_axis)
    CMat unitary(int n) const {
        CMat u = CMat::identity(cfg.dim_mech);
        for (const auto& st : steps) {
            double theta = st.scale.to_double() * cfg.lambda0 * double(n);
            const AxisExp& ax = st.axis == 'X' ? ax_x : ax_p;
            u = u * ax.exp_scaled(theta);
        }
        return u;
    }
};

}  // namespace

meanfield::MeanFieldResult simulate_loop(const loops::LoopSpec& loop, const FockConfig& cfg,
                                         cdbl alpha, double nbar) {
    if (cfg.dim_light < 2 || cfg.dim_mech < 2) throw config_error("fock dimensions must be >= 2");
    double np = std::norm(alpha);
    if (!(np + 10.0 * std::abs(alpha) < cfg.dim_light))
        throw cutoff_exceeded("optical cutoff too small for |alpha|");
    // thermal tail check on the mechanical cutoff
    if (nbar > 0) {
        double top = 0;
        for (int m = cfg.dim_mech - 2; m < cfg.dim_mech; ++m)
            top += std::pow(nbar / (1 + nbar), m) / (1 + nbar);
        if (top >= 1e-8) throw cutoff_exceeded("mechanical cutoff too small for nbar");
    }

    LoopEngine engine(loop, cfg);

    std::vector<double> pth(cfg.dim_mech);
    for (int m = 0; m < cfg.dim_mech; ++m)
        pth[m] = nbar > 0 ? std::pow(nbar / (1 + nbar), m) / (1 + nbar) : (m == 0 ? 1.0 : 0.0);

    cdbl acc{0, 0};
    CMat u_prev = engine.unitary(0);
    double logp = -np;  // log Poisson(0)
    for (int n = 1; n < cfg.dim_light; ++n) {
        CMat u_n = engine.unitary(n);
        // Tr(rho_th U_{n-1}^dag U_n)
        cdbl tr{0, 0};
        for (int m = 0; m < cfg.dim_mech; ++m) {
            if (pth[m] == 0) continue;
            cdbl e{0, 0};
            for (int kk = 0; kk < cfg.dim_mech; ++kk)
                e += std::conj(u_prev(kk, m)) * u_n(kk, m);
            tr += pth[m] * e;
        }
        acc += std::exp(logp) * tr;
        logp += std::log(np) - std::log(double(n));
        u_prev = std::move(u_n);
    }
    cdbl mean = alpha * acc;
    meanfield::MeanFieldResult res;
    res.method = meanfield::Method::exact_sum;
    res.amplitude = std::abs(mean);
    res.phase = -std::arg(mean / alpha);
    res.phase_principal = res.phase;
    res.window_lo = 0;
    res.window_hi = cfg.dim_light - 1;
    return res;
}

double commutator_check(const FockConfig& cfg) {
    CMat x = mech_position(cfg);
    CMat p = mech_momentum(cfg);
    CMat comm = x * p - p * x;
    // the correction term is evaluated with the bare momentum: the
    // representation only claims the commutator to first order in strength
    CMat p0 = base_momentum(cfg.dim_mech);
    CMat target = CMat::identity(cfg.dim_mech);
    if (cfg.model == Deformation::beta) target = target + (p0 * p0).scaled(cfg.strength);
    else if (cfg.model == Deformation::gamma) target = target - p0.scaled(cfg.strength);
    else if (cfg.model == Deformation::mu) target = target.scaled(1.0 + cfg.strength);
    CMat dev = comm - target.scaled(cdbl{0, 1});
    int bulk = std::max(1, (int)std::floor(cfg.dim_mech * 0.8));
    double worst = 0;
    for (int i = 0; i < bulk; ++i)
        for (int j = 0; j < bulk; ++j) worst = std::max(worst, std::abs(dev(i, j)));
    return worst;
}

double unitarity_defect(const loops::LoopSpec& loop, const FockConfig& cfg, int n) {
    LoopEngine engine(loop, cfg);
    CMat u = engine.unitary(n);
    CMat d = u.dagger() * u - CMat::identity(cfg.dim_mech);
    double worst = 0;
    for (const auto& v : d.a) worst = std::max(worst, std::abs(v));
    return worst;
}

SqueezedMoments squeezed_state_moments(cdbl alpha, double r, int dim) {
    CMat a = ladder_down(dim);
    CMat ad = a.dagger();
    CMat squeeze = expm((a * a - ad * ad).scaled(r / 2.0));
    CMat displace = expm(ad.scaled(alpha) - a.scaled(std::conj(alpha)));
    std::vector<cdbl> psi(dim, cdbl{0, 0});
    psi[0] = 1.0;
    auto apply = [&](const CMat& m, const std::vector<cdbl>& v) {
        std::vector<cdbl> out(dim, cdbl{0, 0});
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) out[i] += m(i, j) * v[j];
        return out;
    };
    psi = apply(displace, apply(squeeze, psi));

    // moment errors scale like tail * dim^2, so the guard is strict
    double tail = std::norm(psi[dim - 1]) + std::norm(psi[dim - 2]);
    if (tail >= 5e-14) throw cutoff_exceeded("squeezed-state cutoff too small");

    double n1 = 0, n2 = 0;
    for (int n = 0; n < dim; ++n) {
        double pn = std::norm(psi[n]);
        n1 += pn * n;
        n2 += pn * double(n) * n;
    }
    // spread transverse to the displacement: P = (a - a^dag)/2i
    CMat pq = (a - ad).scaled(cdbl{0, -0.5});
    auto expect = [&](const CMat& m) {
        cdbl s{0, 0};
        auto mv = apply(m, psi);
        for (int i = 0; i < dim; ++i) s += std::conj(psi[i]) * mv[i];
        return s;
    };
    double p1 = expect(pq).real();
    double p2 = expect(pq * pq).real();
    SqueezedMoments out;
    out.N_p = n1;
    out.dNp = std::sqrt(std::max(0.0, n2 - n1 * n1));
    out.dPhi = std::sqrt(std::max(0.0, p2 - p1 * p1)) / std::abs(alpha);
    return out;
}

}  // namespace qgrav::oracle
