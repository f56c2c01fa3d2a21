#include "qgrav/algebra.hpp"

#include <tuple>

namespace qgrav {
namespace detail {

namespace {

// Deformation insertion for a single X-P (or a-adag) exchange, normal ordered,
// to first order in the deformation strength.
CrossPoly deformation_poly(Basis basis, Deformation model) {
    CrossPoly p;
    const Rat half(1, 2);
    if (basis == Basis::quadrature) {
        switch (model) {
            case Deformation::beta: p.push_back({2, 0, 1, Coeff(1)}); break;
            case Deformation::gamma: p.push_back({1, 0, 1, Coeff(-1)}); break;
            case Deformation::mu: p.push_back({0, 0, 1, Coeff(1)}); break;
            case Deformation::none: break;
        }
    } else {
        switch (model) {
            case Deformation::beta:
                p.push_back({1, 1, 1, Coeff(1)});
                p.push_back({0, 2, 1, Coeff(-half)});
                p.push_back({2, 0, 1, Coeff(-half)});
                p.push_back({0, 0, 1, Coeff(half)});
                break;
            case Deformation::gamma:
                p.push_back({0, 1, 1, Coeff::make(Rat(1), 1, -1)});
                p.push_back({1, 0, 1, Coeff::make(Rat(-1), 1, -1)});
                break;
            case Deformation::mu: p.push_back({0, 0, 1, Coeff(1)}); break;
            case Deformation::none: break;
        }
    }
    return p;
}

std::mutex cross_mutex;
std::map<std::tuple<int, int, int, int>, CrossPoly> cross_cache;

CrossPoly compute_cross_single(Basis basis, Deformation model, int r, bool deform_enabled);

const CrossPoly& cross_single_locked(Basis basis, Deformation model, int r, bool deform_enabled) {
    Deformation mdl = deform_enabled ? model : Deformation::none;
    bool def = deform_enabled && model != Deformation::none;
    auto key = std::make_tuple(int(basis), int(mdl), r, int(def));
    auto it = cross_cache.find(key);
    if (it != cross_cache.end()) return it->second;
    CrossPoly p = compute_cross_single(basis, mdl, r, def);
    return cross_cache.emplace(key, std::move(p)).first->second;
}

// Multiply a set of (l, r) pieces on the right by Left^times, never inserting
// further deformation terms.
CrossPoly fold_left_letters(Basis basis, CrossPoly cur, int times) {
    for (int s = 0; s < times; ++s) {
        CrossPoly next;
        for (const CrossTerm& t : cur) {
            const CrossPoly& cp = cross_single_locked(basis, Deformation::none, t.r, false);
            for (const CrossTerm& u : cp) {
                Coeff c = t.c * u.c;
                if (c.is_zero()) continue;
                next.push_back({t.l + u.l, u.r, t.qg + u.qg, c});
            }
        }
        cur.swap(next);
    }
    return cur;
}

CrossPoly compute_cross_single(Basis basis, Deformation model, int r, bool deform_enabled) {
    CrossPoly out;
    if (r == 0) {
        out.push_back({1, 0, 0, Coeff(1)});
        return out;
    }
    // Right^r Left = (Right^{r-1} Left) Right + Right^{r-1} [Right, Left]
    const CrossPoly& rec = cross_single_locked(basis, model, r - 1, deform_enabled);
    for (const CrossTerm& t : rec) out.push_back({t.l, t.r + 1, t.qg, t.c});

    const Coeff unit = basis == Basis::quadrature ? Coeff::i() : Coeff(1);
    out.push_back({0, r - 1, 0, unit});

    if (deform_enabled && model != Deformation::none) {
        for (const CrossTerm& d : deformation_poly(basis, model)) {
            // Right^{r-1} * Left^{d.l} Right^{d.r}
            CrossPoly base{{0, r - 1, 0, unit * d.c}};
            CrossPoly moved = fold_left_letters(basis, std::move(base), d.l);
            for (const CrossTerm& t : moved)
                out.push_back({t.l, t.r + d.r, 1, t.c});
        }
    }

    // merge duplicates
    std::map<std::tuple<int, int, int>, Coeff> merged;
    for (const CrossTerm& t : out) {
        auto key = std::make_tuple(t.l, t.r, t.qg);
        auto [it, fresh] = merged.try_emplace(key, t.c);
        if (!fresh) it->second += t.c;
    }
    CrossPoly result;
    for (const auto& [key, c] : merged) {
        if (c.is_zero()) continue;
        auto [l, rr, qg] = key;
        result.push_back({l, rr, qg, c});
    }
    return result;
}

std::mutex dynkin_mutex;
std::map<std::pair<uint32_t, int>, Rat> dynkin_cache;

Rat factorial(int n) {
    Rat r(1);
    for (int i = 2; i <= n; ++i) r *= Rat(i);
    return r;
}

void dynkin_rec(uint32_t bits, int m, int pos, int blocks, const Rat& weight, Rat& total) {
    if (pos == m) {
        Rat term = weight / Rat(blocks);
        if (blocks % 2 == 0) term = -term;
        total += term;
        return;
    }
    int pa = 0;
    while (pos + pa < m && ((bits >> (pos + pa)) & 1) == 0) ++pa;
    for (int p = 0; p <= pa; ++p) {
        int j = pos + p;
        int qb = 0;
        while (j + qb < m && ((bits >> (j + qb)) & 1) == 1) ++qb;
        for (int q = (p == 0 ? 1 : 0); q <= qb; ++q) {
            dynkin_rec(bits, m, j + q, blocks + 1,
                       weight / (factorial(p) * factorial(q)), total);
        }
    }
}

}  // namespace

const CrossPoly& cross_single(Basis basis, Deformation model, int r, bool deform_enabled) {
    std::lock_guard<std::mutex> lk(cross_mutex);
    return cross_single_locked(basis, model, r, deform_enabled);
}

Rat dynkin_coefficient(uint32_t bits, int length) {
    std::lock_guard<std::mutex> lk(dynkin_mutex);
    auto key = std::make_pair(bits, length);
    auto it = dynkin_cache.find(key);
    if (it != dynkin_cache.end()) return it->second;
    Rat total(0);
    dynkin_rec(bits, length, 0, 0, Rat(1), total);
    Rat c = total / Rat(length);
    dynkin_cache.emplace(key, c);
    return c;
}

}  // namespace detail

SplitForm split_ladder_exponent(const Poly& z) {
    if (z.context().basis != Basis::ladder)
        throw config_error("split_ladder_exponent: exponent must be in the ladder basis");
    SplitForm sf;
    sf.ctx = z.context();
    sf.pure_n = Poly(z.context());
    std::map<int, LadderAmplitude> adag_side;
    z.for_each([&](const Mono& m, const Coeff& c) {
        if (m.word_length() == 0) {
            sf.pure_n.add_term(m, c);
            return;
        }
        if (m.word_length() > 1)
            throw unsupported_exponent(
                "exponent has mechanical content beyond linear ladder terms; prune first");
        if (m.r_pow == 1) {
            sf.g[m.n_pow].add4(m.lambda_pow, m.k_pow, m.qg_pow, m.eps_pow, -c);
        } else {
            adag_side[m.n_pow].add4(m.lambda_pow, m.k_pow, m.qg_pow, m.eps_pow, c);
        }
    });
    for (const auto& [j, amp] : sf.g) {
        auto it = adag_side.find(j);
        LadderAmplitude expect = amp.conj();
        if (it == adag_side.end() || !(it->second.parts == expect.parts))
            throw unsupported_exponent("displacement part of exponent is not anti-Hermitian");
        adag_side.erase(it);
    }
    if (!adag_side.empty())
        throw unsupported_exponent("displacement part of exponent is not anti-Hermitian");
    return sf;
}

std::vector<Poly> zassenhaus_split(const Poly& z) {
    SplitForm sf = split_ladder_exponent(z);
    std::vector<Poly> factors;
    for (const auto& [j, amp] : sf.g) {
        Poly f(sf.ctx);
        for (const auto& [key, c] : amp.parts) {
            auto [lam, k, qg, eps] = key;
            Mono ma{j, 0, 1, k, lam, qg, eps};
            f.add_term(ma, -c);
            Mono md{j, 1, 0, k, lam, qg, eps};
            f.add_term(md, c.conj());
        }
        if (!f.empty()) factors.push_back(std::move(f));
    }
    // pairwise cross term: -1/2 sum_{j<l} (g_j^* g_l - g_j g_l^*) n^{j+l}
    Poly cross(sf.ctx);
    for (auto it = sf.g.begin(); it != sf.g.end(); ++it) {
        for (auto jt = std::next(it); jt != sf.g.end(); ++jt) {
            LadderAmplitude s = it->second.conj().product(jt->second);
            LadderAmplitude t = it->second.product(jt->second.conj());
            for (auto& [key, c] : t.parts) c = -c;
            for (const auto& [key, c] : t.parts) s.add_key(key, c);
            for (const auto& [key, c] : s.parts) {
                auto [lam, k, qg, eps] = key;
                Mono m{it->first + jt->first, 0, 0, k, lam, qg, eps};
                cross.add_term(m, c * Coeff(Rat(-1, 2)));
            }
        }
    }
    if (!cross.empty()) factors.push_back(std::move(cross));
    if (!sf.pure_n.empty() || factors.empty()) factors.push_back(sf.pure_n);
    return factors;
}

static Poly letter_poly_ladder(const AlgebraContext& lctx, bool is_P, bool is_X, bool dag) {
    Poly p(lctx);
    if (is_P) {
        // P = i (adag - a) / sqrt2
        Mono u{0, 1, 0, 0, 0, 0, 0};
        Mono v{0, 0, 1, 0, 0, 0, 0};
        p.add_term(u, Coeff::make(Rat(1), 1, -1));
        p.add_term(v, Coeff::make(Rat(-1), 1, -1));
    } else if (is_X) {
        Mono u{0, 1, 0, 0, 0, 0, 0};
        Mono v{0, 0, 1, 0, 0, 0, 0};
        p.add_term(u, Coeff::make(Rat(1), 0, -1));
        p.add_term(v, Coeff::make(Rat(1), 0, -1));
    } else {
        // a = (X + iP)/sqrt2, adag = (X - iP)/sqrt2 in the quadrature basis
        Mono px{0, 0, 1, 0, 0, 0, 0};
        Mono pp{0, 1, 0, 0, 0, 0, 0};
        p.add_term(px, Coeff::make(Rat(1), 0, -1));
        p.add_term(pp, Coeff::make(Rat(dag ? -1 : 1), 1, -1));
    }
    return p;
}

Poly to_ladder(const Poly& p) {
    if (p.context().basis != Basis::quadrature)
        throw config_error("to_ladder: input must be in the quadrature basis");
    AlgebraContext lctx = p.context();
    lctx.basis = Basis::ladder;
    Poly out(lctx);
    Poly letter_P = letter_poly_ladder(lctx, true, false, false);
    Poly letter_X = letter_poly_ladder(lctx, false, true, false);
    p.for_each([&](const Mono& m, const Coeff& c) {
        Poly acc(lctx);
        Mono scalar{m.n_pow, 0, 0, m.k_pow, m.lambda_pow, m.qg_pow, m.eps_pow};
        acc.add_term(scalar, c);
        for (int i = 0; i < m.l_pow; ++i) acc = acc * letter_P;
        for (int i = 0; i < m.r_pow; ++i) acc = acc * letter_X;
        out += acc;
    });
    return out;
}

Poly to_quadrature(const Poly& p) {
    if (p.context().basis != Basis::ladder)
        throw config_error("to_quadrature: input must be in the ladder basis");
    AlgebraContext qctx = p.context();
    qctx.basis = Basis::quadrature;
    Poly out(qctx);
    Poly letter_adag = letter_poly_ladder(qctx, false, false, true);
    Poly letter_a = letter_poly_ladder(qctx, false, false, false);
    p.for_each([&](const Mono& m, const Coeff& c) {
        Poly acc(qctx);
        Mono scalar{m.n_pow, 0, 0, m.k_pow, m.lambda_pow, m.qg_pow, m.eps_pow};
        acc.add_term(scalar, c);
        for (int i = 0; i < m.l_pow; ++i) acc = acc * letter_adag;
        for (int i = 0; i < m.r_pow; ++i) acc = acc * letter_a;
        out += acc;
    });
    return out;
}

}  // namespace qgrav
