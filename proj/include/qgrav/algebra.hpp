#pragma once

// Truncated noncommutative operator algebra for one mechanical mode coupled
// to an optical photon-number symbol. Monomials are kept in a fixed normal
// order per basis (P left of X, or a^dag left of a) and carry a grading in
// powers of the pulse coupling lambda0, the cavity ratio k, the deformation
// strength (first order only), and a loop-fluctuation bookkeeping power eps.
// Coefficients are exact elements of Q(i, sqrt2) by default; the same engine
// instantiates over complex<double> where speed matters more than exactness.

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include "qgrav/coeff.hpp"
#include "qgrav/errors.hpp"

namespace qgrav {

enum class Basis { quadrature, ladder };
enum class Deformation { none, beta, gamma, mu };

inline const char* name(Deformation m) {
    switch (m) {
        case Deformation::none: return "none";
        case Deformation::beta: return "beta";
        case Deformation::gamma: return "gamma";
        case Deformation::mu: return "mu";
    }
    return "?";
}

struct Truncation {
    int max_k_power = 5;
    int max_word_length = 6;
    int max_lambda_power = 8;
    int max_eps_power = 4;
    friend bool operator==(const Truncation&, const Truncation&) = default;
};

struct AlgebraContext {
    Basis basis = Basis::quadrature;
    Deformation model = Deformation::none;
    Truncation trunc{};
    friend bool operator==(const AlgebraContext&, const AlgebraContext&) = default;
};

// One normal-ordered monomial: n^n_pow * Left^l_pow * Right^r_pow, where
// (Left, Right) is (P, X) in the quadrature basis and (a^dag, a) in the
// ladder basis.
struct Mono {
    int n_pow = 0;
    int l_pow = 0;
    int r_pow = 0;
    int k_pow = 0;
    int lambda_pow = 0;
    int qg_pow = 0;
    int eps_pow = 0;

    uint32_t key() const {
        return (uint32_t(n_pow) << 26) | (uint32_t(lambda_pow) << 21) | (uint32_t(k_pow) << 17) |
               (uint32_t(l_pow) << 13) | (uint32_t(r_pow) << 9) | (uint32_t(eps_pow) << 5) |
               (uint32_t(qg_pow) << 4);
    }
    static Mono from_key(uint32_t k) {
        Mono m;
        m.n_pow = int((k >> 26) & 31);
        m.lambda_pow = int((k >> 21) & 31);
        m.k_pow = int((k >> 17) & 15);
        m.l_pow = int((k >> 13) & 15);
        m.r_pow = int((k >> 9) & 15);
        m.eps_pow = int((k >> 5) & 15);
        m.qg_pow = int((k >> 4) & 1);
        return m;
    }
    int word_length() const { return l_pow + r_pow; }
};

namespace detail {

// Reordering data shared by all scalar instantiations: moving Right^r past a
// single Left letter, expressed in normal order. Each entry is a monomial
// (l, r) with a possible one-step deformation insertion.
struct CrossTerm {
    int l, r, qg;
    Coeff c;
};
using CrossPoly = std::vector<CrossTerm>;

// cross1(basis, model, r, deform_enabled): normal ordering of Right^r * Left.
const CrossPoly& cross_single(Basis basis, Deformation model, int r, bool deform_enabled);

// Dynkin coefficient of a word over {A=0,B=1}; bits little-endian in word
// position (bit i = letter i).
Rat dynkin_coefficient(uint32_t bits, int length);

}  // namespace detail

template <class C>
class PolyT {
  public:
    using scalar = C;
    using traits = scalar_traits<C>;

    PolyT() = default;
    explicit PolyT(AlgebraContext ctx) : ctx_(ctx) {}

    static PolyT zero(const AlgebraContext& ctx) { return PolyT(ctx); }

    const AlgebraContext& context() const { return ctx_; }
    bool empty() const { return terms_.empty(); }
    size_t size() const { return terms_.size(); }

    void add_term(const Mono& m, const C& c) {
        if (traits::is_zero(c)) return;
        if (m.qg_pow > 1) return;
        const Truncation& t = ctx_.trunc;
        if (m.k_pow > t.max_k_power || m.word_length() > t.max_word_length ||
            m.lambda_pow > t.max_lambda_power || m.eps_pow > t.max_eps_power)
            return;
        auto [it, fresh] = terms_.try_emplace(m.key(), c);
        if (!fresh) {
            it->second = it->second + c;
            if (traits::is_zero(it->second)) terms_.erase(it);
        }
    }

    template <class F>
    void for_each(F&& f) const {
        for (const auto& [k, c] : terms_) f(Mono::from_key(k), c);
    }

    C coefficient(const Mono& m) const {
        auto it = terms_.find(m.key());
        return it == terms_.end() ? traits::zero() : it->second;
    }

    PolyT operator-() const {
        PolyT r(ctx_);
        for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
        return r;
    }
    friend PolyT operator+(const PolyT& x, const PolyT& y) {
        check_ctx(x, y);
        PolyT r = x;
        for (const auto& [k, c] : y.terms_) r.add_term(Mono::from_key(k), c);
        return r;
    }
    friend PolyT operator-(const PolyT& x, const PolyT& y) { return x + (-y); }
    PolyT& operator+=(const PolyT& o) { return *this = *this + o; }
    PolyT& operator-=(const PolyT& o) { return *this = *this - o; }

    PolyT scaled(const C& s) const {
        PolyT r(ctx_);
        if (traits::is_zero(s)) return r;
        for (const auto& [k, c] : terms_) {
            C v = c * s;
            if (!traits::is_zero(v)) r.terms_.emplace(k, v);
        }
        return r;
    }

    friend PolyT operator*(const PolyT& x, const PolyT& y) {
        check_ctx(x, y);
        PolyT r(x.ctx_);
        for (const auto& [kx, cx] : x.terms_) {
            Mono mx = Mono::from_key(kx);
            for (const auto& [ky, cy] : y.terms_) {
                Mono my = Mono::from_key(ky);
                int qg = mx.qg_pow + my.qg_pow;
                if (qg > 1) continue;
                Mono base;
                base.n_pow = mx.n_pow + my.n_pow;
                base.k_pow = mx.k_pow + my.k_pow;
                base.lambda_pow = mx.lambda_pow + my.lambda_pow;
                base.eps_pow = mx.eps_pow + my.eps_pow;
                if (base.k_pow > x.ctx_.trunc.max_k_power ||
                    base.lambda_pow > x.ctx_.trunc.max_lambda_power ||
                    base.eps_pow > x.ctx_.trunc.max_eps_power)
                    continue;
                C cc = cx * cy;
                if (traits::is_zero(cc)) continue;
                r.mul_words(mx, my, qg, cc);
            }
        }
        return r;
    }

    // [x, y] = xy - yx, with the deformation entering through the reordering
    // rule of the basis.
    friend PolyT commutator(const PolyT& x, const PolyT& y) { return x * y - y * x; }

    PolyT dagger() const {
        PolyT r(ctx_);
        for (const auto& [k, c] : terms_) {
            Mono m = Mono::from_key(k);
            C cc = conj_scalar(c);
            if (ctx_.basis == Basis::ladder) {
                Mono md = m;
                md.l_pow = m.r_pow;
                md.r_pow = m.l_pow;
                r.add_term(md, cc);
            } else {
                // (P^l X^r)^dag = X^r P^l, which needs reordering.
                Mono left = m;
                left.l_pow = 0;
                left.r_pow = m.r_pow;
                Mono right;
                right.l_pow = m.l_pow;
                r.mul_words(left, right, m.qg_pow, cc);
            }
        }
        return r;
    }

    bool is_anti_hermitian() const {
        PolyT s = *this + dagger();
        return s.empty();
    }

    friend bool operator==(const PolyT& x, const PolyT& y) {
        return x.ctx_ == y.ctx_ && x.terms_ == y.terms_;
    }

    std::string str() const {
        std::string out;
        for (const auto& [k, c] : terms_) {
            Mono m = Mono::from_key(k);
            if (!out.empty()) out += "  +  ";
            out += "(" + coeff_str(c) + ")";
            auto app = [&](const char* s, int p) {
                if (p > 0) {
                    out += std::string(" ") + s;
                    if (p > 1) out += "^" + std::to_string(p);
                }
            };
            app("lam", m.lambda_pow);
            app("k", m.k_pow);
            if (m.qg_pow) out += std::string(" qg[") + "]";
            app("eps", m.eps_pow);
            app("n", m.n_pow);
            app(ctx_.basis == Basis::quadrature ? "P" : "ad", m.l_pow);
            app(ctx_.basis == Basis::quadrature ? "X" : "a", m.r_pow);
        }
        return out.empty() ? "0" : out;
    }

  private:
    static void check_ctx(const PolyT& x, const PolyT& y) {
        if (!(x.ctx_ == y.ctx_))
            throw config_error("operator polynomials have mismatched basis/model/truncation");
    }

    static C conj_scalar(const C& c) {
        if constexpr (std::is_same_v<C, Coeff>) return c.conj();
        else return std::conj(c);
    }

    static std::string coeff_str(const C& c) {
        if constexpr (std::is_same_v<C, Coeff>) return c.str();
        else {
            char buf[64];
            snprintf(buf, sizeof buf, "%.6g%+.6gi", c.real(), c.imag());
            return buf;
        }
    }

    // Multiply the word parts of mx and my (gradings already merged into the
    // caller-supplied qg and coefficient), normal-ordering the crossing
    // Right^{mx.r} * Left^{my.l}.
    void mul_words(const Mono& mx, const Mono& my, int qg, const C& cc) {
        Mono base;
        base.n_pow = mx.n_pow + my.n_pow;
        base.k_pow = mx.k_pow + my.k_pow;
        base.lambda_pow = mx.lambda_pow + my.lambda_pow;
        base.eps_pow = mx.eps_pow + my.eps_pow;

        // fold: carry a small list of (l, r, qg, coeff) for Right^rx Left^ly
        struct Piece {
            int l, r, qg;
            C c;
        };
        std::vector<Piece> cur{{0, mx.r_pow, qg, cc}};
        for (int step = 0; step < my.l_pow; ++step) {
            std::vector<Piece> next;
            next.reserve(cur.size() * 2);
            for (const Piece& p : cur) {
                bool deform = (p.qg == 0) && (ctx_.model != Deformation::none);
                const detail::CrossPoly& cp =
                    detail::cross_single(ctx_.basis, ctx_.model, p.r, deform);
                for (const detail::CrossTerm& ct : cp) {
                    int q = p.qg + ct.qg;
                    if (q > 1) continue;
                    C v = p.c * traits::from(ct.c);
                    if (traits::is_zero(v)) continue;
                    next.push_back({p.l + ct.l, ct.r, q, v});
                }
            }
            cur.swap(next);
        }
        for (const Piece& p : cur) {
            Mono m = base;
            m.l_pow = mx.l_pow + p.l;
            m.r_pow = p.r + my.r_pow;
            m.qg_pow = p.qg;
            add_term(m, p.c);
        }
    }

    AlgebraContext ctx_;
    std::map<uint32_t, C> terms_;
};

using Poly = PolyT<Coeff>;
using PolyD = PolyT<std::complex<double>>;

// log(e^a e^b) by the Dynkin expansion of the BCH series, exact for all terms
// whose total letter count is <= bch_order. Letters of a loop exponent carry
// at least one power of lambda each, so grading truncation and series order
// line up for pulse compositions.
template <class C>
PolyT<C> bch_combine(const PolyT<C>& a, const PolyT<C>& b, int bch_order) {
    if (!(a.context() == b.context()))
        throw config_error("bch_combine: operand context mismatch");
    if (bch_order < 0) throw config_error("bch_combine: negative order");
    if (bch_order == 0) return a;

    PolyT<C> result = a + b;
    if (bch_order == 1) return result;

    const PolyT<C>* letters[2] = {&a, &b};
    // nested right bracket cache: key = (bits, length)
    std::map<std::pair<uint32_t, int>, PolyT<C>> suffix;
    std::function<const PolyT<C>&(uint32_t, int)> bracket = [&](uint32_t bits,
                                                                int len) -> const PolyT<C>& {
        auto it = suffix.find({bits, len});
        if (it != suffix.end()) return it->second;
        PolyT<C> val;
        if (len == 1) {
            val = *letters[bits & 1];
        } else {
            const PolyT<C>& rest = bracket(bits >> 1, len - 1);
            const PolyT<C>& first = *letters[bits & 1];
            if (rest.empty()) val = PolyT<C>::zero(a.context());
            else val = commutator(first, rest);
        }
        return suffix.emplace(std::make_pair(bits, len), std::move(val)).first->second;
    };

    for (int m = 2; m <= bch_order; ++m) {
        for (uint32_t bits = 0; bits < (1u << m); ++bits) {
            Rat c = detail::dynkin_coefficient(bits, m);
            if (c.is_zero()) continue;
            const PolyT<C>& br = bracket(bits, m);
            if (br.empty()) continue;
            result += br.scaled(scalar_traits<C>::from_rat(c));
        }
    }
    return result;
}

// Structured view of a splittable loop exponent in the ladder basis:
//   Z = S(n) + sum_j (g_j^* adag - g_j a) n^j
// with g_j graded in k and the deformation power.
struct LadderAmplitude {
    // (lambda_pow, k_pow, qg_pow, eps_pow) -> coefficient
    using Key = std::tuple<int, int, int, int>;
    std::map<Key, Coeff> parts;

    bool empty() const { return parts.empty(); }
    void add_key(const Key& key, const Coeff& c) {
        if (c.is_zero()) return;
        auto [it, fresh] = parts.try_emplace(key, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) parts.erase(it);
        }
    }
    void add4(int lambda_pow, int k_pow, int qg_pow, int eps_pow, const Coeff& c) {
        add_key(std::make_tuple(lambda_pow, k_pow, qg_pow, eps_pow), c);
    }
    LadderAmplitude conj() const {
        LadderAmplitude r;
        for (const auto& [k, c] : parts) r.parts.emplace(k, c.conj());
        return r;
    }
    // graded product, dropping second and higher deformation orders
    LadderAmplitude product(const LadderAmplitude& o) const {
        LadderAmplitude r;
        for (const auto& [ka, ca] : parts)
            for (const auto& [kb, cb] : o.parts) {
                int qg = std::get<2>(ka) + std::get<2>(kb);
                if (qg > 1) continue;
                r.add4(std::get<0>(ka) + std::get<0>(kb), std::get<1>(ka) + std::get<1>(kb), qg,
                       std::get<3>(ka) + std::get<3>(kb), ca * cb);
            }
        return r;
    }
    std::complex<double> numeric(double lambda0, double k, double qg, double eps) const {
        std::complex<double> s{0, 0};
        for (const auto& [key, c] : parts) {
            auto [lp, kp, qp, ep] = key;
            double w = std::pow(lambda0, lp) * std::pow(k, kp) * (qp ? qg : 1.0) *
                       (ep ? std::pow(eps, ep) : 1.0);
            s += c.to_complex() * w;
        }
        return s;
    }
};

struct SplitForm {
    Poly pure_n;                          // S(n), ladder basis, word-free terms
    std::map<int, LadderAmplitude> g;     // j -> g_j (n^j a coefficient, negated)
    AlgebraContext ctx;
};

SplitForm split_ladder_exponent(const Poly& z);

// Ordered exponential factorization of e^z for a splittable exponent:
// displacement factors for ascending j, the pairwise cross-term scalar, and
// the pure-n phase factor last.
std::vector<Poly> zassenhaus_split(const Poly& z);

// Basis conversions (exact; inverse of each other at first deformation order).
Poly to_ladder(const Poly& p);
Poly to_quadrature(const Poly& p);

}  // namespace qgrav
