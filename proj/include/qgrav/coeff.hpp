#pragma once

#include <complex>
#include <string>

#include "qgrav/rational.hpp"

namespace qgrav {

// Element of Q(i, sqrt2): (a + b*sqrt2) + i*(c + d*sqrt2).
// Closed under the arithmetic the operator algebra needs: BCH rationals,
// factors of i from commutators, and 1/sqrt2 from quadrature<->ladder moves.
struct Coeff {
    Rat a, b, c, d;

    Coeff() = default;
    Coeff(long long n) : a(n) {}
    Coeff(const Rat& re) : a(re) {}
    Coeff(const Rat& re, const Rat& im) : a(re), c(im) {}

    static Coeff i() { return Coeff(Rat(0), Rat(1)); }
    static Coeff sqrt2(const Rat& m = Rat(1)) {
        Coeff x;
        x.b = m;
        return x;
    }
    // q * i^ipow * sqrt2^spow  (spow may be negative)
    static Coeff make(const Rat& q, int ipow, int spow) {
        Coeff x(q);
        int ip = ((ipow % 4) + 4) % 4;
        if (ip == 1) x = x * i();
        else if (ip == 2) x = -x;
        else if (ip == 3) x = -(x * i());
        while (spow >= 2) {
            x = x * Coeff(2);
            spow -= 2;
        }
        while (spow <= -2) {
            x = x * Coeff(Rat(1, 2));
            spow += 2;
        }
        if (spow == 1) x = x * sqrt2();
        if (spow == -1) x = x * sqrt2(Rat(1, 2));
        return x;
    }

    bool is_zero() const { return a.is_zero() && b.is_zero() && c.is_zero() && d.is_zero(); }
    bool is_real() const { return c.is_zero() && d.is_zero(); }

    Coeff operator-() const {
        Coeff x;
        x.a = -a;
        x.b = -b;
        x.c = -c;
        x.d = -d;
        return x;
    }
    friend Coeff operator+(const Coeff& x, const Coeff& y) {
        Coeff r;
        r.a = x.a + y.a;
        r.b = x.b + y.b;
        r.c = x.c + y.c;
        r.d = x.d + y.d;
        return r;
    }
    friend Coeff operator-(const Coeff& x, const Coeff& y) { return x + (-y); }
    friend Coeff operator*(const Coeff& x, const Coeff& y) {
        // (a1+b1 s)(a2+b2 s) = (a1a2+2 b1b2) + (a1b2+a2b1) s, with s = sqrt2,
        // extended to the complex parts.
        Rat re_r = x.a * y.a + Rat(2) * x.b * y.b - (x.c * y.c + Rat(2) * x.d * y.d);
        Rat re_s = x.a * y.b + x.b * y.a - (x.c * y.d + x.d * y.c);
        Rat im_r = x.a * y.c + Rat(2) * x.b * y.d + x.c * y.a + Rat(2) * x.d * y.b;
        Rat im_s = x.a * y.d + x.b * y.c + x.c * y.b + x.d * y.a;
        Coeff r;
        r.a = re_r;
        r.b = re_s;
        r.c = im_r;
        r.d = im_s;
        return r;
    }
    Coeff& operator+=(const Coeff& o) { return *this = *this + o; }
    Coeff& operator-=(const Coeff& o) { return *this = *this - o; }
    Coeff& operator*=(const Coeff& o) { return *this = *this * o; }

    friend bool operator==(const Coeff& x, const Coeff& y) {
        return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
    }
    friend bool operator!=(const Coeff& x, const Coeff& y) { return !(x == y); }

    Coeff conj() const {
        Coeff x = *this;
        x.c = -x.c;
        x.d = -x.d;
        return x;
    }

    std::complex<double> to_complex() const {
        constexpr double s2 = 1.4142135623730951;
        return {a.to_double() + s2 * b.to_double(), c.to_double() + s2 * d.to_double()};
    }

    std::string str() const {
        auto part = [](const Rat& r, const Rat& s) {
            std::string out;
            if (!r.is_zero()) out += r.str();
            if (!s.is_zero()) {
                if (!out.empty()) out += "+";
                out += s.str() + "*sqrt2";
            }
            return out.empty() ? std::string("0") : out;
        };
        std::string re = part(a, b), im = part(c, d);
        if (im == "0") return re;
        if (re == "0") return "(" + im + ")i";
        return re + " + (" + im + ")i";
    }
};

// Scalar traits let the symbolic engine run over exact coefficients or plain
// complex doubles (used by the loop-design solver, where speed matters more
// than exactness).
template <class C>
struct scalar_traits;

template <>
struct scalar_traits<Coeff> {
    static Coeff zero() { return Coeff(); }
    static Coeff from(const Coeff& c) { return c; }
    static Coeff from_rat(const Rat& r) { return Coeff(r); }
    static bool is_zero(const Coeff& c) { return c.is_zero(); }
    static std::complex<double> numeric(const Coeff& c) { return c.to_complex(); }
};

template <>
struct scalar_traits<std::complex<double>> {
    static std::complex<double> zero() { return {0.0, 0.0}; }
    static std::complex<double> from(const Coeff& c) { return c.to_complex(); }
    static std::complex<double> from_rat(const Rat& r) { return {r.to_double(), 0.0}; }
    static bool is_zero(const std::complex<double>& c) {
        return std::abs(c.real()) < 1e-300 && std::abs(c.imag()) < 1e-300;
    }
    static std::complex<double> numeric(const std::complex<double>& c) { return c; }
};

}  // namespace qgrav
