#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qgrav {

using int128 = __int128;

// Exact rational over 128-bit integers, always stored reduced with den > 0.
// Arithmetic throws on overflow instead of silently wrapping; the symbolic
// layer depends on coefficients like 4840/9 surviving composition exactly.
class Rat {
  public:
    constexpr Rat() : num_(0), den_(1) {}
    constexpr Rat(long long n) : num_(n), den_(1) {}
    Rat(long long n, long long d) : num_(n), den_(d) { normalize(); }

    static Rat from_int128(int128 n, int128 d) {
        Rat r;
        r.num_ = n;
        r.den_ = d;
        r.normalize();
        return r;
    }

    int128 num() const { return num_; }
    int128 den() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_one() const { return num_ == 1 && den_ == 1; }

    friend Rat operator+(const Rat& a, const Rat& b) {
        int128 g = gcd128(a.den_, b.den_);
        int128 bd = b.den_ / g;
        int128 n = checked_add(checked_mul(a.num_, bd), checked_mul(b.num_, a.den_ / g));
        int128 d = checked_mul(a.den_, bd);
        return from_int128(n, d);
    }
    friend Rat operator-(const Rat& a, const Rat& b) { return a + (-b); }
    Rat operator-() const {
        Rat r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    friend Rat operator*(const Rat& a, const Rat& b) {
        // cross-reduce before multiplying to keep magnitudes down
        int128 g1 = gcd128(a.num_, b.den_);
        int128 g2 = gcd128(b.num_, a.den_);
        Rat r;
        r.num_ = checked_mul(a.num_ / g1, b.num_ / g2);
        r.den_ = checked_mul(a.den_ / g2, b.den_ / g1);
        return r;
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.num_ == 0) throw std::domain_error("Rat: division by zero");
        Rat inv;
        inv.num_ = b.den_;
        inv.den_ = b.num_;
        if (inv.den_ < 0) {
            inv.num_ = -inv.num_;
            inv.den_ = -inv.den_;
        }
        return a * inv;
    }
    Rat& operator+=(const Rat& o) { return *this = *this + o; }
    Rat& operator-=(const Rat& o) { return *this = *this - o; }
    Rat& operator*=(const Rat& o) { return *this = *this * o; }
    Rat& operator/=(const Rat& o) { return *this = *this / o; }

    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) {
        return checked_mul(a.num_, b.den_) < checked_mul(b.num_, a.den_);
    }

    double to_double() const {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    std::string str() const {
        std::string s = i128_str(num_);
        if (den_ != 1) s += "/" + i128_str(den_);
        return s;
    }

    static int128 gcd128(int128 a, int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            int128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

  private:
    static int128 checked_mul(int128 a, int128 b) {
        if (a == 0 || b == 0) return 0;
        int128 r = a * b;
        if (r / b != a) throw std::overflow_error("Rat: multiply overflow");
        return r;
    }
    static int128 checked_add(int128 a, int128 b) {
        int128 r = a + b;
        if ((b > 0 && r < a) || (b < 0 && r > a)) throw std::overflow_error("Rat: add overflow");
        return r;
    }

    void normalize() {
        if (den_ == 0) throw std::domain_error("Rat: zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        int128 g = gcd128(num_, den_);
        num_ /= g;
        den_ /= g;
    }

    static std::string i128_str(int128 v) {
        if (v == 0) return "0";
        bool neg = v < 0;
        std::string s;
        while (v != 0) {
            int digit = static_cast<int>(neg ? -(v % 10) : (v % 10));
            s.insert(s.begin(), static_cast<char>('0' + digit));
            v /= 10;
        }
        if (neg) s.insert(s.begin(), '-');
        return s;
    }

    int128 num_;
    int128 den_;
};

}  // namespace qgrav
