#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <memory>
#include <numeric>
#include <ostream>
#include <string>

#include "tilie/error.hpp"

namespace tilie {

/// Exact rational scalar.
///
/// Values that fit in 64-bit numerator/denominator are kept on a machine
/// fast path; anything larger is promoted transparently to a GMP rational.
/// The value is always canonical: den > 0 and gcd(num, den) == 1.
class Rational {
  public:
    Rational() = default;
    Rational(std::int64_t n) { reduce_set(n, 1); }  // NOLINT: implicit by design
    Rational(int n) : num_(n) {}                    // NOLINT
    Rational(std::int64_t n, std::int64_t d) {
        if (d == 0) throw Error("Rational: zero denominator");
        __int128 nn = n, dd = d;
        if (dd < 0) { nn = -nn; dd = -dd; }
        reduce_set(nn, dd);
    }
    explicit Rational(const mpq_class& q) { set_big(q); }

    static Rational from_string(const std::string& s) {
        mpq_class q;
        if (s.empty() || q.set_str(s, 10) != 0)
            throw ValidationError("Rational: cannot parse '" + s + "'");
        q.canonicalize();
        Rational r;
        r.set_big(q);
        return r;
    }

    bool is_zero() const { return !big_ && num_ == 0; }
    bool is_big() const { return static_cast<bool>(big_); }
    int sign() const {
        if (big_) return mpq_sgn(big_->get_mpq_t());
        return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0);
    }

    mpq_class to_mpq() const {
        if (big_) return *big_;
        mpq_class q(mpz_class(static_cast<long>(num_)));
        q /= mpq_class(mpz_class(static_cast<long>(den_)));
        return q;
    }

    double to_double() const {
        if (big_) return big_->get_d();
        return static_cast<double>(num_) / static_cast<double>(den_);
    }

    /// True when the value is an integer in [-2^53, 2^53] (safe as JSON int).
    bool is_small_int() const {
        return !big_ && den_ == 1 && num_ <= (std::int64_t{1} << 53) &&
               num_ >= -(std::int64_t{1} << 53);
    }
    std::int64_t small_int() const { return num_; }

    std::string str() const {
        if (big_) return big_->get_str();
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend Rational operator-(const Rational& a) {
        Rational r;
        if (!a.big_) {
            r.num_ = -a.num_;
            r.den_ = a.den_;
        } else {
            r.set_big(-*a.big_);
        }
        return r;
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        if (!a.big_ && !b.big_) {
            __int128 n = (__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_;
            __int128 d = (__int128)a.den_ * b.den_;
            Rational r;
            r.reduce_set(n, d);
            return r;
        }
        return Rational(mpq_class(a.to_mpq() + b.to_mpq()));
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

    friend Rational operator*(const Rational& a, const Rational& b) {
        if (!a.big_ && !b.big_) {
            __int128 n = (__int128)a.num_ * b.num_;
            __int128 d = (__int128)a.den_ * b.den_;
            Rational r;
            r.reduce_set(n, d);
            return r;
        }
        return Rational(mpq_class(a.to_mpq() * b.to_mpq()));
    }

    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw Error("Rational: division by zero");
        if (!a.big_ && !b.big_) {
            __int128 n = (__int128)a.num_ * b.den_;
            __int128 d = (__int128)a.den_ * b.num_;
            if (d < 0) { n = -n; d = -d; }
            Rational r;
            r.reduce_set(n, d);
            return r;
        }
        return Rational(mpq_class(a.to_mpq() / b.to_mpq()));
    }

    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
        return a.to_mpq() == b.to_mpq();
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        if (!a.big_ && !b.big_)
            return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
        return a.to_mpq() < b.to_mpq();
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    friend Rational abs(const Rational& a) { return a.sign() < 0 ? -a : a; }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

  private:
    static __int128 gcd128(__int128 a, __int128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }
    static bool fits64(__int128 v) {
        // INT64_MIN excluded so unary negation can never overflow.
        return v > INT64_MIN && v <= INT64_MAX;
    }

    void reduce_set(__int128 n, __int128 d) {
        if (n == 0) { num_ = 0; den_ = 1; big_.reset(); return; }
        __int128 g = gcd128(n, d);
        n /= g;
        d /= g;
        if (fits64(n) && fits64(d)) {
            num_ = static_cast<std::int64_t>(n);
            den_ = static_cast<std::int64_t>(d);
            big_.reset();
        } else {
            set_big(make_mpq(n, d));
        }
    }

    static mpq_class make_mpq(__int128 n, __int128 d) {
        auto mk = [](__int128 v) {
            bool neg = v < 0;
            if (neg) v = -v;
            mpz_class hi(static_cast<unsigned long>(static_cast<unsigned __int128>(v) >> 64));
            mpz_class lo(static_cast<unsigned long>(static_cast<unsigned __int128>(v) & ~0ul));
            mpz_class z = (hi << 64) + lo;
            return neg ? mpz_class(-z) : z;
        };
        mpq_class q(mk(n));
        q /= mpq_class(mk(d));
        return q;
    }

    void set_big(const mpq_class& q) {
        mpq_class c = q;
        c.canonicalize();
        if (mpz_fits_slong_p(c.get_num_mpz_t()) && mpz_fits_slong_p(c.get_den_mpz_t())) {
            num_ = mpz_get_si(c.get_num_mpz_t());
            den_ = mpz_get_si(c.get_den_mpz_t());
            big_.reset();
        } else {
            num_ = 0;
            den_ = 0;
            big_ = std::make_shared<const mpq_class>(std::move(c));
        }
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    std::shared_ptr<const mpq_class> big_;
};

/// Complex number with exact rational real and imaginary parts.
struct GaussianRational {
    Rational re;
    Rational im;

    GaussianRational() = default;
    GaussianRational(Rational r) : re(std::move(r)) {}  // NOLINT
    GaussianRational(std::int64_t r) : re(r) {}         // NOLINT
    GaussianRational(int r) : re(r) {}                  // NOLINT
    GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    static GaussianRational i() { return {Rational(0), Rational(1)}; }
    /// i^k for integer k.
    static GaussianRational i_pow(int k) {
        switch (((k % 4) + 4) % 4) {
            case 0: return {1, 0};
            case 1: return {0, 1};
            case 2: return {-1, 0};
            default: return {0, -1};
        }
    }

    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    GaussianRational conj() const { return {re, -im}; }

    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re, -a.im}; }
    friend GaussianRational operator+(const GaussianRational& a, const GaussianRational& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussianRational operator-(const GaussianRational& a, const GaussianRational& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend GaussianRational operator*(const GaussianRational& a, const GaussianRational& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussianRational operator/(const GaussianRational& a, const GaussianRational& b) {
        Rational n2 = b.re * b.re + b.im * b.im;
        if (n2.is_zero()) throw Error("GaussianRational: division by zero");
        GaussianRational t = a * b.conj();
        return {t.re / n2, t.im / n2};
    }
    GaussianRational& operator+=(const GaussianRational& b) { return *this = *this + b; }
    GaussianRational& operator-=(const GaussianRational& b) { return *this = *this - b; }
    GaussianRational& operator*=(const GaussianRational& b) { return *this = *this * b; }
    GaussianRational& operator/=(const GaussianRational& b) { return *this = *this / b; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

    std::string str() const {
        if (im.is_zero()) return re.str();
        return re.str() + (im.sign() >= 0 ? "+" : "") + im.str() + "i";
    }
    friend std::ostream& operator<<(std::ostream& os, const GaussianRational& z) {
        return os << z.str();
    }
};

/// Traits shared by the exact and floating scalar kinds.
template <typename S>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
    static constexpr bool exact = true;
    static bool is_zero(const Rational& v) { return v.is_zero(); }
    static double to_double(const Rational& v) { return v.to_double(); }
    static Rational from_int(std::int64_t n) { return Rational(n); }
};

template <>
struct scalar_traits<double> {
    static constexpr bool exact = false;
    static constexpr double prune_eps = 1e-14;
    static bool is_zero(double v) { return v == 0.0 || (v < prune_eps && v > -prune_eps); }
    static double to_double(double v) { return v; }
    static double from_int(std::int64_t n) { return static_cast<double>(n); }
};

template <>
struct scalar_traits<GaussianRational> {
    static constexpr bool exact = true;
    static bool is_zero(const GaussianRational& v) { return v.is_zero(); }
    static GaussianRational from_int(std::int64_t n) { return GaussianRational(Rational(n)); }
};

template <>
struct scalar_traits<std::complex<double>> {
    static constexpr bool exact = false;
    static constexpr double prune_eps = 1e-14;
    static bool is_zero(const std::complex<double>& v) {
        return std::abs(v.real()) < prune_eps && std::abs(v.imag()) < prune_eps;
    }
    static std::complex<double> from_int(std::int64_t n) { return {static_cast<double>(n), 0.0}; }
};

/// Complex counterpart of a real scalar kind.
template <typename S>
struct complex_of;
template <>
struct complex_of<Rational> {
    using type = GaussianRational;
    static GaussianRational make(const Rational& re, const Rational& im) { return {re, im}; }
    static Rational real(const GaussianRational& z) { return z.re; }
    static Rational imag(const GaussianRational& z) { return z.im; }
    static GaussianRational conj(const GaussianRational& z) { return z.conj(); }
};
template <>
struct complex_of<double> {
    using type = std::complex<double>;
    static std::complex<double> make(double re, double im) { return {re, im}; }
    static double real(const std::complex<double>& z) { return z.real(); }
    static double imag(const std::complex<double>& z) { return z.imag(); }
    static std::complex<double> conj(const std::complex<double>& z) { return std::conj(z); }
};

}  // namespace tilie
