#pragma once

#include <gmp.h>

#include <cstdint>
#include <iosfwd>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace hml {

// Thin RAII wrappers over GMP's mpz/mpq. Value semantics, canonical form
// maintained at all times. Only the operations the library actually needs.

class Int {
  public:
    Int() { mpz_init(z_); }
    Int(long v) { mpz_init_set_si(z_, v); }
    explicit Int(const std::string& s) {
        if (mpz_init_set_str(z_, s.c_str(), 10) != 0) {
            mpz_clear(z_);
            throw parse_error("Int: cannot parse '" + s + "'");
        }
    }
    Int(const Int& o) { mpz_init_set(z_, o.z_); }
    Int(Int&& o) noexcept {
        mpz_init(z_);
        mpz_swap(z_, o.z_);
    }
    Int& operator=(const Int& o) {
        if (this != &o) mpz_set(z_, o.z_);
        return *this;
    }
    Int& operator=(Int&& o) noexcept {
        mpz_swap(z_, o.z_);
        return *this;
    }
    ~Int() { mpz_clear(z_); }

    mpz_srcptr raw() const { return z_; }
    mpz_ptr raw() { return z_; }

    friend Int operator+(const Int& a, const Int& b) { Int r; mpz_add(r.z_, a.z_, b.z_); return r; }
    friend Int operator-(const Int& a, const Int& b) { Int r; mpz_sub(r.z_, a.z_, b.z_); return r; }
    friend Int operator*(const Int& a, const Int& b) { Int r; mpz_mul(r.z_, a.z_, b.z_); return r; }
    Int operator-() const { Int r; mpz_neg(r.z_, z_); return r; }
    Int& operator+=(const Int& o) { mpz_add(z_, z_, o.z_); return *this; }
    Int& operator-=(const Int& o) { mpz_sub(z_, z_, o.z_); return *this; }
    Int& operator*=(const Int& o) { mpz_mul(z_, z_, o.z_); return *this; }

    // Truncated division / remainder (sign of remainder follows numerator).
    friend Int operator/(const Int& a, const Int& b) { Int r; mpz_tdiv_q(r.z_, a.z_, b.z_); return r; }
    friend Int operator%(const Int& a, const Int& b) { Int r; mpz_tdiv_r(r.z_, a.z_, b.z_); return r; }

    bool divisible_by(const Int& d) const { return mpz_divisible_p(z_, d.z_) != 0; }
    Int divexact(const Int& d) const { Int r; mpz_divexact(r.z_, z_, d.z_); return r; }

    friend bool operator==(const Int& a, const Int& b) { return mpz_cmp(a.z_, b.z_) == 0; }
    friend bool operator!=(const Int& a, const Int& b) { return !(a == b); }
    friend bool operator<(const Int& a, const Int& b) { return mpz_cmp(a.z_, b.z_) < 0; }
    friend bool operator<=(const Int& a, const Int& b) { return mpz_cmp(a.z_, b.z_) <= 0; }
    friend bool operator>(const Int& a, const Int& b) { return mpz_cmp(a.z_, b.z_) > 0; }
    friend bool operator>=(const Int& a, const Int& b) { return mpz_cmp(a.z_, b.z_) >= 0; }

    int sign() const { return mpz_sgn(z_); }
    Int abs() const { Int r; mpz_abs(r.z_, z_); return r; }
    size_t bits() const { return mpz_sizeinbase(z_, 2); }

    bool fits_long() const { return mpz_fits_slong_p(z_) != 0; }
    long to_long() const {
        if (!fits_long()) throw precision_error("Int: value does not fit in long");
        return mpz_get_si(z_);
    }
    double to_double() const { return mpz_get_d(z_); }

    static Int pow(const Int& b, unsigned long e) { Int r; mpz_pow_ui(r.z_, b.z_, e); return r; }
    static Int factorial(unsigned long n) { Int r; mpz_fac_ui(r.z_, n); return r; }
    static Int binomial(unsigned long n, unsigned long k) { Int r; mpz_bin_uiui(r.z_, n, k); return r; }
    static Int gcd(const Int& a, const Int& b) { Int r; mpz_gcd(r.z_, a.z_, b.z_); return r; }

    // b^e mod m (m > 0).
    static Int powm(const Int& b, const Int& e, const Int& m) {
        Int r;
        mpz_powm(r.z_, b.z_, e.z_, m.z_);
        return r;
    }
    // Inverse of a mod m; throws if not invertible.
    static Int invmod(const Int& a, const Int& m) {
        Int r;
        if (mpz_invert(r.z_, a.z_, m.z_) == 0)
            throw domain_error("Int::invmod: not invertible");
        return r;
    }
    // Nonnegative residue a mod m.
    Int mod(const Int& m) const { Int r; mpz_mod(r.z_, z_, m.z_); return r; }

    bool is_probab_prime() const { return mpz_probab_prime_p(z_, 30) != 0; }

    std::string str() const {
        char* s = mpz_get_str(nullptr, 10, z_);
        std::string out(s);
        void (*freefn)(void*, size_t);
        mp_get_memory_functions(nullptr, nullptr, &freefn);
        freefn(s, out.size() + 1);
        return out;
    }

    friend std::ostream& operator<<(std::ostream& os, const Int& v) { return os << v.str(); }

  private:
    mpz_t z_;
};

class Rational {
  public:
    Rational() { mpq_init(q_); }
    Rational(long v) {
        mpq_init(q_);
        mpq_set_si(q_, v, 1);
    }
    Rational(long num, long den) {
        if (den == 0) throw domain_error("Rational: zero denominator");
        // mpq_set_si takes the denominator as unsigned; normalize the sign here.
        if (den < 0) {
            num = -num;
            den = -den;
        }
        mpq_init(q_);
        mpq_set_si(q_, num, static_cast<unsigned long>(den));
        mpq_canonicalize(q_);
    }
    Rational(const Int& num, const Int& den) {
        if (den.sign() == 0) throw domain_error("Rational: zero denominator");
        mpq_init(q_);
        mpz_set(mpq_numref(q_), num.raw());
        mpz_set(mpq_denref(q_), den.raw());
        mpq_canonicalize(q_);
    }
    explicit Rational(const Int& num) {
        mpq_init(q_);
        mpz_set(mpq_numref(q_), num.raw());
    }
    // Parses "p/q" or "p" (optional sign, decimal digits).
    explicit Rational(const std::string& s) {
        mpq_init(q_);
        if (s.empty() || mpq_set_str(q_, s.c_str(), 10) != 0 || mpz_sgn(mpq_denref(q_)) == 0) {
            mpq_clear(q_);
            throw parse_error("Rational: cannot parse '" + s + "'");
        }
        mpq_canonicalize(q_);
    }
    Rational(const Rational& o) {
        mpq_init(q_);
        mpq_set(q_, o.q_);
    }
    Rational(Rational&& o) noexcept {
        mpq_init(q_);
        mpq_swap(q_, o.q_);
    }
    Rational& operator=(const Rational& o) {
        if (this != &o) mpq_set(q_, o.q_);
        return *this;
    }
    Rational& operator=(Rational&& o) noexcept {
        mpq_swap(q_, o.q_);
        return *this;
    }
    ~Rational() { mpq_clear(q_); }

    mpq_srcptr raw() const { return q_; }

    Int num() const { Int r; mpz_set(r.raw(), mpq_numref(q_)); return r; }
    Int den() const { Int r; mpz_set(r.raw(), mpq_denref(q_)); return r; }

    friend Rational operator+(const Rational& a, const Rational& b) { Rational r; mpq_add(r.q_, a.q_, b.q_); return r; }
    friend Rational operator-(const Rational& a, const Rational& b) { Rational r; mpq_sub(r.q_, a.q_, b.q_); return r; }
    friend Rational operator*(const Rational& a, const Rational& b) { Rational r; mpq_mul(r.q_, a.q_, b.q_); return r; }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.sign() == 0) throw domain_error("Rational: division by zero");
        Rational r;
        mpq_div(r.q_, a.q_, b.q_);
        return r;
    }
    Rational operator-() const { Rational r; mpq_neg(r.q_, q_); return r; }
    Rational& operator+=(const Rational& o) { mpq_add(q_, q_, o.q_); return *this; }
    Rational& operator-=(const Rational& o) { mpq_sub(q_, q_, o.q_); return *this; }
    Rational& operator*=(const Rational& o) { mpq_mul(q_, q_, o.q_); return *this; }
    Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

    friend bool operator==(const Rational& a, const Rational& b) { return mpq_equal(a.q_, b.q_) != 0; }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) { return mpq_cmp(a.q_, b.q_) < 0; }
    friend bool operator<=(const Rational& a, const Rational& b) { return mpq_cmp(a.q_, b.q_) <= 0; }
    friend bool operator>(const Rational& a, const Rational& b) { return mpq_cmp(a.q_, b.q_) > 0; }
    friend bool operator>=(const Rational& a, const Rational& b) { return mpq_cmp(a.q_, b.q_) >= 0; }

    int sign() const { return mpq_sgn(q_); }
    Rational abs() const { Rational r; mpq_abs(r.q_, q_); return r; }
    bool is_integer() const { return mpz_cmp_ui(mpq_denref(q_), 1) == 0; }

    Int floor() const {
        Int r;
        mpz_fdiv_q(r.raw(), mpq_numref(q_), mpq_denref(q_));
        return r;
    }
    // x - floor(x), always in [0, 1).
    Rational frac() const { return *this - Rational(floor()); }

    Rational inv() const {
        if (sign() == 0) throw domain_error("Rational: inverse of zero");
        Rational r;
        mpq_inv(r.q_, q_);
        return r;
    }

    static Rational pow(const Rational& b, long e) {
        if (e == 0) return Rational(1);
        Rational base = e < 0 ? b.inv() : b;
        unsigned long k = e < 0 ? -(unsigned long)e : (unsigned long)e;
        Rational r;
        mpz_pow_ui(mpq_numref(r.q_), mpq_numref(base.q_), k);
        mpz_pow_ui(mpq_denref(r.q_), mpq_denref(base.q_), k);
        return r; // powers of a canonical fraction stay canonical
    }

    double to_double() const { return mpq_get_d(q_); }

    std::string str() const {
        char* s = mpq_get_str(nullptr, 10, q_);
        std::string out(s);
        void (*freefn)(void*, size_t);
        mp_get_memory_functions(nullptr, nullptr, &freefn);
        freefn(s, out.size() + 1);
        return out;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& v) { return os << v.str(); }

  private:
    mpq_t q_;
};

inline Int lcm(const Int& a, const Int& b) {
    Int r;
    mpz_lcm(r.raw(), a.raw(), b.raw());
    return r;
}

// Small-prime factorization by trial division (adequate for conductors,
// denominators, q-1 splittings; n is never astronomically large here).
inline std::vector<std::pair<Int, unsigned>> factorize(Int n) {
    std::vector<std::pair<Int, unsigned>> out;
    if (n.sign() < 0) n = -n;
    if (n <= Int(1)) return out;
    auto strip = [&](const Int& p) {
        unsigned e = 0;
        while (n.divisible_by(p)) {
            n = n.divexact(p);
            ++e;
        }
        if (e) out.emplace_back(p, e);
    };
    strip(Int(2));
    strip(Int(3));
    Int p(5);
    int step = 2;
    while (p * p <= n) {
        strip(p);
        p += Int(step);
        step = 6 - step; // 5,7,11,13,... wheel
    }
    if (n > Int(1)) out.emplace_back(n, 1);
    return out;
}

} // namespace hml
