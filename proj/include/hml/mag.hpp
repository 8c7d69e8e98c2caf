#pragma once

#include <mpfr.h>

#include <string>

namespace hml {

// Nonnegative error magnitude: a low-precision float that only ever rounds
// UP, so any arithmetic on Mags yields a valid upper bound. Used as the
// radius component of balls. +inf is a legal value meaning "no information".

class Mag {
  public:
    static constexpr mpfr_prec_t kPrec = 32;

    Mag() {
        mpfr_init2(m_, kPrec);
        mpfr_set_zero(m_, 1);
    }
    Mag(const Mag& o) {
        mpfr_init2(m_, kPrec);
        mpfr_set(m_, o.m_, MPFR_RNDU);
    }
    Mag(Mag&& o) noexcept {
        mpfr_init2(m_, kPrec);
        mpfr_swap(m_, o.m_);
    }
    Mag& operator=(const Mag& o) {
        if (this != &o) mpfr_set(m_, o.m_, MPFR_RNDU);
        return *this;
    }
    Mag& operator=(Mag&& o) noexcept {
        mpfr_swap(m_, o.m_);
        return *this;
    }
    ~Mag() { mpfr_clear(m_); }

    static Mag zero() { return Mag(); }
    static Mag inf() {
        Mag r;
        mpfr_set_inf(r.m_, 1);
        return r;
    }
    static Mag pow2(long e) {
        Mag r;
        mpfr_set_ui_2exp(r.m_, 1, e, MPFR_RNDU);
        return r;
    }
    static Mag from_d(double v) {
        Mag r;
        mpfr_set_d(r.m_, v < 0 ? -v : v, MPFR_RNDU);
        return r;
    }
    // Upper bound of |x|.
    static Mag from_mpfr(mpfr_srcptr x) {
        Mag r;
        mpfr_abs(r.m_, x, MPFR_RNDU);
        return r;
    }
    // One ulp of x at precision prec: 2^(exp(x)-prec); bounds the rounding
    // error of any correctly rounded mpfr operation that produced x.
    static Mag ulp(mpfr_srcptr x, mpfr_prec_t prec) {
        if (mpfr_zero_p(x)) return pow2(mpfr_get_emin());
        if (!mpfr_number_p(x)) return inf();
        return pow2(mpfr_get_exp(x) - (long)prec);
    }

    mpfr_srcptr raw() const { return m_; }

    bool is_zero() const { return mpfr_zero_p(m_) != 0; }
    bool is_finite() const { return mpfr_number_p(m_) != 0; }
    double to_double() const { return mpfr_get_d(m_, MPFR_RNDU); }

    friend Mag operator+(const Mag& a, const Mag& b) {
        Mag r;
        mpfr_add(r.m_, a.m_, b.m_, MPFR_RNDU);
        return r;
    }
    friend Mag operator*(const Mag& a, const Mag& b) {
        Mag r;
        // 0 * inf must stay 0 for radii (an exact zero scaled by anything
        // unbounded never occurs with a finite midpoint; guard regardless).
        if (a.is_zero() || b.is_zero()) return r;
        mpfr_mul(r.m_, a.m_, b.m_, MPFR_RNDU);
        return r;
    }
    Mag& operator+=(const Mag& o) {
        mpfr_add(m_, m_, o.m_, MPFR_RNDU);
        return *this;
    }
    Mag& operator*=(const Mag& o) {
        *this = *this * o;
        return *this;
    }

    // Upper bound of a / b_lo where b_lo must be a LOWER bound of the
    // (positive) denominator. Caller supplies b_lo rounded down.
    static Mag div_upper(const Mag& a, mpfr_srcptr b_lo) {
        if (mpfr_sgn(b_lo) <= 0) return inf();
        Mag r;
        mpfr_div(r.m_, a.m_, b_lo, MPFR_RNDU);
        return r;
    }

    Mag mul_2exp(long e) const {
        Mag r;
        mpfr_mul_2si(r.m_, m_, e, MPFR_RNDU);
        return r;
    }
    static Mag max(const Mag& a, const Mag& b) {
        Mag r;
        mpfr_max(r.m_, a.m_, b.m_, MPFR_RNDU);
        return r;
    }
    static Mag pow_ui(const Mag& a, unsigned long e) {
        Mag r;
        if (e == 0) {
            mpfr_set_ui(r.m_, 1, MPFR_RNDU);
            return r;
        }
        mpfr_pow_ui(r.m_, a.m_, e, MPFR_RNDU);
        return r;
    }

    friend bool operator<(const Mag& a, const Mag& b) { return mpfr_cmp(a.m_, b.m_) < 0; }
    friend bool operator<=(const Mag& a, const Mag& b) { return mpfr_cmp(a.m_, b.m_) <= 0; }

    std::string str() const {
        char buf[64];
        mpfr_snprintf(buf, sizeof buf, "%.3Re", m_);
        return buf;
    }

  private:
    mpfr_t m_;
};

} // namespace hml
