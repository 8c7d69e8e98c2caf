#pragma once

#include <mpfr.h>

#include <string>
#include <utility>

#include "errors.hpp"
#include "mag.hpp"
#include "rational.hpp"

namespace hml {

// Real ball: arbitrary-precision midpoint (MPFR) plus an upward-rounded
// low-precision radius. Every operation returns a ball that contains the
// exact image of every point of the input balls; midpoint rounding errors
// are absorbed into the radius via the mpfr ternary value.

class BallReal {
  public:
    explicit BallReal(mpfr_prec_t prec = 64) : prec_(prec) {
        mpfr_init2(m_, prec);
        mpfr_set_zero(m_, 1);
    }
    BallReal(const BallReal& o) : prec_(o.prec_), r_(o.r_) {
        mpfr_init2(m_, prec_);
        mpfr_set(m_, o.m_, MPFR_RNDN);
    }
    BallReal(BallReal&& o) noexcept : prec_(o.prec_), r_(std::move(o.r_)) {
        mpfr_init2(m_, prec_);
        mpfr_swap(m_, o.m_);
    }
    BallReal& operator=(const BallReal& o) {
        if (this != &o) {
            mpfr_set_prec(m_, o.prec_);
            mpfr_set(m_, o.m_, MPFR_RNDN);
            prec_ = o.prec_;
            r_ = o.r_;
        }
        return *this;
    }
    BallReal& operator=(BallReal&& o) noexcept {
        mpfr_swap(m_, o.m_);
        std::swap(prec_, o.prec_);
        r_ = std::move(o.r_);
        return *this;
    }
    ~BallReal() { mpfr_clear(m_); }

    // --- constructors -----------------------------------------------------

    static BallReal zero(mpfr_prec_t prec) { return BallReal(prec); }
    static BallReal one(mpfr_prec_t prec) { return from_long(1, prec); }
    static BallReal from_long(long v, mpfr_prec_t prec) {
        BallReal b(prec);
        int t = mpfr_set_si(b.m_, v, MPFR_RNDN);
        if (t != 0) b.r_ += Mag::ulp(b.m_, prec);
        return b;
    }
    static BallReal from_int(const Int& v, mpfr_prec_t prec) {
        BallReal b(prec);
        int t = mpfr_set_z(b.m_, v.raw(), MPFR_RNDN);
        if (t != 0) b.r_ += Mag::ulp(b.m_, prec);
        return b;
    }
    static BallReal from_rational(const Rational& q, mpfr_prec_t prec) {
        BallReal b(prec);
        int t = mpfr_set_q(b.m_, q.raw(), MPFR_RNDN);
        if (t != 0) b.r_ += Mag::ulp(b.m_, prec);
        return b;
    }
    static BallReal from_mpfr(mpfr_srcptr x, mpfr_prec_t prec) {
        BallReal b(prec);
        int t = mpfr_set(b.m_, x, MPFR_RNDN);
        if (t != 0) b.r_ += Mag::ulp(b.m_, prec);
        return b;
    }
    static BallReal from_midrad(mpfr_srcptr mid, const Mag& rad, mpfr_prec_t prec) {
        BallReal b = from_mpfr(mid, prec);
        b.r_ += rad;
        return b;
    }
    // Ball containing [lo, hi].
    static BallReal from_endpoints(mpfr_srcptr lo, mpfr_srcptr hi, mpfr_prec_t prec) {
        BallReal b(prec);
        int t = mpfr_add(b.m_, lo, hi, MPFR_RNDN);
        t |= mpfr_div_2ui(b.m_, b.m_, 1, MPFR_RNDN);
        if (t != 0) b.r_ += Mag::ulp(b.m_, prec);
        mpfr_t d;
        mpfr_init2(d, Mag::kPrec);
        mpfr_sub(d, hi, b.m_, MPFR_RNDU);
        Mag d1 = Mag::from_mpfr(d);
        mpfr_sub(d, b.m_, lo, MPFR_RNDU);
        Mag d2 = Mag::from_mpfr(d);
        mpfr_clear(d);
        b.r_ += Mag::max(d1, d2);
        return b;
    }

    static BallReal pi(mpfr_prec_t prec) {
        BallReal b(prec);
        mpfr_const_pi(b.m_, MPFR_RNDN);
        b.r_ += Mag::ulp(b.m_, prec);
        return b;
    }
    static BallReal euler_gamma(mpfr_prec_t prec) {
        BallReal b(prec);
        mpfr_const_euler(b.m_, MPFR_RNDN);
        b.r_ += Mag::ulp(b.m_, prec);
        return b;
    }
    static BallReal ln2(mpfr_prec_t prec) {
        BallReal b(prec);
        mpfr_const_log2(b.m_, MPFR_RNDN);
        b.r_ += Mag::ulp(b.m_, prec);
        return b;
    }

    // --- accessors ---------------------------------------------------------

    mpfr_prec_t prec() const { return prec_; }
    mpfr_srcptr mid() const { return m_; }
    const Mag& rad() const { return r_; }
    void add_error(const Mag& e) { r_ += e; }

    bool is_finite() const { return mpfr_number_p(m_) && r_.is_finite(); }
    bool is_exact() const { return r_.is_zero(); }
    double mid_double() const { return mpfr_get_d(m_, MPFR_RNDN); }

    bool contains_zero() const {
        mpfr_t a;
        mpfr_init2(a, Mag::kPrec);
        mpfr_abs(a, m_, MPFR_RNDD);
        bool in = mpfr_cmp(a, r_.raw()) <= 0;
        mpfr_clear(a);
        return in;
    }
    bool is_positive() const { return mpfr_sgn(m_) > 0 && !contains_zero(); }
    bool is_negative() const { return mpfr_sgn(m_) < 0 && !contains_zero(); }
    bool is_nonzero() const { return !contains_zero(); }

    // Certified |x| >= result (rounded down, >= 0).
    void abs_lower(mpfr_ptr out) const {
        mpfr_abs(out, m_, MPFR_RNDD);
        mpfr_sub(out, out, r_.raw(), MPFR_RNDD);
        if (mpfr_sgn(out) < 0) mpfr_set_zero(out, 1);
    }
    Mag abs_upper() const { return Mag::from_mpfr(m_) + r_; }

    void lower(mpfr_ptr out) const { mpfr_sub(out, m_, r_.raw(), MPFR_RNDD); }
    void upper(mpfr_ptr out) const { mpfr_add(out, m_, r_.raw(), MPFR_RNDU); }

    Rational mid_rational() const {
        if (!mpfr_number_p(m_)) throw precision_error("mid_rational: non-finite midpoint");
        if (mpfr_zero_p(m_)) return Rational(0);
        mpz_t z;
        mpz_init(z);
        mpfr_exp_t e = mpfr_get_z_2exp(z, m_);
        Int num;
        mpz_set(num.raw(), z);
        mpz_clear(z);
        Rational q(num);
        if (e >= 0)
            q *= Rational(Int::pow(Int(2), (unsigned long)e));
        else
            q /= Rational(Int::pow(Int(2), (unsigned long)(-e)));
        return q;
    }
    // Exact rational upper bound of the radius.
    Rational rad_rational() const {
        if (!r_.is_finite()) throw precision_error("rad_rational: infinite radius");
        if (r_.is_zero()) return Rational(0);
        mpz_t z;
        mpz_init(z);
        mpfr_exp_t e = mpfr_get_z_2exp(z, r_.raw());
        Int num;
        mpz_set(num.raw(), z);
        mpz_clear(z);
        Rational q(num);
        if (e >= 0)
            q *= Rational(Int::pow(Int(2), (unsigned long)e));
        else
            q /= Rational(Int::pow(Int(2), (unsigned long)(-e)));
        return q;
    }

    // --- arithmetic ----------------------------------------------------------

    friend BallReal operator+(const BallReal& a, const BallReal& b) {
        BallReal c(std::max(a.prec_, b.prec_));
        int t = mpfr_add(c.m_, a.m_, b.m_, MPFR_RNDN);
        c.r_ = a.r_ + b.r_;
        if (t != 0) c.r_ += Mag::ulp(c.m_, c.prec_);
        return c;
    }
    friend BallReal operator-(const BallReal& a, const BallReal& b) {
        BallReal c(std::max(a.prec_, b.prec_));
        int t = mpfr_sub(c.m_, a.m_, b.m_, MPFR_RNDN);
        c.r_ = a.r_ + b.r_;
        if (t != 0) c.r_ += Mag::ulp(c.m_, c.prec_);
        return c;
    }
    friend BallReal operator*(const BallReal& a, const BallReal& b) {
        BallReal c(std::max(a.prec_, b.prec_));
        int t = mpfr_mul(c.m_, a.m_, b.m_, MPFR_RNDN);
        c.r_ = Mag::from_mpfr(a.m_) * b.r_ + Mag::from_mpfr(b.m_) * a.r_ + a.r_ * b.r_;
        if (t != 0) c.r_ += Mag::ulp(c.m_, c.prec_);
        return c;
    }
    friend BallReal operator/(const BallReal& a, const BallReal& b) {
        if (b.contains_zero()) throw domain_error("BallReal: division by ball containing zero");
        BallReal c(std::max(a.prec_, b.prec_));
        int t = mpfr_div(c.m_, a.m_, b.m_, MPFR_RNDN);
        mpfr_t blo;
        mpfr_init2(blo, Mag::kPrec);
        b.abs_lower(blo);
        Mag num = a.r_ + Mag::from_mpfr(c.m_) * b.r_;
        c.r_ = Mag::div_upper(num, blo);
        mpfr_clear(blo);
        if (t != 0) c.r_ += Mag::ulp(c.m_, c.prec_);
        return c;
    }
    BallReal operator-() const {
        BallReal c(prec_);
        mpfr_neg(c.m_, m_, MPFR_RNDN); // exact
        c.r_ = r_;
        return c;
    }
    BallReal& operator+=(const BallReal& o) { *this = *this + o; return *this; }
    BallReal& operator-=(const BallReal& o) { *this = *this - o; return *this; }
    BallReal& operator*=(const BallReal& o) { *this = *this * o; return *this; }
    BallReal& operator/=(const BallReal& o) { *this = *this / o; return *this; }

    BallReal mul_rational(const Rational& q) const {
        BallReal c(prec_);
        int t = mpfr_mul_q(c.m_, m_, q.raw(), MPFR_RNDN);
        mpfr_t qa;
        mpfr_init2(qa, Mag::kPrec);
        mpfr_set_q(qa, q.raw(), MPFR_RNDU);
        c.r_ = r_ * Mag::from_mpfr(qa);
        mpfr_clear(qa);
        if (t != 0) c.r_ += Mag::ulp(c.m_, c.prec_);
        return c;
    }
    BallReal mul_long(long v) const { return mul_rational(Rational(v)); }
    BallReal mul_2exp(long e) const {
        BallReal c(prec_);
        mpfr_mul_2si(c.m_, m_, e, MPFR_RNDN); // exact
        c.r_ = r_.mul_2exp(e);
        return c;
    }
    BallReal add_rational(const Rational& q) const { return *this + from_rational(q, prec_); }

    BallReal abs_ball() const {
        if (!contains_zero()) {
            BallReal c(prec_);
            mpfr_abs(c.m_, m_, MPFR_RNDN);
            c.r_ = r_;
            return c;
        }
        // Straddles zero: |x| in [0, |m|+r].
        mpfr_t hi, lo;
        mpfr_init2(hi, prec_);
        mpfr_init2(lo, prec_);
        mpfr_abs(hi, m_, MPFR_RNDU);
        mpfr_add(hi, hi, r_.raw(), MPFR_RNDU);
        mpfr_set_zero(lo, 1);
        BallReal c = from_endpoints(lo, hi, prec_);
        mpfr_clear(hi);
        mpfr_clear(lo);
        return c;
    }

    BallReal inv() const { return one(prec_) / *this; }

    BallReal pow_si(long e) const {
        if (e == 0) return one(prec_);
        if (e < 0) return inv().pow_si(-e);
        BallReal base = *this, acc = one(prec_);
        unsigned long k = (unsigned long)e;
        while (k) {
            if (k & 1) acc *= base;
            k >>= 1;
            if (k) base *= base;
        }
        return acc;
    }

    // --- elementary functions (all certified) -----------------------------

    BallReal sqrt_ball() const {
        mpfr_t lo, hi;
        mpfr_init2(lo, prec_);
        mpfr_init2(hi, prec_);
        lower(lo);
        upper(hi);
        if (mpfr_sgn(lo) < 0) {
            mpfr_clear(lo);
            mpfr_clear(hi);
            throw domain_error("sqrt: ball extends below zero");
        }
        mpfr_sqrt(lo, lo, MPFR_RNDD);
        mpfr_sqrt(hi, hi, MPFR_RNDU);
        BallReal c = from_endpoints(lo, hi, prec_);
        mpfr_clear(lo);
        mpfr_clear(hi);
        return c;
    }

    BallReal exp_ball() const { return monotone_increasing(mpfr_exp); }
    BallReal log_ball() const {
        mpfr_t lo;
        mpfr_init2(lo, prec_);
        lower(lo);
        bool bad = mpfr_sgn(lo) <= 0;
        mpfr_clear(lo);
        if (bad) throw domain_error("log: ball touches (-inf, 0]");
        return monotone_increasing(mpfr_log);
    }
    BallReal atan_ball() const { return monotone_increasing(mpfr_atan); }
    BallReal sinh_ball() const { return monotone_increasing(mpfr_sinh); }

    // sin/cos via Lipschitz constant 1.
    BallReal sin_ball() const { return lipschitz1(mpfr_sin); }
    BallReal cos_ball() const { return lipschitz1(mpfr_cos); }

    BallReal cosh_ball() const {
        mpfr_t lo, hi;
        mpfr_init2(lo, prec_);
        mpfr_init2(hi, prec_);
        lower(lo);
        upper(hi);
        BallReal out(prec_);
        if (mpfr_sgn(lo) >= 0) {
            mpfr_cosh(lo, lo, MPFR_RNDD);
            mpfr_cosh(hi, hi, MPFR_RNDU);
            out = from_endpoints(lo, hi, prec_);
        } else if (mpfr_sgn(hi) <= 0) {
            mpfr_t t;
            mpfr_init2(t, prec_);
            mpfr_cosh(t, hi, MPFR_RNDD);
            mpfr_cosh(hi, lo, MPFR_RNDU);
            out = from_endpoints(t, hi, prec_);
            mpfr_clear(t);
        } else {
            // Interval straddles 0, where cosh attains its minimum 1.
            mpfr_cosh(lo, lo, MPFR_RNDU);
            mpfr_cosh(hi, hi, MPFR_RNDU);
            mpfr_max(hi, lo, hi, MPFR_RNDU);
            mpfr_set_ui(lo, 1, MPFR_RNDD);
            out = from_endpoints(lo, hi, prec_);
        }
        mpfr_clear(lo);
        mpfr_clear(hi);
        return out;
    }

    // x^q for rational q via exp(q log x); requires x certified positive.
    BallReal pow_rational(const Rational& q) const {
        if (q.is_integer() && q.num().fits_long()) return pow_si(q.num().to_long());
        if (!is_positive()) throw domain_error("pow_rational: base not certified positive");
        return log_ball().mul_rational(q).exp_ball();
    }

    // --- queries ------------------------------------------------------------

    // True if the radius certifies at least d decimal digits absolutely
    // (rad <= 10^-d).
    bool abs_ok_to_digits(long d) const {
        return r_ <= mag_pow10(-d);
    }
    static Mag mag_pow10(long e) {
        mpfr_t t;
        mpfr_init2(t, Mag::kPrec);
        mpfr_set_si(t, 10, MPFR_RNDU);
        mpfr_pow_si(t, t, e, MPFR_RNDU);
        Mag m = Mag::from_mpfr(t);
        mpfr_clear(t);
        return m;
    }

    // a certainly < b (entire balls).
    static bool certainly_less(const BallReal& a, const BallReal& b) {
        mpfr_t au, bl;
        mpfr_init2(au, Mag::kPrec);
        mpfr_init2(bl, Mag::kPrec);
        a.upper(au);
        b.lower(bl);
        bool out = mpfr_cmp(au, bl) < 0;
        mpfr_clear(au);
        mpfr_clear(bl);
        return out;
    }

    bool contains_rational(const Rational& q) const {
        Rational d = (mid_rational() - q).abs();
        return d <= rad_rational();
    }

    bool overlaps(const BallReal& o) const {
        Rational d = (mid_rational() - o.mid_rational()).abs();
        return d <= rad_rational() + o.rad_rational();
    }

    // Set containment (exact, via dyadic rationals): every point of o lies here.
    bool contains(const BallReal& o) const {
        Rational d = (mid_rational() - o.mid_rational()).abs();
        return d + o.rad_rational() <= rad_rational();
    }

    // Same midpoint and same radius, bit for bit.
    bool identical(const BallReal& o) const {
        return mpfr_equal_p(m_, o.m_) != 0 && mpfr_equal_p(r_.raw(), o.r_.raw()) != 0;
    }

    std::string mid_str(int digits = 20) const {
        char fmt[32], tmp[224];
        snprintf(fmt, sizeof fmt, "%%.%dRe", digits);
        mpfr_snprintf(tmp, sizeof tmp, fmt, m_);
        return tmp;
    }

    std::string rad_str() const { return r_.str(); }

    std::string str(int digits = 20) const {
        char buf[256];
        snprintf(buf, sizeof buf, "[%s +/- %s]", mid_str(digits).c_str(), r_.str().c_str());
        return buf;
    }

  private:
    using mpfr_unary = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

    BallReal monotone_increasing(mpfr_unary f) const {
        mpfr_t lo, hi;
        mpfr_init2(lo, prec_);
        mpfr_init2(hi, prec_);
        lower(lo);
        upper(hi);
        f(lo, lo, MPFR_RNDD);
        f(hi, hi, MPFR_RNDU);
        BallReal c = from_endpoints(lo, hi, prec_);
        mpfr_clear(lo);
        mpfr_clear(hi);
        return c;
    }
    BallReal lipschitz1(mpfr_unary f) const {
        BallReal c(prec_);
        int t = f(c.m_, m_, MPFR_RNDN);
        c.r_ = r_;
        if (t != 0) c.r_ += Mag::ulp(c.m_, prec_);
        return c;
    }

    mpfr_prec_t prec_;
    mpfr_t m_;
    Mag r_;
};

inline BallReal min_ball(const BallReal& a, const BallReal& b) {
    return BallReal::certainly_less(a, b) ? a : (BallReal::certainly_less(b, a) ? b : a);
}

} // namespace hml
