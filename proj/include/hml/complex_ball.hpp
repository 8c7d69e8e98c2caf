#pragma once

#include "ball.hpp"

namespace hml {

// Complex ball: rectangular pair of real balls.

class BallComplex {
  public:
    explicit BallComplex(mpfr_prec_t prec = 64) : re_(prec), im_(prec) {}
    BallComplex(BallReal re, BallReal im) : re_(std::move(re)), im_(std::move(im)) {}

    static BallComplex zero(mpfr_prec_t prec) { return BallComplex(prec); }
    static BallComplex one(mpfr_prec_t prec) {
        return BallComplex(BallReal::one(prec), BallReal::zero(prec));
    }
    static BallComplex i_unit(mpfr_prec_t prec) {
        return BallComplex(BallReal::zero(prec), BallReal::one(prec));
    }
    static BallComplex from_real(const BallReal& x) {
        return BallComplex(x, BallReal::zero(x.prec()));
    }
    static BallComplex from_rational(const Rational& q, mpfr_prec_t prec) {
        return from_real(BallReal::from_rational(q, prec));
    }
    // e^(2 pi i theta) for rational theta.
    static BallComplex exp_2pi_i(const Rational& theta, mpfr_prec_t prec) {
        BallReal ang = BallReal::pi(prec).mul_rational(theta * Rational(2));
        return BallComplex(ang.cos_ball(), ang.sin_ball());
    }

    const BallReal& re() const { return re_; }
    const BallReal& im() const { return im_; }
    mpfr_prec_t prec() const { return std::max(re_.prec(), im_.prec()); }

    bool is_finite() const { return re_.is_finite() && im_.is_finite(); }
    bool contains_zero() const { return re_.contains_zero() && im_.contains_zero(); }

    friend BallComplex operator+(const BallComplex& a, const BallComplex& b) {
        return BallComplex(a.re_ + b.re_, a.im_ + b.im_);
    }
    friend BallComplex operator-(const BallComplex& a, const BallComplex& b) {
        return BallComplex(a.re_ - b.re_, a.im_ - b.im_);
    }
    friend BallComplex operator*(const BallComplex& a, const BallComplex& b) {
        return BallComplex(a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_);
    }
    friend BallComplex operator/(const BallComplex& a, const BallComplex& b) {
        BallReal n = b.norm_sq();
        if (n.contains_zero())
            throw domain_error("BallComplex: division by ball containing zero");
        BallComplex num = a * b.conj();
        return BallComplex(num.re_ / n, num.im_ / n);
    }
    BallComplex operator-() const { return BallComplex(-re_, -im_); }
    BallComplex& operator+=(const BallComplex& o) { *this = *this + o; return *this; }
    BallComplex& operator-=(const BallComplex& o) { *this = *this - o; return *this; }
    BallComplex& operator*=(const BallComplex& o) { *this = *this * o; return *this; }
    BallComplex& operator/=(const BallComplex& o) { *this = *this / o; return *this; }

    BallComplex conj() const { return BallComplex(re_, -im_); }
    BallComplex mul_i() const { return BallComplex(-im_, re_); }
    BallComplex mul_real(const BallReal& x) const { return BallComplex(re_ * x, im_ * x); }
    BallComplex mul_rational(const Rational& q) const {
        return BallComplex(re_.mul_rational(q), im_.mul_rational(q));
    }
    BallComplex mul_2exp(long e) const { return BallComplex(re_.mul_2exp(e), im_.mul_2exp(e)); }
    void add_error(const Mag& e) {
        re_.add_error(e);
        im_.add_error(e);
    }

    BallReal norm_sq() const { return re_ * re_ + im_ * im_; }
    BallReal abs_ball() const { return norm_sq().sqrt_ball(); }

    BallComplex inv() const { return one(prec()) / *this; }

    BallComplex pow_si(long e) const {
        if (e == 0) return one(prec());
        if (e < 0) return inv().pow_si(-e);
        BallComplex base = *this, acc = one(prec());
        unsigned long k = (unsigned long)e;
        while (k) {
            if (k & 1) acc *= base;
            k >>= 1;
            if (k) base *= base;
        }
        return acc;
    }

    BallComplex exp_ball() const {
        BallReal ex = re_.exp_ball();
        return BallComplex(ex * im_.cos_ball(), ex * im_.sin_ball());
    }

    // Principal log; the ball must be certified away from the branch cut
    // (-inf, 0] — i.e. either Re > 0, or Im bounded away from 0.
    BallComplex log_principal() const {
        mpfr_prec_t p = prec();
        BallReal half_lognorm = norm_sq().log_ball().mul_2exp(-1);
        BallReal arg(p);
        if (re_.is_positive()) {
            arg = (im_ / re_).atan_ball();
        } else if (im_.is_positive()) {
            // arg = pi/2 - atan(x/y)
            arg = BallReal::pi(p).mul_2exp(-1) - (re_ / im_).atan_ball();
        } else if (im_.is_negative()) {
            // arg = -pi/2 + atan(x/(-y))
            arg = (re_ / (-im_)).atan_ball() - BallReal::pi(p).mul_2exp(-1);
        } else {
            throw domain_error("log_principal: ball touches the branch cut (-inf, 0]");
        }
        return BallComplex(half_lognorm, arg);
    }

    // z^s = exp(s log z), principal branch.
    BallComplex pow(const BallComplex& s) const { return (s * log_principal()).exp_ball(); }

    BallComplex sin_ball() const {
        // sin(x+iy) = sin x cosh y + i cos x sinh y
        return BallComplex(re_.sin_ball() * im_.cosh_ball(), re_.cos_ball() * im_.sinh_ball());
    }

    bool abs_ok_to_digits(long d) const {
        return re_.abs_ok_to_digits(d) && im_.abs_ok_to_digits(d);
    }

    std::string str(int digits = 20) const {
        return re_.str(digits) + " + " + im_.str(digits) + "*i";
    }

  private:
    BallReal re_, im_;
};

} // namespace hml
