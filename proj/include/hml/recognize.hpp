#pragma once

#include <optional>

#include "ball.hpp"

namespace hml {

namespace detail {

// Best rational approximation to mu with denominator <= M, via the
// continued-fraction walk with a clamped final partial quotient
// (semiconvergent). Returns the closest admissible fraction.
inline Rational best_approx(const Rational& mu, const Int& M) {
    Int num = mu.num(), den = mu.den();
    if (den <= M) return mu;
    // Convergents h/k; h_{-1}/k_{-1} = 1/0, h_0/k_0 = a0/1.
    Int hp(1), kp(0); // previous
    Int a, h, k;
    Int n = num, d = den;
    // a0 = floor(num/den)
    {
        mpz_fdiv_q(a.raw(), n.raw(), d.raw());
        Int r = n - a * d;
        n = d;
        d = r;
        h = a;
        k = Int(1);
    }
    while (d.sign() != 0) {
        Int an, r;
        mpz_fdiv_qr(an.raw(), r.raw(), n.raw(), d.raw());
        Int h2 = an * h + hp;
        Int k2 = an * k + kp;
        if (k2 > M) {
            // Largest admissible semiconvergent between h/k and h2/k2.
            Int acl = (M - kp) / k;
            Rational conv(h, k);
            if (acl.sign() <= 0) return conv;
            Rational semi(acl * h + hp, acl * k + kp);
            return ((mu - semi).abs() < (mu - conv).abs()) ? semi : conv;
        }
        hp = h;
        kp = k;
        h = h2;
        k = k2;
        n = d;
        d = r;
    }
    return Rational(h, k); // exact terminating CF within bound
}

} // namespace detail

// Recognize the unique rational with denominator <= max_den inside the ball,
// if any. Three outcomes:
//  - a rational p/q with q <= max_den lies within the radius: returned
//    (unique, because rad < 1/(2 max_den^2) separates such fractions);
//  - no admissible rational lies within the radius: nullopt (certified absence);
//  - radius >= 1/(2 max_den^2): precision_error (cannot certify either way).
inline std::optional<Rational> recognize_rational(const BallReal& x, const Int& max_den) {
    if (max_den.sign() <= 0) throw validation_error("recognize_rational: max_den must be positive");
    Rational rho = x.rad_rational();
    Rational sep = Rational(Int(1), Int(2) * max_den * max_den);
    if (!(rho < sep))
        throw precision_error("recognize_rational: radius " + rho.str() +
                              " too large to certify a unique denominator-bounded rational");
    Rational mu = x.mid_rational();
    Rational best = detail::best_approx(mu, max_den);
    if ((mu - best).abs() <= rho) return best;
    return std::nullopt;
}

inline std::optional<Rational> recognize_rational(const BallReal& x, long max_den = 1000000000L) {
    return recognize_rational(x, Int(max_den));
}

} // namespace hml
