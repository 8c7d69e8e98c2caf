#pragma once

#include <mutex>
#include <vector>

#include "complex_ball.hpp"

namespace hml {

// Exact harmonic number H_n = 1 + 1/2 + ... + 1/n.
inline Rational harmonic(unsigned long n) {
    Rational h(0);
    for (unsigned long k = 1; k <= n; ++k) h += Rational(1, (long)k);
    return h;
}

namespace detail {

// Bernoulli numbers (B_1 = -1/2 convention) via the defining recurrence
// sum_{j<=m} C(m+1,j) B_j = 0. Cached, grown on demand.
inline const std::vector<Rational>& bernoulli_upto(size_t m) {
    static std::vector<Rational> cache{Rational(1)};
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    while (cache.size() <= m) {
        size_t k = cache.size();
        Rational s(0);
        for (size_t j = 0; j < k; ++j)
            s += cache[j] * Rational(Int::binomial(k + 1, j), Int(1));
        cache.push_back(-s / Rational((long)k + 1));
    }
    return cache;
}

inline Rational bernoulli(size_t m) { return bernoulli_upto(m)[m]; }

} // namespace detail

// log Gamma(z), principal branch, for balls with certified Re(z) > 0.
// Argument is shifted right until Stirling's series with K terms carries a
// provable remainder below the working precision; the remainder bound
// (next-term times sec^{2K+3}(theta/2), valid for |arg z| < pi/2, with an
// extra safety factor) is added to the radius.
inline BallComplex lngamma_positive_re(const BallComplex& z, mpfr_prec_t prec) {
    mpfr_prec_t pw = prec + 32;

    // Choose shift so Re(w) >= max(r0, |Im w|): then |w| >= r0 and |arg w| <= pi/4.
    double r0 = 0.1103 * (double)pw + 8.0;
    mpfr_t t;
    mpfr_init2(t, 64);
    z.re().lower(t);
    double re_lo = mpfr_get_d(t, MPFR_RNDD);
    mpfr_clear(t);
    double im_hi = z.im().abs_upper().to_double();
    if (!(re_lo > 0))
        throw domain_error("lngamma: Re(z) not certified positive");
    double need = r0 > im_hi ? r0 : im_hi;
    long n = 0;
    if (re_lo < need) n = (long)(need - re_lo) + 1;

    BallComplex w = z + BallComplex::from_real(BallReal::from_long(n, pw));

    long K = (long)(3.1416 * r0) + 4;
    const auto& bern = detail::bernoulli_upto((size_t)(2 * K + 2));

    // S = (w - 1/2) log w - w + (1/2) log(2 pi) + sum_{k=1}^{K} B_{2k}/((2k)(2k-1)) w^{1-2k}
    BallComplex logw = w.log_principal();
    BallComplex S = (w - BallComplex::from_rational(Rational(1, 2), pw)) * logw - w;
    BallReal two_pi = BallReal::pi(pw).mul_2exp(1);
    S += BallComplex::from_real(two_pi.log_ball().mul_2exp(-1));

    BallComplex winv = w.inv();
    BallComplex u = winv * winv;
    BallComplex pw_term = winv; // w^{1-2k} for k=1 is w^{-1}
    for (long k = 1; k <= K; ++k) {
        Rational c = bern[(size_t)(2 * k)] / Rational((2 * k) * (2 * k - 1));
        S += pw_term.mul_rational(c);
        if (k < K) pw_term *= u;
    }

    // Remainder bound.
    {
        mpfr_t lo;
        mpfr_init2(lo, 64);
        BallReal wabs = w.abs_ball();
        wabs.lower(lo);
        BallReal lob = BallReal::from_mpfr(lo, 64);
        mpfr_clear(lo);
        BallReal bnext = BallReal::from_rational(
            detail::bernoulli((size_t)(2 * K + 2)).abs() /
                Rational((2 * K + 2) * (long)(2 * K + 1)),
            64);
        BallReal sec8 = (BallReal::pi(64).mul_rational(Rational(1, 8))).cos_ball().inv();
        BallReal bound = bnext / lob.pow_si(2 * K + 1) * sec8.pow_si(2 * K + 3);
        Mag rem = bound.abs_upper().mul_2exp(2); // safety factor 4
        S.add_error(rem);
    }

    // Undo the shift: log Gamma(z) = S - sum_{j=0}^{n-1} log(z + j).
    for (long j = 0; j < n; ++j) {
        BallComplex zj = z + BallComplex::from_real(BallReal::from_long(j, pw));
        S -= zj.log_principal();
    }
    return S;
}

// 1/Gamma(z): entire, so this is total. Exact zeros at exactly-represented
// nonpositive integers; reflection handles Re(z) < 1/2.
inline BallComplex gamma_reciprocal(const BallComplex& z, mpfr_prec_t prec) {
    // Exact-pole fast path: z an exact nonpositive integer.
    if (z.im().is_exact() && mpfr_zero_p(z.im().mid()) && z.re().is_exact()) {
        Rational q = z.re().mid_rational();
        if (q.is_integer() && q.sign() <= 0)
            return BallComplex::zero(prec);
    }
    mpfr_prec_t pw = prec + 32;
    double re_mid = z.re().mid_double();
    if (re_mid >= 0.5) {
        BallComplex lg = lngamma_positive_re(z, pw);
        return (-lg).exp_ball();
    }
    // 1/Gamma(z) = sin(pi z) Gamma(1-z) / pi
    BallComplex one_minus = BallComplex::one(pw) - z;
    BallComplex g = lngamma_positive_re(one_minus, pw).exp_ball();
    BallReal piw = BallReal::pi(pw);
    BallComplex s = (z.mul_real(piw)).sin_ball();
    return (s * g).mul_real(piw.inv());
}

// Gamma(z); throws domain_error if the reciprocal cannot be certified
// nonzero (pole, or a ball too wide to separate from one).
inline BallComplex gamma_complex(const BallComplex& z, mpfr_prec_t prec) {
    BallComplex r = gamma_reciprocal(z, prec);
    if (r.contains_zero())
        throw domain_error("gamma: ball meets a pole of Gamma (reciprocal contains zero)");
    return r.inv();
}

// Gamma on certified-positive real balls, via monotonicity around the
// minimum x0 = 1.4616... (Gamma(x0) = 0.8856031944... > 0.88560).
inline BallReal gamma_real_pos(const BallReal& x, mpfr_prec_t prec) {
    if (!x.is_positive()) throw domain_error("gamma_real_pos: ball not certified positive");
    mpfr_prec_t pw = prec + 16;
    mpfr_t lo, hi, a, b;
    mpfr_init2(lo, pw);
    mpfr_init2(hi, pw);
    mpfr_init2(a, pw);
    mpfr_init2(b, pw);
    x.lower(lo);
    x.upper(hi);
    BallReal out(pw);
    if (mpfr_cmp_d(hi, 1.4616) <= 0) { // decreasing region
        mpfr_gamma(a, hi, MPFR_RNDD);
        mpfr_gamma(b, lo, MPFR_RNDU);
        out = BallReal::from_endpoints(a, b, pw);
    } else if (mpfr_cmp_d(lo, 1.4617) >= 0) { // increasing region
        mpfr_gamma(a, lo, MPFR_RNDD);
        mpfr_gamma(b, hi, MPFR_RNDU);
        out = BallReal::from_endpoints(a, b, pw);
    } else { // straddles the minimum
        mpfr_gamma(a, lo, MPFR_RNDU);
        mpfr_gamma(b, hi, MPFR_RNDU);
        mpfr_max(b, a, b, MPFR_RNDU);
        mpfr_set_d(a, 0.88560, MPFR_RNDD); // certified lower bound of Gamma(x0)
        out = BallReal::from_endpoints(a, b, pw);
    }
    mpfr_clear(lo);
    mpfr_clear(hi);
    mpfr_clear(a);
    mpfr_clear(b);
    return out;
}

inline BallReal gamma_rational_pos(const Rational& q, mpfr_prec_t prec) {
    return gamma_real_pos(BallReal::from_rational(q, prec + 16), prec);
}

// 1/Gamma at exact rational points: exact zero at nonpositive integers,
// direct inverse for x > 0, reflection 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi
// for x < 0.
inline BallReal gamma_reciprocal_rational(const Rational& x, mpfr_prec_t prec) {
    if (x.is_integer() && x.sign() <= 0) return BallReal::zero(prec);
    mpfr_prec_t pw = prec + 16;
    if (x.sign() > 0) return gamma_rational_pos(x, pw).inv();
    BallReal g1mx = gamma_rational_pos(Rational(1) - x, pw);
    BallReal pi_b = BallReal::pi(pw);
    BallReal s = pi_b.mul_rational(x).sin_ball();
    return s * g1mx / pi_b;
}

// digamma at rational arguments via the Gauss closed form
//   psi(p/s) = -gamma - ln(2s) - (pi/2) cot(pi p/s)
//              + 2 sum_{k=1}^{floor((s-1)/2)} cos(2 pi k p / s) ln sin(pi k / s),
// for 0 < p < s, extended everywhere by psi(x+1) = psi(x) + 1/x.
// Poles (nonpositive integers) throw.
inline BallReal digamma_rational(const Rational& x, mpfr_prec_t prec) {
    if (x.is_integer() && x.sign() <= 0)
        throw domain_error("digamma: pole at nonpositive integer " + x.str());
    mpfr_prec_t pw = prec + 16;

    if (x.is_integer()) {
        // psi(m) = -gamma + H_{m-1}
        unsigned long m = (unsigned long)x.num().to_long();
        return BallReal::from_rational(harmonic(m - 1), pw) - BallReal::euler_gamma(pw);
    }

    // Shift to y in (0,1): psi(x) = psi(y) + R with exact rational R.
    Rational y = x.frac();
    Rational R(0);
    Int n = x.floor();
    if (n.sign() > 0) {
        long nn = n.to_long();
        for (long k = 0; k < nn; ++k) R += (y + Rational(k)).inv();
    } else if (n.sign() < 0) {
        long nn = n.to_long();
        for (long m = nn; m < 0; ++m) R -= (y + Rational(m)).inv();
    }

    long p = y.num().to_long();
    long s = y.den().to_long();
    BallReal pi_b = BallReal::pi(pw);
    BallReal acc = -BallReal::euler_gamma(pw);
    acc -= BallReal::from_long(2 * s, pw).log_ball();
    // cot term
    BallReal ang = pi_b.mul_rational(y);
    acc -= pi_b.mul_2exp(-1) * (ang.cos_ball() / ang.sin_ball());
    for (long k = 1; 2 * k <= s - 1; ++k) {
        BallReal c = pi_b.mul_rational(Rational(2 * k * p, s)).cos_ball();
        BallReal ls = pi_b.mul_rational(Rational(k, s)).sin_ball().log_ball();
        acc += (c * ls).mul_2exp(1);
    }
    return acc + BallReal::from_rational(R, pw);
}

} // namespace hml
