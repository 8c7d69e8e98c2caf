#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "hml/ball.hpp"
#include "hml/errors.hpp"
#include "hml/hgdata.hpp"
#include "hml/mag.hpp"
#include "hml/rational.hpp"

namespace hml {

// Truncated generalized power series  sum_{l=0}^{N} c_l w^{l+e}  in the scaled
// variable w = scale*z (scale a positive rational).  Coefficients are real
// balls: every series we expand has real coefficients (reciprocal-gamma values
// at rational points propagated by a rational recurrence); the complex
// structure of period vectors enters only later through root-of-unity
// combinations.
//
// tail_certified means |c_{l+1}| <= |c_l| holds for every l >= ratio_from, so
// the truncation error after index N >= ratio_from at 0 < w0 < 1 is bounded by
// a geometric series (see eval_power).
struct GeneralizedSeries {
    Rational offset;             // e
    Rational scale;              // w = scale * z
    std::vector<BallReal> coeff; // c_0 .. c_N
    bool tail_certified = false;
    long ratio_from = 0;

    long top_index() const { return static_cast<long>(coeff.size()) - 1; }
};

// Exact companion used for operator-identity checks: same shape, rational
// coefficients, no truncation bookkeeping.
struct RationalSeries {
    Rational offset;
    Rational scale;
    std::vector<Rational> coeff;
};

// One step of the coefficient recurrence: c_{l+1}/c_l at s = l+e equals
// prod_i (beta_i - s) / prod_i (s + 1 - alpha_i), an exact rational.
inline Rational coefficient_ratio(const HGData& d, const Rational& s) {
    Rational num(1), den(1);
    for (const auto& b : d.beta) num *= b - s;
    for (const auto& a : d.alpha) den *= s + Rational(1) - a;
    if (den.sign() == 0) throw domain_error("coefficient_ratio: recurrence pole at s = " + s.str());
    return num / den;
}

// Certifies |c_{l+1}/c_l| <= 1 for all s = l+e >= max(beta): with every
// beta_i <= 0 and the ascending-sorted pairing alpha_i <= 1 + beta_i, each
// factor satisfies 0 <= s - beta_i <= s + 1 - alpha_i.  Holds for all fourteen
// built-in families (untwisted: alpha in (0,1), beta = 0; twisted: alpha in
// [-1/2,1/2), beta = -1/2).
inline bool unit_coefficient_ratio(const HGData& d) {
    auto a = d.alpha;
    auto b = d.beta;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (size_t i = 0; i < a.size(); ++i) {
        if (b[i].sign() > 0) return false;
        if (a[i] > b[i] + Rational(1)) return false;
    }
    return true;
}

// First index l at which the geometric-tail argument applies: need s = l+e
// past every beta (so each |beta_i - s| = s - beta_i).
inline long ratio_start_index(const HGData& d, const Rational& e) {
    Rational bmax = d.beta.front();
    for (const auto& b : d.beta)
        if (b > bmax) bmax = b;
    if (e >= bmax) return 0;
    Rational gap = bmax - e;
    Int f = gap.floor();
    long l0 = f.to_long();
    if (Rational(f) < gap) ++l0; // ceil
    return std::max(0L, l0);
}

// Basis solution around 0 with exponent alpha_j: coefficients c_l equal the
// reciprocal-gamma product at s = l + alpha_j, seeded by one gamma evaluation
// and propagated by the exact rational one-step ratio.
inline GeneralizedSeries solution_series(const HGData& d, size_t j, const Rational& lambda, long nterms,
                                         mpfr_prec_t prec) {
    if (j >= d.alpha.size()) throw validation_error("solution_series: solution index out of range");
    GeneralizedSeries f;
    f.offset = d.alpha[j];
    f.scale = lambda;
    f.coeff.reserve(static_cast<size_t>(nterms) + 1);
    f.coeff.push_back(big_gamma(d, f.offset, prec));
    for (long l = 0; l < nterms; ++l)
        f.coeff.push_back(f.coeff.back().mul_rational(coefficient_ratio(d, f.offset + Rational(l))));
    f.tail_certified = unit_coefficient_ratio(d);
    f.ratio_from = ratio_start_index(d, f.offset);
    return f;
}

// Extension solution: integer exponents, coefficients are the
// sqrt(lambda~)-rescaled gamma values (the rescaling is a constant, so the
// coefficient recurrence is unchanged).
inline GeneralizedSeries extension_series(const HGData& twisted, const Rational& lambda, long nterms,
                                          mpfr_prec_t prec) {
    GeneralizedSeries f;
    f.offset = Rational(0);
    f.scale = lambda;
    f.coeff.reserve(static_cast<size_t>(nterms) + 1);
    f.coeff.push_back(big_gamma_tilde(twisted, Rational(0), prec));
    for (long l = 0; l < nterms; ++l)
        f.coeff.push_back(f.coeff.back().mul_rational(coefficient_ratio(twisted, Rational(l))));
    f.tail_certified = unit_coefficient_ratio(twisted);
    f.ratio_from = ratio_start_index(twisted, f.offset);
    return f;
}

// Exact-rational variants normalized to leading coefficient 1 (annihilation
// by a rational-coefficient operator is insensitive to the overall constant).
inline RationalSeries solution_series_exact(const HGData& d, size_t j, const Rational& lambda, long nterms) {
    if (j >= d.alpha.size()) throw validation_error("solution_series_exact: solution index out of range");
    RationalSeries f;
    f.offset = d.alpha[j];
    f.scale = lambda;
    f.coeff.reserve(static_cast<size_t>(nterms) + 1);
    f.coeff.push_back(Rational(1));
    for (long l = 0; l < nterms; ++l) f.coeff.push_back(f.coeff.back() * coefficient_ratio(d, f.offset + Rational(l)));
    return f;
}

inline RationalSeries extension_series_exact(const HGData& twisted, const Rational& lambda, long nterms) {
    RationalSeries f;
    f.offset = Rational(0);
    f.scale = lambda;
    f.coeff.reserve(static_cast<size_t>(nterms) + 1);
    f.coeff.push_back(Rational(1));
    for (long l = 0; l < nterms; ++l) f.coeff.push_back(f.coeff.back() * coefficient_ratio(twisted, Rational(l)));
    return f;
}

namespace detail {
inline Mag mag_upper_of_rational(const Rational& q) { return BallReal::from_rational(q, 64).abs_upper(); }

inline Mag mag_upper_of_rational_pow(const Rational& base, const Rational& expo) {
    return BallReal::from_rational(base, 64).pow_rational(expo).abs_upper();
}
} // namespace detail

// Number of terms after which the plain geometric tail at 0 < w0 < 1 drops
// below 10^-(digits): a double-precision estimate, always re-certified by the
// exact Mag bound inside eval_power.
inline long estimate_terms(const Rational& w0, long digits) {
    double w = w0.to_double();
    if (!(w > 0.0 && w < 1.0)) throw domain_error("estimate_terms: scaled point outside (0,1)");
    double n = static_cast<double>(digits) * 2.302585092994046 / -std::log(w);
    long N = static_cast<long>(n) + 16;
    return std::max(N, 24L);
}

// Evaluates sum_l c_l (l+e)^j w0^{l+e} at w0 = scale*z0, 0 < w0 < 1, for an
// integer operator power j in [-1, 4] (j applications of D = z d/dz; j = -1 is
// the termwise antiderivative weight).  The certified geometric tail is added
// to the radius: per-step term ratios for l >= N are at most
// q = w0 * ((N+1+e)/(N+e))^max(j,0), so the dropped mass is bounded by
// |c_N (N+e)^j w0^{N+e}| * q/(1-q) once q < 1 (checked in exact arithmetic).
inline BallReal eval_power(const GeneralizedSeries& f, long j, const Rational& z0, mpfr_prec_t prec) {
    if (f.coeff.empty()) return BallReal::zero(prec);
    const Rational w0 = f.scale * z0;
    if (w0.sign() <= 0 || w0 >= Rational(1)) throw domain_error("eval_power: scaled point w0 = " + w0.str() + " outside (0,1)");
    const long N = f.top_index();
    const Rational& e = f.offset;
    if (!f.tail_certified || N < f.ratio_from)
        throw precision_error("eval_power: series carries no certified tail bound");

    BallReal w = BallReal::from_rational(w0, prec);
    BallReal acc = BallReal::zero(prec);
    for (long l = N; l >= 0; --l) {
        Rational le = e + Rational(l);
        if (j < 0 && le.sign() == 0)
            throw domain_error("eval_power: termwise antiderivative of a constant term");
        acc = acc * w + f.coeff[static_cast<size_t>(l)].mul_rational(Rational::pow(le, j));
    }
    BallReal value = acc * w.pow_rational(e);

    // geometric tail certificate
    Rational growth(1);
    if (j > 0) {
        Rational base = (Rational(N + 1) + e) / (Rational(N) + e);
        growth = Rational::pow(base, j);
    }
    Rational q = w0 * growth;
    if (q >= Rational(1))
        throw precision_error("eval_power: tail ratio bound not below 1; increase the number of terms");
    Mag top = f.coeff[static_cast<size_t>(N)].abs_upper() *
              detail::mag_upper_of_rational(Rational::pow(Rational(N) + e, j)) *
              detail::mag_upper_of_rational_pow(w0, Rational(N) + e) * detail::mag_upper_of_rational(q);
    BallReal denom = BallReal::from_rational(Rational(1) - q, 64);
    mpfr_t dlo;
    mpfr_init2(dlo, 64);
    denom.abs_lower(dlo);
    value.add_error(Mag::div_upper(top, dlo));
    mpfr_clear(dlo);
    return value;
}

} // namespace hml
