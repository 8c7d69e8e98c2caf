#pragma once
// Frobenius traces and Euler factors of the rank-4 hypergeometric motives.
//
// The trace over F_q (q = p^f) is a character sum: a ratio of Gauss sums for
// each index, summed over all multiplicative characters, with the fiber
// coordinate entering through a Teichmueller twist.  Gauss sums are evaluated
// p-adically by the Gross-Koblitz formula, whose Gamma_p arguments are the
// fractional parts <p^j(x + index)>; written that way the sum makes sense for
// every prime of good reduction, whether or not q = 1 mod the index level.
// Each term carries an exact power of (-p) coming from base-p digit sums, so
// the whole sum is integer arithmetic to a fixed modulus p^K.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "hml/errors.hpp"
#include "hml/hgdata.hpp"
#include "hml/padic.hpp"

namespace hml {

// A fiber of a hypergeometric family: index data plus the fiber coordinate.
struct MotivePoint {
    HGData data;
    Rational z0;
    Rational lambda;           // the family's rational scaling constant
    Rational trace_parameter;  // lambda * z0, the finite-field sum argument
};

inline MotivePoint motive_point(const HGData& d, const Rational& z0) {
    validate(d);
    if (d.rank() != 4)
        throw validation_error("motive point: rank-4 index data required");
    if (z0.sign() == 0) throw validation_error("motive point: z0 must be nonzero");
    MotivePoint pt;
    pt.data = d;
    pt.z0 = z0;
    pt.lambda = scaling_lambda(d);
    pt.trace_parameter = pt.lambda * z0;
    if (pt.trace_parameter == Rational(1))
        throw validation_error("motive point: singular fiber (lambda*z0 = 1)");
    return pt;
}

// Normalization conventions tying the character sum to the weight-3 trace.
// Frozen against an independent complex Gauss-sum evaluation plus
// integrality/divisibility sweeps; the calibration test asserts uniqueness.
struct TraceConventions {
    bool invert_parameter;  // feed 1/t rather than t to the character sum
    int sign;               // overall sign of the trace
};

inline TraceConventions trace_conventions() { return TraceConventions{false, +1}; }

// Weight normalization exponent: the trace is q^D times the character sum,
// with D = (weight + 1 - #{integral beta}) / 2 and weight 3 in rank 4.
inline int trace_weight_shift(const HGData& d) {
    int m0 = 0;
    for (const auto& b : d.beta)
        if (b.den() == Int(1)) ++m0;
    if ((4 - m0) % 2 != 0)
        throw validation_error("trace: an odd count of non-integral beta indices has no "
                               "half-integral weight normalization");
    return (4 - m0) / 2;
}

inline bool is_good_prime(const MotivePoint& pt, long p) {
    if (p == 2 || !is_prime_long(p)) return false;
    Int P(p);
    if (pt.data.index_lcm().divisible_by(P)) return false;
    const Rational& t = pt.trace_parameter;
    if (t.num().divisible_by(P) || t.den().divisible_by(P)) return false;
    Rational shift = Rational(1) - t;  // the singular fiber sits at t = 1
    if (shift.num().divisible_by(P)) return false;
    return true;
}

namespace detail {

// One reduced index value together with its multiplicity in the multiset.
struct IndexClass {
    Rational value;  // in [0,1)
    int mult;
};

inline std::vector<IndexClass> index_classes(const std::vector<Rational>& v) {
    std::map<Rational, int> m;
    for (const auto& x : v) m[x.frac()] += 1;
    std::vector<IndexClass> out;
    for (const auto& [val, c] : m) out.push_back({val, c});
    return out;
}

// Exact fractional-part bookkeeping for one index class at one prime power.
// All fractions share the denominator L = lcm(q-1, den(index)).
struct IndexSweep {
    long L = 1;          // common denominator
    long step = 1;       // L / (q-1): numerator increment per unit of r
    long base_neg = 0;   // numerator of <-index> scaled to L
    long base_pos = 0;   // numerator of <index> scaled to L
    int mult = 1;
    std::vector<long> ppow;  // p^j mod L for j < f

    // Numerators (over L) of <p^j(-x - index)> and <p^j(x + index)>
    long frac_neg(long r, int j) const {
        long base = (base_neg - (r % L) * (step % L)) % L;
        if (base < 0) base += L;
        return static_cast<long>((static_cast<__int128>(ppow[static_cast<size_t>(j)]) * base) % L);
    }
    long frac_pos(long r, int j) const {
        long base = ((r % L) * (step % L) + base_pos) % L;
        return static_cast<long>((static_cast<__int128>(ppow[static_cast<size_t>(j)]) * base) % L);
    }
    // Numerators of the r-independent reference parts <p^j(-index)>, <p^j(index)>.
    long ref_neg(int j) const {
        return static_cast<long>((static_cast<__int128>(ppow[static_cast<size_t>(j)]) * base_neg) % L);
    }
    long ref_pos(int j) const {
        return static_cast<long>((static_cast<__int128>(ppow[static_cast<size_t>(j)]) * base_pos) % L);
    }
};

inline IndexSweep make_sweep(const IndexClass& cls, long p, int f, long q1) {
    IndexSweep s;
    long d = cls.value.den().to_long();
    long g = std::gcd(q1, d);
    s.L = q1 / g * d;
    s.step = s.L / q1;
    long scaled = cls.value.num().to_long() * (s.L / d);  // numerator of <index> over L
    s.base_pos = scaled % s.L;
    s.base_neg = (s.L - s.base_pos) % s.L;
    s.mult = cls.mult;
    s.ppow.resize(static_cast<size_t>(f));
    long pw = 1 % s.L;
    for (int j = 0; j < f; ++j) {
        s.ppow[static_cast<size_t>(j)] = pw;
        pw = static_cast<long>((static_cast<__int128>(pw) * p) % s.L);
    }
    return s;
}

}  // namespace detail

// The raw weight-normalized trace with explicit conventions (for calibration
// tests); public callers use frobenius_trace below.
inline Int frobenius_trace_with(const MotivePoint& pt, long p, int f,
                                const TraceConventions& tc) {
    if (f != 1 && f != 2)
        throw validation_error("trace: only residue degrees 1 and 2 are supported");
    if (!is_good_prime(pt, p))
        throw validation_error("trace: " + std::to_string(p) +
                               " is not a good prime for this motive point");
    long q = p;
    for (int i = 1; i < f; ++i) q *= p;
    if (q > 40'000'000L)
        throw validation_error("trace: prime power too large for the character sum");
    const long q1 = q - 1;

    Rational t = tc.invert_parameter ? pt.trace_parameter.inv() : pt.trace_parameter;
    const int D = trace_weight_shift(pt.data);

    auto alpha = detail::index_classes(pt.data.alpha);
    auto beta = detail::index_classes(pt.data.beta);
    std::vector<detail::IndexSweep> asw, bsw;
    for (const auto& c : alpha) asw.push_back(detail::make_sweep(c, p, f, q1));
    for (const auto& c : beta) bsw.push_back(detail::make_sweep(c, p, f, q1));

    // Digit-sum exponents: xi_r = sum over indices and j of
    //   <p^j(-x-alpha)> - <p^j(-alpha)> + <p^j(x+beta)> - <p^j(beta)>,
    // an exact integer for every r; V = min xi_r sets the valuation shift.
    std::vector<long> xi(static_cast<size_t>(q1), 0);
    {
        long Lall = 1;
        for (const auto& s : asw) Lall = Lall / std::gcd(Lall, s.L) * s.L;
        for (const auto& s : bsw) Lall = Lall / std::gcd(Lall, s.L) * s.L;
        for (long r = 0; r < q1; ++r) {
            __int128 acc = 0;
            for (const auto& s : asw) {
                long scale = Lall / s.L;
                for (int j = 0; j < f; ++j)
                    acc += static_cast<__int128>(s.mult) * scale *
                           (s.frac_neg(r, j) - s.ref_neg(j));
            }
            for (const auto& s : bsw) {
                long scale = Lall / s.L;
                for (int j = 0; j < f; ++j)
                    acc += static_cast<__int128>(s.mult) * scale *
                           (s.frac_pos(r, j) - s.ref_pos(j));
            }
            if (acc % Lall != 0)
                throw validation_error("trace: digit-sum exponent is not an integer "
                                       "(inconsistent index data)");
            xi[static_cast<size_t>(r)] = static_cast<long>(acc / Lall);
        }
    }
    long V = *std::min_element(xi.begin(), xi.end());

    // Modulus: the trace is an integer of absolute value <= 4 q^{3/2}.
    long target = 0;
    {
        // smallest K with p^K >= 8 q^{3/2} + 2
        double need = 8.0 * std::pow(static_cast<double>(q), 1.5) + 2.0;
        double acc = 1.0;
        while (acc < need) {
            acc *= static_cast<double>(p);
            ++target;
        }
    }
    long shift = V + static_cast<long>(f) * D;  // total valuation carried outside the unit sum
    int K = static_cast<int>(std::max<long>(1, target - shift));

    GammaPTable tab(p, K);
    PadicContext ctx(p, K);
    const Int& mod = ctx.modulus();

    // r-independent reference Gauss-sum units, inverted once.
    Int den_units(1);
    for (const auto& s : asw)
        for (int j = 0; j < f; ++j) {
            Int g = tab.gamma_rational(Rational(Int(s.ref_neg(j)), Int(s.L)));
            for (int c = 0; c < s.mult; ++c) den_units = ctx.mul(den_units, g);
        }
    for (const auto& s : bsw)
        for (int j = 0; j < f; ++j) {
            Int g = tab.gamma_rational(Rational(Int(s.ref_pos(j)), Int(s.L)));
            for (int c = 0; c < s.mult; ++c) den_units = ctx.mul(den_units, g);
        }
    Int den_inv = ctx.inv(den_units);

    Int tau = ctx.teichmuller(ctx.reduce_rational(t));
    Int tau_pow(1);

    Int total(0);
    for (long r = 0; r < q1; ++r) {
        long e = xi[static_cast<size_t>(r)] - V;
        if (e < K) {
            Int unit(1);
            for (const auto& s : asw)
                for (int j = 0; j < f; ++j) {
                    Int g = tab.gamma_rational(Rational(Int(s.frac_neg(r, j)), Int(s.L)));
                    for (int c = 0; c < s.mult; ++c) unit = ctx.mul(unit, g);
                }
            for (const auto& s : bsw)
                for (int j = 0; j < f; ++j) {
                    Int g = tab.gamma_rational(Rational(Int(s.frac_pos(r, j)), Int(s.L)));
                    for (int c = 0; c < s.mult; ++c) unit = ctx.mul(unit, g);
                }
            Int term = ctx.mul(unit, tau_pow);
            term = ctx.mul(term, Int::pow(Int(p), static_cast<unsigned long>(e)));
            if (xi[static_cast<size_t>(r)] % 2 != 0) term = (mod - term).mod(mod);  // (-p)^xi sign
            total = (total + term).mod(mod);
        }
        tau_pow = ctx.mul(tau_pow, tau);
    }

    // Every term is a ratio against the reference units; den_inv is common to
    // all of them, so it comes out of the sum.
    total = ctx.mul(total, den_inv);

    // trace = sign * q^D * p^V * total / (1 - q), known mod p^{K + shift}.
    Int one_minus_q_inv = ctx.inv(Int(1 - q).mod(mod));
    total = ctx.mul(total, one_minus_q_inv);
    long known = K + shift;
    if (shift >= 0) {
        total = total * Int::pow(Int(p), static_cast<unsigned long>(shift));
    } else {
        Int pv = Int::pow(Int(p), static_cast<unsigned long>(-shift));
        if (!total.divisible_by(pv))
            throw validation_error("trace: result is not a p-adic integer — weight "
                                   "normalization inconsistent");
        total = total.divexact(pv);
    }
    if (known < target)
        throw precision_error("trace: computed modulus cannot separate the trace");
    PadicContext out_ctx(p, static_cast<int>(known));
    Int value = out_ctx.lift_signed(total);
    if (tc.sign < 0) value = -value;

    // Weil bound |a_q| <= 4 q^{3/2}: a^2 <= 16 q^3.
    if (value * value > Int(16) * Int::pow(Int(q), 3))
        throw validation_error("trace: value violates the weight-3 bound — "
                               "normalization conventions inconsistent");
    return value;
}

inline Int frobenius_trace(const MotivePoint& pt, long p, int f = 1) {
    return frobenius_trace_with(pt, p, f, trace_conventions());
}

// --- Euler factors -----------------------------------------------------------

struct EulerFactor {
    long p = 0;
    std::vector<Int> coeffs;  // ascending powers of T, coeffs[0] = 1
    bool good = true;
};

// Exact Weil-purity test for the degree-4 factor: with u = root + p^3/root,
// the roots all have |root| = p^{3/2} iff both roots of
// u^2 - e1 u + (e2 - 2p^3) are real and lie in [-2p^{3/2}, 2p^{3/2}].
inline bool weil_pure(const Int& e1, const Int& e2, long p) {
    Int p3 = Int::pow(Int(p), 3);
    Int disc = e1 * e1 - Int(4) * e2 + Int(8) * p3;
    if (disc.sign() < 0) return false;
    if (e1 * e1 > Int(16) * p3) return false;  // vertex outside the window
    Int lhs = Int(2) * p3 + e2;                // value shape at the window edges
    if (lhs.sign() < 0) return false;
    return lhs * lhs >= Int(4) * p3 * e1 * e1;
}

inline EulerFactor euler_factor(const MotivePoint& pt, long p) {
    if (!is_good_prime(pt, p))
        throw validation_error("euler_factor: " + std::to_string(p) +
                               " is a prime of bad reduction here; supply its local factor "
                               "explicitly (coefficient file) instead");
    Int a = frobenius_trace(pt, p, 1);
    Int s2 = frobenius_trace(pt, p, 2);
    Int twice_e2 = a * a - s2;
    if (!twice_e2.divisible_by(Int(2)))
        throw validation_error("euler_factor: trace pair has the wrong parity");
    Int e2 = twice_e2.divexact(Int(2));
    if (!e2.divisible_by(Int(p)))
        throw validation_error("euler_factor: second symmetric function not divisible by p "
                               "— trace normalization inconsistent at " + std::to_string(p));
    if (!weil_pure(a, e2, p))
        throw validation_error("euler_factor: reciprocal roots leave the |root| = p^{3/2} "
                               "circle at " + std::to_string(p));
    EulerFactor E;
    E.p = p;
    Int p3 = Int::pow(Int(p), 3);
    E.coeffs = {Int(1), -a, e2, -(p3 * a), Int::pow(Int(p), 6)};
    E.good = true;
    return E;
}

}  // namespace hml
