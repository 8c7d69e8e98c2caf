#pragma once
// The archimedean side of the weight-3 degree-4 L-functions.
//
// Completed function: Lambda(s) = C^s h(s) L(s) with C = sqrt(N)/pi^2 and
//   h(s) = Gamma((s-1)/2) Gamma(s/2)^2 Gamma((s+1)/2) = 2^{3-2s} pi Gamma(s) Gamma(s-1),
// self-dual functional equation Lambda(s) = eps Lambda(4-s).
//
// Everything is computed through the incomplete Mellin kernel
//   G_s(x) = int_x^inf K(y) y^s dy/y,   K = inverse Mellin transform of h.
// K is nonnegative and all poles of h are known, so G_s has the exact series
//   G_s(x) = h(s) + 2 pi x^{s-1}/(1-s)
//          + sum_{k>=0} x^{s+k}/(s+k) [A_k (ln x - 1/(s+k)) - B_k],
// where A_k u^{-2} + B_k u^{-1} is the Laurent part of h at the double pole
// s = -k:  A_k = -8 pi 4^k / (k! (k+1)!),  B_k = A_k (H_k + H_{k+1} - 2g - 2 ln 2).
// The series converges everywhere; cancellation grows like e^{4 sqrt(x)} and is
// absorbed by working precision (raised adaptively).

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hml/ball.hpp"
#include "hml/errors.hpp"
#include "hml/gamma.hpp"
#include "hml/lseries.hpp"
#include "hml/traces.hpp"

namespace hml {

// --- the gamma kernel ----------------------------------------------------------

class GKernel {
  public:
    explicit GKernel(mpfr_prec_t prec)
        : prec_(prec),
          pi_(BallReal::pi(prec)),
          euler_(BallReal::euler_gamma(prec)),
          ln2_(BallReal::ln2(prec)) {}

    mpfr_prec_t prec() const { return prec_; }

    // h(s) = 2^{3-2s} pi Gamma(s) Gamma(s-1) for rational s > 1.
    BallReal h(const Rational& s) const {
        if (!(s > Rational(1))) throw domain_error("GKernel::h: need s > 1");
        BallReal g1 = gamma_rational_pos(s, prec_);
        BallReal g2 = gamma_rational_pos(s - Rational(1), prec_);
        BallReal two_pow = ln2_.mul_rational(Rational(3) - Rational(2) * s).exp_ball();
        return two_pow * pi_ * g1 * g2;
    }

    BallReal h_at_2() const { return pi_.mul_rational(Rational(1, 2)); }

    // h'(2) = h(2) (psi(2) + psi(1) - 2 ln 2) = (pi/2)(1 - 2 gamma - 2 ln 2)
    BallReal h_deriv_at_2() const {
        BallReal factor = BallReal::one(prec_) - euler_.mul_2exp(1) - ln2_.mul_2exp(1);
        return h_at_2() * factor;
    }

    struct Jet {
        BallReal value;
        BallReal deriv;  // d/ds, filled only when requested
    };

    // G_s(x) for rational s in (1,3), x > 0; optionally also d/ds G_s(x),
    // which is only supported at s = 2 (the only point where it is needed,
    // and where h'(s) has a closed form).
    Jet G(const Rational& s, const BallReal& x, bool with_deriv = false) const {
        if (!(s > Rational(1)) || !(s < Rational(3)))
            throw domain_error("GKernel::G: s must lie in (1,3)");
        if (with_deriv && s != Rational(2))
            throw domain_error("GKernel::G: derivative only available at s = 2");
        if (!x.is_positive()) throw domain_error("GKernel::G: x must be positive");

        BallReal lnx = x.log_ball();
        Mag lnx_mag = lnx.abs_upper();
        double x_ub = x.abs_upper().to_double();

        Jet out{BallReal::zero(prec_), BallReal::zero(prec_)};

        // pole terms: h(s) + 2 pi x^{s-1}/(1-s)
        BallReal xs1 = x.pow_rational(s - Rational(1));
        Rational inv1s = (Rational(1) - s).inv();
        out.value = h(s) + (pi_ * xs1).mul_2exp(1).mul_rational(inv1s);
        if (with_deriv) {
            // d/ds [2 pi x^{s-1}/(1-s)] at s=2 is 2 pi x (1 - ln x)
            out.deriv =
                h_deriv_at_2() + (pi_ * x).mul_2exp(1) * (BallReal::one(prec_) - lnx);
        }

        // series over the double poles
        BallReal xp = x.pow_rational(s);  // x^{s+k}

        const long kcap = 100000;
        for (long k = 0;; ++k) {
            if (k > kcap) throw precision_error("GKernel::G: series did not converge");
            grow_laurent(static_cast<size_t>(k) + 1);
            Rational u = s + Rational(k);
            Rational ui = u.inv();

            const BallReal& A = lau_a_[static_cast<size_t>(k)];
            const BallReal& B = lau_b_[static_cast<size_t>(k)];
            BallReal P = A * (lnx.add_rational(-ui)) - B;
            out.value = out.value + (xp * P).mul_rational(ui);
            if (with_deriv) {
                // d/du [x^u P(u)/u] = x^u [ ln x * P/u - P/u^2 + A/u^3 ]
                BallReal d = lnx * P.mul_rational(ui) - P.mul_rational(ui * ui) +
                             A.mul_rational(ui * ui * ui);
                out.deriv = out.deriv + xp * d;
            }

            // advance to k+1 and decide whether the tail is negligible
            xp = xp * x;

            // majorant of term k+1: x^{s+k+1} |A_{k+1}| (|ln x| + 3 + 2 ln(k+3));
            // once (k+2)(k+3) >= 10 x the ratio of consecutive majorants is < 1/2,
            // so the whole tail is at most twice the next majorant.
            double lk = 3.0 + 2.0 * std::log(static_cast<double>(k + 3));
            Mag logf = lnx_mag + Mag::from_d(lk);
            Mag m_next = xp.abs_upper() * lau_amag_[static_cast<size_t>(k) + 1] * logf;
            bool ratio_ok =
                static_cast<double>(k + 2) * static_cast<double>(k + 3) >= 10.0 * x_ub;
            Mag target = Mag::pow2(-(static_cast<long>(prec_) + 8));
            if (ratio_ok && m_next <= target) {
                Mag tail = m_next.mul_2exp(1);
                out.value.add_error(tail);
                if (with_deriv) out.deriv.add_error(tail * (lnx_mag + Mag::from_d(2.0)));
                break;
            }
        }
        return out;
    }

    const BallReal& pi() const { return pi_; }

  private:
    // Laurent data of the double-pole expansion, cached per instance because it
    // depends only on the term index:  A_k = -8 pi 4^k / (k! (k+1)!)  and
    // B_k = A_k (H_k + H_{k+1} - 2 gamma - 2 ln 2).  Recomputing these as exact
    // rationals per evaluation dominates the cost once k reaches a few hundred
    // (the factorials run to thousands of bits).  Not thread-safe; each thread
    // should own its kernel.
    void grow_laurent(size_t upto) const {
        if (lau_a_.empty()) {
            lau_a_.push_back(pi_.mul_rational(Rational(-8)));
            lau_s_.push_back(BallReal::one(prec_) - euler_.mul_2exp(1) - ln2_.mul_2exp(1));
            lau_b_.push_back(lau_a_[0] * lau_s_[0]);
            lau_amag_.push_back(lau_a_[0].abs_upper());
        }
        while (lau_a_.size() <= upto) {
            long j = static_cast<long>(lau_a_.size()) - 1;  // extend from index j to j+1
            lau_a_.push_back(lau_a_.back().mul_rational(Rational(4, (j + 1) * (j + 2))));
            lau_s_.push_back(
                lau_s_.back().add_rational(Rational(1, j + 1) + Rational(1, j + 2)));
            lau_b_.push_back(lau_a_.back() * lau_s_.back());
            lau_amag_.push_back(lau_a_.back().abs_upper());
        }
    }

    mpfr_prec_t prec_;
    BallReal pi_, euler_, ln2_;
    mutable std::vector<BallReal> lau_a_;   // A_k
    mutable std::vector<BallReal> lau_s_;   // H_k + H_{k+1} - 2 gamma - 2 ln 2
    mutable std::vector<BallReal> lau_b_;   // B_k
    mutable std::vector<Mag> lau_amag_;     // |A_k| upper bounds for tail majorants
};

// --- double-precision kernel for the conductor prescreen ------------------------

namespace detail {

// G_s(x) in plain doubles; adequate for x <= ~36 where the internal
// cancellation still leaves ~6 significant digits.  Returns 0 beyond (the
// true value is below 1e-11 there).
inline double G_double(double s, double x) {
    if (x > 36.0) return 0.0;
    double lnx = std::log(x);
    double h = std::exp((3.0 - 2.0 * s) * 0.6931471805599453 + std::lgamma(s) +
                        std::lgamma(s - 1.0)) *
               3.141592653589793;
    double out = h + 2.0 * 3.141592653589793 * std::pow(x, s - 1.0) / (1.0 - s);
    double ak = -8.0;  // A_k / pi
    double hh = 1.0;   // H_k + H_{k+1}
    const double teg = 2.0 * 0.5772156649015329 + 2.0 * 0.6931471805599453;
    double xp = std::pow(x, s);
    for (int k = 0; k < 600; ++k) {
        double u = s + k;
        double A = 3.141592653589793 * ak;
        double B = A * (hh - teg);
        double term = xp / u * (A * (lnx - 1.0 / u) - B);
        out += term;
        xp *= x;
        ak *= 4.0 / ((k + 1.0) * (k + 2.0));
        hh += 1.0 / (k + 1.0) + 1.0 / (k + 2.0);
        if ((k + 2.0) * (k + 3.0) >= 10.0 * x && std::fabs(ak) * xp * (std::fabs(lnx) + 8.0) < 1e-24)
            break;
    }
    return out;
}

// Tabulated G_s for the prescreen: the direct series is only clean in doubles
// for small x (cancellation grows like e^{4 sqrt(x)}), so beyond x = 2 use a
// log-spaced table of the ball evaluation with 4-point interpolation.
class GTable {
  public:
    explicit GTable(const Rational& s, int npts = 1600)
        : s_(s.to_double()), npts_(npts), loglo_(std::log(x_lo_)) {
        dlog_ = (std::log(x_hi_) - loglo_) / (npts_ - 1);
        GKernel g(160);
        val_.resize(static_cast<size_t>(npts_));
        for (int i = 0; i < npts_; ++i) {
            Rational x(std::lround(std::exp(loglo_ + i * dlog_) * 1048576.0), 1048576L);
            val_[static_cast<size_t>(i)] =
                g.G(s, BallReal::from_rational(x, 160)).value.mid_double();
            xg_.push_back(x.to_double());
        }
    }

    double operator()(double x) const {
        if (x >= x_hi_) return 0.0;
        if (x <= x_lo_) return G_double(s_, x);
        double t = (std::log(x) - loglo_) / dlog_;
        long i = std::clamp(static_cast<long>(t), 1L, static_cast<long>(npts_) - 3);
        // 4-point Lagrange in the exact node abscissas (nodes were rounded)
        const double* xv = &xg_[static_cast<size_t>(i - 1)];
        const double* yv = &val_[static_cast<size_t>(i - 1)];
        double out = 0.0;
        for (int a = 0; a < 4; ++a) {
            double term = yv[a];
            for (int b = 0; b < 4; ++b)
                if (b != a) term *= (x - xv[b]) / (xv[a] - xv[b]);
            out += term;
        }
        return out;
    }

  private:
    static constexpr double x_lo_ = 2.0, x_hi_ = 40.0;
    double s_;
    int npts_;
    double loglo_, dlog_;
    std::vector<double> val_, xg_;
};

inline std::vector<long> spf_sieve(long n_max) {
    std::vector<long> spf(static_cast<size_t>(n_max) + 1, 0);
    for (long i = 2; i <= n_max; ++i) {
        if (spf[static_cast<size_t>(i)] != 0) continue;
        for (long j = i; j <= n_max; j += i)
            if (spf[static_cast<size_t>(j)] == 0) spf[static_cast<size_t>(j)] = i;
    }
    return spf;
}

// prime-power coefficients a_{p^k} from 1/local(T) = sum a_{p^k} T^k
inline std::vector<double> prime_power_block(const std::vector<double>& c, long p, long n_max) {
    long kmax = 0;
    for (long pw = 1; pw <= n_max / p; pw *= p) ++kmax;
    std::vector<double> a(static_cast<size_t>(kmax) + 1, 0.0);
    a[0] = 1.0;
    for (long k = 1; k <= kmax; ++k) {
        double ssum = 0.0;
        for (size_t j = 1; j < c.size() && static_cast<long>(j) <= k; ++j)
            ssum += c[j] * a[static_cast<size_t>(k - static_cast<long>(j))];
        a[static_cast<size_t>(k)] = -ssum;
    }
    return a;
}

// Dirichlet coefficients in doubles; `blocks` maps each prime <= n_max to its
// prime-power coefficient block.
inline std::vector<double> dirichlet_double(const std::map<long, std::vector<double>>& blocks,
                                            long n_max, const std::vector<long>& spf) {
    std::vector<double> a(static_cast<size_t>(n_max) + 1, 0.0);
    a[1] = 1.0;
    for (long n = 2; n <= n_max; ++n) {
        long p = spf[static_cast<size_t>(n)], m = n, k = 0;
        while (m % p == 0) {
            m /= p;
            ++k;
        }
        auto it = blocks.find(p);
        if (it == blocks.end())
            throw validation_error("dirichlet_double: missing local factor at p = " +
                                   std::to_string(p));
        a[static_cast<size_t>(n)] =
            it->second[static_cast<size_t>(k)] * a[static_cast<size_t>(m)];
    }
    return a;
}

}  // namespace detail

// --- the evaluator ---------------------------------------------------------------

// A concrete L-function: local data provider (must return factors for every
// prime up to its argument — bad primes included), conductor, and sign.
struct LFunctionSpec {
    std::function<LocalFactorMap(long)> provider;
    Int conductor;
    int eps = 1;
};

class LEvaluator {
  public:
    LEvaluator(LFunctionSpec spec, long digits)
        : spec_(std::move(spec)), digits_(digits) {
        if (digits_ < 4) throw validation_error("LEvaluator: need at least 4 digits");
        if (spec_.eps != 1 && spec_.eps != -1)
            throw validation_error("LEvaluator: the functional-equation sign must be +-1");
        if (spec_.conductor < Int(1))
            throw validation_error("LEvaluator: conductor must be positive");
    }

    // Lambda(2) = (1+eps) C^2 sum a_n n^-2 G_2(n/C)
    BallReal lambda_value() {
        central();
        BallReal C = conductor_ball(prec_);
        return (C * C * S0_).mul_long(1 + spec_.eps);
    }

    // Lambda'(2) = (1-eps) C^2 sum a_n n^-2 [ln(C/n) G_2(n/C) + dG_2(n/C)]
    BallReal lambda_derivative() {
        central();
        BallReal C = conductor_ball(prec_);
        return (C * C * S1_).mul_long(1 - spec_.eps);
    }

    BallReal l_value() {
        central();
        GKernel k(prec_);
        return S0_.mul_long(1 + spec_.eps) / k.h_at_2();
    }

    // L'(2) from the product rule: Lambda' = C^2 [ln C h + h'] L + C^2 h L'.
    BallReal l_derivative() {
        central();
        GKernel k(prec_);
        BallReal h2 = k.h_at_2();
        BallReal lp = S1_.mul_long(1 - spec_.eps) / h2;
        if (spec_.eps == 1) {
            BallReal C = conductor_ball(prec_);
            BallReal lval = S0_.mul_long(2) / h2;
            lp = lp - lval * (C.log_ball() + k.h_deriv_at_2() / h2);
        }
        return lp;
    }

    // t-split functional-equation residual at s:
    //   R(s) = Lambda_T(s) - Lambda_{1/T}(s),  T = 11/10,
    // where Lambda_T(s) = sum a_n (C/n)^s G_s(nT/C) + eps sum a_n (C/n)^{4-s} G_{4-s}(n/(TC)).
    // Identically zero (for every T) exactly when the a_n satisfy the
    // functional equation with this conductor and sign.
    BallReal residual(const Rational& s) {
        Rational T(11, 10);
        for (int attempt = 0;; ++attempt) {
            long n_max = choose_n_max(base_prec());
            mpfr_prec_t wp = base_prec() * (attempt + 1) + cancel_bits(n_max, 1.1);
            ensure_coefficients(n_max);
            BallReal r = lambda_split(s, T, wp, n_max) - lambda_split(s, T.inv(), wp, n_max);
            if (r.rad_rational() < Rational(1, 100) * tol() || attempt >= 4) return r;
        }
    }

    long chosen_n_max() {
        central();
        return n_used_;
    }

  private:
    Rational tol() const { return Rational(1, Int::pow(Int(10), static_cast<unsigned long>(digits_ + 2))); }

    mpfr_prec_t base_prec() const {
        return static_cast<mpfr_prec_t>((digits_ + 20) * 3.33) + 64;
    }

    BallReal conductor_ball(mpfr_prec_t wp) const {
        BallReal N = BallReal::from_int(spec_.conductor, wp);
        BallReal pi = BallReal::pi(wp);
        return N.sqrt_ball() / (pi * pi);
    }

    // n_max so that the truncated Dirichlet tail stays below a quarter of the
    // target tolerance (the tail is also added to the result ball, so this
    // margin costs nothing in rigor, only in the convergence check).
    long choose_n_max(mpfr_prec_t wp) const {
        double C = conductor_ball(64).mid_double();
        double need = (static_cast<double>(digits_) + 4.0) * std::log(10.0) / 4.0;
        long n = static_cast<long>(C * need * need) + 50;
        // verify with the rigorous bound, growing if necessary
        GKernel k(wp);
        for (int i = 0; i < 200; ++i) {
            Mag t0 = dirichlet_tail(k, Rational(2), Rational(1), n, wp, true);
            if (t0.to_double() < 0.25 * std::pow(10.0, -static_cast<double>(digits_ + 2)))
                return n;
            n = n + n / 4 + 16;
        }
        throw precision_error("LEvaluator: cannot satisfy the tail target");
    }

    // The series for G_s(x) cancels like e^{4 sqrt(x)}; pay for it up front so
    // the first working precision already absorbs the largest abscissa.
    mpfr_prec_t cancel_bits(long n_max, double t_upper) const {
        double C = conductor_ball(64).mid_double();
        double xmax = static_cast<double>(n_max) * t_upper / C;
        if (xmax < 4.0) return 24;
        return static_cast<mpfr_prec_t>(5.78 * std::sqrt(xmax)) + 24;
    }

    // Rigorous bound on |sum_{n>N} a_n (C/n)^s G_s(n T / C)| (+ the ln-weighted
    // variant used by Lambda'), from K >= 0, G_s(x) <= x^-sigma h(s+sigma),
    // |ln x| G and |dG| <= x^-sigma h(s+1+sigma) for x >= 1, and |a_n| <= 8 n^{5/2}.
    Mag dirichlet_tail(const GKernel& k, const Rational& s, const Rational& T, long N,
                       mpfr_prec_t wp, bool with_log) const {
        BallReal C = conductor_ball(wp);
        // the bounds need n T / C >= 1 in the tail
        if (!(BallReal::from_long(N, wp).mul_rational(T) - C).is_positive())
            return Mag::inf();
        double CT = (C.mul_rational(T.inv())).abs_upper().to_double();
        long sigma = std::lround(std::max(4.0, 2.0 * std::sqrt(static_cast<double>(N) / CT)));
        sigma = std::min(sigma, 300L);
        Rational sig(sigma);
        Rational extra = with_log ? Rational(1) : Rational(0);
        // exponent of n in the summand bound: 5/2 - s - sigma
        Rational expo = Rational(5, 2) - s - sig;
        if (!(expo < Rational(-1))) return Mag::inf();
        Mag hs = k.h(s + sig + extra).abs_upper();
        Mag Cs = C.pow_rational(s).abs_upper();
        Mag Tscale = BallReal::from_rational(T, wp)
                         .pow_rational(-sig)
                         .abs_upper();  // (T)^{-sigma} from x = nT/C
        Mag Csig = C.pow_rational(sig).abs_upper();
        // sum_{n>N} n^{expo} <= N^{expo+1} / (-expo-1)
        Mag Ns = BallReal::from_long(N, wp).pow_rational(expo + Rational(1)).abs_upper();
        Mag inv = BallReal::from_rational((-expo - Rational(1)).inv(), wp).abs_upper();
        Mag total = Mag::from_d(8.0) * hs * Cs * Tscale * Csig * Ns * inv;
        if (with_log) total = total.mul_2exp(1);  // ln-weighted G plus dG
        return total;
    }

    void ensure_coefficients(long n_max) {
        if (n_max <= have_n_) return;
        LocalFactorMap locals = spec_.provider(n_max);
        coeffs_ = dirichlet_coefficients(locals, n_max);
        have_n_ = n_max;
    }

    // one half of the split completed function
    BallReal lambda_split(const Rational& s, const Rational& T, mpfr_prec_t wp, long n_max) {
        GKernel k(wp);
        BallReal C = conductor_ball(wp);
        BallReal acc = BallReal::zero(wp);
        Rational s4 = Rational(4) - s;
        for (long n = 1; n <= n_max; ++n) {
            const Int& an = coeffs_[static_cast<size_t>(n)];
            if (an.sign() == 0) continue;
            BallReal cn = C / BallReal::from_long(n, wp);
            BallReal x1 = cn.inv().mul_rational(T);
            BallReal x2 = cn.inv().mul_rational(T.inv());
            BallReal term = cn.pow_rational(s) * k.G(s, x1).value;
            term = term + cn.pow_rational(s4).mul_long(spec_.eps) * k.G(s4, x2).value;
            acc = acc + term.mul_rational(Rational(an, Int(1)));
        }
        acc.add_error(dirichlet_tail(k, s, T, n_max, wp, false));
        acc.add_error(dirichlet_tail(k, s4, T.inv(), n_max, wp, false));
        return acc;
    }

    // the central sums S0 = sum a_n n^-2 G_2(n/C),
    // S1 = sum a_n n^-2 [ln(C/n) G_2 + dG_2](n/C), with adaptive precision
    void central() {
        if (done_) return;
        for (int attempt = 0;; ++attempt) {
            long n_max = choose_n_max(base_prec());
            mpfr_prec_t wp = base_prec() * (attempt + 1) + cancel_bits(n_max, 1.0);
            ensure_coefficients(n_max);
            GKernel k(wp);
            BallReal C = conductor_ball(wp);
            BallReal s0 = BallReal::zero(wp), s1 = BallReal::zero(wp);
            for (long n = 1; n <= n_max; ++n) {
                const Int& an = coeffs_[static_cast<size_t>(n)];
                if (an.sign() == 0) continue;
                BallReal x = BallReal::from_long(n, wp) / C;
                GKernel::Jet j = k.G(Rational(2), x, true);
                BallReal w = BallReal::from_rational(Rational(an, Int(n) * Int(n)), wp);
                s0 = s0 + w * j.value;
                s1 = s1 + w * (j.deriv - x.log_ball() * j.value);
            }
            // C^{-2} times the tail of the C^s-normalized sums
            BallReal C2 = C * C;
            Mag c2inv = C2.inv().abs_upper();
            s0.add_error(dirichlet_tail(k, Rational(2), Rational(1), n_max, wp, false) * c2inv);
            s1.add_error(dirichlet_tail(k, Rational(2), Rational(1), n_max, wp, true) * c2inv);
            bool ok = s0.rad_rational() < tol() && s1.rad_rational() < tol();
            if (ok || attempt >= 4) {
                if (!ok)
                    throw precision_error("LEvaluator: central values did not converge to the "
                                          "requested accuracy");
                prec_ = wp;
                S0_ = s0;
                S1_ = s1;
                n_used_ = n_max;
                done_ = true;
                return;
            }
        }
    }

    LFunctionSpec spec_;
    long digits_;
    bool done_ = false;
    mpfr_prec_t prec_ = 0;
    BallReal S0_, S1_;
    long have_n_ = 0;
    long n_used_ = 0;
    std::vector<Int> coeffs_;
};

// --- conductor / bad-factor fit --------------------------------------------------

struct FitResult {
    Int conductor;
    int eps = 1;
    LocalFactorMap bad_factors;   // fitted or supplied local factors at ramified primes
    double residual_prescreen = 0.0;  // double-path objective of the winner
    BallReal residual_max;            // max |R(s)| over the probe points, final digits
    std::vector<std::string> notes;
};

namespace detail {

inline std::vector<Int> candidate_conductors(const std::vector<long>& ramified, const Int& cap) {
    std::vector<Int> out{Int(1)};
    for (long p : ramified) {
        long emax = (p == 2) ? 12 : (p == 3) ? 8 : (p == 5) ? 6 : 4;
        std::vector<Int> next;
        for (const Int& base : out) {
            Int v = base;
            for (long e = 0; e <= emax; ++e) {
                if (v > cap) break;
                next.push_back(v);
                v = v * Int(p);
            }
        }
        out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    // conductor 1 is not a thing for these motives
    if (!out.empty() && out.front() == Int(1)) out.erase(out.begin());
    return out;
}

// candidate local factors at a ramified prime, constant term 1, integer
// coefficients, roots loosely within the weight window
inline std::vector<std::vector<Int>> bad_factor_hypotheses(long p) {
    std::vector<std::vector<Int>> out;
    out.push_back({Int(1)});
    Int P(p), P2 = Int(p) * Int(p), P3 = P2 * Int(p);
    for (Int c : {Int(1), Int(-1), P, -P, P2, -P2})
        out.push_back({Int(1), c});
    for (Int c2 : {P, -P, P2, -P2, P3, -P3})
        for (Int b : {Int(0), Int(1), Int(-1), P, -P}) {
            if (b * b > c2.abs() * Int(4)) continue;
            out.push_back({Int(1), b, c2});
        }
    return out;
}

}  // namespace detail

// A fit problem decoupled from the trace engine: the provider returns local
// factors for all good primes up to its argument (deep enough for the
// expansion); ramified primes get searched bad factors unless overridden.
struct FitProblem {
    std::function<LocalFactorMap(long)> provider;
    std::vector<long> ramified;
    LocalFactorMap bad_overrides;
    Int conductor_cap = Int(10'000'000L);
};

// Find (N, eps, bad local factors) making the t-split residuals vanish.
//   digits: final verification accuracy; the acceptance threshold is
//           10^{-(digits-5)} relative at s = 23/10, 27/10, 8/5.
inline FitResult fit_functional_equation(const FitProblem& prob, long digits) {
    const std::vector<long>& ramified = prob.ramified;
    const LocalFactorMap& bad_overrides = prob.bad_overrides;
    std::vector<Int> cands = detail::candidate_conductors(ramified, prob.conductor_cap);
    if (cands.empty()) throw validation_error("fit: no candidate conductors below the cap");

    // --- double-precision prescreen ----------------------------------------------
    // The kernel weights depend only on N; a hypothesis change only re-weights
    // the Dirichlet coefficients.  Good prime-power blocks are fixed once.
    double C_cap = std::sqrt(cands.back().to_double()) / (M_PI * M_PI);
    long n_d = static_cast<long>(36.0 * C_cap) + 64;
    std::vector<long> spf = detail::spf_sieve(n_d);

    LocalFactorMap good = prob.provider(n_d);
    for (long p : ramified) good.erase(p);  // searched or overridden below
    std::map<long, std::vector<double>> blocks;  // prime -> a_{p^k} block
    for (const auto& [p, lf] : good) {
        std::vector<double> c;
        for (const auto& z : lf.coeffs) c.push_back(z.to_double());
        blocks[p] = detail::prime_power_block(c, p, n_d);
    }
    for (const auto& [p, lf] : bad_overrides) {
        std::vector<double> c;
        for (const auto& z : lf.coeffs) c.push_back(z.to_double());
        blocks[p] = detail::prime_power_block(c, p, n_d);
    }
    std::vector<long> search_primes;
    for (long p : ramified)
        if (!bad_overrides.count(p)) search_primes.push_back(p);
    if (search_primes.size() > 8)
        throw validation_error("fit: more than 8 ramified primes to search");
    // trivial factor at searched primes: a_{p^k} = 0 for k >= 1
    for (long p : search_primes) blocks[p] = detail::prime_power_block({1.0}, p, n_d);

    struct Candidate {
        Int N;
        int eps;
        std::map<long, std::vector<Int>> bads;
        double obj;
    };

    // Base coefficients with trivial factors at the searched primes: a_base
    // vanishes on their multiples, so the full sum splits multiplicatively as
    //   sum_n a_n w_n = sum_q bad(q) * [sum_m a_base(m) w_{q m}]
    // over q smooth at the searched primes.  The inner sums W_q depend only on
    // N (8 kernel-weight arrays), so a hypothesis change costs O(#q).
    std::vector<double> a_base = detail::dirichlet_double(blocks, n_d, spf);

    struct SmoothQ {
        long q;
        std::array<int, 8> e;  // exponents aligned with search_primes
    };
    std::vector<SmoothQ> qs{{1, {}}};
    for (size_t i = 0; i < search_primes.size(); ++i) {
        size_t cur = qs.size();
        for (size_t j = 0; j < cur; ++j) {
            SmoothQ base = qs[j];
            long v = base.q;
            for (int e = 1;; ++e) {
                if (v > n_d / search_primes[i]) break;
                v *= search_primes[i];
                SmoothQ nq = base;
                nq.q = v;
                nq.e[i] = e;
                qs.push_back(nq);
            }
        }
    }

    const double probes[2] = {2.3, 1.6};
    const detail::GTable gtab[2][2] = {
        {detail::GTable(Rational(23, 10)), detail::GTable(Rational(17, 10))},
        {detail::GTable(Rational(8, 5)), detail::GTable(Rational(12, 5))}};
    std::vector<Candidate> scored;
    std::vector<double> w[8];   // [probe*4 + half*2 + piece]
    std::vector<double> Wq[8];  // inner sums per smooth q, same indexing
    for (const Int& N : cands) {
        double C = std::sqrt(N.to_double()) / (M_PI * M_PI);
        long n_loc = std::min(static_cast<long>(36.0 * C) + 64, n_d);
        for (int si = 0; si < 2; ++si)
            for (int hi = 0; hi < 2; ++hi) {
                double s = probes[si];
                double T = (hi == 0) ? 1.1 : 1.0 / 1.1;
                std::vector<double>& w0 = w[si * 4 + hi * 2];
                std::vector<double>& w1 = w[si * 4 + hi * 2 + 1];
                w0.assign(static_cast<size_t>(n_loc) + 1, 0.0);
                w1.assign(static_cast<size_t>(n_loc) + 1, 0.0);
                for (long n = 1; n <= n_loc; ++n) {
                    double cn = C / static_cast<double>(n);
                    w0[static_cast<size_t>(n)] = std::pow(cn, s) * gtab[si][0](T / cn);
                    w1[static_cast<size_t>(n)] =
                        std::pow(cn, 4.0 - s) * gtab[si][1](1.0 / (T * cn));
                }
            }
        for (int j = 0; j < 8; ++j) Wq[j].assign(qs.size(), 0.0);
        for (size_t qi = 0; qi < qs.size(); ++qi) {
            long q = qs[qi].q;
            if (q > n_loc) continue;
            for (long m = 1; m <= n_loc / q; ++m) {
                double ab = a_base[static_cast<size_t>(m)];
                if (ab == 0.0) continue;
                size_t idx = static_cast<size_t>(q * m);
                for (int j = 0; j < 8; ++j) Wq[j][qi] += ab * w[j][idx];
            }
        }

        auto objective = [&](int eps, const std::map<long, std::vector<Int>>& bads) {
            // per-prime blocks a_{p^k} for this hypothesis
            std::array<std::vector<double>, 8> blk;
            for (size_t i = 0; i < search_primes.size(); ++i) {
                std::vector<double> cd;
                for (const auto& z : bads.at(search_primes[i])) cd.push_back(z.to_double());
                blk[i] = detail::prime_power_block(cd, search_primes[i], n_loc);
            }
            double lam[8] = {};
            for (size_t qi = 0; qi < qs.size(); ++qi) {
                long q = qs[qi].q;
                if (q > n_loc) continue;
                double mult = 1.0;
                for (size_t i = 0; i < search_primes.size(); ++i) {
                    int e = qs[qi].e[i];
                    if (e == 0) continue;
                    if (e >= static_cast<int>(blk[i].size())) {
                        mult = 0.0;
                        break;
                    }
                    mult *= blk[i][static_cast<size_t>(e)];
                }
                if (mult == 0.0) continue;
                for (int j = 0; j < 8; ++j) lam[j] += mult * Wq[j][qi];
            }
            double total = 0.0;
            for (int si = 0; si < 2; ++si) {
                double hT = lam[si * 4] + eps * lam[si * 4 + 1];
                double hI = lam[si * 4 + 2] + eps * lam[si * 4 + 3];
                double scale = std::max(std::fabs(hT) + std::fabs(hI), 1e-12);
                total += std::fabs(hT - hI) / scale;
            }
            return total;
        };

        for (int eps : {+1, -1}) {
            Candidate c{N, eps, {}, 0.0};
            for (long p : search_primes) c.bads[p] = {Int(1)};
            c.obj = objective(eps, c.bads);
            for (int pass = 0; pass < 2 && c.obj >= 1e-11; ++pass) {
                for (long p : search_primes) {
                    for (const auto& hyp : detail::bad_factor_hypotheses(p)) {
                        auto trial = c.bads;
                        trial[p] = hyp;
                        double o = objective(eps, trial);
                        if (o < c.obj) {
                            c.obj = o;
                            c.bads = std::move(trial);
                        }
                    }
                }
            }
            scored.push_back(std::move(c));
        }
    }
    std::sort(scored.begin(), scored.end(),
              [](const Candidate& a, const Candidate& b) { return a.obj < b.obj; });

    FitResult res;
    if (scored.empty() || scored.front().obj > 1e-6) {
        std::string msg = "fit: no functional equation found; best candidates:";
        for (size_t i = 0; i < std::min<size_t>(3, scored.size()); ++i)
            msg += " N=" + scored[i].N.str() + " eps=" + std::to_string(scored[i].eps) +
                   " residual=" + std::to_string(scored[i].obj) + ";";
        throw fit_error(msg);
    }
    const Candidate& win = scored.front();
    if (scored.size() > 1 && scored[1].obj < 100.0 * win.obj && !(scored[1].N == win.N))
        res.notes.push_back("near-tie with N=" + scored[1].N.str() +
                            " eps=" + std::to_string(scored[1].eps) +
                            " (residual " + std::to_string(scored[1].obj) + " vs " +
                            std::to_string(win.obj) + ")");

    // --- ball verification at the requested accuracy -----------------------------
    LocalFactorMap bads;
    for (const auto& [p, c] : win.bads) bads[p] = LocalFactor{p, c, false};
    for (const auto& [p, lf] : bad_overrides) bads[p] = lf;
    for (long p : ramified)
        if (!bads.count(p)) bads[p] = LocalFactor{p, {Int(1)}, false};

    LFunctionSpec spec;
    spec.conductor = win.N;
    spec.eps = win.eps;
    auto base = prob.provider;
    spec.provider = [base, bads](long pmax) {
        LocalFactorMap m = base(pmax);
        for (const auto& [p, lf] : bads) m[p] = lf;
        return m;
    };
    LEvaluator ev(spec, digits);
    BallReal worst;
    bool first = true;
    for (Rational s : {Rational(23, 10), Rational(27, 10), Rational(8, 5)}) {
        BallReal r = ev.residual(s).abs_ball();
        if (first || (r.abs_upper().to_double() > worst.abs_upper().to_double())) worst = r;
        first = false;
    }
    res.conductor = win.N;
    res.eps = win.eps;
    res.bad_factors = bads;
    res.residual_prescreen = win.obj;
    res.residual_max = worst;

    double threshold = std::pow(10.0, -static_cast<double>(digits - 5));
    if (worst.abs_upper().to_double() > threshold)
        throw fit_error("fit: candidate N=" + win.N.str() +
                        " fails the residual threshold at full accuracy (" +
                        worst.str(8) + ")");
    return res;
}

// Fit problem wired to the trace engine (with the disk cache if enabled).
inline FitProblem motive_fit_problem(const MotivePoint& pt, int jobs = 1,
                                     const LocalFactorMap& bad_overrides = {},
                                     const Int& conductor_cap = Int(10'000'000L)) {
    FitProblem prob;
    MotivePoint ptc = pt;
    prob.provider = [ptc, jobs](long pmax) {
        return cached_good_local_factors(ptc, pmax, pmax, jobs);
    };
    prob.ramified = ramified_primes(pt);
    prob.bad_overrides = bad_overrides;
    prob.conductor_cap = conductor_cap;
    return prob;
}

inline FitResult fit_functional_equation(const MotivePoint& pt, long digits, int jobs = 1,
                                         const LocalFactorMap& bad_overrides = {},
                                         const Int& conductor_cap = Int(10'000'000L)) {
    return fit_functional_equation(motive_fit_problem(pt, jobs, bad_overrides, conductor_cap),
                                   digits);
}

// The evaluator spec for a fitted motive point.
inline LFunctionSpec motive_l_spec(const MotivePoint& pt, const FitResult& fit, int jobs = 1) {
    LFunctionSpec spec;
    spec.conductor = fit.conductor;
    spec.eps = fit.eps;
    LocalFactorMap bads = fit.bad_factors;
    MotivePoint ptc = pt;
    spec.provider = [ptc, bads, jobs](long pmax) {
        LocalFactorMap m = cached_good_local_factors(ptc, pmax, pmax, jobs);
        for (const auto& [p, lf] : bads) m[p] = lf;
        return m;
    };
    return spec;
}

}  // namespace hml
