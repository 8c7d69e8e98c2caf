#pragma once
// p-adic helpers: fixed-modulus contexts, Teichmueller lifts, and Morita's
// p-adic Gamma function at rational arguments, everything to a modulus p^K.
//
// Gamma_p(n) = (-1)^n prod_{0<j<n, p∤j} j is evaluated for lifts n < p^K by
// splitting the product over prime-to-p integers into full blocks of length p
// and one partial block.  After truncating powers of p at p^K, a full block
// prod_{u=1}^{p-1}(bp+u) is a short polynomial F(b), so
//   prod_{b<B} F(b) = F(0)^B * exp( sum_{b<B} log(F(b)/F(0)) ),
// and the inner sum reduces to power sums sum_{b<B} b^k, which have exact
// closed forms.  This keeps the cost polylogarithmic in the lift height.

#include <algorithm>
#include <map>
#include <vector>

#include "hml/errors.hpp"
#include "hml/rational.hpp"

namespace hml {

inline bool is_prime_long(long n) { return n >= 2 && Int(n).is_probab_prime(); }

inline std::vector<long> primes_up_to(long n) {
    std::vector<long> out;
    if (n < 2) return out;
    std::vector<bool> composite(static_cast<size_t>(n) + 1, false);
    for (long i = 2; i <= n; ++i) {
        if (composite[static_cast<size_t>(i)]) continue;
        out.push_back(i);
        if (i <= n / i)
            for (long j = i * i; j <= n; j += i) composite[static_cast<size_t>(j)] = true;
    }
    return out;
}

inline long padic_valuation_long(long j, long p) {
    if (j == 0) throw domain_error("padic_valuation_long: valuation of zero");
    long v = 0;
    while (j % p == 0) {
        j /= p;
        ++v;
    }
    return v;
}

// Arithmetic modulo p^K, p an odd prime.
class PadicContext {
  public:
    PadicContext(long p, int k) : p_(p), k_(k) {
        if (p == 2 || !is_prime_long(p))
            throw validation_error("PadicContext: modulus base must be an odd prime");
        if (k < 1) throw validation_error("PadicContext: precision must be at least 1");
        mod_ = Int::pow(Int(p), static_cast<unsigned long>(k));
    }

    long p() const { return p_; }
    int precision() const { return k_; }
    const Int& modulus() const { return mod_; }

    Int reduce(const Int& x) const { return x.mod(mod_); }
    Int mul(const Int& a, const Int& b) const { return (a * b).mod(mod_); }
    Int inv(const Int& a) const { return Int::invmod(a, mod_); }

    // a/b mod p^K for p ∤ b.
    Int reduce_rational(const Rational& x) const {
        Int den = x.den();
        if (den.divisible_by(Int(p_)))
            throw domain_error("PadicContext: rational argument has a p in its denominator");
        return mul(reduce(x.num()), inv(reduce(den)));
    }

    // Symmetric representative in (-p^K/2, p^K/2].
    Int lift_signed(const Int& x) const {
        Int r = reduce(x);
        if (r + r > mod_) r -= mod_;
        return r;
    }

    // The (p-1)-st root of unity congruent to a mod p (a must be a unit).
    Int teichmuller(const Int& a) const {
        Int x = reduce(a);
        if (x.divisible_by(Int(p_)))
            throw domain_error("PadicContext: Teichmueller lift of a non-unit");
        // x <- x^p gains one digit of agreement with the fixed point per step.
        for (int i = 0; i < k_; ++i) x = Int::powm(x, Int(p_), mod_);
        return x;
    }

  private:
    long p_;
    int k_;
    Int mod_;
};

// Morita's Gamma_p at p-adically integral rational arguments, reduced mod p^K.
class GammaPTable {
  public:
    GammaPTable(long p, int k) : p_(p), k_(k) {
        if (p == 2 || !is_prime_long(p))
            throw validation_error("GammaPTable: base must be an odd prime");
        if (k < 1) throw validation_error("GammaPTable: precision must be at least 1");
        build();
    }

    long p() const { return p_; }
    int precision() const { return k_; }
    const Int& modulus() const { return mod_; }

    // Gamma_p(x) mod p^K for x in Z_p given as a rational with p ∤ denominator.
    Int gamma_rational(const Rational& x) const {
        auto it = cache_.find(x);
        if (it != cache_.end()) return it->second;
        Int den = x.den();
        if (den.divisible_by(Int(p_)))
            throw domain_error("GammaPTable: argument has a p in its denominator");
        Int n = ((x.num().mod(work_mod_)) * Int::invmod(den.mod(work_mod_), work_mod_)).mod(work_mod_);
        Int value = gamma_lift(n).mod(mod_);
        cache_.emplace(x, value);
        return value;
    }

    // Gamma_p(n) mod p^K for an integer lift 0 <= n < p^W (W = working precision).
    Int gamma_lift(const Int& n) const {
        if (n.sign() < 0 || n >= work_mod_)
            throw domain_error("GammaPTable: lift out of range");
        Int big_p(p_);
        Int block = n / big_p;           // number of complete unit blocks
        long partial = (n % big_p).to_long();  // partial block covers bp+1 .. bp+partial-1
        Int unit(1);
        if (partial >= 2) {
            // prod_{u=1}^{partial-1} (block*p + u) via the stored prefix polynomial.
            Int x = (block * big_p).mod(work_mod_);
            unit = eval_poly_mod(prefix_[static_cast<size_t>(partial - 1)], x);
        }
        Int full = full_blocks(block);
        Int value = (unit * full).mod(work_mod_);
        if (mpz_odd_p(n.raw())) value = (work_mod_ - value).mod(work_mod_);  // (-1)^n
        return value.mod(mod_);
    }

  private:
    Int eval_poly_mod(const std::vector<Int>& c, const Int& x) const {
        Int acc(0);
        for (size_t i = c.size(); i-- > 0;) acc = (acc * x + c[i]).mod(work_mod_);
        return acc;
    }

    // prod_{b<B} F(b) mod p^W where F(b) = prod_{u=1}^{p-1}(bp+u).
    Int full_blocks(const Int& B) const {
        if (B.sign() == 0) return Int(1);
        // c0^B
        Int result = Int::powm(c0_, B, work_mod_);
        // exp of sum_{b<B} log(F(b)/c0) = sum_k logpoly_[k] * S_k(B)
        Int y(0);
        for (size_t k = 1; k < logpoly_.size(); ++k) {
            if (logpoly_[k].sign() == 0) continue;
            y = (y + logpoly_[k] * power_sum(k, B)).mod(work_mod_);
        }
        // exp(y): y has positive valuation, so the series terminates mod p^W.
        Int term(1), sum(1);
        for (long j = 1; j <= exp_terms_; ++j) {
            term = (term * y).mod(work_mod_);
            long v = padic_valuation_long(j, p_);
            Int unit_j(j);
            if (v > 0) {
                Int pv = Int::pow(Int(p_), static_cast<unsigned long>(v));
                if (!term.divisible_by(pv))
                    throw precision_error("GammaPTable: working precision exhausted in exp series");
                term = term.divexact(pv);
                unit_j = unit_j.divexact(pv);
            }
            term = (term * Int::invmod(unit_j.mod(work_mod_), work_mod_)).mod(work_mod_);
            if (term.sign() == 0) break;
            sum = (sum + term).mod(work_mod_);
        }
        return (result * sum).mod(work_mod_);
    }

    // S_k(B) = sum_{b=0}^{B-1} b^k mod p^W, via b^k = sum_j S2(k,j) j! C(b,j)
    // and sum_{b<B} C(b,j) = C(B,j+1).
    Int power_sum(size_t k, const Int& B) const {
        Int acc(0);
        for (size_t j = 1; j <= k; ++j) {
            if (stirling2_[k][j].sign() == 0) continue;
            Int binom;
            mpz_bin_ui(binom.raw(), B.raw(), static_cast<unsigned long>(j + 1));
            acc = (acc + stirling2_[k][j] * Int::factorial(static_cast<unsigned long>(j)) * binom)
                      .mod(work_mod_);
        }
        return acc;
    }

    void build() {
        mod_ = Int::pow(Int(p_), static_cast<unsigned long>(k_));
        // Working precision: exp-series terms divide by j!, the log series by j;
        // pad the modulus so those divisions still leave K exact digits.
        long w = k_;
        for (int rounds = 0; rounds < 4; ++rounds) {
            long jexp = (p_ > 2) ? (w * (p_ - 1)) / (p_ - 2) + 2 : 4 * w;
            long loss_exp = jexp / (p_ - 1) + 1;             // >= v_p(jexp!)
            long jlog = w + 2;
            long loss_log = padic_valuation_long(1, p_) + 2;  // crude bound for max v_p(j), j<=jlog
            long lg = 0, t = 1;
            while (t <= jlog) {
                t *= p_;
                ++lg;
            }
            loss_log = lg + 1;
            long w_new = k_ + loss_exp + loss_log + 2;
            if (w_new == w) break;
            w = w_new;
        }
        work_k_ = w;
        work_mod_ = Int::pow(Int(p_), static_cast<unsigned long>(work_k_));
        exp_terms_ = (p_ > 2) ? (work_k_ * (p_ - 1)) / (p_ - 2) + 2 : 4 * work_k_;

        // Prefix polynomials prod_{v=1}^{u}(X+v) truncated mod (X^deg_cap, p^W).
        size_t deg_cap = static_cast<size_t>(work_k_) + 1;
        prefix_.assign(static_cast<size_t>(p_), {});
        prefix_[0] = {Int(1)};
        std::vector<Int> cur = {Int(1)};
        for (long u = 1; u < p_; ++u) {
            std::vector<Int> next(std::min(cur.size() + 1, deg_cap), Int(0));
            for (size_t i = 0; i < cur.size(); ++i) {
                next[i] = (next[i] + cur[i] * Int(u)).mod(work_mod_);
                if (i + 1 < next.size()) next[i + 1] = (next[i + 1] + cur[i]).mod(work_mod_);
            }
            cur = next;
            prefix_[static_cast<size_t>(u)] = cur;
        }

        // F(b) = sum_k prefix_[p-1][k] (pb)^k; write F(b)/c0 = 1 + g(b).
        const std::vector<Int>& top = prefix_[static_cast<size_t>(p_ - 1)];
        c0_ = top[0];
        Int c0_inv = Int::invmod(c0_, work_mod_);
        std::vector<Int> g(deg_cap, Int(0));
        Int ppow(1);
        for (size_t kk = 1; kk < deg_cap; ++kk) {
            ppow = (ppow * Int(p_)).mod(work_mod_);
            if (kk < top.size()) g[kk] = (top[kk] * ppow % work_mod_ * c0_inv).mod(work_mod_);
        }
        // log(1+g) as a polynomial in b mod (b^deg_cap, p^W).
        std::vector<Int> logp(deg_cap, Int(0));
        std::vector<Int> gpow = g;
        long jlog_terms = work_k_ + 2;
        for (long j = 1; j <= jlog_terms; ++j) {
            long v = padic_valuation_long(j, p_);
            Int unit_j(j);
            Int pv(1);
            if (v > 0) {
                pv = Int::pow(Int(p_), static_cast<unsigned long>(v));
                unit_j = unit_j.divexact(pv);
            }
            Int ju_inv = Int::invmod(unit_j.mod(work_mod_), work_mod_);
            for (size_t kk = 0; kk < deg_cap; ++kk) {
                if (gpow[kk].sign() == 0) continue;
                Int contrib = gpow[kk];
                if (v > 0) {
                    if (!contrib.divisible_by(pv))
                        throw precision_error("GammaPTable: working precision exhausted in log series");
                    contrib = contrib.divexact(pv);
                }
                contrib = (contrib * ju_inv).mod(work_mod_);
                if (j % 2 == 0) contrib = (work_mod_ - contrib).mod(work_mod_);
                logp[kk] = (logp[kk] + contrib).mod(work_mod_);
            }
            if (j < jlog_terms) {
                // gpow <- gpow * g (truncated)
                std::vector<Int> nxt(deg_cap, Int(0));
                for (size_t a = 0; a < deg_cap; ++a) {
                    if (gpow[a].sign() == 0) continue;
                    for (size_t b2 = 1; a + b2 < deg_cap && b2 < deg_cap; ++b2) {
                        if (g[b2].sign() == 0) continue;
                        nxt[a + b2] = (nxt[a + b2] + gpow[a] * g[b2]).mod(work_mod_);
                    }
                }
                gpow = nxt;
                bool all_zero = true;
                for (const auto& c : gpow)
                    if (c.sign() != 0) {
                        all_zero = false;
                        break;
                    }
                if (all_zero) break;
            }
        }
        logpoly_ = logp;

        // Stirling numbers of the second kind up to the b-degree cap.
        stirling2_.assign(deg_cap, std::vector<Int>(deg_cap, Int(0)));
        stirling2_[0][0] = Int(1);
        for (size_t nn = 1; nn < deg_cap; ++nn)
            for (size_t jj = 1; jj <= nn; ++jj)
                stirling2_[nn][jj] = stirling2_[nn - 1][jj - 1] + Int(static_cast<long>(jj)) * stirling2_[nn - 1][jj];
    }

    long p_;
    int k_;
    long work_k_ = 0;
    long exp_terms_ = 0;
    Int mod_, work_mod_, c0_;
    std::vector<std::vector<Int>> prefix_;
    std::vector<Int> logpoly_;
    std::vector<std::vector<Int>> stirling2_;
    mutable std::map<Rational, Int> cache_;
};

}  // namespace hml
