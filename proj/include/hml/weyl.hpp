#pragma once

#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hml/errors.hpp"
#include "hml/hgdata.hpp"
#include "hml/rational.hpp"
#include "hml/series.hpp"

namespace hml {

// Dense univariate polynomial over the rationals; the variable is the Euler
// operator D in all uses here, but the class is plain commutative algebra.
class QPoly {
  public:
    QPoly() = default;
    QPoly(const Rational& c) {
        if (c.sign() != 0) c_.push_back(c);
    }
    QPoly(long c) : QPoly(Rational(c)) {}
    explicit QPoly(std::vector<Rational> cs) : c_(std::move(cs)) { trim(); }

    static QPoly variable() { return QPoly(std::vector<Rational>{Rational(0), Rational(1)}); }

    static QPoly from_roots(const std::vector<Rational>& roots, const Rational& lead) {
        QPoly p(lead);
        for (const auto& r : roots) p = p * QPoly(std::vector<Rational>{-r, Rational(1)});
        return p;
    }

    // D(D-1)...(D-m+1)
    static QPoly falling(long m) {
        std::vector<Rational> roots;
        for (long i = 0; i < m; ++i) roots.emplace_back(i);
        return from_roots(roots, Rational(1));
    }

    bool is_zero() const { return c_.empty(); }
    long degree() const { return static_cast<long>(c_.size()) - 1; } // -1 for the zero polynomial
    Rational coeff(long i) const {
        return (i >= 0 && i < static_cast<long>(c_.size())) ? c_[static_cast<size_t>(i)] : Rational(0);
    }
    const std::vector<Rational>& coeffs() const { return c_; }

    friend QPoly operator+(const QPoly& a, const QPoly& b) {
        std::vector<Rational> r(std::max(a.c_.size(), b.c_.size()), Rational(0));
        for (size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
        return QPoly(std::move(r));
    }
    friend QPoly operator-(const QPoly& a, const QPoly& b) { return a + (-b); }
    QPoly operator-() const {
        std::vector<Rational> r;
        r.reserve(c_.size());
        for (const auto& c : c_) r.push_back(-c);
        return QPoly(std::move(r));
    }
    friend QPoly operator*(const QPoly& a, const QPoly& b) {
        if (a.is_zero() || b.is_zero()) return QPoly();
        std::vector<Rational> r(a.c_.size() + b.c_.size() - 1, Rational(0));
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return QPoly(std::move(r));
    }
    friend QPoly operator*(const QPoly& a, const Rational& s) { return a * QPoly(s); }
    friend QPoly operator*(const Rational& s, const QPoly& a) { return a * QPoly(s); }

    bool operator==(const QPoly& o) const { return c_ == o.c_; }
    bool operator!=(const QPoly& o) const { return !(*this == o); }

    // P(a + b*y)
    QPoly compose_linear(const Rational& a, const Rational& b) const {
        QPoly lin(std::vector<Rational>{a, b});
        QPoly acc;
        for (long i = degree(); i >= 0; --i) acc = acc * lin + QPoly(c_[static_cast<size_t>(i)]);
        return acc;
    }

    Rational eval(const Rational& x) const {
        Rational acc(0);
        for (long i = degree(); i >= 0; --i) acc = acc * x + c_[static_cast<size_t>(i)];
        return acc;
    }

    // Distinct integer roots, ascending.  Clears denominators and content,
    // strips the power of y, then tests the divisors of the constant term.
    std::vector<Int> integer_roots() const {
        std::vector<Int> roots;
        if (is_zero() || degree() == 0) return roots;
        Int den(1);
        for (const auto& c : c_) den = lcm(den, c.den());
        std::vector<Int> ic;
        ic.reserve(c_.size());
        for (const auto& c : c_) ic.push_back(c.num() * den.divexact(c.den()));
        size_t v = 0;
        while (v < ic.size() && ic[v].sign() == 0) ++v;
        if (v > 0) roots.push_back(Int(0));
        if (v + 1 >= ic.size()) return roots; // c*y^v
        Int content(0);
        for (size_t i = v; i < ic.size(); ++i) content = Int::gcd(content, ic[i]);
        for (size_t i = v; i < ic.size(); ++i) ic[i] = ic[i].divexact(content);
        std::vector<Int> divisors{Int(1)};
        for (const auto& [p, e] : factorize(ic[v].abs())) {
            size_t base = divisors.size();
            Int pe(1);
            for (unsigned k = 1; k <= e; ++k) {
                pe *= p;
                for (size_t i = 0; i < base; ++i) divisors.push_back(divisors[i] * pe);
            }
        }
        auto is_root = [&](const Int& r) {
            Int acc(0);
            for (size_t i = ic.size(); i-- > v;) acc = acc * r + ic[i];
            return acc.sign() == 0;
        };
        for (const auto& dv : divisors) {
            if (is_root(dv)) roots.push_back(dv);
            if (is_root(-dv)) roots.push_back(-dv);
        }
        std::sort(roots.begin(), roots.end());
        return roots;
    }

    std::string str(const std::string& var = "D") const {
        if (is_zero()) return "0";
        std::ostringstream os;
        bool first = true;
        for (long i = degree(); i >= 0; --i) {
            const Rational& c = c_[static_cast<size_t>(i)];
            if (c.sign() == 0) continue;
            if (!first) os << (c.sign() > 0 ? " + " : " - ");
            else if (c.sign() < 0) os << "-";
            first = false;
            Rational a = c.abs();
            if (i == 0 || a != Rational(1)) os << a.str();
            if (i > 0) {
                if (a != Rational(1)) os << "*";
                os << var;
                if (i > 1) os << "^" << i;
            }
        }
        return os.str();
    }

  private:
    void trim() {
        while (!c_.empty() && c_.back().sign() == 0) c_.pop_back();
    }
    std::vector<Rational> c_;
};

// Element of the Weyl algebra on the punctured line in the normal form
// sum_k z^k P_k(D), D = z d/dz, with D written to the right of z via the
// relation D z = z (D+1).  Laurent powers of z are allowed.
class OperatorPoly {
  public:
    OperatorPoly() = default;

    static OperatorPoly zero() { return OperatorPoly(); }
    static OperatorPoly one() { return monomial(0, QPoly(Rational(1))); }
    static OperatorPoly constant(const Rational& c) { return monomial(0, QPoly(c)); }
    static OperatorPoly z_power(long k) { return monomial(k, QPoly(Rational(1))); }
    static OperatorPoly d() { return monomial(0, QPoly::variable()); }
    static OperatorPoly del() { return monomial(-1, QPoly::variable()); } // d/dz = z^{-1} D
    static OperatorPoly poly_in_d(const QPoly& p) { return monomial(0, p); }
    static OperatorPoly monomial(long k, QPoly p) {
        OperatorPoly r;
        r.add_term(k, std::move(p));
        return r;
    }

    const std::map<long, QPoly>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    long min_zpow() const {
        require_nonzero();
        return terms_.begin()->first;
    }
    long max_zpow() const {
        require_nonzero();
        return terms_.rbegin()->first;
    }

    void add_term(long k, QPoly p) {
        if (p.is_zero()) return;
        auto it = terms_.find(k);
        if (it == terms_.end()) {
            terms_.emplace(k, std::move(p));
        } else {
            it->second = it->second + p;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    friend OperatorPoly operator+(const OperatorPoly& a, const OperatorPoly& b) {
        OperatorPoly r = a;
        for (const auto& [k, p] : b.terms_) r.add_term(k, p);
        return r;
    }
    OperatorPoly operator-() const {
        OperatorPoly r;
        for (const auto& [k, p] : terms_) r.terms_.emplace(k, -p);
        return r;
    }
    friend OperatorPoly operator-(const OperatorPoly& a, const OperatorPoly& b) { return a + (-b); }

    // z^a P(D) * z^b Q(D) = z^{a+b} P(D+b) Q(D)
    friend OperatorPoly operator*(const OperatorPoly& a, const OperatorPoly& b) {
        OperatorPoly r;
        for (const auto& [ka, pa] : a.terms_)
            for (const auto& [kb, pb] : b.terms_) r.add_term(ka + kb, pa.compose_linear(Rational(kb), Rational(1)) * pb);
        return r;
    }
    friend OperatorPoly operator*(const OperatorPoly& a, const Rational& s) {
        OperatorPoly r;
        for (const auto& [k, p] : a.terms_) r.add_term(k, p * s);
        return r;
    }
    friend OperatorPoly operator*(const Rational& s, const OperatorPoly& a) { return a * s; }

    bool operator==(const OperatorPoly& o) const { return terms_ == o.terms_; }
    bool operator!=(const OperatorPoly& o) const { return !(*this == o); }

    // Substitute D -> D + m in every normal-form coefficient; this is
    // conjugation by z^{-m}.
    OperatorPoly shift_d(const Rational& m) const {
        OperatorPoly r;
        for (const auto& [k, p] : terms_) r.terms_.emplace(k, p.compose_linear(m, Rational(1)));
        return r;
    }

    // Anti-automorphism with z -> z, del -> -del, hence D -> -D-1 and
    // (z^k P(D))~ = z^k P(-D-k-1).
    OperatorPoly adjoint() const {
        OperatorPoly r;
        for (const auto& [k, p] : terms_) r.terms_.emplace(k, p.compose_linear(Rational(-k - 1), Rational(-1)));
        return r;
    }

    // Action in the z-variable on a finite combination of monomials z^e with
    // rational exponents: z^k P(D) . z^e = P(e) z^{e+k}.
    std::map<Rational, Rational> act(const std::map<Rational, Rational>& f) const {
        std::map<Rational, Rational> out;
        for (const auto& [e, c] : f)
            for (const auto& [k, p] : terms_) {
                Rational v = c * p.eval(e);
                if (v.sign() == 0) continue;
                Rational key = e + Rational(k);
                auto it = out.find(key);
                if (it == out.end())
                    out.emplace(key, v);
                else {
                    it->second += v;
                    if (it->second.sign() == 0) out.erase(it);
                }
            }
        return out;
    }
    std::map<Rational, Rational> act_on_monomial(const Rational& e) const { return act({{e, Rational(1)}}); }

    // Image under the algebra automorphism z -> del, del -> -z.  Defined on
    // the polynomial Weyl algebra: the operator is first expanded into z^a
    // del^b monomials (D^m = sum_j S2(m,j) z^j del^j); any a < 0 is rejected.
    // The image is reassembled into normal form via
    // del^a z^b = sum_k k! C(a,k) C(b,k) z^{b-k} del^{a-k} and
    // z^m del^m = D(D-1)...(D-m+1).
    OperatorPoly fourier_transform() const {
        long dmax = 0;
        for (const auto& [k, p] : terms_) dmax = std::max(dmax, p.degree());
        std::vector<std::vector<Int>> s2(static_cast<size_t>(dmax) + 1);
        for (long m = 0; m <= dmax; ++m) {
            s2[static_cast<size_t>(m)].assign(static_cast<size_t>(m) + 1, Int(0));
            if (m == 0) {
                s2[0][0] = Int(1);
                continue;
            }
            for (long j = 1; j <= m; ++j)
                s2[static_cast<size_t>(m)][static_cast<size_t>(j)] =
                    Int(j) * (j <= m - 1 ? s2[static_cast<size_t>(m - 1)][static_cast<size_t>(j)] : Int(0)) +
                    s2[static_cast<size_t>(m - 1)][static_cast<size_t>(j - 1)];
        }
        std::map<std::pair<long, long>, Rational> mono; // (a, b) -> coeff of z^a del^b
        for (const auto& [k, p] : terms_)
            for (long m = 0; m <= p.degree(); ++m) {
                Rational pm = p.coeff(m);
                if (pm.sign() == 0) continue;
                for (long j = (m == 0 ? 0 : 1); j <= m; ++j) {
                    Rational c = pm * Rational(s2[static_cast<size_t>(m)][static_cast<size_t>(j)]);
                    if (c.sign() == 0) continue;
                    auto key = std::make_pair(k + j, j);
                    auto it = mono.find(key);
                    if (it == mono.end())
                        mono.emplace(key, c);
                    else {
                        it->second += c;
                        if (it->second.sign() == 0) mono.erase(it);
                    }
                }
            }
        for (const auto& [ab, c] : mono) {
            (void)c;
            if (ab.first < 0)
                throw validation_error("fourier_transform: operator leaves the polynomial Weyl algebra (negative z-power)");
        }
        OperatorPoly out;
        for (const auto& [ab, c] : mono) {
            const long a = ab.first, b = ab.second;
            Rational sgn = (b % 2 != 0) ? Rational(-1) : Rational(1);
            for (long k = 0; k <= std::min(a, b); ++k) {
                Rational coef = c * sgn *
                                Rational(Int::factorial(static_cast<unsigned long>(k)) *
                                         Int::binomial(static_cast<unsigned long>(a), static_cast<unsigned long>(k)) *
                                         Int::binomial(static_cast<unsigned long>(b), static_cast<unsigned long>(k)));
                out.add_term(b - a, QPoly::falling(a - k) * coef);
            }
        }
        return out;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [k, p] : terms_) {
            if (!first) os << " + ";
            first = false;
            if (k == 0) {
                os << "(" << p.str() << ")";
            } else {
                os << "z^" << k << "*(" << p.str() << ")";
            }
        }
        return os.str();
    }

  private:
    void require_nonzero() const {
        if (terms_.empty()) throw domain_error("OperatorPoly: zero operator has no z-degree");
    }
    std::map<long, QPoly> terms_;
};

// prod_i (D - alpha_i) - lambda z prod_j (D - beta_j)
inline OperatorPoly hypergeometric_operator(const HGData& d, const Rational& lambda) {
    OperatorPoly L = OperatorPoly::poly_in_d(QPoly::from_roots(d.alpha, Rational(1)));
    L.add_term(1, QPoly::from_roots(d.beta, -lambda));
    return L;
}

inline OperatorPoly hypergeometric_operator(const HGData& d) { return hypergeometric_operator(d, scaling_lambda(d)); }

inline std::vector<std::pair<long, QPoly>> indicial_decomposition(const OperatorPoly& L) {
    return {L.terms().begin(), L.terms().end()};
}

enum class ExtensionKind { shriek, star, both, neither };

inline const char* to_string(ExtensionKind k) {
    switch (k) {
        case ExtensionKind::shriek: return "shriek";
        case ExtensionKind::star: return "star";
        case ExtensionKind::both: return "both";
        default: return "neither";
    }
}

// Extension behaviour at z = 0 read off from the integer roots of the
// indicial polynomial P_0: no roots below 0 allows the shriek extension, no
// roots at or above 0 allows the star extension.
struct ExtensionClassification {
    ExtensionKind at_zero;
    std::vector<Int> witness_roots;
};

inline ExtensionClassification classify_extension(const OperatorPoly& L) {
    auto it = L.terms().find(0);
    if (it == L.terms().end()) throw validation_error("classify_extension: operator has no z^0 indicial part");
    std::vector<Int> roots = it->second.integer_roots();
    bool has_neg = false, has_nonneg = false;
    for (const auto& r : roots) (r.sign() < 0 ? has_neg : has_nonneg) = true;
    ExtensionKind kind = !has_neg && !has_nonneg ? ExtensionKind::both
                         : !has_neg              ? ExtensionKind::shriek
                         : !has_nonneg           ? ExtensionKind::star
                                                 : ExtensionKind::neither;
    return {kind, std::move(roots)};
}

struct TheoremCheck {
    std::string name;
    bool passed = false;
};

struct TheoremCertificate {
    std::vector<TheoremCheck> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return !checks.empty();
    }
};

// Verifies, as exact normal-form identities, the operator-level content of the
// passage from the hypergeometric module with indices shifted by -1 to the
// module of D L D:
//   (i)   the coordinate identity D - z(D-k) = -z((z-1) del - k),
//   (ii)  the convolution preconditions (no integer roots in either indicial
//         factor of H),
//   (iii) the formal adjoint of (P0(D-1) - z P1(D-1)) D,
//   (iv)  the conjugation z (D+1) H (D+1) = D (P0(D-1) - z P1(D-1)) D z,
//   (v)   the assembled rewrite chain reproducing (D+1) H (D+1) and hence,
//         via (iv), D L D.
// Throws validation_error naming the first failed check.
inline TheoremCertificate verify_theorem_pipeline(const HGData& twisted, const Rational& lambda) {
    validate(twisted);
    TheoremCertificate cert;
    auto record = [&](const std::string& name, bool ok) {
        cert.checks.push_back({name, ok});
        if (!ok) throw validation_error("theorem pipeline: failed " + name);
    };

    const OperatorPoly D = OperatorPoly::d();
    const OperatorPoly Z = OperatorPoly::z_power(1);
    const OperatorPoly DEL = OperatorPoly::del();
    const OperatorPoly ONE = OperatorPoly::one();
    const OperatorPoly DP1 = D + ONE;

    // (i) global form of the z = 1+u rewriting at the middle singular point
    bool ok1 = true;
    for (long k = -6; k <= 6 && ok1; ++k) {
        OperatorPoly kk = OperatorPoly::constant(Rational(k));
        OperatorPoly lhs = D - Z * (D - kk);
        OperatorPoly rhs = -(Z * ((Z - ONE) * DEL - kk));
        ok1 = (lhs == rhs);
    }
    record("(i) coordinate identity D - z(D-k) = -z((z-1)del - k)", ok1);

    const OperatorPoly L = hypergeometric_operator(twisted, lambda);
    const OperatorPoly H = L.shift_d(Rational(1)); // indices shifted by -1
    const QPoly P0 = H.terms().at(0);
    const QPoly P1 = -H.terms().at(1); // H = P0(D) - z P1(D)

    // (ii) convolution preconditions
    record("(ii) P0 and P1 of H have no integer roots",
           P0.integer_roots().empty() && P1.integer_roots().empty());

    // (iii) formal adjoint of (P0(D-1) - z P1(D-1)) D = L D
    OperatorPoly adj_rhs = OperatorPoly::poly_in_d(QPoly(std::vector<Rational>{Rational(-1), Rational(-1)})) *
                           (OperatorPoly::poly_in_d(P0.compose_linear(Rational(-2), Rational(-1))) -
                            OperatorPoly::poly_in_d(P1.compose_linear(Rational(-2), Rational(-1))) * Z);
    record("(iii) adjoint((P0(D-1) - z P1(D-1)) D) = (-D-1)(P0(-D-2) - P1(-D-2) z)", (L * D).adjoint() == adj_rhs);

    // (iv) conjugation transporting (D+1) H (D+1) to D L D
    record("(iv) z (D+1) H (D+1) = D (P0(D-1) - z P1(D-1)) D z", Z * DP1 * H * DP1 == D * L * D * Z);

    // (v) the full rewrite chain: convolution rewrite X -> shift_d(X,-1) D,
    // adjoint, convolution rewrite, adjoint; each stage matched against its
    // closed form, then assembled.
    OperatorPoly w1 = H.shift_d(Rational(-1)) * D;
    bool ok5 = (w1 == D * OperatorPoly::poly_in_d(P0.compose_linear(Rational(-1), Rational(1))) -
                          Z * (D * OperatorPoly::poly_in_d(P1.compose_linear(Rational(-1), Rational(1)))));
    ok5 = ok5 && (w1 == L * D);
    OperatorPoly w2 = w1.adjoint();
    ok5 = ok5 && (w2 == adj_rhs);
    OperatorPoly w3 = w2.shift_d(Rational(-1)) * D;
    OperatorPoly disp3 = -(D *
                           (OperatorPoly::poly_in_d(P0.compose_linear(Rational(-1), Rational(-1))) -
                            OperatorPoly::poly_in_d(P1.compose_linear(Rational(-1), Rational(-1))) * Z) *
                           D);
    ok5 = ok5 && (w3 == disp3);
    OperatorPoly w4 = w3.adjoint();
    ok5 = ok5 && (w4 == -(DP1 * H * DP1));
    ok5 = ok5 && (Z * (-w4) == D * L * D * Z);
    record("(v) rewrite chain assembles to (D+1) H (D+1), conjugate to D L D", ok5);

    return cert;
}

// Termwise action on a truncated generalized series in w = scale*z: the
// operator lives in the z-variable, so z^k contributes scale^{-k} w^k and D
// acts on w^{l+e} as multiplication by l+e.  Only fully determined output
// coefficients are kept: the result holds indices 0..N of offset e + kmin.
inline GeneralizedSeries apply(const OperatorPoly& L, const GeneralizedSeries& f) {
    GeneralizedSeries out;
    out.offset = f.offset;
    out.scale = f.scale;
    out.tail_certified = false;
    if (L.is_zero() || f.coeff.empty()) return out;
    const long N = f.top_index();
    const long kmin = L.min_zpow(), kmax = L.max_zpow();
    if (N < kmax - kmin) throw validation_error("apply: series shorter than the operator's z-degree spread");
    out.offset = f.offset + Rational(kmin);
    mpfr_prec_t prec = f.coeff[0].prec();
    out.coeff.assign(static_cast<size_t>(N) + 1, BallReal::zero(prec));
    for (const auto& [k, p] : L.terms()) {
        Rational zk = Rational::pow(f.scale, -k);
        for (long m = 0; m <= N; ++m) {
            long l = m + kmin - k;
            if (l < 0 || l > N) continue;
            Rational factor = p.eval(f.offset + Rational(l)) * zk;
            if (factor.sign() == 0) continue;
            out.coeff[static_cast<size_t>(m)] =
                out.coeff[static_cast<size_t>(m)] + f.coeff[static_cast<size_t>(l)].mul_rational(factor);
        }
    }
    return out;
}

inline RationalSeries apply(const OperatorPoly& L, const RationalSeries& f) {
    RationalSeries out;
    out.offset = f.offset;
    out.scale = f.scale;
    if (L.is_zero() || f.coeff.empty()) return out;
    const long N = static_cast<long>(f.coeff.size()) - 1;
    const long kmin = L.min_zpow(), kmax = L.max_zpow();
    if (N < kmax - kmin) throw validation_error("apply: series shorter than the operator's z-degree spread");
    out.offset = f.offset + Rational(kmin);
    out.coeff.assign(static_cast<size_t>(N) + 1, Rational(0));
    for (const auto& [k, p] : L.terms()) {
        Rational zk = Rational::pow(f.scale, -k);
        for (long m = 0; m <= N; ++m) {
            long l = m + kmin - k;
            if (l < 0 || l > N) continue;
            out.coeff[static_cast<size_t>(m)] += p.eval(f.offset + Rational(l)) * zk * f.coeff[static_cast<size_t>(l)];
        }
    }
    return out;
}

} // namespace hml
