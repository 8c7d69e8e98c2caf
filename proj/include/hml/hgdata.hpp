#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "gamma.hpp"
#include "recognize.hpp"

namespace hml {

// Hypergeometric index data: two balanced lists of rationals (alpha; beta),
// taken mod 1 where circle geometry matters. Twisted families keep their
// conventional representatives (alpha in [-1/2,1/2), beta in (-1,0]).

struct HGData {
    std::vector<Rational> alpha;
    std::vector<Rational> beta;

    size_t rank() const { return alpha.size(); }

    // lcm of all denominators (the level of the roots of unity involved).
    Int index_lcm() const {
        Int m(1);
        for (const auto& a : alpha) m = lcm(m, a.den());
        for (const auto& b : beta) m = lcm(m, b.den());
        return m;
    }
};

// y-bar = 1 - frac(-y): the representative of -y's "ceiling complement" in (0, 1].
inline Rational bar(const Rational& y) { return Rational(1) - (-y).frac(); }

namespace detail {

inline std::vector<Rational> sorted_fracs(const std::vector<Rational>& v) {
    std::vector<Rational> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(x.frac());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

// Validation: balanced lists, disjointness mod 1, Galois stability of each
// side (multiset of residues closed under multiplication by units mod the
// lcm), and the circle condition: some arc contains every alpha and no beta.
inline void validate(const HGData& d) {
    size_t n = d.alpha.size();
    if (n == 0 || d.beta.size() != n)
        throw validation_error("index data: alpha and beta must be nonempty and balanced");

    auto a = detail::sorted_fracs(d.alpha);
    auto b = detail::sorted_fracs(d.beta);

    // alpha_i != beta_j (mod 1)
    for (const auto& x : a)
        for (const auto& y : b)
            if (x == y)
                throw validation_error("index data: alpha and beta meet mod 1 at " + x.str());

    // Galois stability of each side.
    Int N = d.index_lcm();
    long Nl = N.to_long();
    auto stable = [&](const std::vector<Rational>& s, const char* side) {
        for (long k = 2; k < Nl; ++k) {
            if (Int::gcd(Int(k), N) != Int(1)) continue;
            std::vector<Rational> img;
            img.reserve(s.size());
            for (const auto& x : s) img.push_back((x * Rational(k)).frac());
            std::sort(img.begin(), img.end());
            if (img != s)
                throw validation_error(std::string("index data: ") + side +
                                       " not Galois-stable (multiplier " + std::to_string(k) + ")");
        }
    };
    stable(a, "alpha");
    stable(b, "beta");

    // Maximal non-interlacing: labels around the circle must have all alphas
    // contiguous. Merge labeled residues; coincidences across sides were
    // excluded above, repeats within a side collapse to one position.
    std::vector<std::pair<Rational, int>> pts; // (angle, label 0=alpha,1=beta)
    for (const auto& x : a)
        if (pts.empty() || !(pts.back().first == x && pts.back().second == 0))
            pts.emplace_back(x, 0);
    std::vector<std::pair<Rational, int>> ptsb;
    for (const auto& y : b)
        if (ptsb.empty() || !(ptsb.back().first == y && ptsb.back().second == 1))
            ptsb.emplace_back(y, 1);
    pts.insert(pts.end(), ptsb.begin(), ptsb.end());
    std::sort(pts.begin(), pts.end());
    size_t m = pts.size();
    size_t blocks = 0; // circular alpha->beta transitions
    for (size_t i = 0; i < m; ++i)
        if (pts[i].second == 0 && pts[(i + 1) % m].second == 1) ++blocks;
    if (blocks != 1)
        throw validation_error("index data: alpha and beta interlace on the circle");
}

// Half-integral twist: subtract 1/2 from every index; alphas normalized into
// [-1/2, 1/2) and sorted, betas into (-1, 0] and sorted.
inline HGData twist(const HGData& d) {
    HGData t;
    t.alpha.reserve(d.alpha.size());
    t.beta.reserve(d.beta.size());
    for (const auto& x : d.alpha) {
        Rational f = (x - Rational(1, 2)).frac(); // in [0,1)
        t.alpha.push_back(f >= Rational(1, 2) ? f - Rational(1) : f);
    }
    for (const auto& y : d.beta) {
        Rational f = (y - Rational(1, 2)).frac();
        t.beta.push_back(f.sign() == 0 ? f : f - Rational(1)); // in (-1, 0]
    }
    std::sort(t.alpha.begin(), t.alpha.end());
    std::sort(t.beta.begin(), t.beta.end());
    return t;
}

// exp( sum_i psi(bar(alpha_i)) - psi(bar(beta_i)) ) as a ball.
inline BallReal scaling_lambda_ball(const HGData& d, mpfr_prec_t prec) {
    mpfr_prec_t pw = prec + 16;
    BallReal s(pw);
    for (const auto& x : d.alpha) s += digamma_rational(bar(x), pw);
    for (const auto& y : d.beta) s -= digamma_rational(bar(y), pw);
    return s.exp_ball();
}

// The scaling factor recognized as an exact rational (it always is one for
// Galois-stable data). Precision escalates until recognition certifies.
inline Rational scaling_lambda(const HGData& d, const Int& max_den = Int("1000000000000000000")) {
    for (mpfr_prec_t prec = 192; prec <= 4096; prec *= 2) {
        BallReal lam = scaling_lambda_ball(d, prec);
        try {
            auto r = recognize_rational(lam, max_den);
            if (r) return *r;
            throw precision_error("scaling_lambda: no rational of bounded height in ball " + lam.str());
        } catch (const precision_error&) {
            if (prec * 2 > 4096) throw;
        }
    }
    throw precision_error("scaling_lambda: recognition failed at precision cap");
}

// Product of reciprocal gamma factors
//   BG(s) = prod_i 1/Gamma(s - alpha_i + 1) * prod_i 1/Gamma(-s + beta_i + 1).
inline BallComplex big_gamma(const HGData& d, const BallComplex& s, mpfr_prec_t prec) {
    mpfr_prec_t pw = prec + 32;
    BallComplex acc = BallComplex::one(pw);
    for (const auto& a : d.alpha) {
        BallComplex arg = s + BallComplex::from_rational(Rational(1) - a, pw);
        acc *= gamma_reciprocal(arg, pw);
    }
    for (const auto& b : d.beta) {
        BallComplex arg = BallComplex::from_rational(b + Rational(1), pw) - s;
        acc *= gamma_reciprocal(arg, pw);
    }
    return acc;
}

// Same at exact rational s, staying real (exact zeros when a factor sits on
// a pole of the corresponding Gamma).
inline BallReal big_gamma(const HGData& d, const Rational& s, mpfr_prec_t prec) {
    mpfr_prec_t pw = prec + 32;
    BallReal acc = BallReal::one(pw);
    for (const auto& a : d.alpha) acc *= gamma_reciprocal_rational(s - a + Rational(1), pw);
    for (const auto& b : d.beta) acc *= gamma_reciprocal_rational(b + Rational(1) - s, pw);
    return acc;
}

// Scaled variant attached to twisted data: sqrt(lambda) * BG(s).
inline BallComplex big_gamma_tilde(const HGData& twisted, const BallComplex& s, mpfr_prec_t prec) {
    mpfr_prec_t pw = prec + 32;
    Rational lam = scaling_lambda(twisted);
    BallReal root = BallReal::from_rational(lam, pw).sqrt_ball();
    return big_gamma(twisted, s, pw).mul_real(root);
}

inline BallReal big_gamma_tilde(const HGData& twisted, const Rational& s, mpfr_prec_t prec) {
    mpfr_prec_t pw = prec + 32;
    Rational lam = scaling_lambda(twisted);
    BallReal root = BallReal::from_rational(lam, pw).sqrt_ball();
    return big_gamma(twisted, s, pw) * root;
}

// --- presets ----------------------------------------------------------------

// The seven rank-4 families (beta = 0) and their half-integral twists.
inline HGData preset(const std::string& name) {
    static const std::map<std::string, std::vector<Rational>> base = {
        {"F1", {Rational(1, 12), Rational(5, 12), Rational(7, 12), Rational(11, 12)}},
        {"F2", {Rational(1, 10), Rational(3, 10), Rational(7, 10), Rational(9, 10)}},
        {"F3", {Rational(1, 8), Rational(3, 8), Rational(5, 8), Rational(7, 8)}},
        {"F4", {Rational(1, 6), Rational(1, 4), Rational(3, 4), Rational(5, 6)}},
        {"F5", {Rational(1, 6), Rational(1, 3), Rational(2, 3), Rational(5, 6)}},
        {"F6", {Rational(1, 5), Rational(2, 5), Rational(3, 5), Rational(4, 5)}},
        {"F7", {Rational(1, 4), Rational(1, 3), Rational(2, 3), Rational(3, 4)}},
    };
    bool twisted = false;
    std::string key = name;
    if (!key.empty() && key.back() == 't') {
        twisted = true;
        key.pop_back();
    }
    auto it = base.find(key);
    if (it == base.end())
        throw validation_error("unknown preset '" + name + "' (expected F1..F7, F1t..F7t)");
    HGData d;
    d.alpha = it->second;
    d.beta = std::vector<Rational>(4, Rational(0));
    return twisted ? twist(d) : d;
}

inline std::vector<std::string> preset_names() {
    std::vector<std::string> v;
    for (int i = 1; i <= 7; ++i) v.push_back("F" + std::to_string(i));
    for (int i = 1; i <= 7; ++i) v.push_back("F" + std::to_string(i) + "t");
    return v;
}

} // namespace hml
