#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hml/complex_ball.hpp"
#include "hml/errors.hpp"
#include "hml/hgdata.hpp"
#include "hml/recognize.hpp"
#include "hml/series.hpp"
#include "hml/weyl.hpp"

namespace hml {

using CMatrix = std::vector<std::vector<BallComplex>>;
using RMatrix = std::vector<std::vector<BallReal>>;
using QMatrix = std::vector<std::vector<Rational>>;

struct PeriodOptions {
    long digits = 30;
    long terms = 0;                       // 0: adaptive from the certified tail bound
    bool log_in_z = false;                // antiderivative log branch: log(z0) instead of log(lambda*z0)
    bool constant_positive_pair = false;  // 1/a+1/a' over the positive index pair instead of the lowest two
};

inline mpfr_prec_t working_precision(long digits) {
    if (digits < 1) throw validation_error("working_precision: digits must be positive");
    return static_cast<mpfr_prec_t>(digits * 10 / 3 + 64);
}

// Shared evaluation state for one (index data, z0, options) triple.  All
// matrix builders draw their entries from the caches here, so quantities the
// theory says coincide (e.g. a minor of the extended matrix and the transposed
// block of the plain period matrix) are assembled from bitwise-identical
// balls, not merely overlapping ones.
class PeriodWorkspace {
  public:
    PeriodWorkspace(const HGData& d, const Rational& z0, PeriodOptions opt = {})
        : d_(d), z0_(z0), opt_(opt), prec_(working_precision(opt.digits)), lambda_(scaling_lambda(d)) {
        validate(d_);
        if (z0_.sign() <= 0) throw domain_error("period workspace: z0 must be positive (principal branch)");
        const Rational w0 = lambda_ * z0_;
        if (w0 >= Rational(1))
            throw domain_error("period workspace: scaled point w0 = " + w0.str() + " outside the unit disc");
        nterms_ = opt_.terms > 0 ? opt_.terms : estimate_terms(w0, opt_.digits);
        const size_t n = d_.alpha.size();
        sol_.reserve(n);
        for (size_t j = 0; j < n; ++j) sol_.push_back(solution_series(d_, j, lambda_, nterms_, prec_));
        eig_.resize(n);
        for (size_t j = 0; j < n; ++j) {
            eig_[j].reserve(static_cast<size_t>(n) + 1);
            for (long r = 0; r <= static_cast<long>(n); ++r)
                eig_[j].push_back(BallComplex::exp_2pi_i(d_.alpha[j] * Rational(r), prec_));
        }
    }

    const HGData& data() const { return d_; }
    const Rational& z0() const { return z0_; }
    const Rational& lambda() const { return lambda_; }
    const PeriodOptions& options() const { return opt_; }
    mpfr_prec_t prec() const { return prec_; }
    long nterms() const { return nterms_; }
    size_t rank() const { return d_.alpha.size(); }

    // A_j^r = exp(2 pi i r alpha_j), r = 0..n
    const BallComplex& eigenvalue_power(size_t j, long r) const {
        if (j >= eig_.size() || r < 0 || r >= static_cast<long>(eig_[j].size()))
            throw validation_error("eigenvalue_power: index out of range");
        return eig_[j][static_cast<size_t>(r)];
    }

    // (D^p S_j)(lambda z0) as a real ball; p = -1 is the termwise
    // antiderivative with zero constant (requires non-integral alpha_j).
    const BallReal& solution_value(size_t j, long p) const {
        if (j >= sol_.size() || p < -1 || p > 4) throw validation_error("solution_value: index out of range");
        auto key = std::make_pair(j, p);
        auto it = sval_.find(key);
        if (it == sval_.end()) it = sval_.emplace(key, eval_power(sol_[j], p, z0_, prec_)).first;
        return it->second;
    }

    // sum_j A_j^r (D^p S_j)(lambda z0): the V^t-combined entries every matrix
    // is built from.  Cached so repeated requests return the identical ball.
    const BallComplex& combo(long r, long p) const {
        auto key = std::make_pair(r, p);
        auto it = cval_.find(key);
        if (it == cval_.end()) {
            BallComplex acc = BallComplex::zero(prec_);
            for (size_t j = 0; j < sol_.size(); ++j) acc += eigenvalue_power(j, r).mul_real(solution_value(j, p));
            it = cval_.emplace(key, std::move(acc)).first;
        }
        return it->second;
    }

    // Extension solution S1 (integer exponents, rescaled gamma coefficients).
    // Exists only when no beta index is an integer: an integral beta zeroes
    // every higher coefficient and the extension degenerates.
    void ensure_extension() const {
        if (!ext_.coeff.empty()) return;
        for (const auto& b : d_.beta)
            if (b.den() == Int(1))
                throw validation_error("extension solution degenerates: beta contains an integer (untwisted data?)");
        ext_ = extension_series(d_, lambda_, nterms_, prec_);
    }

    const BallReal& extension_value(long p) const {
        ensure_extension();
        if (p < 0 || p > 4) throw validation_error("extension_value: power out of range");
        auto it = eval_.find(p);
        if (it == eval_.end()) it = eval_.emplace(p, eval_power(ext_, p, z0_, prec_)).first;
        return it->second;
    }

    BallReal gamma_tilde0() const {
        ensure_extension();
        return ext_.coeff[0];
    }

    // The D^{-1} entry of the S1 column: constant + log + tail,
    //   (1/a + 1/a') G~(0) + G~(0) log(w0 or z0) + sum_{n>=1} G~(n) w0^n / n,
    // with the constant pair and the log branch chosen by the options.
    BallReal extension_antiderivative() const {
        ensure_extension();
        if (!have_anti_) {
            const BallReal& g0 = ext_.coeff[0];
            Rational pair_sum = constant_pair_sum();
            BallReal constant = g0.mul_rational(pair_sum);
            Rational log_arg = opt_.log_in_z ? z0_ : lambda_ * z0_;
            BallReal logterm = g0 * BallReal::from_rational(log_arg, prec_).log_ball();
            GeneralizedSeries h;
            h.offset = Rational(1);
            h.scale = ext_.scale;
            h.coeff.assign(ext_.coeff.begin() + 1, ext_.coeff.end());
            h.tail_certified = ext_.tail_certified;
            h.ratio_from = std::max(0L, ext_.ratio_from - 1);
            BallReal tail = eval_power(h, -1, z0_, prec_);
            ext_anti_ = constant + logterm + tail;
            have_anti_ = true;
        }
        return ext_anti_;
    }

  private:
    Rational constant_pair_sum() const {
        std::vector<Rational> a = d_.alpha;
        std::sort(a.begin(), a.end());
        Rational x, y;
        if (opt_.constant_positive_pair) {
            std::vector<Rational> pos;
            for (const auto& v : a)
                if (v.sign() > 0) pos.push_back(v);
            if (pos.size() < 2) throw validation_error("constant_positive_pair: fewer than two positive indices");
            x = pos[0];
            y = pos[1];
        } else {
            if (a.size() < 2) throw validation_error("constant pair: fewer than two indices");
            x = a[0];
            y = a[1];
        }
        if (x.sign() == 0 || y.sign() == 0) throw validation_error("constant pair: index is zero");
        return x.inv() + y.inv();
    }

    HGData d_;
    Rational z0_;
    PeriodOptions opt_;
    mpfr_prec_t prec_;
    Rational lambda_;
    long nterms_ = 0;
    std::vector<GeneralizedSeries> sol_;
    std::vector<std::vector<BallComplex>> eig_;
    mutable GeneralizedSeries ext_;
    mutable std::map<std::pair<size_t, long>, BallReal> sval_;
    mutable std::map<std::pair<long, long>, BallComplex> cval_;
    mutable std::map<long, BallReal> eval_;
    mutable BallReal ext_anti_;
    mutable bool have_anti_ = false;
};

// --- matrices ----------------------------------------------------------------

struct PeriodMatrix {
    CMatrix entries; // n x n
    Rational z0;
    std::vector<std::string> row_labels, col_labels;
};

// Row r = component r of the V^t-transformed solution vector (Phi_{r+1}),
// column j = derivative order: entry (r, j) = sum_i A_i^r (D^j S_i)(lambda z0).
inline PeriodMatrix period_matrix(const PeriodWorkspace& ws) {
    const size_t n = ws.rank();
    PeriodMatrix P;
    P.z0 = ws.z0();
    P.entries.resize(n);
    for (size_t r = 0; r < n; ++r) {
        P.entries[r].reserve(n);
        for (size_t j = 0; j < n; ++j) P.entries[r].push_back(ws.combo(static_cast<long>(r), static_cast<long>(j)));
        P.row_labels.push_back("Phi" + std::to_string(r + 1));
        P.col_labels.push_back("D^" + std::to_string(r));
    }
    return P;
}

struct BiextMatrix {
    CMatrix entries; // 6 x 6
    Rational z0;
    std::vector<std::string> row_labels, col_labels;
};

// Rows: operator powers -1..4.  Columns: (S1, Phi1..Phi4, Z).  The Z column
// is identically zero except for its row-0 constant (2 pi i) G~(0).
inline BiextMatrix biext_matrix(const PeriodWorkspace& ws) {
    if (ws.rank() != 4) throw validation_error("biext_matrix: rank-4 data required");
    ws.ensure_extension();
    BiextMatrix B;
    B.z0 = ws.z0();
    B.col_labels = {"S1", "Phi1", "Phi2", "Phi3", "Phi4", "Z"};
    const mpfr_prec_t prec = ws.prec();
    BallReal two_pi_g0 = BallReal::pi(prec).mul_2exp(1) * ws.gamma_tilde0();
    B.entries.resize(6);
    for (long row = 0; row < 6; ++row) {
        const long p = row - 1;
        B.row_labels.push_back("D^" + std::to_string(p));
        auto& out = B.entries[static_cast<size_t>(row)];
        out.reserve(6);
        out.push_back(BallComplex::from_real(p == -1 ? ws.extension_antiderivative() : ws.extension_value(p)));
        for (long i = 0; i < 4; ++i) out.push_back(ws.combo(i, p));
        out.push_back(row == 0 ? BallComplex(BallReal::zero(prec), two_pi_g0) : BallComplex::zero(prec));
    }
    return B;
}

// The four pure periods with their full derivative stacks: the (6 rows) x
// (Phi1..Phi4) block of the extended matrix.
inline CMatrix pure_period_stack(const PeriodWorkspace& ws) {
    BiextMatrix B = biext_matrix(ws);
    CMatrix out(6);
    for (size_t r = 0; r < 6; ++r) out[r] = {B.entries[r][1], B.entries[r][2], B.entries[r][3], B.entries[r][4]};
    return out;
}

// --- real minors ---------------------------------------------------------------

inline RMatrix real_part(const CMatrix& m) {
    RMatrix out;
    out.reserve(m.size());
    for (const auto& row : m) {
        std::vector<BallReal> r;
        r.reserve(row.size());
        for (const auto& e : row) r.push_back(e.re());
        out.push_back(std::move(r));
    }
    return out;
}

// Determinant of the square submatrix picked out by the row/column index
// lists, by first-row cofactor expansion (exactly reproducible evaluation
// order; sizes here never exceed 4).
inline BallReal minor_det(const RMatrix& m, const std::vector<size_t>& rows, const std::vector<size_t>& cols) {
    if (rows.size() != cols.size() || rows.empty()) throw validation_error("minor_det: non-square index lists");
    if (rows.size() == 1) return m[rows[0]][cols[0]];
    if (rows.size() == 2)
        return m[rows[0]][cols[0]] * m[rows[1]][cols[1]] - m[rows[0]][cols[1]] * m[rows[1]][cols[0]];
    std::vector<size_t> subrows(rows.begin() + 1, rows.end());
    BallReal acc = BallReal::zero(m[rows[0]][cols[0]].prec());
    for (size_t c = 0; c < cols.size(); ++c) {
        std::vector<size_t> subcols;
        subcols.reserve(cols.size() - 1);
        for (size_t cc = 0; cc < cols.size(); ++cc)
            if (cc != c) subcols.push_back(cols[cc]);
        BallReal term = m[rows[0]][cols[c]] * minor_det(m, subrows, subcols);
        acc = (c % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

// G~(0)^{-3} det Re of the (powers -1,0,1) x (S1, Phi1, Phi2) corner.
inline BallReal bsd_denominator(const PeriodWorkspace& ws) {
    BiextMatrix B = biext_matrix(ws);
    RMatrix R = real_part(B.entries);
    BallReal det = minor_det(R, {0, 1, 2}, {0, 1, 2});
    BallReal g0 = ws.gamma_tilde0();
    return det / (g0 * g0 * g0);
}

// G~(0)^{-1} (3x3 corner minor) / (2x2 pure-period minor) of Re of the
// extended matrix: the archimedean height pairing against the pure block.
inline BallReal h_arch(const PeriodWorkspace& ws) {
    BiextMatrix B = biext_matrix(ws);
    RMatrix R = real_part(B.entries);
    BallReal det3 = minor_det(R, {0, 1, 2}, {0, 1, 2});
    BallReal det2 = minor_det(R, {1, 2}, {1, 2});
    if (det2.contains_zero()) throw precision_error("h_arch: pure 2x2 minor ball contains zero");
    BallReal g0 = ws.gamma_tilde0();
    return det3 / (det2 * g0);
}

enum class DeligneConvention { scalar, matrix };

inline DeligneConvention deligne_convention_from_string(const std::string& s) {
    if (s == "scalar") return DeligneConvention::scalar;
    if (s == "matrix") return DeligneConvention::matrix;
    throw validation_error("unknown convention '" + s + "' (expected scalar|matrix)");
}

// (2 pi i)^4 det Re of the top-left 2x2 of the period matrix; under the
// `matrix` convention the power-of-2pi factor multiplies the matrix instead,
// i.e. the determinant carries (16 pi^4)^2.
inline BallReal deligne_minor(const PeriodWorkspace& ws, DeligneConvention conv = DeligneConvention::scalar) {
    if (ws.rank() != 4) throw validation_error("deligne_minor: rank-4 data required");
    PeriodMatrix P = period_matrix(ws);
    RMatrix R = real_part(P.entries);
    BallReal det = minor_det(R, {0, 1}, {0, 1});
    BallReal pi = BallReal::pi(ws.prec());
    BallReal pi2 = pi * pi;
    BallReal factor = (pi2 * pi2).mul_rational(Rational(16)); // (2 pi i)^4 = 16 pi^4
    if (conv == DeligneConvention::matrix) factor = factor * factor;
    return factor * det;
}

// Convenience one-shot forms.
inline PeriodMatrix period_matrix(const HGData& d, const Rational& z0, PeriodOptions opt = {}) {
    PeriodWorkspace ws(d, z0, opt);
    return period_matrix(ws);
}
inline BiextMatrix biext_matrix(const HGData& d, const Rational& z0, PeriodOptions opt = {}) {
    PeriodWorkspace ws(d, z0, opt);
    return biext_matrix(ws);
}
inline BallReal bsd_denominator(const HGData& d, const Rational& z0, PeriodOptions opt = {}) {
    PeriodWorkspace ws(d, z0, opt);
    return bsd_denominator(ws);
}
inline BallReal h_arch(const HGData& d, const Rational& z0, PeriodOptions opt = {}) {
    PeriodWorkspace ws(d, z0, opt);
    return h_arch(ws);
}
inline BallReal deligne_minor(const HGData& d, const Rational& z0, PeriodOptions opt = {},
                              DeligneConvention conv = DeligneConvention::scalar) {
    PeriodWorkspace ws(d, z0, opt);
    return deligne_minor(ws, conv);
}

// --- monodromy at the origin ---------------------------------------------------

inline CMatrix vandermonde(const HGData& d, mpfr_prec_t prec) {
    const size_t n = d.alpha.size();
    CMatrix V(n);
    for (size_t i = 0; i < n; ++i) {
        V[i].reserve(n);
        for (size_t j = 0; j < n; ++j) V[i].push_back(BallComplex::exp_2pi_i(d.alpha[i] * Rational(static_cast<long>(j)), prec));
    }
    return V;
}

inline CMatrix matmul(const CMatrix& a, const CMatrix& b) {
    const size_t n = a.size(), m = b[0].size(), k = b.size();
    CMatrix c(n);
    for (size_t i = 0; i < n; ++i) {
        c[i].reserve(m);
        for (size_t j = 0; j < m; ++j) {
            BallComplex acc = a[i][0] * b[0][j];
            for (size_t l = 1; l < k; ++l) acc += a[i][l] * b[l][j];
            c[i].push_back(std::move(acc));
        }
    }
    return c;
}

// Gauss-Jordan inverse with partial pivoting on the midpoint modulus.
inline CMatrix invert(const CMatrix& m, mpfr_prec_t prec) {
    const size_t n = m.size();
    CMatrix a = m;
    CMatrix inv(n);
    for (size_t i = 0; i < n; ++i) {
        inv[i].assign(n, BallComplex::zero(prec));
        inv[i][i] = BallComplex::one(prec);
    }
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        double best = a[col][col].norm_sq().mid_double();
        for (size_t r = col + 1; r < n; ++r) {
            double v = a[r][col].norm_sq().mid_double();
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        BallComplex p = a[col][col];
        if (p.norm_sq().contains_zero()) throw precision_error("invert: pivot ball contains zero");
        for (size_t j = 0; j < n; ++j) {
            a[col][j] = a[col][j] / p;
            inv[col][j] = inv[col][j] / p;
        }
        for (size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            BallComplex f = a[r][col];
            for (size_t j = 0; j < n; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

// Local monodromy at 0 in the V^t basis: V^t diag(A) (V^t)^{-1}.
inline CMatrix monodromy_matrix(const HGData& d, mpfr_prec_t prec) {
    const size_t n = d.alpha.size();
    CMatrix V = vandermonde(d, prec);
    CMatrix Vt(n), VtA(n);
    for (size_t r = 0; r < n; ++r) {
        Vt[r].reserve(n);
        VtA[r].reserve(n);
        for (size_t i = 0; i < n; ++i) {
            Vt[r].push_back(V[i][r]);
            // (V^t diag(A))[r][i] = A_i^{r+1}, computed as a single root of unity
            VtA[r].push_back(BallComplex::exp_2pi_i(d.alpha[i] * Rational(static_cast<long>(r) + 1), prec));
        }
    }
    return matmul(VtA, invert(Vt, prec));
}

inline QMatrix recognize_matrix(const CMatrix& m, long max_den = 1000000000L) {
    QMatrix out;
    out.reserve(m.size());
    for (const auto& row : m) {
        std::vector<Rational> r;
        r.reserve(row.size());
        for (const auto& e : row) {
            if (!e.im().contains_zero()) throw precision_error("recognize_matrix: imaginary part excludes zero");
            auto q = recognize_rational(e.re(), max_den);
            if (!q) throw precision_error("recognize_matrix: entry not recognizably rational: " + e.re().str());
            r.push_back(*q);
        }
        out.push_back(std::move(r));
    }
    return out;
}

inline QMatrix monodromy_rational(const HGData& d, long digits = 30) {
    return recognize_matrix(monodromy_matrix(d, working_precision(digits)));
}

// --- exact characteristic polynomial oracle -------------------------------------

inline QPoly qpoly_divexact(const QPoly& num, const QPoly& den) {
    if (den.is_zero()) throw domain_error("qpoly_divexact: division by zero polynomial");
    QPoly r = num, q;
    while (!r.is_zero() && r.degree() >= den.degree()) {
        long d = r.degree() - den.degree();
        Rational c = r.coeff(r.degree()) / den.coeff(den.degree());
        std::vector<Rational> mono(static_cast<size_t>(d) + 1, Rational(0));
        mono.back() = c;
        QPoly t{std::vector<Rational>(mono)};
        q = q + t;
        r = r - t * den;
    }
    if (!r.is_zero()) throw domain_error("qpoly_divexact: nonzero remainder");
    return q;
}

inline const QPoly& cyclotomic_polynomial(long q) {
    static std::map<long, QPoly> cache;
    auto it = cache.find(q);
    if (it != cache.end()) return it->second;
    if (q < 1) throw validation_error("cyclotomic_polynomial: order must be positive");
    std::vector<Rational> xq(static_cast<size_t>(q) + 1, Rational(0));
    xq[0] = Rational(-1);
    xq.back() = Rational(1);
    QPoly num{std::vector<Rational>(xq)}; // T^q - 1
    for (long dd = 1; dd < q; ++dd)
        if (q % dd == 0) num = qpoly_divexact(num, cyclotomic_polynomial(dd));
    return cache.emplace(q, std::move(num)).first->second;
}

// det(T I - M) over Q[T] by cofactor expansion.
inline QPoly charpoly(const QMatrix& m) {
    const size_t n = m.size();
    std::vector<std::vector<QPoly>> a(n);
    for (size_t i = 0; i < n; ++i) {
        a[i].reserve(n);
        for (size_t j = 0; j < n; ++j) {
            QPoly e(-m[i][j]);
            if (i == j) e = e + QPoly::variable();
            a[i].push_back(std::move(e));
        }
    }
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    // recursive first-row expansion on column index lists
    struct Det {
        const std::vector<std::vector<QPoly>>& a;
        QPoly run(size_t row, const std::vector<size_t>& cols) {
            if (cols.size() == 1) return a[row][cols[0]];
            QPoly acc;
            for (size_t c = 0; c < cols.size(); ++c) {
                std::vector<size_t> sub;
                sub.reserve(cols.size() - 1);
                for (size_t cc = 0; cc < cols.size(); ++cc)
                    if (cc != c) sub.push_back(cols[cc]);
                QPoly term = a[row][cols[c]] * run(row + 1, sub);
                acc = (c % 2 == 0) ? acc + term : acc - term;
            }
            return acc;
        }
    } det{a};
    return det.run(0, idx);
}

// Expected characteristic polynomial of the local monodromy: each exp(2 pi i
// alpha) is a primitive q-th root of unity for q = den(alpha mod 1); the index
// set must cover complete Galois orbits, giving a product of cyclotomics.
inline QPoly expected_monodromy_charpoly(const HGData& d) {
    std::map<Int, long> counts;
    for (const auto& a : d.alpha) {
        counts[a.frac().den()] += 1;
    }
    QPoly out{std::vector<Rational>{Rational(1)}};
    for (const auto& [q, c] : counts) {
        long qi = q.to_long();
        long phi = qi;
        for (const auto& [p, e] : factorize(Int(qi))) {
            (void)e;
            long pl = p.to_long();
            phi = phi / pl * (pl - 1);
        }
        if (c != phi)
            throw validation_error("expected_monodromy_charpoly: indices of order " + std::to_string(qi) +
                                   " do not form complete Galois orbits");
        out = out * cyclotomic_polynomial(qi);
    }
    return out;
}

} // namespace hml
