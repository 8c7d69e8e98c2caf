#pragma once

// JSON and aligned-text rendering for the public types.  JSON carries every
// numeric value as a {mid, rad} pair of decimal strings so nothing is
// truncated to double on the way out; the text forms are for human eyes.

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "complex_ball.hpp"
#include "hgdata.hpp"
#include "lfunc.hpp"
#include "lseries.hpp"
#include "periods.hpp"
#include "weyl.hpp"

namespace hml {

using json = nlohmann::json;

inline json ball_json(const BallReal& x, int digits = 30) {
    return json{{"mid", x.mid_str(digits)}, {"rad", x.rad_str()}};
}

inline json ball_json(const BallComplex& z, int digits = 30) {
    return json{{"re", ball_json(z.re(), digits)}, {"im", ball_json(z.im(), digits)}};
}

inline json hgdata_json(const HGData& d) {
    json a = json::array(), b = json::array();
    for (const auto& x : d.alpha) a.push_back(x.str());
    for (const auto& x : d.beta) b.push_back(x.str());
    return json{{"alpha", a}, {"beta", b}};
}

namespace detail {

inline json labeled_matrix_json(const CMatrix& m, const std::vector<std::string>& rows,
                                const std::vector<std::string>& cols, const Rational& z0,
                                int digits) {
    json e = json::array();
    for (const auto& row : m) {
        json r = json::array();
        for (const auto& z : row) r.push_back(ball_json(z, digits));
        e.push_back(std::move(r));
    }
    return json{{"z0", z0.str()}, {"rows", rows}, {"cols", cols}, {"entries", e}};
}

inline std::string labeled_matrix_text(const CMatrix& m, const std::vector<std::string>& rows,
                                       const std::vector<std::string>& cols, int digits) {
    // one cell per entry: re (+/- r) + im (+/- r) i, columns aligned
    std::vector<std::vector<std::string>> cells(m.size() + 1);
    cells[0].push_back("");
    for (const auto& c : cols) cells[0].push_back(c);
    for (size_t i = 0; i < m.size(); ++i) {
        cells[i + 1].push_back(rows[i]);
        for (const auto& z : m[i]) cells[i + 1].push_back(z.str(digits));
    }
    std::vector<size_t> w;
    for (const auto& row : cells)
        for (size_t j = 0; j < row.size(); ++j) {
            if (j >= w.size()) w.push_back(0);
            w[j] = std::max(w[j], row[j].size());
        }
    std::ostringstream os;
    for (const auto& row : cells) {
        for (size_t j = 0; j < row.size(); ++j) {
            os << row[j] << std::string(w[j] - row[j].size() + (j + 1 < row.size() ? 2 : 0), ' ');
        }
        os << "\n";
    }
    return os.str();
}

// all rational roots of p with multiplicity, plus the fully deflated cofactor
inline std::vector<Rational> rational_roots(const QPoly& p, QPoly& cofactor) {
    std::vector<Rational> cs = p.coeffs();
    std::vector<Rational> roots;
    while (cs.size() > 1) {
        // integer version: candidates num | c0, den | lead
        Int den(1);
        for (const auto& c : cs) den = lcm(den, c.den());
        std::vector<Int> ic;
        for (const auto& c : cs) ic.push_back(c.num() * den.divexact(c.den()));
        size_t v = 0;
        while (v < ic.size() && ic[v].sign() == 0) ++v;
        Rational root;
        bool found = false;
        if (v > 0) {
            root = Rational(0);
            found = true;
        } else {
            auto eval = [&](const Rational& r) {
                Rational acc(0);
                for (size_t i = cs.size(); i-- > 0;) acc = acc * r + cs[i];
                return acc;
            };
            std::vector<Int> nds{Int(1)}, dds{Int(1)};
            auto divisors = [](const Int& n) {
                std::vector<Int> out{Int(1)};
                for (const auto& [q, e] : factorize(n.abs())) {
                    size_t base = out.size();
                    Int qe(1);
                    for (unsigned k = 1; k <= e; ++k) {
                        qe *= q;
                        for (size_t i = 0; i < base; ++i) out.push_back(out[i] * qe);
                    }
                }
                return out;
            };
            if (ic.front().sign() != 0) nds = divisors(ic.front());
            dds = divisors(ic.back());
            for (const auto& nn : nds) {
                for (const auto& dd : dds) {
                    Rational cand(nn, dd);
                    if (eval(cand).sign() == 0) { root = cand; found = true; break; }
                    if (eval(-cand).sign() == 0) { root = -cand; found = true; break; }
                }
                if (found) break;
            }
        }
        if (!found) break;
        roots.push_back(root);
        // synthetic division by (y - root)
        std::vector<Rational> q(cs.size() - 1, Rational(0));
        Rational carry(0);
        for (size_t i = cs.size(); i-- > 1;) {
            carry = cs[i] + carry * root;
            q[i - 1] = carry;
        }
        cs = std::move(q);
    }
    cofactor = QPoly(std::move(cs));
    return roots;
}

}  // namespace detail

inline json period_matrix_json(const PeriodMatrix& P, int digits = 30) {
    return detail::labeled_matrix_json(P.entries, P.row_labels, P.col_labels, P.z0, digits);
}

inline std::string period_matrix_text(const PeriodMatrix& P, int digits = 12) {
    return detail::labeled_matrix_text(P.entries, P.row_labels, P.col_labels, digits);
}

inline json biext_matrix_json(const BiextMatrix& B, int digits = 30) {
    return detail::labeled_matrix_json(B.entries, B.row_labels, B.col_labels, B.z0, digits);
}

inline std::string biext_matrix_text(const BiextMatrix& B, int digits = 12) {
    return detail::labeled_matrix_text(B.entries, B.row_labels, B.col_labels, digits);
}

// operators as data: [{zpow, poly: [c0, c1, ...]}, ...], coefficients in D
inline json operator_json(const OperatorPoly& L) {
    json arr = json::array();
    for (const auto& [k, p] : L.terms()) {
        json cs = json::array();
        for (const auto& c : p.coeffs()) cs.push_back(c.str());
        arr.push_back(json{{"zpow", k}, {"poly", cs}});
    }
    return arr;
}

// Pretty form: each z-power term factored over its rational roots when the
// coefficient polynomial splits completely (it does for hypergeometric
// operators), otherwise the raw polynomial.
inline std::string operator_text(const OperatorPoly& L) {
    if (L.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, p] : L.terms()) {
        if (!first) os << "  +  ";
        first = false;
        if (k != 0) os << "z^" << k << " ";
        QPoly cof;
        std::vector<Rational> roots = detail::rational_roots(p, cof);
        if (cof.degree() == 0 && !roots.empty()) {
            Rational lead = cof.coeff(0);
            if (lead != Rational(1)) os << lead.str() << " ";
            for (const auto& r : roots) {
                if (r.sign() == 0) os << "D";
                else os << "(D " << (r.sign() < 0 ? "+ " : "- ") << r.abs().str() << ")";
                os << " ";
            }
        } else {
            os << "(" << p.str("D") << ") ";
        }
    }
    std::string s = os.str();
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

inline json local_factor_json(const LocalFactor& lf) {
    json cs = json::array();
    for (const auto& c : lf.coeffs) cs.push_back(c.str());
    return json{{"p", lf.p}, {"coeffs", cs}, {"good", lf.good}};
}

inline json fit_json(const FitResult& f, int digits = 30) {
    json bads = json::array();
    for (const auto& [p, lf] : f.bad_factors) bads.push_back(local_factor_json(lf));
    return json{{"conductor", f.conductor.str()},
                {"eps", f.eps},
                {"bad_factors", bads},
                {"residual_prescreen", f.residual_prescreen},
                {"residual_max", ball_json(f.residual_max, digits)},
                {"notes", f.notes}};
}

}  // namespace hml
