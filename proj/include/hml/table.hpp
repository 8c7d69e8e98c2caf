#pragma once

// The golden table: thirteen biextension points across the six twisted
// rank-4 families, with the published decimal value of r(t) and the
// conjectured exact value of -t^{-3} r(t).

#include <cmath>
#include <string>
#include <vector>

#include "hgdata.hpp"
#include "rational.hpp"

namespace hml {

struct TableRow {
    std::string family;   // preset name of the twisted data
    Rational t;           // the point z0
    double r_printed;     // published decimal for r(t)
    Rational ratio;       // conjectured exact -t^{-3} r(t)
};

inline const std::vector<TableRow>& golden_table() {
    static const std::vector<TableRow> rows = {
        {"F2t", Rational(1, 7), -0.134344023, Rational(1152, 25)},
        {"F2t", Rational(1, 3), -0.189629629, Rational(128, 25)},
        {"F2t", Rational(1, 8), -0.160000000, Rational(2048, 25)},
        {"F3t", Rational(1, 2), -0.0555555555, Rational(4, 9)},
        {"F3t", Rational(1, 8), -0.01388888888, Rational(64, 9)},
        {"F4t", Rational(1, 6), -3.160493826, Rational(2048, 3)},
        {"F4t", Rational(1, 2), -2.666666666, Rational(64, 3)},
        {"F4t", Rational(1, 3), -1.580246913, Rational(128, 3)},
        {"F5t", Rational(1, 8), -0.1111111111, Rational(512, 9)},
        {"F5t", Rational(1, 7), -0.04146420466, Rational(128, 9)},
        {"F5t", Rational(1, 2), -0.444444444, Rational(32, 9)},
        {"F6t", Rational(1, 2), -0.01777777777, Rational(32, 225)},
        {"F7t", Rational(1, 2), -1.333333333, Rational(32, 3)},
    };
    return rows;
}

// r(t) implied by the exact column: r = -t^3 * ratio.
inline Rational table_row_exact_r(const TableRow& row) {
    return -(row.t * row.t * row.t) * row.ratio;
}

// |printed/exact - 1|; the printed decimals are truncations of varying width,
// so rows are self-consistent only to the width actually printed.
inline double table_row_discrepancy(const TableRow& row) {
    double exact = table_row_exact_r(row).to_double();
    return std::fabs(row.r_printed / exact - 1.0);
}

}  // namespace hml
