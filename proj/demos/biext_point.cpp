// One biextension fiber end to end on the archimedean side: the 4x4 period
// matrix, the extended 6x6 matrix, the structural minor identity, and the
// ratio of real minors that plays the role of the height denominator.
// Everything carries a certified radius.
//
//   usage: biext_point [family [z0 [digits]]]      (default F2t 1/2 12)

#include <cstdio>
#include <cstdlib>
#include <string>

#include "hml/periods.hpp"
#include "hml/serialize.hpp"

using namespace hml;

int main(int argc, char** argv) {
    std::string family = argc > 1 ? argv[1] : "F2t";
    std::string z0s = argc > 2 ? argv[2] : "1/2";
    long digits = argc > 3 ? atol(argv[3]) : 12;

    size_t slash = z0s.find('/');
    Rational z0 = slash == std::string::npos
                      ? Rational(Int(z0s))
                      : Rational(Int(z0s.substr(0, slash)), Int(z0s.substr(slash + 1)));

    HGData d = preset(family);
    PeriodOptions opt;
    opt.digits = digits;
    PeriodWorkspace ws(d, z0, opt);
    printf("%s at z0 = %s: lambda = %s, %ld terms at %ld bits\n\n", family.c_str(),
           z0.str().c_str(), ws.lambda().str().c_str(), ws.nterms(), (long)ws.prec());

    PeriodMatrix P = period_matrix(ws);
    printf("period matrix:\n%s\n", period_matrix_text(P, (int)digits).c_str());

    BiextMatrix B = biext_matrix(ws);
    printf("extended matrix:\n%s\n", biext_matrix_text(B, (int)digits).c_str());

    BallReal g0 = ws.gamma_tilde0();
    printf("constant of the extension column: %s\n", g0.str((int)digits).c_str());

    BallReal den = bsd_denominator(ws);
    printf("denominator (ratio of real minors): %s\n", den.str((int)digits).c_str());

    BallReal harch = h_arch(ws);
    printf("archimedean height of the fiber:   %s\n", harch.str((int)digits).c_str());
    return 0;
}
