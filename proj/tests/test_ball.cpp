#include <catch2/catch_amalgamated.hpp>

#include "hml/ball.hpp"
#include "hml/complex_ball.hpp"

using namespace hml;

namespace {

// Digit strings of standard constants, used as frozen oracles.
const char* kPi = "3.14159265358979323846264338327950288";
const char* kE = "2.71828182845904523536028747135266250";
const char* kLn2 = "0.693147180559945309417232121458176568";
const char* kSqrt2 = "1.41421356237309504880168872420969808";

BallReal ball_from_decimal(const char* s, mpfr_prec_t prec) {
    mpfr_t t;
    mpfr_init2(t, prec);
    mpfr_set_str(t, s, 10, MPFR_RNDN);
    BallReal b = BallReal::from_mpfr(t, prec);
    b.add_error(Mag::pow2(-110)); // strings above carry ~36 digits
    mpfr_clear(t);
    return b;
}

bool contains_value(const BallReal& computed, const BallReal& oracle) {
    return (computed - oracle).contains_zero();
}

} // namespace

TEST_CASE("integer and rational constructors are exact") {
    auto b = BallReal::from_long(1234567, 128);
    REQUIRE(b.is_exact());
    auto q = BallReal::from_rational(Rational(1, 4), 128);
    REQUIRE(q.is_exact()); // dyadic
    auto t = BallReal::from_rational(Rational(1, 3), 128);
    REQUIRE(!t.is_exact());
    REQUIRE(t.contains_rational(Rational(1, 3)));
}

TEST_CASE("field operations enclose exact rational results") {
    Rational xa(7, 3), xb(-22, 7);
    auto a = BallReal::from_rational(xa, 128);
    auto b = BallReal::from_rational(xb, 128);
    REQUIRE((a + b).contains_rational(xa + xb));
    REQUIRE((a - b).contains_rational(xa - xb));
    REQUIRE((a * b).contains_rational(xa * xb));
    REQUIRE((a / b).contains_rational(xa / xb));
    REQUIRE((-a).contains_rational(-xa));
    REQUIRE(a.pow_si(5).contains_rational(Rational::pow(xa, 5)));
    REQUIRE(a.pow_si(-3).contains_rational(Rational::pow(xa, -3)));
    REQUIRE(a.mul_rational(xb).contains_rational(xa * xb));
}

TEST_CASE("division by a ball containing zero throws") {
    auto a = BallReal::one(64);
    BallReal z = BallReal::from_rational(Rational(1, 1000000), 64);
    z.add_error(Mag::from_d(0.001));
    REQUIRE(z.contains_zero());
    REQUIRE_THROWS_AS(a / z, domain_error);
}

TEST_CASE("log of a ball touching the origin throws") {
    BallReal z = BallReal::from_rational(Rational(1, 1024), 64);
    z.add_error(Mag::from_d(0.25));
    REQUIRE_THROWS_AS(z.log_ball(), domain_error);
    REQUIRE_THROWS_AS(BallReal::from_long(-2, 64).log_ball(), domain_error);
}

TEST_CASE("constants match frozen digit strings") {
    mpfr_prec_t p = 192;
    REQUIRE(contains_value(BallReal::pi(p), ball_from_decimal(kPi, p)));
    REQUIRE(contains_value(BallReal::one(p).exp_ball(), ball_from_decimal(kE, p)));
    REQUIRE(contains_value(BallReal::ln2(p), ball_from_decimal(kLn2, p)));
    REQUIRE(contains_value(BallReal::from_long(2, p).sqrt_ball(), ball_from_decimal(kSqrt2, p)));
}

TEST_CASE("elementary identities hold as ball containments") {
    mpfr_prec_t p = 160;
    for (long num = -17; num <= 17; num += 5) {
        Rational q(num, 7);
        auto x = BallReal::from_rational(q, p);
        // sin^2 + cos^2 = 1
        auto s = x.sin_ball(), c = x.cos_ball();
        REQUIRE((s * s + c * c).contains_rational(Rational(1)));
        // exp(log(y)) = y for y > 0
        auto y = x.cosh_ball(); // certainly >= 1
        REQUIRE((y.log_ball().exp_ball() - y).contains_zero());
        // sinh/cosh consistency: cosh^2 - sinh^2 = 1
        auto sh = x.sinh_ball(), ch = x.cosh_ball();
        REQUIRE((ch * ch - sh * sh).contains_rational(Rational(1)));
        REQUIRE((ch * ch - sh * sh).abs_ok_to_digits(30));
    }
}

TEST_CASE("results at higher precision are contained in lower-precision enclosures") {
    auto eval = [](mpfr_prec_t p) {
        auto x = BallReal::from_rational(Rational(3, 7), p);
        auto y = BallReal::from_rational(Rational(-9, 5), p);
        return (x.sin_ball() * y + (BallReal::one(p) + x * x).log_ball()).exp_ball() /
               (y.cosh_ball() + x.atan_ball());
    };
    BallReal lo = eval(96), hi = eval(320);
    Rational lo_l = lo.mid_rational() - lo.rad_rational();
    Rational lo_u = lo.mid_rational() + lo.rad_rational();
    Rational hi_l = hi.mid_rational() - hi.rad_rational();
    Rational hi_u = hi.mid_rational() + hi.rad_rational();
    REQUIRE(lo_l <= hi_l);
    REQUIRE(hi_u <= lo_u);
    REQUIRE(hi.rad_rational() < lo.rad_rational());
    REQUIRE(hi.abs_ok_to_digits(80));
}

TEST_CASE("abs and endpoints for straddling balls") {
    BallReal z = BallReal::from_rational(Rational(-1, 100), 96);
    z.add_error(Mag::from_d(0.05));
    REQUIRE(z.contains_zero());
    auto a = z.abs_ball();
    REQUIRE(a.contains_rational(Rational(0)));
    REQUIRE(a.contains_rational(Rational(3, 50))); // 0.06 = |-0.01 - 0.05|
    auto ch = z.cosh_ball();
    REQUIRE(ch.contains_rational(Rational(1)));
}

TEST_CASE("pow_rational on positive balls") {
    auto x = BallReal::from_rational(Rational(256, 3125), 160);
    auto r = x.pow_rational(Rational(1, 2));
    REQUIRE((r * r - x).contains_zero());
    REQUIRE((r * r - x).abs_ok_to_digits(35));
    REQUIRE_THROWS_AS(BallReal::from_long(-2, 64).pow_rational(Rational(1, 2)), domain_error);
}

TEST_CASE("complex arithmetic basics") {
    mpfr_prec_t p = 128;
    auto z = BallComplex(BallReal::from_rational(Rational(3, 5), p),
                         BallReal::from_rational(Rational(-4, 5), p));
    REQUIRE(z.norm_sq().contains_rational(Rational(1)));
    REQUIRE((z * z.conj()).re().contains_rational(Rational(1)));
    REQUIRE((z * z.conj()).im().contains_rational(Rational(0)));
    REQUIRE((z / z - BallComplex::one(p)).contains_zero());
    REQUIRE((z.inv() - z.conj()).contains_zero()); // |z| = 1
    auto w = z.mul_i();
    REQUIRE((w * w + z * z).contains_zero()); // (iz)^2 = -z^2
}

TEST_CASE("complex exp/log/pow round trips") {
    mpfr_prec_t p = 160;
    auto z = BallComplex(BallReal::from_rational(Rational(7, 4), p),
                         BallReal::from_rational(Rational(2, 3), p));
    auto lg = z.log_principal();
    REQUIRE((lg.exp_ball() - z).contains_zero());
    REQUIRE((lg.exp_ball() - z).abs_ok_to_digits(35));
    // log of points in the left half-plane, off the cut
    auto zneg = BallComplex(BallReal::from_rational(Rational(-3, 2), p),
                            BallReal::from_rational(Rational(1, 5), p));
    REQUIRE((zneg.log_principal().exp_ball() - zneg).contains_zero());
    auto zneg2 = zneg.conj();
    REQUIRE((zneg2.log_principal().exp_ball() - zneg2).contains_zero());
    // cut itself throws
    auto cut = BallComplex(BallReal::from_long(-2, p), BallReal::zero(p));
    REQUIRE_THROWS_AS(cut.log_principal(), domain_error);
    // principal square root via pow
    auto r = z.pow(BallComplex::from_rational(Rational(1, 2), p));
    REQUIRE((r * r - z).contains_zero());
}

TEST_CASE("roots of unity via exp_2pi_i") {
    mpfr_prec_t p = 128;
    auto w = BallComplex::exp_2pi_i(Rational(1, 5), p);
    REQUIRE((w.pow_si(5) - BallComplex::one(p)).contains_zero());
    REQUIRE((w.pow_si(5) - BallComplex::one(p)).abs_ok_to_digits(30));
    auto m = BallComplex::exp_2pi_i(Rational(-1, 2), p);
    REQUIRE((m + BallComplex::one(p)).contains_zero());
}

TEST_CASE("sin of complex values against the addition formula") {
    mpfr_prec_t p = 128;
    auto z = BallComplex(BallReal::from_rational(Rational(1, 3), p),
                         BallReal::from_rational(Rational(5, 7), p));
    // sin(2z) = 2 sin z cos z, with cos z = sin(pi/2 - z)... avoid cos:
    // use sin(z)^2 + sin(pi/2 - z)^2 = 1 instead? Keep it simple:
    // sin(-z) = -sin(z) and sin(z + 2pi) = sin(z).
    REQUIRE(((-z).sin_ball() + z.sin_ball()).contains_zero());
    auto two_pi = BallComplex::from_real(BallReal::pi(p).mul_2exp(1));
    REQUIRE(((z + two_pi).sin_ball() - z.sin_ball()).contains_zero());
    REQUIRE(((z + two_pi).sin_ball() - z.sin_ball()).abs_ok_to_digits(25));
}
