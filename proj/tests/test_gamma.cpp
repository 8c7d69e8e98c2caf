#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hml/gamma.hpp"

using namespace hml;

TEST_CASE("bernoulli numbers match frozen values") {
    REQUIRE(detail::bernoulli(0) == Rational(1));
    REQUIRE(detail::bernoulli(1) == Rational(-1, 2));
    REQUIRE(detail::bernoulli(2) == Rational(1, 6));
    REQUIRE(detail::bernoulli(3) == Rational(0));
    REQUIRE(detail::bernoulli(4) == Rational(-1, 30));
    REQUIRE(detail::bernoulli(12) == Rational(-691, 2730));
    REQUIRE(detail::bernoulli(20) == Rational(Int("-174611"), Int("330")));
}

TEST_CASE("real gamma at small integers and halves") {
    mpfr_prec_t p = 192;
    REQUIRE(gamma_rational_pos(Rational(5), p).contains_rational(Rational(24)));
    REQUIRE(gamma_rational_pos(Rational(1), p).contains_rational(Rational(1)));
    // Gamma(1/2) = sqrt(pi)
    auto g = gamma_rational_pos(Rational(1, 2), p);
    REQUIRE((g * g - BallReal::pi(p)).contains_zero());
    REQUIRE((g * g - BallReal::pi(p)).abs_ok_to_digits(45));
    // Gamma(3/2) = sqrt(pi)/2
    auto g32 = gamma_rational_pos(Rational(3, 2), p);
    REQUIRE((g32.mul_2exp(1) - g).contains_zero());
}

TEST_CASE("real gamma over an interval containing the minimum") {
    BallReal x = BallReal::from_rational(Rational(29, 20), 96); // 1.45
    x.add_error(Mag::from_d(0.1)); // [1.35, 1.55] straddles 1.4616...
    auto g = gamma_real_pos(x, 96);
    // Must contain Gamma(1.4616...) ~ 0.885603
    REQUIRE(g.contains_rational(Rational(8856032, 10000000)));
    REQUIRE(g.contains_rational(Rational(8857, 10000))); // value near the edges
}

TEST_CASE("complex log-gamma agrees with mpfr on the real axis") {
    mpfr_prec_t p = 224;
    for (long num : {3L, 10L, 47L, 201L}) {
        Rational q(num, 10);
        auto z = BallComplex::from_rational(q, p);
        auto lg = lngamma_positive_re(z, p);
        mpfr_t ref;
        mpfr_init2(ref, p + 40);
        mpfr_set_q(ref, q.raw(), MPFR_RNDN);
        mpfr_lngamma(ref, ref, MPFR_RNDN);
        auto refb = BallReal::from_mpfr(ref, p);
        refb.add_error(Mag::pow2(-(long)p - 30));
        mpfr_clear(ref);
        REQUIRE((lg.re() - refb).contains_zero());
        REQUIRE(lg.im().contains_rational(Rational(0)));
        REQUIRE((lg.re() - refb).abs_ok_to_digits(50));
    }
}

TEST_CASE("gamma recurrence and reflection on complex samples") {
    mpfr_prec_t p = 192;
    std::mt19937 rng(20240817);
    std::uniform_int_distribution<int> coord(-250, 250);
    int tested = 0;
    while (tested < 12) {
        Rational re(coord(rng), 100), im(coord(rng), 100);
        if (im.sign() == 0 && re.is_integer()) continue;
        BallComplex z(BallReal::from_rational(re, p), BallReal::from_rational(im, p));
        // Recurrence via reciprocals: 1/Gamma(z+1) * z = 1/Gamma(z)
        auto rz = gamma_reciprocal(z, p);
        auto rz1 = gamma_reciprocal(z + BallComplex::one(p), p);
        REQUIRE((rz1 * z - rz).contains_zero());
        REQUIRE((rz1 * z - rz).abs_ok_to_digits(35));
        // Reflection: (1/Gamma(z)) * (1/Gamma(1-z)) = sin(pi z)/pi
        auto r1mz = gamma_reciprocal(BallComplex::one(p) - z, p);
        auto lhs = rz * r1mz;
        auto rhs = (z.mul_real(BallReal::pi(p))).sin_ball().mul_real(BallReal::pi(p).inv());
        REQUIRE((lhs - rhs).contains_zero());
        REQUIRE((lhs - rhs).abs_ok_to_digits(35));
        ++tested;
    }
}

TEST_CASE("gamma duplication formula") {
    mpfr_prec_t p = 192;
    for (int k = 1; k <= 6; ++k) {
        Rational re(2 * k - 5, 4), im(k, 3);
        BallComplex z(BallReal::from_rational(re, p), BallReal::from_rational(im, p));
        // Gamma(z) Gamma(z+1/2) = 2^{1-2z} sqrt(pi) Gamma(2z), checked with
        // reciprocals to stay total:
        // 1/Gamma(2z) = 2^{1-2z} sqrt(pi) * (1/Gamma(z)) (1/Gamma(z+1/2))
        auto lhs = gamma_reciprocal(z.mul_2exp(1), p);
        auto pref = (BallComplex::one(p) - z.mul_2exp(1))
                        .mul_real(BallReal::ln2(p))
                        .exp_ball()
                        .mul_real(BallReal::pi(p).sqrt_ball());
        auto rhs = pref * gamma_reciprocal(z, p) *
                   gamma_reciprocal(z + BallComplex::from_rational(Rational(1, 2), p), p);
        REQUIRE((lhs - rhs).contains_zero());
        REQUIRE((lhs - rhs).abs_ok_to_digits(30));
    }
}

TEST_CASE("reciprocal gamma vanishes exactly at nonpositive integers") {
    mpfr_prec_t p = 96;
    for (long m : {0L, -1L, -2L, -7L}) {
        auto r = gamma_reciprocal(BallComplex::from_rational(Rational(m), p), p);
        REQUIRE(r.re().is_exact());
        REQUIRE(mpfr_zero_p(r.re().mid()));
        REQUIRE(r.im().is_exact());
        auto rr = gamma_reciprocal_rational(Rational(m), p);
        REQUIRE(rr.is_exact());
        REQUIRE(mpfr_zero_p(rr.mid()));
    }
}

TEST_CASE("gamma at a pole-containing ball throws") {
    mpfr_prec_t p = 96;
    BallComplex z = BallComplex::from_rational(Rational(-3), p);
    REQUIRE_THROWS_AS(gamma_complex(z, p), domain_error);
}

TEST_CASE("rational reciprocal gamma matches reflection for negative arguments") {
    mpfr_prec_t p = 160;
    for (Rational x : {Rational(-1, 2), Rational(-7, 5), Rational(-23, 12)}) {
        auto r = gamma_reciprocal_rational(x, p);
        // Gamma(x) * (1/Gamma(x)) = 1 where Gamma(x) = pi / (sin(pi x) Gamma(1-x))
        auto g1mx = gamma_rational_pos(Rational(1) - x, p);
        auto s = BallReal::pi(p).mul_rational(x).sin_ball();
        auto gx = BallReal::pi(p) / (s * g1mx);
        REQUIRE((gx * r).contains_rational(Rational(1)));
        REQUIRE((gx * r - BallReal::one(p)).abs_ok_to_digits(35));
    }
}

TEST_CASE("digamma closed forms at quarter and half integers") {
    mpfr_prec_t p = 192;
    auto g = BallReal::euler_gamma(p);
    auto l2 = BallReal::ln2(p);
    auto pi_b = BallReal::pi(p);
    // psi(1) = -gamma
    REQUIRE((digamma_rational(Rational(1), p) + g).contains_zero());
    // psi(1/2) = -gamma - 2 ln 2
    REQUIRE((digamma_rational(Rational(1, 2), p) + g + l2.mul_2exp(1)).contains_zero());
    // psi(1/4) = -gamma - 3 ln 2 - pi/2
    auto q = digamma_rational(Rational(1, 4), p) + g + l2.mul_long(3) + pi_b.mul_2exp(-1);
    REQUIRE(q.contains_zero());
    REQUIRE(q.abs_ok_to_digits(45));
    // psi(3/4) = -gamma - 3 ln 2 + pi/2
    auto q3 = digamma_rational(Rational(3, 4), p) + g + l2.mul_long(3) - pi_b.mul_2exp(-1);
    REQUIRE(q3.contains_zero());
    // psi(2) = 1 - gamma
    REQUIRE((digamma_rational(Rational(2), p) + g - BallReal::one(p)).contains_zero());
}

TEST_CASE("digamma recurrence, reflection, and mpfr cross-check") {
    mpfr_prec_t p = 160;
    std::vector<Rational> xs = {Rational(1, 10), Rational(3, 10), Rational(7, 12),
                                Rational(9, 10),  Rational(17, 5), Rational(-7, 3)};
    for (const auto& x : xs) {
        // psi(x+1) = psi(x) + 1/x
        auto d = digamma_rational(x + Rational(1), p) - digamma_rational(x, p);
        REQUIRE(d.contains_rational(x.inv()));
        REQUIRE((d - BallReal::from_rational(x.inv(), p)).abs_ok_to_digits(35));
        // psi(1-x) - psi(x) = pi cot(pi x)
        auto lhs = digamma_rational(Rational(1) - x, p) - digamma_rational(x, p);
        auto ang = BallReal::pi(p).mul_rational(x);
        auto rhs = BallReal::pi(p) * ang.cos_ball() / ang.sin_ball();
        REQUIRE((lhs - rhs).contains_zero());
        // mpfr oracle
        mpfr_t ref;
        mpfr_init2(ref, p + 40);
        mpfr_set_q(ref, x.raw(), MPFR_RNDN);
        mpfr_digamma(ref, ref, MPFR_RNDN);
        auto refb = BallReal::from_mpfr(ref, p);
        refb.add_error(Mag::pow2(-(long)p - 20));
        mpfr_clear(ref);
        REQUIRE((digamma_rational(x, p) - refb).contains_zero());
    }
    REQUIRE_THROWS_AS(digamma_rational(Rational(0), p), domain_error);
    REQUIRE_THROWS_AS(digamma_rational(Rational(-4), p), domain_error);
}

TEST_CASE("harmonic numbers") {
    REQUIRE(harmonic(0) == Rational(0));
    REQUIRE(harmonic(1) == Rational(1));
    REQUIRE(harmonic(4) == Rational(25, 12));
}
