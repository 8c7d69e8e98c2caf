#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hml/recognize.hpp"

using namespace hml;

TEST_CASE("recognizes an exactly represented rational") {
    auto b = BallReal::from_rational(Rational(-1152, 8575), 256);
    auto r = recognize_rational(b, Int(1000000));
    REQUIRE(r.has_value());
    REQUIRE(*r == Rational(-1152, 8575));
}

TEST_CASE("recognizes through a small perturbation within the radius") {
    auto b = BallReal::from_rational(Rational(256, 3125), 256);
    b.add_error(Mag::pow2(-200));
    auto r = recognize_rational(b, Int(100000));
    REQUIRE(r.has_value());
    REQUIRE(*r == Rational(256, 3125));
}

TEST_CASE("certified absence for an irrational midpoint") {
    auto pi = BallReal::pi(256); // radius ~2^-254
    auto r = recognize_rational(pi, Int(1000));
    REQUIRE(!r.has_value());
}

TEST_CASE("refusal when the radius cannot separate candidates") {
    auto b = BallReal::from_rational(Rational(1, 3), 64);
    b.add_error(Mag::from_d(0.001)); // >= 1/(2*1000^2)
    REQUIRE_THROWS_AS(recognize_rational(b, Int(1000)), precision_error);
}

TEST_CASE("refusal is about the radius, not the value") {
    // Same midpoint, tight radius: succeeds.
    auto b = BallReal::from_rational(Rational(1, 3), 128);
    b.add_error(Mag::pow2(-90));
    auto r = recognize_rational(b, Int(1000));
    REQUIRE(r.has_value());
    REQUIRE(*r == Rational(1, 3));
}

TEST_CASE("nearby rational outside the radius is not claimed") {
    // midpoint = 1/2 + 2^-40, radius 2^-60: no denominator-10 rational inside.
    auto b = BallReal::from_rational(Rational(1, 2) + Rational(Int(1), Int::pow(Int(2), 40)), 128);
    b.add_error(Mag::pow2(-60));
    auto r = recognize_rational(b, Int(10));
    REQUIRE(!r.has_value());
    // Widen the radius past the offset: now 1/2 is inside and unique.
    b.add_error(Mag::pow2(-39));
    auto r2 = recognize_rational(b, Int(10));
    REQUIRE(r2.has_value());
    REQUIRE(*r2 == Rational(1, 2));
}

TEST_CASE("round trip on random small rationals") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<long> num(-10000, 10000);
    std::uniform_int_distribution<long> den(1, 997);
    for (int i = 0; i < 200; ++i) {
        Rational q(num(rng), den(rng));
        auto b = BallReal::from_rational(q, 160);
        b.add_error(Mag::pow2(-120));
        auto r = recognize_rational(b, Int(1000));
        REQUIRE(r.has_value());
        REQUIRE(*r == q);
    }
}

TEST_CASE("semiconvergent beats plain convergent when closer") {
    // x = 7/10: CF [0;1,2,3], convergents 0, 1, 2/3, 7/10. With max_den = 7
    // the best approximation is the semiconvergent 5/7, not 2/3.
    auto b = BallReal::from_rational(Rational(7, 10), 128);
    b.add_error(Mag::pow2(-100));
    // 1/(2*49) ~ 0.0102 > rad, fine; best with den <= 7: |7/10-5/7|=1/70 vs |7/10-2/3|=1/30.
    auto best = detail::best_approx(Rational(7, 10), Int(7));
    REQUIRE(best == Rational(5, 7));
    auto r = recognize_rational(b, Int(7));
    REQUIRE(!r.has_value()); // 5/7 is still outside the tiny radius
}
