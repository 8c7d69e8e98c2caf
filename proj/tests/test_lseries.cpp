#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hml/lseries.hpp"

using namespace hml;

static LocalFactorMap f2t_locals(long pmax, long depth) {
    MotivePoint pt = motive_point(preset("F2t"), Rational(1, 2));
    LocalFactorMap m = good_local_factors(pt, pmax, depth);
    // trivial factors at the ramified primes keep the expansion total
    for (long p : ramified_primes(pt)) m[p] = LocalFactor{p, {Int(1)}, false};
    return m;
}

TEST_CASE("ramified prime support") {
    MotivePoint h = motive_point(preset("F2t"), Rational(1, 2));
    REQUIRE(ramified_primes(h) == std::vector<long>{2, 3, 5, 37});
    MotivePoint u = motive_point(preset("F2t"), Rational(1));
    REQUIRE(ramified_primes(u) == std::vector<long>{2, 5, 19, 151});
}

TEST_CASE("dirichlet coefficients are multiplicative") {
    LocalFactorMap locals = f2t_locals(200, 200);
    auto a = dirichlet_coefficients(locals, 200);
    REQUIRE(a[1] == Int(1));

    // fully multiplicative across coprime pairs
    unsigned long seed = 12345;
    int checked = 0;
    while (checked < 100) {
        seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
        long m = 2 + static_cast<long>((seed >> 33) % 13);
        seed = seed * 6364136223846793005ULL + 1442695040888963407ULL;
        long n = 2 + static_cast<long>((seed >> 33) % 13);
        if (std::gcd(m, n) != 1 || m * n > 200) continue;
        REQUIRE(a[static_cast<size_t>(m * n)] ==
                a[static_cast<size_t>(m)] * a[static_cast<size_t>(n)]);
        ++checked;
    }

    // prime-power recursion: a_{p^2} = a_p^2 - e2
    MotivePoint pt = motive_point(preset("F2t"), Rational(1, 2));
    for (long p : {7L, 11L, 13L}) {
        Int ap = frobenius_trace(pt, p, 1);
        Int s2 = frobenius_trace(pt, p, 2);
        Int e2 = (ap * ap - s2).divexact(Int(2));
        REQUIRE(a[static_cast<size_t>(p * p)] == ap * ap - e2);
    }
    // trivial bad factor kills all powers
    REQUIRE(a[2] == Int(0));
    REQUIRE(a[6] == Int(0));
}

TEST_CASE("dirichlet coefficient error paths") {
    LocalFactorMap locals = f2t_locals(100, 100);
    // a prime inside the cutoff with no factor at all
    locals.erase(37);
    REQUIRE_THROWS_AS(dirichlet_coefficients(locals, 100), validation_error);

    // trace-only factor is fine while p^2 > cutoff, fatal once p^2 enters
    LocalFactorMap shallow = f2t_locals(100, 10);  // depth bound keeps only small p full
    REQUIRE(shallow[7].coeffs.size() == 2);
    REQUIRE_NOTHROW(dirichlet_coefficients(shallow, 40));
    REQUIRE_THROWS_AS(dirichlet_coefficients(shallow, 49), validation_error);
}

TEST_CASE("coefficient files round trip") {
    LocalFactorMap locals = f2t_locals(60, 60);
    locals[3] = LocalFactor{3, {Int(1), Int(-1)}, false};  // a nontrivial bad factor
    std::ostringstream os;
    export_coefficients(os, locals, "test corpus");
    std::istringstream is(os.str());
    IngestResult r = ingest_coefficients(is);
    REQUIRE(r.warnings.empty());
    REQUIRE(r.factors.size() == locals.size());
    for (const auto& [p, lf] : locals) {
        REQUIRE(r.factors.count(p) == 1);
        REQUIRE(r.factors[p].good == lf.good);
        REQUIRE(r.factors[p].coeffs.size() == lf.coeffs.size());
        for (size_t i = 0; i < lf.coeffs.size(); ++i)
            REQUIRE(r.factors[p].coeffs[i] == lf.coeffs[i]);
    }
}

TEST_CASE("coefficient file parsing") {
    auto ingest = [](const std::string& text) {
        std::istringstream is(text);
        return ingest_coefficients(is);
    };

    // the documented forms
    IngestResult ok = ingest("# hgm-lfunc v1; weight=3; degree=4\n"
                             "7 -13 553\n"
                             "101 66774\n"
                             "11 poly 1 26\n"
                             "3! poly 1 -1\n");
    REQUIRE(ok.factors.size() == 4);
    REQUIRE(ok.factors[7].coeffs.size() == 5);
    REQUIRE(ok.factors[7].coeffs[1] == Int(13));
    REQUIRE(ok.factors[7].coeffs[3] == Int(343) * Int(13) * Int(-1) * Int(-1));
    REQUIRE(ok.factors[101].coeffs.size() == 2);
    REQUIRE_FALSE(ok.factors[3].good);

    // a full factor line expands with the functional-equation tail
    Int p3(7 * 7 * 7);
    REQUIRE(ok.factors[7].coeffs[3] == -(p3 * Int(-13)));
    REQUIRE(ok.factors[7].coeffs[4] == p3 * p3);

    // diagnostics carry line numbers
    auto expect_fail = [&](const std::string& text, const std::string& needle) {
        try {
            ingest(text);
            FAIL("expected parse_error for: " << text);
        } catch (const parse_error& e) {
            INFO(e.what());
            REQUIRE(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_fail("x 1 2\n", "line 1");
    expect_fail("\n9 1 2\n", "line 2");          // 9 is not prime
    expect_fail("7 1 2\n7 3 4\n", "duplicate");  // repeated prime
    expect_fail("3! -1\n", "poly");              // bad primes need explicit form
    expect_fail("7 poly 2 1\n", "constant term");
    expect_fail("7 poly 1 1 1 1 1 1\n", "degree");
    expect_fail("7 1 2 3\n", "expected");

    // purity violations warn but do not throw
    IngestResult w = ingest("7 1000000 7\n");
    REQUIRE(w.warnings.size() == 1);
    REQUIRE(w.warnings[0].find("purity") != std::string::npos);
    IngestResult w2 = ingest("7 -13 550\n");  // e2 not divisible by 7
    REQUIRE(w2.warnings.size() == 1);
}

TEST_CASE("parallel sweep matches serial") {
    MotivePoint pt = motive_point(preset("F2t"), Rational(1, 2));
    LocalFactorMap serial = good_local_factors(pt, 150, 150, 1);
    LocalFactorMap parallel = good_local_factors(pt, 150, 150, 4);
    REQUIRE(serial.size() == parallel.size());
    for (const auto& [p, lf] : serial) {
        REQUIRE(parallel.count(p) == 1);
        REQUIRE(parallel[p].coeffs.size() == lf.coeffs.size());
        for (size_t i = 0; i < lf.coeffs.size(); ++i)
            REQUIRE(parallel[p].coeffs[i] == lf.coeffs[i]);
    }
}

TEST_CASE("disk cache") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "hml_cache_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    setenv("HML_CACHE_DIR", dir.c_str(), 1);

    MotivePoint pt = motive_point(preset("F2t"), Rational(1, 7));
    LocalFactorMap first = cached_good_local_factors(pt, 60, 60);
    REQUIRE_FALSE(first.empty());
    // exactly one cache file appeared
    size_t files = 0;
    fs::path cache_file;
    for (const auto& e : fs::directory_iterator(dir)) {
        ++files;
        cache_file = e.path();
    }
    REQUIRE(files == 1);

    // second call reads it back identically
    LocalFactorMap second = cached_good_local_factors(pt, 60, 60);
    REQUIRE(second.size() == first.size());
    for (const auto& [p, lf] : first) {
        REQUIRE(second[p].coeffs.size() == lf.coeffs.size());
        for (size_t i = 0; i < lf.coeffs.size(); ++i)
            REQUIRE(second[p].coeffs[i] == lf.coeffs[i]);
    }

    // extending the range reuses the file and adds the new primes
    LocalFactorMap extended = cached_good_local_factors(pt, 100, 100);
    REQUIRE(extended.size() > first.size());

    // corrupt cache files are silently recomputed
    {
        std::ofstream out(cache_file);
        out << "7 poly 2 1\n";  // malformed: constant term
    }
    LocalFactorMap healed = cached_good_local_factors(pt, 60, 60);
    REQUIRE(healed.size() == first.size());

    unsetenv("HML_CACHE_DIR");
    fs::remove_all(dir);
}
