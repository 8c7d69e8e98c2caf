#pragma once
// Dirichlet series assembly for the weight-3 degree-4 L-functions: local
// factors from the trace engine (parallel sweep, optional disk cache),
// coefficient files for supplying or overriding local data (notably at bad
// primes), and the multiplicative expansion a_n up to a cutoff.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hml/errors.hpp"
#include "hml/traces.hpp"

namespace hml {

struct LocalFactor {
    long p = 0;
    std::vector<Int> coeffs;  // ascending powers of T, coeffs[0] = 1
    bool good = true;         // good factors have the weight-3 degree-4 shape
};

using LocalFactorMap = std::map<long, LocalFactor>;

// Primes where the motive point can ramify: the index level together with the
// numerator/denominator support of t and of 1 - t.
inline std::vector<long> ramified_primes(const MotivePoint& pt) {
    std::map<long, bool> seen;
    auto add = [&](const Int& n) {
        for (const auto& [p, e] : factorize(n.abs())) seen[p.to_long()] = true;
    };
    add(pt.data.index_lcm());
    add(pt.trace_parameter.num());
    add(pt.trace_parameter.den());
    add((Rational(1) - pt.trace_parameter).num());
    std::vector<long> out;
    for (const auto& [p, _] : seen)
        if (p > 1) out.push_back(p);
    return out;
}

// Engine sweep: full degree-4 factors where p^2 <= depth_bound (those need the
// second symmetric function), trace-only factors beyond.  Bad primes are
// skipped — supply them via a coefficient file or fit hypotheses.
inline LocalFactorMap good_local_factors(const MotivePoint& pt, long pmax, long depth_bound,
                                         int jobs = 1) {
    std::vector<long> ps;
    for (long p : primes_up_to(pmax))
        if (is_good_prime(pt, p)) ps.push_back(p);

    LocalFactorMap out;
    std::mutex m;
    std::exception_ptr first_error;

    auto work = [&](size_t start, size_t stride) {
        try {
            for (size_t i = start; i < ps.size(); i += stride) {
                long p = ps[i];
                LocalFactor lf;
                if (p * p <= depth_bound) {
                    EulerFactor E = euler_factor(pt, p);
                    lf = LocalFactor{p, E.coeffs, true};
                } else {
                    Int a = frobenius_trace(pt, p, 1);
                    lf = LocalFactor{p, {Int(1), -a}, true};
                }
                std::lock_guard<std::mutex> lock(m);
                out[p] = std::move(lf);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(m);
            if (!first_error) first_error = std::current_exception();
        }
    };

    if (jobs <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(work, static_cast<size_t>(j), jobs);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

// --- coefficient files --------------------------------------------------------
//
//   # hgm-lfunc v1; weight=3; degree=4
//   7 -13 553            good prime: a_p and e2; factor 1 - a T + e2 T^2 - p^3 a T^3 + p^6 T^4
//   101 66774            good prime, trace only (valid while p^2 exceeds the cutoff)
//   7 poly 1 -13 553 ...  explicit good factor
//   3! poly 1 -1         bad prime: explicit local factor, any degree
//
// '#' starts a comment; blank lines are ignored.

inline void export_coefficients(std::ostream& os, const LocalFactorMap& locals,
                                const std::string& comment = "") {
    os << "# hgm-lfunc v1; weight=3; degree=4\n";
    if (!comment.empty()) os << "# " << comment << "\n";
    for (const auto& [p, lf] : locals) {
        if (lf.good && lf.coeffs.size() == 5) {
            os << p << " " << (-lf.coeffs[1]).str() << " " << lf.coeffs[2].str() << "\n";
        } else if (lf.good && lf.coeffs.size() == 2) {
            os << p << " " << (-lf.coeffs[1]).str() << "\n";
        } else {
            os << p << (lf.good ? "" : "!") << " poly";
            for (const auto& c : lf.coeffs) os << " " << c.str();
            os << "\n";
        }
    }
}

struct IngestResult {
    LocalFactorMap factors;
    std::vector<std::string> warnings;
};

inline IngestResult ingest_coefficients(std::istream& is) {
    IngestResult res;
    std::string line;
    long lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string_view sv(line);
        size_t hash = sv.find('#');
        if (hash != std::string_view::npos) sv = sv.substr(0, hash);
        std::string body(sv);
        std::istringstream ss(body);
        std::string ptok;
        if (!(ss >> ptok)) continue;  // blank or comment

        auto fail = [&](const std::string& why) {
            throw parse_error("coefficient file line " + std::to_string(lineno) + ": " + why);
        };

        bool bad = false;
        if (!ptok.empty() && ptok.back() == '!') {
            bad = true;
            ptok.pop_back();
        }
        long p = 0;
        try {
            size_t used = 0;
            p = std::stol(ptok, &used);
            if (used != ptok.size()) fail("malformed prime '" + ptok + "'");
        } catch (const std::exception&) {
            fail("malformed prime '" + ptok + "'");
        }
        if (!is_prime_long(p)) fail("'" + std::to_string(p) + "' is not prime");

        std::vector<std::string> toks;
        std::string t;
        while (ss >> t) toks.push_back(t);
        if (toks.empty()) fail("missing coefficients");

        auto parse_int = [&](const std::string& s) {
            try {
                return Int(s);
            } catch (const std::exception&) {
                fail("malformed integer '" + s + "'");
                return Int(0);
            }
        };

        LocalFactor lf;
        lf.p = p;
        lf.good = !bad;
        if (toks[0] == "poly") {
            if (toks.size() < 2) fail("empty polynomial");
            for (size_t i = 1; i < toks.size(); ++i) lf.coeffs.push_back(parse_int(toks[i]));
            if (lf.coeffs[0] != Int(1)) fail("local factor must have constant term 1");
            if (lf.coeffs.size() > 5) fail("local factor degree exceeds 4");
        } else if (bad) {
            fail("bad-prime lines must use the explicit 'poly' form");
        } else if (toks.size() == 1) {
            Int a = parse_int(toks[0]);
            lf.coeffs = {Int(1), -a};
        } else if (toks.size() == 2) {
            Int a = parse_int(toks[0]);
            Int e2 = parse_int(toks[1]);
            Int p3 = Int::pow(Int(p), 3);
            lf.coeffs = {Int(1), -a, e2, -(p3 * a), p3 * p3};
        } else {
            fail("expected 'a', 'a e2', or 'poly c0 c1 ...'");
        }

        if (lf.good && lf.coeffs.size() == 5) {
            Int a = -lf.coeffs[1];
            const Int& e2 = lf.coeffs[2];
            if (!weil_pure(a, e2, p))
                res.warnings.push_back("p=" + std::to_string(p) +
                                       ": factor violates the weight-3 purity bound");
            else if (!e2.divisible_by(Int(p)))
                res.warnings.push_back("p=" + std::to_string(p) +
                                       ": second symmetric function not divisible by p");
        }
        if (res.factors.count(p)) fail("duplicate entry for p=" + std::to_string(p));
        res.factors[p] = std::move(lf);
    }
    return res;
}

// --- disk cache ----------------------------------------------------------------
//
// Keyed by the motive point; lives under HML_CACHE_DIR when that is set.
// Cache files are ordinary coefficient files, rewritten whole (temp + rename).

namespace detail {

inline std::string cache_key(const MotivePoint& pt) {
    auto enc = [](const Rational& r) {
        std::string s = r.str();  // "num/den" or "num"
        for (auto& ch : s)
            if (ch == '/') ch = '-';
        return s;
    };
    std::string key = "a";
    for (const auto& x : pt.data.alpha) key += "_" + enc(x);
    key += "_b";
    for (const auto& y : pt.data.beta) key += "_" + enc(y);
    key += "_z_" + enc(pt.z0);
    return key + ".hml";
}

}  // namespace detail

inline LocalFactorMap cached_good_local_factors(const MotivePoint& pt, long pmax,
                                                long depth_bound, int jobs = 1) {
    const char* dir = std::getenv("HML_CACHE_DIR");
    if (dir == nullptr || *dir == '\0') return good_local_factors(pt, pmax, depth_bound, jobs);

    namespace fs = std::filesystem;
    fs::path path = fs::path(dir) / detail::cache_key(pt);
    LocalFactorMap cached;
    if (fs::exists(path)) {
        std::ifstream in(path);
        try {
            cached = ingest_coefficients(in).factors;
        } catch (const parse_error&) {
            cached.clear();  // corrupt cache: recompute
        }
    }

    // Which primes are missing or too shallow?
    bool dirty = false;
    std::vector<long> need;
    for (long p : primes_up_to(pmax)) {
        if (!is_good_prime(pt, p)) continue;
        auto it = cached.find(p);
        bool deep_enough =
            it != cached.end() && (p * p > depth_bound || it->second.coeffs.size() == 5);
        if (!deep_enough) need.push_back(p);
    }
    if (!need.empty()) {
        dirty = true;
        // compute just the missing ones by sweeping with a filter
        LocalFactorMap fresh;
        std::mutex m;
        std::exception_ptr first_error;
        auto work = [&](size_t start, size_t stride) {
            try {
                for (size_t i = start; i < need.size(); i += stride) {
                    long p = need[i];
                    LocalFactor lf;
                    if (p * p <= depth_bound) {
                        EulerFactor E = euler_factor(pt, p);
                        lf = LocalFactor{p, E.coeffs, true};
                    } else {
                        Int a = frobenius_trace(pt, p, 1);
                        lf = LocalFactor{p, {Int(1), -a}, true};
                    }
                    std::lock_guard<std::mutex> lock(m);
                    fresh[p] = std::move(lf);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(m);
                if (!first_error) first_error = std::current_exception();
            }
        };
        if (jobs <= 1) {
            work(0, 1);
        } else {
            std::vector<std::thread> pool;
            for (int j = 0; j < jobs; ++j) pool.emplace_back(work, static_cast<size_t>(j), jobs);
            for (auto& th : pool) th.join();
        }
        if (first_error) std::rethrow_exception(first_error);
        for (auto& [p, lf] : fresh) cached[p] = std::move(lf);
    }

    if (dirty) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        fs::path tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp);
            export_coefficients(out, cached, "cache for fiber z0 = " + pt.z0.str());
        }
        fs::rename(tmp, path, ec);
        if (ec) fs::remove(tmp, ec);
    }

    // return only what was asked for
    LocalFactorMap out;
    for (long p : primes_up_to(pmax)) {
        auto it = cached.find(p);
        if (it != cached.end()) out[p] = it->second;
    }
    return out;
}

// --- Dirichlet coefficients ----------------------------------------------------

// a_1..a_n from the local factors by multiplicativity.  Every prime <= n must
// have a local factor; good trace-only factors are accepted while p^2 > n.
inline std::vector<Int> dirichlet_coefficients(const LocalFactorMap& locals, long n_max) {
    if (n_max < 1) throw validation_error("dirichlet_coefficients: cutoff must be positive");

    // smallest prime factor sieve
    std::vector<long> spf(static_cast<size_t>(n_max) + 1, 0);
    for (long i = 2; i <= n_max; ++i) {
        if (spf[static_cast<size_t>(i)] != 0) continue;
        for (long j = i; j <= n_max; j += i)
            if (spf[static_cast<size_t>(j)] == 0) spf[static_cast<size_t>(j)] = i;
    }

    // prime-power coefficients a_{p^k} for p^k <= n_max via the local recursion
    std::map<long, std::vector<Int>> pk;  // p -> [a_{p^0}, a_{p^1}, ...]
    for (long p = 2; p <= n_max; ++p) {
        if (spf[static_cast<size_t>(p)] != p) continue;  // not prime
        auto it = locals.find(p);
        if (it == locals.end())
            throw validation_error("dirichlet_coefficients: no local factor for p = " +
                                   std::to_string(p) +
                                   " (bad primes need explicit coefficients)");
        const LocalFactor& lf = it->second;
        size_t deg = lf.coeffs.size() - 1;
        long kmax = 0;
        for (long pw = 1; pw <= n_max / p; pw *= p) ++kmax;
        if (lf.good && deg == 1 && kmax >= 2)
            throw validation_error("dirichlet_coefficients: local factor at p = " +
                                   std::to_string(p) + " is trace-only but p^2 <= cutoff");
        std::vector<Int> a(static_cast<size_t>(kmax) + 1, Int(0));
        a[0] = Int(1);
        for (long k = 1; k <= kmax; ++k) {
            Int s(0);
            for (size_t j = 1; j <= deg && static_cast<long>(j) <= k; ++j)
                s += lf.coeffs[j] * a[static_cast<size_t>(k - static_cast<long>(j))];
            a[static_cast<size_t>(k)] = -s;
        }
        pk[p] = std::move(a);
    }

    std::vector<Int> a(static_cast<size_t>(n_max) + 1, Int(0));
    a[1] = Int(1);
    for (long n = 2; n <= n_max; ++n) {
        long p = spf[static_cast<size_t>(n)];
        long m = n, k = 0;
        while (m % p == 0) {
            m /= p;
            ++k;
        }
        a[static_cast<size_t>(n)] = pk[p][static_cast<size_t>(k)] * a[static_cast<size_t>(m)];
    }
    return a;
}

}  // namespace hml
