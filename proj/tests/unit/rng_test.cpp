#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "ocsvm/rng.hpp"

using ocsvm::Rng;

TEST_CASE("engine output matches the standard-mandated mt19937_64 sequence") {
    // the 10000th output of the default-seeded engine is pinned by the
    // standard, so any platform drift shows up here
    Rng rng(5489u);
    std::uint64_t x = 0;
    for (int i = 0; i < 10000; ++i) x = rng.next_u64();
    CHECK(x == 9981545732273789042ull);
}

TEST_CASE("identical seeds give identical streams") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("below stays in range and rejects zero") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) CHECK(rng.below(13) < 13);
    CHECK_THROWS_AS(rng.below(0), ocsvm::ConfigError);

    // every residue reachable
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 200; ++i) seen.insert(rng.below(5));
    CHECK(seen.size() == 5);
}

TEST_CASE("uniform01 lies in [0, 1)") {
    Rng rng(11);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.05);
    CHECK(hi > 0.95);
}

TEST_CASE("gaussian moments are sane") {
    Rng rng(42);
    const int n = 20000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sumsq += g * g;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("shuffle permutes and is seed-deterministic") {
    std::vector<int> v(50);
    for (int i = 0; i < 50; ++i) v[i] = i;

    std::vector<int> a = v, b = v, c = v;
    Rng r1(9), r2(9), r3(10);
    r1.shuffle(a);
    r2.shuffle(b);
    r3.shuffle(c);

    CHECK(a == b);
    CHECK(a != c); // exceedingly unlikely to collide
    std::sort(a.begin(), a.end());
    CHECK(a == v);
}

TEST_CASE("derive_seed matches the splitmix64 reference and separates indices") {
    // first output of the splitmix64 reference stream from state 0
    CHECK(Rng::derive_seed(0, 0) == 0xE220A8397B1DCDAFull);

    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 100; ++i) seen.insert(Rng::derive_seed(14, i));
    CHECK(seen.size() == 100);
    CHECK(Rng::derive_seed(1, 0) != Rng::derive_seed(2, 0));
}
