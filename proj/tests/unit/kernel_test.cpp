#include <cmath>
#include <vector>

#include "doctest.h"
#include "ocsvm/kernel.hpp"
#include "testutil.hpp"

using namespace ocsvm;

TEST_CASE("kernel spec text forms round-trip and reject junk") {
    CHECK(KernelSpec::parse("linear") == KernelSpec::linear());
    CHECK(KernelSpec::parse("rbf:0.5").gamma() == 0.5);
    CHECK(KernelSpec::parse("poly:3:1").degree() == 3);
    CHECK(KernelSpec::parse("poly:3:1").coef0() == 1.0);

    for (const KernelSpec& spec :
         {KernelSpec::linear(), KernelSpec::rbf(0.25), KernelSpec::polynomial(4, 2.0)})
        CHECK(KernelSpec::parse(spec.to_string()) == spec);

    CHECK_THROWS_AS(KernelSpec::parse("sigmoid:1"), ConfigError);
    CHECK_THROWS_AS(KernelSpec::parse("rbf"), ConfigError);
    CHECK_THROWS_AS(KernelSpec::parse("rbf:0"), ConfigError);
    CHECK_THROWS_AS(KernelSpec::parse("rbf:-1"), ConfigError);
    CHECK_THROWS_AS(KernelSpec::parse("poly:0:1"), ConfigError);
    CHECK_THROWS_AS(KernelSpec::parse("poly:2:-1"), ConfigError);
    CHECK_THROWS_AS(KernelSpec::parse(""), ConfigError);
    CHECK_THROWS_AS(KernelSpec::parse("linear:1"), ConfigError);
}

TEST_CASE("loosely-typed construction rejects foreign parameters") {
    CHECK(KernelSpec::make(KernelFamily::rbf, 0.5, std::nullopt, std::nullopt) ==
          KernelSpec::rbf(0.5));
    CHECK(KernelSpec::make(KernelFamily::polynomial, std::nullopt, 2, 0.0) ==
          KernelSpec::polynomial(2, 0.0));

    CHECK_THROWS_AS(KernelSpec::make(KernelFamily::linear, 0.5, std::nullopt, std::nullopt),
                    ConfigError);
    CHECK_THROWS_AS(KernelSpec::make(KernelFamily::rbf, std::nullopt, std::nullopt, std::nullopt),
                    ConfigError);
    CHECK_THROWS_AS(KernelSpec::make(KernelFamily::rbf, 0.5, 3, std::nullopt), ConfigError);
    CHECK_THROWS_AS(
        KernelSpec::make(KernelFamily::polynomial, std::nullopt, std::nullopt, std::nullopt),
        ConfigError);
}

TEST_CASE("kernel values match their closed forms") {
    Dataset d = Dataset::dense(2, {1.0, 2.0, 3.0, -1.0});
    const FeatureView x = d.row(0);
    const FeatureView z = d.row(1);

    CHECK(eval_kernel(KernelSpec::linear(), x, z) == doctest::Approx(1.0));
    // squared distance (1-3)^2 + (2+1)^2 = 13
    CHECK(eval_kernel(KernelSpec::rbf(0.5), x, z) == doctest::Approx(std::exp(-0.5 * 13.0)));
    CHECK(eval_kernel(KernelSpec::polynomial(3, 2.0), x, z) == doctest::Approx(27.0)); // (1+2)^3

    Dataset narrow = Dataset::dense(1, {1.0});
    CHECK_THROWS_AS(eval_kernel(KernelSpec::linear(), x, narrow.row(0)), DataError);

    // sparse and dense rows agree through the same kernel
    Dataset sp = Dataset::sparse(2, {0, 2, 3}, {{0, 1.0}, {1, 2.0}, {0, 3.0}});
    // sparse row 1 is (3, 0); dense counterpart:
    Dataset dn = Dataset::dense(2, {3.0, 0.0});
    CHECK(eval_kernel(KernelSpec::rbf(0.1), sp.row(0), sp.row(1)) ==
          doctest::Approx(eval_kernel(KernelSpec::rbf(0.1), x, dn.row(0))));
}

TEST_CASE("reflection signs multiply outside the kernel") {
    Dataset d = Dataset::dense(1, {2.0, 3.0});
    for (const KernelSpec& spec :
         {KernelSpec::linear(), KernelSpec::rbf(0.3), KernelSpec::polynomial(2, 1.0)}) {
        const double plain = signed_kernel(spec, d, {0, +1}, {1, +1});
        CHECK(signed_kernel(spec, d, {0, -1}, {1, +1}) == -plain);
        CHECK(signed_kernel(spec, d, {0, +1}, {1, -1}) == -plain);
        CHECK(signed_kernel(spec, d, {0, -1}, {1, -1}) == plain);
    }
    // for the linear kernel the sign convention IS the reflected point
    CHECK(signed_kernel(KernelSpec::linear(), d, {0, -1}, {1, +1}) == doctest::Approx(-6.0));
}

TEST_CASE("gram matrices are exactly symmetric and thread-count independent") {
    Rng rng(5);
    Dataset d = testutil::random_blob(rng, 17, 3, 1.0);

    std::vector<SignedIndex> items;
    for (std::size_t i = 0; i < d.size(); ++i) items.push_back({i, +1});
    for (std::size_t i = 0; i < d.size(); ++i) items.push_back({i, -1});

    for (const KernelSpec& spec :
         {KernelSpec::linear(), KernelSpec::rbf(0.2), KernelSpec::polynomial(3, 0.5)}) {
        const SquareMatrix g1 = gram(spec, items, d, 1);
        const SquareMatrix g3 = gram(spec, items, d, 3);
        REQUIRE(g1.size() == items.size());
        CHECK(g1.data() == g3.data()); // bitwise equal across thread counts
        for (std::size_t i = 0; i < g1.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                CHECK(g1.at(i, j) == g1.at(j, i)); // exact, not approximate

        // the reflected Gram is PSD for every family: it is the Kronecker
        // product of [[1,-1],[-1,1]] with the plain Gram
        const auto eig = testutil::symmetric_eigenvalues(g1);
        CHECK(eig.front() >= -1e-9);
    }
}

TEST_CASE("gram entries equal pairwise signed kernels") {
    Rng rng(6);
    Dataset d = testutil::random_blob(rng, 5, 2, 0.0);
    const std::vector<SignedIndex> items = {{0, +1}, {2, +1}, {2, -1}, {4, -1}};
    const KernelSpec spec = KernelSpec::rbf(0.7);
    const SquareMatrix g = gram(spec, items, d);
    for (std::size_t i = 0; i < items.size(); ++i)
        for (std::size_t j = 0; j < items.size(); ++j)
            CHECK(g.at(i, j) == doctest::Approx(signed_kernel(spec, d, items[i], items[j])));
}
