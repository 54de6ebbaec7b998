#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "ocsvm/model.hpp"
#include "testutil.hpp"

using namespace ocsvm;
using testutil::TempDir;

namespace {

OneClassModel tiny_model() {
    // reflection signs are provenance only; evaluation reads beta as-is:
    // f(x) = 2*(1*x) - 0.5*(3*x) = 0.5*x on the 1-D base {1, 3}
    Dataset base = Dataset::dense(1, {1.0, 3.0});
    return OneClassModel(Provenance::reflected_single_class, HyperParams{}, std::move(base),
                         {{0, +1}, {1, -1}}, {2.0, -0.5}, 0.0, 1.0);
}

double value_at(const OneClassModel& m, double x) {
    Dataset probe = Dataset::dense(1, {x});
    return m.decision_value(probe.row(0));
}

} // namespace

TEST_CASE("provenance names round-trip") {
    for (Provenance p : {Provenance::nu_single_class, Provenance::reflected_single_class,
                         Provenance::universum_single_class})
        CHECK(parse_provenance(to_string(p)) == p);
    CHECK_THROWS_AS(parse_provenance("unknown"), DataError);
}

TEST_CASE("decision function reads coefficients against raw base rows") {
    const OneClassModel m = tiny_model();
    CHECK(value_at(m, 2.0) == doctest::Approx(1.0));
    CHECK(value_at(m, 4.0) == doctest::Approx(2.0));

    Dataset probes = Dataset::dense(1, {2.0, 1.0, -2.0});
    const auto preds = m.predict(probes);
    CHECK(preds[0] == +1); // boundary value f = 1 counts as normal
    CHECK(preds[1] == -1);
    CHECK(preds[2] == -1);
}

TEST_CASE("construction prunes dead coefficients and compacts the base") {
    Dataset base = Dataset::dense(1, {5.0, 1.0, 3.0});
    OneClassModel m(Provenance::reflected_single_class, HyperParams{}, std::move(base),
                    {{1, +1}, {0, +1}, {2, -1}}, {2.0, 0.0, -0.5}, 0.0, 1.0);
    CHECK(m.n_support_vectors() == 2); // the zero coefficient is gone
    CHECK(m.base().size() == 2);       // row 0 (value 5.0) dropped entirely
    CHECK(value_at(m, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("construction validates invariants") {
    auto base = [] { return Dataset::dense(1, {1.0}); };
    const std::vector<SignedIndex> idx = {{0, +1}};
    const std::vector<double> beta = {1.0};

    // out-of-range base index
    CHECK_THROWS_AS(OneClassModel(Provenance::reflected_single_class, HyperParams{}, base(),
                                  {{3, +1}}, beta, 0.0, 1.0),
                    ConfigError);
    // broken sign
    CHECK_THROWS_AS(OneClassModel(Provenance::reflected_single_class, HyperParams{}, base(),
                                  {{0, 2}}, beta, 0.0, 1.0),
                    ConfigError);
    // nonpositive threshold
    CHECK_THROWS_AS(OneClassModel(Provenance::reflected_single_class, HyperParams{}, base(), idx,
                                  beta, 0.0, 0.0),
                    ConfigError);
    // zero-offset provenances must carry a zero offset
    CHECK_THROWS_AS(OneClassModel(Provenance::reflected_single_class, HyperParams{}, base(), idx,
                                  beta, 0.5, 1.0),
                    ConfigError);
    CHECK_NOTHROW(OneClassModel(Provenance::nu_single_class, HyperParams{}, base(), idx, beta,
                                -0.5, 0.25));
}

TEST_CASE("serialization round-trips byte-identically") {
    const OneClassModel m = tiny_model();
    std::ostringstream first;
    m.save(first);

    std::istringstream in(first.str());
    const OneClassModel back = OneClassModel::load(in);
    std::ostringstream second;
    back.save(second);

    CHECK(first.str() == second.str());
    CHECK(back.provenance() == m.provenance());
    CHECK(back.threshold() == m.threshold());
    CHECK(value_at(back, 2.0) == value_at(m, 2.0));
}

TEST_CASE("file round-trip preserves predictions on random data") {
    Rng rng(12);
    Dataset base = testutil::random_blob(rng, 8, 3, 0.0);
    std::vector<SignedIndex> idx;
    std::vector<double> beta;
    for (std::size_t i = 0; i < base.size(); ++i) {
        idx.push_back({i, i % 2 ? +1 : -1});
        beta.push_back(rng.gaussian());
    }
    HyperParams params;
    params.kernel = KernelSpec::rbf(0.4);
    params.nu = 0.3;
    const OneClassModel m(Provenance::nu_single_class, params, base, idx, beta, -0.7, 0.7);

    TempDir tmp;
    const std::string path = tmp.file("model.txt");
    m.save_file(path);
    const OneClassModel back = OneClassModel::load_file(path);

    Dataset probes = testutil::random_blob(rng, 20, 3, 0.0);
    const auto v1 = m.decision_values(probes);
    const auto v2 = back.decision_values(probes);
    for (std::size_t i = 0; i < probes.size(); ++i) CHECK(v1[i] == v2[i]); // bit-exact
}

TEST_CASE("loading rejects tampering, bad versions and truncation") {
    const OneClassModel m = tiny_model();
    std::ostringstream out;
    m.save(out);
    const std::string good = out.str();

    // flip one digit somewhere in the middle
    std::string tampered = good;
    const std::size_t pos = tampered.find("coefficients");
    REQUIRE(pos != std::string::npos);
    tampered[pos] = 'C';
    std::istringstream bad1(tampered);
    CHECK_THROWS_WITH_AS(OneClassModel::load(bad1), doctest::Contains("checksum"), DataError);

    std::string wrong_version = good;
    const std::size_t v = wrong_version.find("ocsvm-model 1");
    wrong_version.replace(v, 13, "ocsvm-model 9");
    std::istringstream bad2(wrong_version);
    CHECK_THROWS_AS(OneClassModel::load(bad2), DataError);

    std::istringstream bad3(good.substr(0, good.size() / 2));
    CHECK_THROWS_AS(OneClassModel::load(bad3), DataError);

    std::istringstream empty("");
    CHECK_THROWS_AS(OneClassModel::load(empty), DataError);

    CHECK_THROWS_AS(OneClassModel::load_file("/nonexistent/path/model.txt"), DataError);
}

TEST_CASE("sparse-base models serialize too") {
    Dataset base = Dataset::sparse(4, {0, 2, 3}, {{0, 1.0}, {3, -2.0}, {1, 0.5}});
    HyperParams params;
    params.kernel = KernelSpec::polynomial(2, 1.0);
    const OneClassModel m(Provenance::universum_single_class, params, base, {{0, +1}, {1, -1}},
                          {1.0, 2.0}, 0.0, 1.0);
    std::ostringstream out;
    m.save(out);
    std::istringstream in(out.str());
    const OneClassModel back = OneClassModel::load(in);
    CHECK(back.base().is_sparse());

    Dataset probe = Dataset::dense(4, {1.0, 1.0, 1.0, 1.0});
    CHECK(back.decision_value(probe.row(0)) == m.decision_value(probe.row(0)));
}
