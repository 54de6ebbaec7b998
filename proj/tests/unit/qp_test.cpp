#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "ocsvm/qp.hpp"
#include "testutil.hpp"

using namespace ocsvm;
using testutil::random_box_qp;

namespace {

QpProblem scalar_problem() {
    // minimize 1/2 a^2 - a over [0, 10]; optimum a = 1, objective -1/2
    QpProblem prob;
    prob.q = SquareMatrix(1);
    prob.q.at(0, 0) = 1.0;
    prob.p = {-1.0};
    prob.lower = {0.0};
    prob.upper = {10.0};
    return prob;
}

QpProblem ridge_problem() {
    // singular Q along the equality direction; the box stops the descent
    QpProblem prob;
    prob.q = SquareMatrix(2);
    prob.q.at(0, 0) = 1.0;
    prob.q.at(0, 1) = -1.0;
    prob.q.at(1, 0) = -1.0;
    prob.q.at(1, 1) = 1.0;
    prob.p = {-1.0, -1.0};
    prob.lower = {0.0, 0.0};
    prob.upper = {10.0, 10.0};
    prob.eq = EqConstraint{{1.0, -1.0}, 0.0};
    return prob;
}

} // namespace

TEST_CASE("problem validation rejects inconsistent shapes and bounds") {
    QpProblem prob = scalar_problem();
    CHECK_NOTHROW(prob.validate());

    QpProblem wrong_p = prob;
    wrong_p.p = {1.0, 2.0};
    CHECK_THROWS_AS(wrong_p.validate(), ConfigError);

    QpProblem crossed = prob;
    crossed.lower = {2.0};
    crossed.upper = {1.0};
    CHECK_THROWS_AS(crossed.validate(), ConfigError);

    QpProblem inf_bound = prob;
    inf_bound.upper = {std::numeric_limits<double>::infinity()};
    CHECK_THROWS_AS(inf_bound.validate(), ConfigError);

    QpProblem bad_eq = prob;
    bad_eq.eq = EqConstraint{{1.0, 1.0}, 0.0};
    CHECK_THROWS_AS(bad_eq.validate(), ConfigError);
}

TEST_CASE("scalar problem solves exactly") {
    const QpSolution sol = solve(scalar_problem(), {1e-10, 1000});
    REQUIRE(sol.alpha.size() == 1);
    CHECK(sol.alpha[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sol.objective == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(sol.bias == 0.0); // no equality constraint
    CHECK(sol.gap <= 1e-10 * 1.5);
}

TEST_CASE("degenerate ridge runs to the box corner along the constraint") {
    const QpSolution sol = solve(ridge_problem(), {1e-10, 1000});
    CHECK(sol.alpha[0] == doctest::Approx(10.0));
    CHECK(sol.alpha[1] == doctest::Approx(10.0));
    CHECK(sol.objective == doctest::Approx(-20.0));
}

TEST_CASE("fully clamped problems return the bounds at once") {
    QpProblem prob = scalar_problem();
    prob.lower = {3.0};
    prob.upper = {3.0};
    const QpSolution sol = solve(prob);
    CHECK(sol.alpha[0] == 3.0);
    CHECK(sol.objective == doctest::Approx(0.5 * 9.0 - 3.0));
    CHECK(duality_gap(prob, sol) == 0.0);
}

TEST_CASE("zero quadratic term reduces to a linear program over the box") {
    QpProblem prob;
    prob.q = SquareMatrix(3);
    prob.p = {1.0, 1.0, 1.0};
    prob.lower = {0.0, 0.0, 0.0};
    prob.upper = {1.0, 1.0, 1.0};
    for (const QpSolution& sol : {solve(prob), solve_reference(prob)}) {
        for (const double a : sol.alpha) CHECK(a == 0.0);
        CHECK(sol.objective == 0.0);
    }
}

TEST_CASE("reference solver reproduces the frozen examples") {
    const QpSolution s1 = solve_reference(scalar_problem());
    CHECK(s1.alpha[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(s1.objective == doctest::Approx(-0.5).epsilon(1e-9));

    const QpSolution s2 = solve_reference(ridge_problem());
    CHECK(s2.objective == doctest::Approx(-20.0).epsilon(1e-7));

    QpProblem clamped = scalar_problem();
    clamped.lower = {3.0};
    clamped.upper = {3.0};
    CHECK(solve_reference(clamped).alpha[0] == 3.0);
}

TEST_CASE("reference solver guards its dimension") {
    QpProblem big;
    big.q = SquareMatrix(201);
    big.p.assign(201, 0.0);
    big.lower.assign(201, 0.0);
    big.upper.assign(201, 1.0);
    CHECK_THROWS_AS(solve_reference(big), ConfigError);
}

TEST_CASE("duality gap is zero at the optimum and large away from it") {
    const QpProblem prob = scalar_problem();
    const QpSolution at_opt = solve(prob, {1e-12, 1000});
    CHECK(duality_gap(prob, at_opt) <= 1e-10);

    QpSolution at_zero;
    at_zero.alpha = {0.0};
    const double gap = duality_gap(prob, at_zero);
    CHECK(gap >= 0.5);
    CHECK(gap == doctest::Approx(10.0)); // linearized bound: g(0) = -1 over [0,10]

    QpSolution infeasible;
    infeasible.alpha = {11.0};
    CHECK_THROWS_AS(duality_gap(prob, infeasible), SolverError);

    QpSolution off_constraint;
    off_constraint.alpha = {1.0, 2.0};
    CHECK_THROWS_AS(duality_gap(ridge_problem(), off_constraint), SolverError);
}

TEST_CASE("solutions satisfy box and equality constraints tightly") {
    Rng rng(21);
    for (int rep = 0; rep < 25; ++rep) {
        const QpProblem prob = random_box_qp(rng, 2 + rng.below(10), rep % 2 == 0);
        const QpSolution sol = solve(prob, {1e-8, 200000});
        for (std::size_t i = 0; i < prob.size(); ++i) {
            CHECK(sol.alpha[i] >= prob.lower[i] - 1e-12);
            CHECK(sol.alpha[i] <= prob.upper[i] + 1e-12);
        }
        if (prob.eq) {
            double dot = 0.0, scale = std::abs(prob.eq->rhs);
            for (std::size_t i = 0; i < prob.size(); ++i) {
                dot += prob.eq->coeffs[i] * sol.alpha[i];
                scale += std::abs(prob.eq->coeffs[i] * sol.alpha[i]);
            }
            CHECK(std::abs(dot - prob.eq->rhs) <= 1e-9 * (1.0 + scale));
        }
        CHECK(duality_gap(prob, sol) <= 1e-8 * (1.0 + std::abs(sol.objective)) * 1.01);
    }
}

TEST_CASE("the two solvers agree on random instances") {
    Rng rng(77);
    for (int rep = 0; rep < 40; ++rep) {
        const QpProblem prob = random_box_qp(rng, 2 + rng.below(8), rep % 3 == 0);
        const QpSolution a = solve(prob, {1e-10, 500000});
        const QpSolution b = solve_reference(prob, 1e-10);
        CHECK(std::abs(a.objective - b.objective) <= 1e-8 * (1.0 + std::abs(a.objective)));
    }
}

TEST_CASE("solver output is bit-for-bit deterministic") {
    Rng rng(31);
    const QpProblem prob = random_box_qp(rng, 12, true);
    const QpSolution a = solve(prob, {1e-9, 100000});
    const QpSolution b = solve(prob, {1e-9, 100000});
    CHECK(a.alpha == b.alpha);
    CHECK(a.objective == b.objective);
    CHECK(a.bias == b.bias);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("iteration budget exhaustion carries the best iterate") {
    Rng rng(41);
    const QpProblem prob = random_box_qp(rng, 15, true);
    try {
        solve(prob, {1e-12, 3});
        FAIL("expected the iteration limit to trip");
    } catch (const QpIterationLimit& e) {
        CHECK(e.best.alpha.size() == prob.size());
        CHECK(e.best.kkt_violation > 0.0);
        for (std::size_t i = 0; i < prob.size(); ++i) {
            CHECK(e.best.alpha[i] >= prob.lower[i] - 1e-12);
            CHECK(e.best.alpha[i] <= prob.upper[i] + 1e-12);
        }
    }
}

TEST_CASE("negative curvature is reported as a solver error") {
    // p is chosen so the feasible start (the lower bound) is not optimal,
    // forcing a step along the concave direction; a concave problem whose
    // start happens to satisfy first-order optimality returns quietly.
    QpProblem prob;
    prob.q = SquareMatrix(1);
    prob.q.at(0, 0) = -1.0; // concave
    prob.p = {-2.0};
    prob.lower = {-1.0};
    prob.upper = {1.0};
    CHECK_THROWS_WITH_AS(solve(prob), doctest::Contains("curvature"), SolverError);
}

TEST_CASE("infeasible equality constraints are rejected") {
    QpProblem prob = scalar_problem();
    prob.eq = EqConstraint{{1.0}, 100.0}; // unreachable inside [0, 10]
    CHECK_THROWS_AS(solve(prob), SolverError);
}

TEST_CASE("slack recovery follows the hinge definitions") {
    const std::vector<double> values = {1.5, 0.3, -1.0};
    const auto train = compute_slacks(values, ConstraintSide::margin_at_least, 1.0);
    CHECK(train[0] == 0.0);
    CHECK(train[1] == doctest::Approx(0.7));
    CHECK(train[2] == doctest::Approx(2.0));

    const auto uni = compute_slacks(values, ConstraintSide::upper_at_most, 0.0);
    CHECK(uni[0] == doctest::Approx(1.5));
    CHECK(uni[1] == doctest::Approx(0.3));
    CHECK(uni[2] == 0.0);
}
