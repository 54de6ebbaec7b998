#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ocsvm/error.hpp"
#include "ocsvm/matrix.hpp"

namespace ocsvm {

// Single linear equality constraint sum_i coeffs[i] * alpha[i] = rhs.
// Coefficients may be zero for variables the constraint does not touch.
struct EqConstraint {
    std::vector<double> coeffs;
    double rhs = 0.0;
};

// minimize 1/2 alpha' Q alpha + p' alpha
// subject to lower <= alpha <= upper and, optionally, the equality above.
// Q must be symmetric positive semidefinite; violations surface as solver
// errors when negative curvature is met along a working direction.
struct QpProblem {
    SquareMatrix q;
    std::vector<double> p;
    std::vector<double> lower;
    std::vector<double> upper;
    std::optional<EqConstraint> eq;

    std::size_t size() const { return p.size(); }
    void validate() const;
};

struct QpSolution {
    std::vector<double> alpha;
    // Multiplier of the equality constraint (0 when absent). Sign convention:
    // interior variables satisfy g_i + bias * coeffs[i] = 0 with
    // g = Q alpha + p, which makes `bias` the usual SVM offset b when the
    // problem is an SVM dual.
    double bias = 0.0;
    double objective = 0.0;
    // Upper bound on objective(alpha) - objective(optimum); see duality_gap.
    double gap = 0.0;
    std::uint64_t iterations = 0;
    double kkt_violation = 0.0;
};

struct SolveOptions {
    double tol = 1e-6;               // KKT violation target
    std::uint64_t max_iter = 10'000'000;
};

// Raised when the iteration budget runs out. Carries the best iterate so the
// caller may accept or reject it.
class QpIterationLimit : public SolverError {
public:
    QpIterationLimit(const std::string& what, QpSolution best_iterate)
        : SolverError(what), best(std::move(best_iterate)) {}
    QpSolution best;
};

// Sequential working-set descent: each step picks the maximal
// KKT-violating variable (or pair, under an equality constraint; ties by
// lowest index) and minimizes the subproblem exactly. Deterministic:
// identical inputs give bit-identical solutions. Returns once the KKT
// violation is <= tol and the duality gap is <= tol * (1 + |objective|).
QpSolution solve(const QpProblem& problem, const SolveOptions& options = {});

// Independent reference solver (projected gradient with equality-aware
// projection plus an active-set Newton polish). Intended as a test oracle:
// limited to dimension <= 200.
QpSolution solve_reference(const QpProblem& problem, double tol = 1e-8);

// Valid upper bound on objective(solution) - objective(optimum), computed by
// minimizing the gradient linearization over the feasible set. Zero at the
// optimum. The solution must be feasible.
double duality_gap(const QpProblem& problem, const QpSolution& solution);

// Which side of the decision value a constraint bounds.
enum class ConstraintSide {
    margin_at_least, // f >= target, slack = max(0, target - f)
    upper_at_most,   // f <= target, slack = max(0, f - target)
};

// Hinge slacks for a batch of decision values against one constraint
// description.
std::vector<double> compute_slacks(std::span<const double> decision_values,
                                   ConstraintSide side, double target);

} // namespace ocsvm
