#include "ocsvm/train.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace ocsvm {

namespace {

constexpr double kOffsetTol = 1e-6;
constexpr double kSvRelTol = 1e-8; // alpha > kSvRelTol * upper counts as a support vector

SquareMatrix plain_gram(const KernelSpec& kernel, const Dataset& base, int threads) {
    std::vector<SignedIndex> items(base.size());
    for (std::size_t i = 0; i < items.size(); ++i) items[i] = {i, +1};
    return gram(kernel, items, base, threads);
}

void record_solution(TrainDiagnostics* diag, const QpSolution& sol) {
    if (!diag) return;
    diag->objective = sol.objective;
    diag->gap = sol.gap;
    diag->iterations = sol.iterations;
    diag->kkt_violation = sol.kkt_violation;
    diag->solver_bias = sol.bias;
    diag->alpha = sol.alpha;
    diag->mirror_multipliers.clear();
    diag->mirror_multiplier_max = 0.0;
    diag->n_support_vectors = 0;
}

std::size_t count_above(const std::vector<double>& alpha, std::size_t begin, std::size_t end,
                        double threshold) {
    std::size_t k = 0;
    for (std::size_t i = begin; i < end; ++i)
        if (alpha[i] > threshold) ++k;
    return k;
}

struct ReflectedFit {
    std::vector<SignedIndex> indices; // one entry per training row with dual mass
    std::vector<double> betas;
};

// Shared core of the zero-offset trainers: solves the binary dual over the
// 2n reflected copies using the training block of `g` (an n-or-larger plain
// Gram), checks the offset vanishes, and folds the two copies of each row
// into a single coefficient.
ReflectedFit solve_reflected(const SquareMatrix& g, std::size_t n, double c,
                             const SolveOptions& qp, TrainDiagnostics* diag) {
    QpProblem prob;
    prob.q = SquareMatrix(2 * n);
    for (std::size_t k = 0; k < 2 * n; ++k) {
        const std::size_t bk = k < n ? k : k - n;
        auto out = prob.q.row(k);
        const auto in = g.row(bk);
        for (std::size_t l = 0; l < 2 * n; ++l) out[l] = in[l < n ? l : l - n];
    }
    prob.p.assign(2 * n, -1.0);
    prob.lower.assign(2 * n, 0.0);
    prob.upper.assign(2 * n, c);
    EqConstraint eq;
    eq.coeffs.assign(2 * n, 1.0);
    for (std::size_t k = n; k < 2 * n; ++k) eq.coeffs[k] = -1.0;
    eq.rhs = 0.0;
    prob.eq = std::move(eq);

    const QpSolution sol = solve(prob, qp);
    if (std::abs(sol.bias) > kOffsetTol)
        throw SolverError("symmetry violated: offset " + std::to_string(sol.bias) +
                          " should vanish on reflected data (solver tolerance failure)");

    ReflectedFit fit;
    for (std::size_t i = 0; i < n; ++i) {
        const double beta = sol.alpha[i] + sol.alpha[n + i];
        if (beta == 0.0) continue;
        fit.indices.push_back({i, +1});
        fit.betas.push_back(beta);
    }
    record_solution(diag, sol);
    if (diag)
        diag->n_support_vectors = count_above(sol.alpha, 0, 2 * n, kSvRelTol * c);
    return fit;
}

void check_cost_params(double c, double c_star, double epsilon) {
    if (!(c > 0.0)) throw ConfigError("training cost c must be > 0, got " + std::to_string(c));
    if (c_star < 0.0)
        throw ConfigError("universum cost c_star must be >= 0, got " + std::to_string(c_star));
    if (epsilon < 0.0)
        throw ConfigError("epsilon must be >= 0, got " + std::to_string(epsilon));
}

} // namespace

OneClassModel train_one_class_nu(const Dataset& train, double nu, const KernelSpec& kernel,
                                 const TrainOptions& opt, TrainDiagnostics* diag) {
    if (train.empty()) throw DataError("train_one_class_nu: empty training set");
    if (!(nu > 0.0) || nu > 1.0)
        throw ConfigError("train_one_class_nu: nu must be in (0, 1], got " + std::to_string(nu));
    const std::size_t n = train.size();
    const double upper = 1.0 / (nu * static_cast<double>(n));

    QpProblem prob;
    prob.q = plain_gram(kernel, train, opt.threads);
    prob.p.assign(n, 0.0);
    prob.lower.assign(n, 0.0);
    prob.upper.assign(n, upper);
    prob.eq = EqConstraint{std::vector<double>(n, 1.0), 1.0};

    const QpSolution sol = solve(prob, opt.qp);
    const double rho = -sol.bias;
    if (!(rho > 0.0))
        throw SolverError("origin not separable: margin " + std::to_string(rho) +
                          " is not positive");

    std::vector<SignedIndex> indices;
    std::vector<double> betas;
    for (std::size_t i = 0; i < n; ++i) {
        if (sol.alpha[i] == 0.0) continue;
        indices.push_back({i, +1});
        betas.push_back(sol.alpha[i]);
    }
    record_solution(diag, sol);
    if (diag) diag->n_support_vectors = count_above(sol.alpha, 0, n, kSvRelTol * upper);

    HyperParams params;
    params.nu = nu;
    params.kernel = kernel;
    return OneClassModel(Provenance::nu_single_class, std::move(params), train,
                         std::move(indices), std::move(betas), 0.0, rho);
}

OneClassModel train_one_class_c(const Dataset& train, double c, const KernelSpec& kernel,
                                const TrainOptions& opt, TrainDiagnostics* diag) {
    if (train.empty()) throw DataError("train_one_class_c: empty training set");
    check_cost_params(c, 0.0, 0.0);
    const SquareMatrix g = plain_gram(kernel, train, opt.threads);
    ReflectedFit fit = solve_reflected(g, train.size(), c, opt.qp, diag);

    HyperParams params;
    params.c = c;
    params.kernel = kernel;
    return OneClassModel(Provenance::reflected_single_class, std::move(params), train,
                         std::move(fit.indices), std::move(fit.betas), 0.0, 1.0);
}

// ---- universum trainer ---------------------------------------------------

UniversumTrainer::UniversumTrainer(Dataset train, Dataset universum, KernelSpec kernel,
                                   int threads)
    : train_(std::move(train)), universum_(std::move(universum)),
      base_(Dataset::concat(train_, universum_)), kernel_(std::move(kernel)) {
    if (train_.empty()) throw DataError("UniversumTrainer: empty training set");
    g_ = plain_gram(kernel_, base_, threads);
}

OneClassModel UniversumTrainer::train(double c, double c_star, double epsilon,
                                      const SolveOptions& qp, TrainDiagnostics* diag) const {
    check_cost_params(c, c_star, epsilon);
    const std::size_t n = train_.size();
    const std::size_t m = universum_.size();

    if (c_star == 0.0 || m == 0) {
        // The universum term vanishes; this is exactly the reflected problem.
        ReflectedFit fit = solve_reflected(g_, n, c, qp, diag);
        HyperParams params;
        params.c = c;
        params.c_star = c_star;
        params.epsilon = epsilon;
        params.kernel = kernel_;
        return OneClassModel(Provenance::universum_single_class, std::move(params), train_,
                             std::move(fit.indices), std::move(fit.betas), 0.0, 1.0);
    }

    // Reported multiplier layout: [0, n) and [n, 2n) are the two reflected
    // copies of each training row; [2n, 2n+m) the one-sided universum
    // constraints; [2n+m, 2n+2m) their mirrors.
    const std::size_t nv = 2 * n + 2 * m;
    QpSolution sol;
    if (epsilon == 0.0) {
        // With no insensitivity width, the two copies of a training row enter
        // the objective only through their sum in [0, 2c] (identical Gram
        // rows, identical linear term), and a mirrored universum pair only
        // through the difference mirror - one_sided in [-c_star, c_star]
        // (the rows are exact negations and the linear terms cancel). Solve
        // the n+m reduced problem on the cached Gram directly; it has none
        // of the exactly flat directions of the expanded formulation. The
        // multipliers are then re-split into the reported layout, taking
        // per pair the split with one side at zero.
        QpProblem prob;
        prob.q = g_;
        prob.p.assign(n + m, -1.0);
        prob.lower.assign(n + m, 0.0);
        prob.upper.assign(n + m, 2.0 * c);
        for (std::size_t j = n; j < n + m; ++j) {
            prob.p[j] = 0.0;
            prob.lower[j] = -c_star;
            prob.upper[j] = c_star;
        }
        const QpSolution reduced = solve(prob, qp);
        sol = reduced;
        sol.alpha.assign(nv, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double sum = reduced.alpha[i];
            const double first = std::min(sum, c);
            sol.alpha[i] = first;
            sol.alpha[n + i] = sum - first;
        }
        for (std::size_t j = 0; j < m; ++j) {
            const double delta = reduced.alpha[n + j];
            sol.alpha[2 * n + j] = std::max(-delta, 0.0);
            sol.alpha[2 * n + m + j] = std::max(delta, 0.0);
        }
    } else {
        // Fold factor (label times reflection sign) is -1 for the one-sided
        // universum block and +1 elsewhere.
        auto base_of = [&](std::size_t k) {
            if (k < n) return k;
            if (k < 2 * n) return k - n;
            if (k < 2 * n + m) return n + (k - 2 * n);
            return n + (k - 2 * n - m);
        };
        auto fold_of = [&](std::size_t k) {
            return (k >= 2 * n && k < 2 * n + m) ? -1.0 : 1.0;
        };

        QpProblem prob;
        prob.q = SquareMatrix(nv);
        for (std::size_t k = 0; k < nv; ++k) {
            const auto in = g_.row(base_of(k));
            const double fk = fold_of(k);
            auto out = prob.q.row(k);
            for (std::size_t l = 0; l < nv; ++l) out[l] = fk * fold_of(l) * in[base_of(l)];
        }
        prob.p.assign(nv, -1.0);
        for (std::size_t k = 2 * n; k < nv; ++k) prob.p[k] = epsilon;
        prob.lower.assign(nv, 0.0);
        prob.upper.assign(nv, c);
        for (std::size_t k = 2 * n; k < nv; ++k) prob.upper[k] = c_star;

        sol = solve(prob, qp);
    }

    std::vector<SignedIndex> indices;
    std::vector<double> betas;
    for (std::size_t i = 0; i < n; ++i) {
        const double beta = sol.alpha[i] + sol.alpha[n + i];
        if (beta == 0.0) continue;
        indices.push_back({i, +1});
        betas.push_back(beta);
    }
    for (std::size_t j = 0; j < m; ++j) {
        const double beta = -sol.alpha[2 * n + j] + sol.alpha[2 * n + m + j];
        if (beta == 0.0) continue;
        indices.push_back({n + j, +1});
        betas.push_back(beta);
    }

    record_solution(diag, sol);
    if (diag) {
        diag->mirror_multipliers.assign(sol.alpha.begin() + static_cast<std::ptrdiff_t>(2 * n + m),
                                        sol.alpha.end());
        for (double v : diag->mirror_multipliers)
            diag->mirror_multiplier_max = std::max(diag->mirror_multiplier_max, v);
        diag->n_support_vectors = count_above(sol.alpha, 0, 2 * n, kSvRelTol * c) +
                                  count_above(sol.alpha, 2 * n, nv, kSvRelTol * c_star);
    }

    HyperParams params;
    params.c = c;
    params.c_star = c_star;
    params.epsilon = epsilon;
    params.kernel = kernel_;
    return OneClassModel(Provenance::universum_single_class, std::move(params), base_,
                         std::move(indices), std::move(betas), 0.0, 1.0);
}

OneClassModel UniversumTrainer::baseline(double c, const SolveOptions& qp,
                                         TrainDiagnostics* diag) const {
    check_cost_params(c, 0.0, 0.0);
    ReflectedFit fit = solve_reflected(g_, train_.size(), c, qp, diag);
    HyperParams params;
    params.c = c;
    params.kernel = kernel_;
    return OneClassModel(Provenance::reflected_single_class, std::move(params), train_,
                         std::move(fit.indices), std::move(fit.betas), 0.0, 1.0);
}

OneClassModel train_one_class_universum(const Dataset& train, const Dataset& universum,
                                        const HyperParams& params, const TrainOptions& opt,
                                        TrainDiagnostics* diag) {
    const UniversumTrainer trainer(train, universum, params.kernel, opt.threads);
    return trainer.train(params.c, params.c_star, params.epsilon, opt.qp, diag);
}

// ---- primal cross-check ---------------------------------------------------

OneClassModel train_primal_reference(const Dataset& train, const Dataset& universum,
                                     double c_hat, double c_star, double epsilon) {
    if (train.empty()) throw DataError("train_primal_reference: empty training set");
    check_cost_params(c_hat, c_star, epsilon);
    const std::size_t n = train.size();
    const std::size_t m = universum.size();
    if (train.dim() > 50)
        throw ConfigError("train_primal_reference: dimension " + std::to_string(train.dim()) +
                          " exceeds the oracle limit of 50");
    if (n + m > 200)
        throw ConfigError("train_primal_reference: " + std::to_string(n + m) +
                          " samples exceed the oracle limit of 200");

    const KernelSpec kernel = KernelSpec::linear();
    const Dataset base = Dataset::concat(train, universum);
    const SquareMatrix g = plain_gram(kernel, base, 1);

    // Dual of the unreflected two-cost objective: training rows enter with
    // fold +1 and slope -1, universum rows with fold -1 and slope +epsilon;
    // no offset, so no equality constraint.
    const std::size_t nv = n + m;
    QpProblem prob;
    prob.q = SquareMatrix(nv);
    for (std::size_t k = 0; k < nv; ++k) {
        const double fk = k < n ? 1.0 : -1.0;
        const auto in = g.row(k);
        auto out = prob.q.row(k);
        for (std::size_t l = 0; l < nv; ++l) out[l] = fk * (l < n ? 1.0 : -1.0) * in[l];
    }
    prob.p.assign(nv, -1.0);
    for (std::size_t k = n; k < nv; ++k) prob.p[k] = epsilon;
    prob.lower.assign(nv, 0.0);
    prob.upper.assign(nv, c_hat);
    for (std::size_t k = n; k < nv; ++k) prob.upper[k] = c_star;

    const QpSolution sol = solve_reference(prob);

    std::vector<SignedIndex> indices;
    std::vector<double> betas;
    for (std::size_t k = 0; k < nv; ++k) {
        const double beta = k < n ? sol.alpha[k] : -sol.alpha[k];
        if (beta == 0.0) continue;
        indices.push_back({k, +1});
        betas.push_back(beta);
    }

    HyperParams params;
    params.c = c_hat;
    params.c_star = c_star;
    params.epsilon = epsilon;
    params.kernel = kernel;
    return OneClassModel(Provenance::universum_single_class, std::move(params), base,
                         std::move(indices), std::move(betas), 0.0, 1.0);
}

} // namespace ocsvm
