#pragma once

#include <cstdint>
#include <vector>

#include "ocsvm/dataset.hpp"
#include "ocsvm/kernel.hpp"
#include "ocsvm/model.hpp"
#include "ocsvm/qp.hpp"

namespace ocsvm {

// Solver-side details of a training run, for tests and reports. The model
// itself stays lean (pruned coefficients only); everything raw lives here.
struct TrainDiagnostics {
    double objective = 0.0;
    double gap = 0.0;
    std::uint64_t iterations = 0;
    double kkt_violation = 0.0;
    // Multiplier of the dual equality constraint before the model's offset is
    // zeroed; the zero-offset trainers require |solver_bias| <= 1e-6.
    double solver_bias = 0.0;
    // Raw dual variables in solver order (see the layout notes on each
    // trainer).
    std::vector<double> alpha;
    // Multipliers of the mirrored universum constraints (universum trainer
    // only). Expected to be zero whenever the universum sits strictly on the
    // normal side; recorded rather than enforced.
    std::vector<double> mirror_multipliers;
    double mirror_multiplier_max = 0.0;
    std::size_t n_support_vectors = 0;
};

struct TrainOptions {
    SolveOptions qp{1e-8, 10'000'000};
    int threads = 1; // Gram construction threads; results are thread-count independent
};

// Margin-threshold trainer. Solves, in the dual, the problem of enclosing
// the data from the origin side: minimize 1/2 a'Ka subject to
// 0 <= a_i <= 1/(nu*n) and sum a_i = 1; the equality multiplier recovers the
// margin rho and the model's threshold is rho. nu bounds the margin-error
// fraction from above and the support-vector fraction from below, each
// within 1/n.
// Errors: rho <= 0 ("origin not separable", e.g. all-zero data).
// Diagnostics alpha layout: n entries, one per training row.
OneClassModel train_one_class_nu(const Dataset& train, double nu, const KernelSpec& kernel,
                                 const TrainOptions& opt = {},
                                 TrainDiagnostics* diag = nullptr);

// Reflection-reduction trainer. Builds the 2n signed set {(i,+1) labeled +1,
// (i,-1) labeled -1}, solves the standard binary SVM dual over it (box
// [0, c], free offset), verifies the offset vanishes by symmetry
// (|b| <= 1e-6, else "symmetry violated"), and returns a model with offset
// exactly 0 and threshold 1.
// Diagnostics alpha layout: 2n entries, unreflected copies first.
OneClassModel train_one_class_c(const Dataset& train, double c, const KernelSpec& kernel,
                                const TrainOptions& opt = {},
                                TrainDiagnostics* diag = nullptr);

// Universum trainer. Training rows are reflected as in train_one_class_c;
// universum rows are not. Each universum row contributes a one-sided
// constraint w.x <= epsilon (+ slack) and its mirror -w.x <= epsilon
// (+ slack), both at cost c_star. The model's offset is structurally zero:
// the reflection symmetry that justifies a free offset in train_one_class_c
// breaks under the one-sided universum penalty, so no offset variable is
// introduced at all (dual: no equality constraint).
// With c_star = 0 or an empty universum the problem reduces to
// train_one_class_c exactly and is delegated to it (provenance aside).
// Diagnostics alpha layout: 2n train copies, then m one-sided universum
// multipliers, then m mirror multipliers.
OneClassModel train_one_class_universum(const Dataset& train, const Dataset& universum,
                                        const HyperParams& params,
                                        const TrainOptions& opt = {},
                                        TrainDiagnostics* diag = nullptr);

// Independent cross-check for train_one_class_universum: solves the
// unreflected two-cost formulation
//   minimize 1/2 |w|^2 + c_hat * sum_i max(0, 1 - w.x_i)
//            + c_star * sum_j max(0, w.x_j* - epsilon)
// through the reference QP solver. Training with train_one_class_universum
// at cost c matches this at c_hat = 2c (the reflection doubles each
// training penalty). Linear kernel only; dimension <= 50; n + m <= 200.
OneClassModel train_primal_reference(const Dataset& train, const Dataset& universum,
                                     double c_hat, double c_star, double epsilon = 0.0);

// Precomputes the kernel Gram over train ++ universum once so a
// model-selection grid can retrain at many (c, c_star) pairs cheaply; only
// the box bounds change between grid points.
class UniversumTrainer {
public:
    UniversumTrainer(Dataset train, Dataset universum, KernelSpec kernel, int threads = 1);

    // Same contract as train_one_class_universum.
    OneClassModel train(double c, double c_star, double epsilon = 0.0,
                        const SolveOptions& qp = SolveOptions{1e-8, 10'000'000},
                        TrainDiagnostics* diag = nullptr) const;

    // Same contract as train_one_class_c, reusing the cached Gram block.
    OneClassModel baseline(double c,
                           const SolveOptions& qp = SolveOptions{1e-8, 10'000'000},
                           TrainDiagnostics* diag = nullptr) const;

    const Dataset& train_data() const { return train_; }
    const Dataset& universum_data() const { return universum_; }
    const KernelSpec& kernel() const { return kernel_; }

private:
    Dataset train_;
    Dataset universum_;
    Dataset base_; // train ++ universum
    KernelSpec kernel_;
    SquareMatrix g_; // plain kernel Gram over base_
};

} // namespace ocsvm
