#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ocsvm/dataset.hpp"
#include "ocsvm/kernel.hpp"
#include "ocsvm/model.hpp"
#include "ocsvm/train.hpp"

namespace ocsvm {

// Candidate c_star/c ratios, 2^-6 through 2^10.
std::vector<double> default_ratio_grid();

struct SelectionConfig {
    std::vector<double> ratio_grid = default_ratio_grid(); // strictly increasing, all > 0
    double fn_slack = 0.0;  // allowed validation-FN excess over the baseline, in [0, 1)
    double epsilon = 0.0;
    std::uint64_t seed = 0; // drives universum subsampling
    SolveOptions qp{1e-8, 10'000'000};
    int threads = 1;
};

struct SelectionTraceRow {
    double ratio = 0.0;
    double c_star = 0.0;
    double validation_fn = 0.0; // NaN when the solve did not converge
    double train_fn = 0.0;      // NaN when the solve did not converge
    std::size_t n_support_vectors = 0;
    bool converged = true; // false when the solver hit its iteration limit
};

struct SelectionResult {
    // Largest grid ratio whose model kept validation FN within
    // baseline + fn_slack; 0 when no ratio qualified (model is then the
    // baseline).
    double chosen_ratio = 0.0;
    OneClassModel model;
    double baseline_validation_fn = 0.0;
    std::vector<SelectionTraceRow> trace; // one row per grid ratio, in grid order
};

// Two-step cost selection: the baseline model is trained at cost c alone
// (fixing the FN regime), then every grid ratio r is evaluated at
// c_star = r * c and the largest ratio that does not degrade validation FN
// beyond fn_slack wins. The full grid is always evaluated (FN need not be
// monotone in the ratio). When the universum pool is larger than the
// training set it is subsampled to the training-set size with cfg.seed.
// Validation must be nonempty and contain normal-class samples only.
// A grid ratio whose solve hits the iteration limit is recorded as
// unconverged and never chosen; a baseline that fails to converge is fatal.
SelectionResult select_universum_cost(const Dataset& train, const Dataset& validation,
                                      const Dataset& universum, double c,
                                      const KernelSpec& kernel, const SelectionConfig& cfg);

// Stage-one trainer behind select_universum_cost; identical to
// train_one_class_c.
OneClassModel baseline_fixed_cost(const Dataset& train, double c, const KernelSpec& kernel,
                                  const TrainOptions& opt = {});

// CSV with columns ratio,c_star,validation_fn,train_fn,n_support_vectors,
// converged.
void write_trace_csv(std::ostream& out, const SelectionResult& result);

// Candidate training costs, 2^-8 through 2^14.
std::vector<double> default_cost_grid();

// Picks from cost_grid the cost whose training FN rate lands closest to
// target_fn (ties broken toward the smaller cost). Used to fix the
// operating regime before ratio selection; the grid must be nonempty,
// positive and strictly increasing, and target_fn must lie in [0, 1).
double calibrate_cost(const Dataset& train, double target_fn, const KernelSpec& kernel,
                      std::span<const double> cost_grid, const TrainOptions& opt = {});

} // namespace ocsvm
