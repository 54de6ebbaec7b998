#include "ocsvm/modelsel.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <utility>

#include "ocsvm/eval.hpp"
#include "ocsvm/qp.hpp"
#include "text_util.hpp"

namespace ocsvm {

using detail::fmt_double;

std::vector<double> default_ratio_grid() {
    std::vector<double> grid;
    for (int k = -6; k <= 10; ++k) grid.push_back(std::ldexp(1.0, k));
    return grid;
}

namespace {

void validate_config(const SelectionConfig& cfg) {
    if (cfg.ratio_grid.empty()) throw ConfigError("select_universum_cost: empty ratio grid");
    for (std::size_t i = 0; i < cfg.ratio_grid.size(); ++i) {
        if (!(cfg.ratio_grid[i] > 0.0))
            throw ConfigError("select_universum_cost: ratio_grid[" + std::to_string(i) +
                              "] must be > 0");
        if (i > 0 && !(cfg.ratio_grid[i] > cfg.ratio_grid[i - 1]))
            throw ConfigError("select_universum_cost: ratio_grid must be strictly increasing");
    }
    if (cfg.fn_slack < 0.0 || cfg.fn_slack >= 1.0)
        throw ConfigError("select_universum_cost: fn_slack must be in [0, 1), got " +
                          std::to_string(cfg.fn_slack));
    if (cfg.epsilon < 0.0)
        throw ConfigError("select_universum_cost: epsilon must be >= 0");
}

} // namespace

SelectionResult select_universum_cost(const Dataset& train, const Dataset& validation,
                                      const Dataset& universum, double c,
                                      const KernelSpec& kernel, const SelectionConfig& cfg) {
    validate_config(cfg);
    if (validation.empty())
        throw DataError("select_universum_cost: empty validation set");

    const Dataset universum_used = universum.size() > train.size()
                                       ? subsample(universum, train.size(), cfg.seed)
                                       : universum;
    const UniversumTrainer trainer(train, universum_used, kernel, cfg.threads);

    OneClassModel baseline = trainer.baseline(c, cfg.qp);
    const double baseline_fn = fn_rate(baseline, validation);
    const double budget = baseline_fn + cfg.fn_slack;

    SelectionResult result{0.0, std::move(baseline), baseline_fn, {}};
    std::optional<OneClassModel> best;
    for (const double ratio : cfg.ratio_grid) {
        SelectionTraceRow row;
        row.ratio = ratio;
        row.c_star = ratio * c;
        std::optional<OneClassModel> candidate;
        try {
            candidate = trainer.train(c, ratio * c, cfg.epsilon, cfg.qp);
        } catch (const QpIterationLimit&) {
            // The limit iterate is only an approximation; selecting on its
            // FN rate could promote a model the solver never finished.
            row.converged = false;
            row.validation_fn = std::numeric_limits<double>::quiet_NaN();
            row.train_fn = std::numeric_limits<double>::quiet_NaN();
        }
        if (candidate) {
            row.validation_fn = fn_rate(*candidate, validation);
            row.train_fn = fn_rate(*candidate, train);
            row.n_support_vectors = candidate->n_support_vectors();
            if (row.validation_fn <= budget) {
                result.chosen_ratio = ratio; // grid is increasing, keep the latest
                best = std::move(*candidate);
            }
        }
        result.trace.push_back(row);
    }
    if (best) result.model = std::move(*best);
    return result;
}

OneClassModel baseline_fixed_cost(const Dataset& train, double c, const KernelSpec& kernel,
                                  const TrainOptions& opt) {
    return train_one_class_c(train, c, kernel, opt);
}

std::vector<double> default_cost_grid() {
    std::vector<double> grid;
    for (int k = -8; k <= 14; ++k) grid.push_back(std::ldexp(1.0, k));
    return grid;
}

double calibrate_cost(const Dataset& train, double target_fn, const KernelSpec& kernel,
                      std::span<const double> cost_grid, const TrainOptions& opt) {
    if (cost_grid.empty()) throw ConfigError("calibrate_cost: empty cost grid");
    for (std::size_t i = 0; i < cost_grid.size(); ++i) {
        if (!(cost_grid[i] > 0.0))
            throw ConfigError("calibrate_cost: cost_grid[" + std::to_string(i) +
                              "] must be > 0");
        if (i > 0 && !(cost_grid[i] > cost_grid[i - 1]))
            throw ConfigError("calibrate_cost: cost_grid must be strictly increasing");
    }
    if (target_fn < 0.0 || target_fn >= 1.0)
        throw ConfigError("calibrate_cost: target_fn must be in [0, 1), got " +
                          std::to_string(target_fn));

    double best_cost = cost_grid[0];
    double best_miss = std::numeric_limits<double>::infinity();
    for (const double c : cost_grid) {
        const OneClassModel model = train_one_class_c(train, c, kernel, opt);
        const double miss = std::abs(fn_rate(model, train) - target_fn);
        if (miss < best_miss) { // strict: ties keep the smaller cost
            best_miss = miss;
            best_cost = c;
        }
    }
    return best_cost;
}

void write_trace_csv(std::ostream& out, const SelectionResult& result) {
    out << "ratio,c_star,validation_fn,train_fn,n_support_vectors,converged\n";
    for (const SelectionTraceRow& row : result.trace)
        out << fmt_double(row.ratio) << ',' << fmt_double(row.c_star) << ','
            << fmt_double(row.validation_fn) << ',' << fmt_double(row.train_fn) << ','
            << row.n_support_vectors << ',' << (row.converged ? 1 : 0) << '\n';
}

} // namespace ocsvm
