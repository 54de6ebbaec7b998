#include "ocsvm/eval.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <utility>

#include "ocsvm/rng.hpp"
#include "text_util.hpp"

namespace ocsvm {

using detail::fmt_double;
using detail::fnv1a64;

double fn_rate(const OneClassModel& model, const Dataset& normal_samples) {
    if (normal_samples.empty()) throw DataError("fn_rate: empty sample set");
    std::size_t rejected = 0;
    for (std::size_t i = 0; i < normal_samples.size(); ++i)
        if (model.predict(normal_samples.row(i)) < 0) ++rejected;
    return static_cast<double>(rejected) / static_cast<double>(normal_samples.size());
}

double fp_rate(const OneClassModel& model, const Dataset& abnormal_samples) {
    if (abnormal_samples.empty()) throw DataError("fp_rate: empty sample set");
    std::size_t accepted = 0;
    for (std::size_t i = 0; i < abnormal_samples.size(); ++i)
        if (model.predict(abnormal_samples.row(i)) > 0) ++accepted;
    return static_cast<double>(accepted) / static_cast<double>(abnormal_samples.size());
}

Histogram projection_histogram(const OneClassModel& model, const Dataset& samples,
                               std::size_t n_bins) {
    if (samples.empty()) throw DataError("projection_histogram: empty sample set");
    if (n_bins < 1) throw ConfigError("projection_histogram: n_bins must be >= 1");
    const std::vector<double> values = model.decision_values(samples);
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    Histogram hist;
    hist.edges.resize(n_bins + 1);
    for (std::size_t b = 0; b <= n_bins; ++b)
        hist.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(n_bins);
    hist.edges[n_bins] = hi;
    hist.counts.assign(n_bins, 0);
    const double width = (hi - lo) / static_cast<double>(n_bins);
    for (const double v : values) {
        std::size_t bin = 0;
        if (width > 0.0) {
            bin = static_cast<std::size_t>((v - lo) / width);
            if (bin >= n_bins) bin = n_bins - 1;
        }
        ++hist.counts[bin];
    }
    return hist;
}

// ---- experiment runner ----------------------------------------------------

namespace {

struct RowSpec {
    std::string name;
    bool abnormal = false;       // abnormal -> fp metric
    const Dataset* fixed = nullptr; // null for the per-run train/validation pools
};

RunResult run_training(const ExperimentConfig& config, const Split& sp,
                       std::uint64_t run_seed) {
    switch (config.trainer) {
    case TrainerKind::nu_single_class:
        return {train_one_class_nu(sp.train, config.params.nu, config.params.kernel,
                                   config.options)};
    case TrainerKind::reflected:
        return {train_one_class_c(sp.train, config.params.c, config.params.kernel,
                                  config.options)};
    case TrainerKind::universum: {
        const std::size_t m = config.n_universum ? config.n_universum : config.n_train;
        const Dataset u = subsample(config.universum_pool, m, Rng::derive_seed(run_seed, 1));
        return {train_one_class_universum(sp.train, u, config.params, config.options)};
    }
    case TrainerKind::model_select: {
        SelectionConfig sel = config.selection;
        sel.seed = Rng::derive_seed(run_seed, 1);
        sel.qp = config.options.qp;
        sel.threads = config.options.threads;
        SelectionResult res =
            select_universum_cost(sp.train, sp.validation, config.universum_pool,
                                  config.params.c, config.params.kernel, sel);
        return {std::move(res.model), res.chosen_ratio, true};
    }
    }
    throw ConfigError("run_experiment: bad trainer kind");
}

std::string hash_model(const OneClassModel& model) {
    std::ostringstream buf;
    model.save(buf);
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(buf.str())));
    return hex;
}

std::string summarize(const ExperimentConfig& c) {
    std::ostringstream s;
    const char* kind = "";
    switch (c.trainer) {
    case TrainerKind::nu_single_class: kind = "nu_single_class"; break;
    case TrainerKind::reflected: kind = "reflected"; break;
    case TrainerKind::universum: kind = "universum"; break;
    case TrainerKind::model_select: kind = "model_select"; break;
    }
    s << "trainer=" << kind << " kernel=" << c.params.kernel.to_string()
      << " nu=" << fmt_double(c.params.nu) << " c=" << fmt_double(c.params.c)
      << " c_star=" << fmt_double(c.params.c_star)
      << " epsilon=" << fmt_double(c.params.epsilon) << " n_train=" << c.n_train
      << " n_validation=" << c.n_validation << " n_universum=" << c.n_universum
      << " n_runs=" << c.n_runs << " seed=" << c.seed;
    return s.str();
}

void validate(const ExperimentConfig& config) {
    if (config.n_runs < 1) throw ConfigError("run_experiment: n_runs must be >= 1");
    if (config.n_train < 1) throw ConfigError("run_experiment: n_train must be >= 1");
    if (config.n_train + config.n_validation > config.normal_pool.size())
        throw ConfigError("run_experiment: normal pool holds " +
                          std::to_string(config.normal_pool.size()) + " samples, need " +
                          std::to_string(config.n_train + config.n_validation));
    std::vector<std::string> names;
    if (config.report_train_fn) names.push_back("train");
    if (config.report_validation_fn && config.n_validation > 0)
        names.push_back("validation");
    for (const TestPopulation& pop : config.test_populations) {
        if (pop.samples.empty())
            throw ConfigError("run_experiment: test population '" + pop.name + "' is empty");
        names.push_back(pop.name);
    }
    std::vector<std::string> sorted = names;
    std::sort(sorted.begin(), sorted.end());
    const auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end())
        throw ConfigError("run_experiment: duplicate population name '" + *dup + "'");
    if (config.trainer == TrainerKind::model_select && config.n_validation == 0)
        throw ConfigError("run_experiment: model selection needs a validation split");
}

} // namespace

EvalReport run_experiment(const ExperimentConfig& config) {
    validate(config);

    std::vector<RowSpec> rows;
    if (config.report_train_fn) rows.push_back({"train", false, nullptr});
    if (config.report_validation_fn && config.n_validation > 0)
        rows.push_back({"validation", false, nullptr});
    for (const TestPopulation& pop : config.test_populations)
        rows.push_back({pop.name, pop.abnormal, &pop.samples});

    EvalReport report;
    report.n_runs = config.n_runs;
    report.config_summary = summarize(config);
    report.populations.resize(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        report.populations[k].population = rows[k].name;
        report.populations[k].metric = rows[k].abnormal ? "fp" : "fn";
    }

    for (std::size_t r = 0; r < config.n_runs; ++r) {
        const std::uint64_t run_seed = Rng::derive_seed(config.seed, r);
        const Split sp =
            split(config.normal_pool, {config.n_train, config.n_validation, run_seed});
        const RunResult run = config.trainer_override
                                  ? config.trainer_override(sp.train, sp.validation,
                                                            config.universum_pool, run_seed)
                                  : run_training(config, sp, run_seed);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const Dataset* samples = rows[k].fixed;
            if (!samples) samples = rows[k].name == "train" ? &sp.train : &sp.validation;
            const double rate =
                rows[k].abnormal ? fp_rate(run.model, *samples) : fn_rate(run.model, *samples);
            report.populations[k].per_run_percent.push_back(100.0 * rate);
        }
        if (run.has_ratio) report.chosen_ratios.push_back(run.chosen_ratio);
        report.model_hashes.push_back(hash_model(run.model));
    }

    for (PopulationStats& stats : report.populations) {
        const std::vector<double>& v = stats.per_run_percent;
        double mean = 0.0;
        for (const double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        if (v.size() > 1) {
            for (const double x : v) var += (x - mean) * (x - mean);
            var /= static_cast<double>(v.size() - 1);
        }
        stats.mean_percent = mean;
        stats.std_percent = std::sqrt(var);
    }
    return report;
}

void write_report_csv(std::ostream& out, const EvalReport& report) {
    out << "run,population,metric,value_percent\n";
    for (std::size_t r = 0; r < report.n_runs; ++r)
        for (const PopulationStats& stats : report.populations)
            out << r + 1 << ',' << stats.population << ',' << stats.metric << ','
                << fmt_double(stats.per_run_percent[r]) << '\n';
}

void write_summary_csv(std::ostream& out, const EvalReport& report) {
    out << "population,metric,mean,std\n";
    for (const PopulationStats& stats : report.populations)
        out << stats.population << ',' << stats.metric << ',' << fmt_double(stats.mean_percent)
            << ',' << fmt_double(stats.std_percent) << '\n';
}

void write_table(std::ostream& out, const EvalReport& report) {
    std::size_t width = 10;
    for (const PopulationStats& stats : report.populations)
        width = std::max(width, stats.population.size());
    out << "population";
    for (std::size_t i = 10; i < width; ++i) out << ' ';
    out << "  metric  mean(%)  std(%)\n";
    char buf[64];
    for (const PopulationStats& stats : report.populations) {
        out << stats.population;
        for (std::size_t i = stats.population.size(); i < width; ++i) out << ' ';
        std::snprintf(buf, sizeof(buf), "  %-6s  %7.2f  %6.2f\n",
                      stats.metric == "fp" ? "FP" : "FN", stats.mean_percent,
                      stats.std_percent);
        out << buf;
    }
}

} // namespace ocsvm
