#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "ocsvm/dataset.hpp"
#include "ocsvm/model.hpp"
#include "ocsvm/modelsel.hpp"
#include "ocsvm/train.hpp"

namespace ocsvm {

// Fraction of normal samples the model rejects (predicts -1).
double fn_rate(const OneClassModel& model, const Dataset& normal_samples);

// Fraction of abnormal samples the model accepts (predicts +1).
double fp_rate(const OneClassModel& model, const Dataset& abnormal_samples);

struct Histogram {
    std::vector<double> edges;       // n_bins + 1, spanning [min, max] of the values
    std::vector<std::size_t> counts; // n_bins, summing to the sample count
};

// Histogram of decision values over `samples`.
Histogram projection_histogram(const OneClassModel& model, const Dataset& samples,
                               std::size_t n_bins);

// ---- repeated-split experiment runner ----------------------------------

enum class TrainerKind {
    nu_single_class, // train_one_class_nu at params.nu
    reflected,       // train_one_class_c at params.c
    universum,       // train_one_class_universum at params
    model_select,    // two-step cost selection per `selection`
};

struct TestPopulation {
    std::string name;
    Dataset samples;
    bool abnormal = false; // abnormal populations report FP, normal ones FN
};

// What one run's training phase produced. chosen_ratio is NaN unless model
// selection picked one.
struct RunResult {
    OneClassModel model;
    double chosen_ratio = 0.0;
    bool has_ratio = false;
};

// Replaces the built-in per-run training pipeline when set; receives the
// run's training split, validation split, the (unsubsampled) universum pool,
// and the run seed. Used by tests to observe exactly what training sees.
using TrainerFn = std::function<RunResult(const Dataset& train, const Dataset& validation,
                                          const Dataset& universum_pool,
                                          std::uint64_t run_seed)>;

struct ExperimentConfig {
    Dataset normal_pool;    // per-run train/validation splits come from here
    Dataset universum_pool; // may be empty
    std::vector<TestPopulation> test_populations; // fixed across runs
    std::size_t n_train = 0;
    std::size_t n_validation = 0;
    std::size_t n_universum = 0; // per-run universum subsample; 0 means n_train
    std::size_t n_runs = 1;
    std::uint64_t seed = 0;
    TrainerKind trainer = TrainerKind::reflected;
    HyperParams params;
    SelectionConfig selection; // model_select only
    TrainOptions options;
    bool report_train_fn = true;      // include the run's own training FN
    bool report_validation_fn = true; // include the run's validation FN
    TrainerFn trainer_override;       // empty = built-in pipeline
};

struct PopulationStats {
    std::string population;
    std::string metric; // "fn" or "fp"
    std::vector<double> per_run_percent;
    double mean_percent = 0.0;
    double std_percent = 0.0; // sample standard deviation (n-1); 0 for a single run
};

struct EvalReport {
    std::vector<PopulationStats> populations;
    std::size_t n_runs = 0;
    std::vector<double> chosen_ratios; // one per run under model selection, else empty
    std::vector<std::string> model_hashes; // content hash of each run's model
    std::string config_summary;
};

// For each run: a fresh seeded split of the normal pool, training (or model
// selection) on that split, then FN/FP on the fixed test populations.
// Abnormal populations are never visible to the training phase. Derives one
// independent seed per run from config.seed, so reports are reproducible
// and runs are order-independent.
EvalReport run_experiment(const ExperimentConfig& config);

// CSV with columns run,population,metric,value_percent (runs are 1-based).
void write_report_csv(std::ostream& out, const EvalReport& report);

// CSV with columns population,metric,mean,std.
void write_summary_csv(std::ostream& out, const EvalReport& report);

// Human-readable aligned table of the summary.
void write_table(std::ostream& out, const EvalReport& report);

} // namespace ocsvm
