#include "ocsvm_cli/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <utility>

#include "CLI11.hpp"

#include "ocsvm/eval.hpp"
#include "ocsvm/rng.hpp"

namespace ocsvm::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt2(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Output paths resolve against out_dir; inputs are taken as given.
std::string resolve_output(const RunConfig& cfg, const std::string& path) {
    fs::path p(path);
    if (p.is_absolute() || cfg.out_dir.empty() || cfg.out_dir == ".") return path;
    return (fs::path(cfg.out_dir) / p).string();
}

// Binary mode keeps artifacts byte-identical across platforms.
std::ofstream open_output(const std::string& resolved) {
    const fs::path parent = fs::path(resolved).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        fs::create_directories(parent, ec);
    }
    std::ofstream out(resolved, std::ios::binary);
    if (!out) throw DataError("cannot write " + resolved);
    return out;
}

Dataset load_idx_selection(const RunConfig& cfg, std::span<const int> keep) {
    const Dataset pool = load_idx(cfg.data.images, cfg.data.labels);
    return filter_by_label(pool, keep);
}

Dataset load_train_set(const RunConfig& cfg) {
    if (cfg.data.format == "idx") return load_idx_selection(cfg, cfg.data.normal_labels);
    return load_sparse(cfg.data.train);
}

Dataset load_universum_set(const RunConfig& cfg) {
    if (cfg.data.format == "idx") return load_idx_selection(cfg, cfg.data.universum_labels);
    return load_sparse(cfg.data.universum);
}

void describe_model(std::ostream& out, const OneClassModel& model,
                    const TrainDiagnostics& diag) {
    out << "  support vectors: " << model.n_support_vectors() << "\n"
        << "  threshold: " << fmt(model.threshold()) << "  offset: " << fmt(model.bias())
        << "\n"
        << "  solver: " << diag.iterations << " iterations, objective " << fmt(diag.objective)
        << ", gap " << fmt(diag.gap) << "\n";
}

void save_model_if_configured(const RunConfig& cfg, const OneClassModel& model,
                              std::ostream& out) {
    if (cfg.output.model.empty()) return;
    const std::string path = resolve_output(cfg, cfg.output.model);
    {
        std::ofstream f = open_output(path);
        model.save(f);
        if (!f) throw DataError("cannot write " + path);
    }
    out << "wrote model: " << path << "\n";
}

void cmd_train(const RunConfig& cfg, std::ostream& out) {
    const Dataset train = load_train_set(cfg);
    const TrainOptions opt{cfg.qp, cfg.threads};
    TrainDiagnostics diag;
    std::optional<OneClassModel> model;
    switch (cfg.mode) {
    case Mode::train_nu:
        model = train_one_class_nu(train, cfg.params.nu, cfg.params.kernel, opt, &diag);
        break;
    case Mode::train_c:
        model = train_one_class_c(train, cfg.params.c, cfg.params.kernel, opt, &diag);
        break;
    case Mode::train_universum: {
        const Dataset universum = load_universum_set(cfg);
        model = train_one_class_universum(train, universum, cfg.params, opt, &diag);
        out << "universum: " << universum.size() << " rows, largest mirrored multiplier "
            << fmt(diag.mirror_multiplier_max) << "\n";
        break;
    }
    default: throw ConfigError("not a training mode");
    }

    out << "trained " << to_string(cfg.mode) << " on " << train.size() << " rows (dim "
        << train.dim() << ", kernel " << cfg.params.kernel.to_string() << ")\n";
    describe_model(out, *model, diag);
    out << "  training FN: " << fmt2(100.0 * fn_rate(*model, train)) << "%\n";
    save_model_if_configured(cfg, *model, out);
}

void cmd_predict(const RunConfig& cfg, std::ostream& out) {
    const OneClassModel model = OneClassModel::load_file(cfg.predict.model);
    const Dataset data = load_sparse(cfg.predict.data);
    const std::vector<double> values = model.decision_values(data);

    std::size_t accepted = 0;
    for (const double v : values)
        if (v >= model.threshold()) ++accepted;

    if (!cfg.output.predictions.empty()) {
        const std::string path = resolve_output(cfg, cfg.output.predictions);
        std::ofstream f = open_output(path);
        f << "row,decision_value,prediction\n";
        for (std::size_t i = 0; i < values.size(); ++i)
            f << i << ',' << fmt(values[i]) << ','
              << (values[i] >= model.threshold() ? 1 : -1) << '\n';
        if (!f) throw DataError("cannot write " + path);
        out << "wrote predictions: " << path << "\n";
    }
    if (!cfg.output.histogram.empty()) {
        const Histogram h = projection_histogram(model, data,
                                                 static_cast<std::size_t>(cfg.predict.histogram_bins));
        const std::string path = resolve_output(cfg, cfg.output.histogram);
        std::ofstream f = open_output(path);
        f << "bin_low,bin_high,count\n";
        for (std::size_t i = 0; i < h.counts.size(); ++i)
            f << fmt(h.edges[i]) << ',' << fmt(h.edges[i + 1]) << ',' << h.counts[i] << '\n';
        if (!f) throw DataError("cannot write " + path);
        out << "wrote histogram: " << path << "\n";
    }

    const double pct = data.empty() ? 0.0 : 100.0 * static_cast<double>(accepted) /
                                                static_cast<double>(data.size());
    out << "predicted " << data.size() << " rows: " << accepted << " normal ("
        << fmt2(pct) << "%), " << data.size() - accepted << " abnormal\n";
}

void cmd_model_select(const RunConfig& cfg, std::ostream& out) {
    const Dataset train = load_sparse(cfg.data.train);
    const Dataset validation = load_sparse(cfg.data.validation);
    const Dataset universum = load_sparse(cfg.data.universum);

    SelectionConfig sel = cfg.selection;
    sel.epsilon = cfg.params.epsilon;
    sel.seed = cfg.seed;
    sel.qp = cfg.qp;
    sel.threads = cfg.threads;
    const SelectionResult res = select_universum_cost(train, validation, universum,
                                                      cfg.params.c, cfg.params.kernel, sel);

    out << "model selection over " << res.trace.size() << " cost ratios (c = "
        << fmt(cfg.params.c) << ")\n"
        << "  baseline validation FN: " << fmt2(100.0 * res.baseline_validation_fn) << "%\n";
    if (res.chosen_ratio > 0.0)
        out << "  chosen ratio: " << fmt(res.chosen_ratio) << " (c_star = "
            << fmt(res.chosen_ratio * cfg.params.c) << ")\n";
    else
        out << "  chosen ratio: none (keeping the plain model)\n";
    out << "  selected model support vectors: " << res.model.n_support_vectors() << "\n";

    if (!cfg.output.trace.empty()) {
        const std::string path = resolve_output(cfg, cfg.output.trace);
        std::ofstream f = open_output(path);
        write_trace_csv(f, res);
        if (!f) throw DataError("cannot write " + path);
        out << "wrote trace: " << path << "\n";
    }
    save_model_if_configured(cfg, res.model, out);
}

void cmd_benchmark(const RunConfig& cfg, std::ostream& out) {
    ocsvm::ExperimentConfig ec;
    ec.normal_pool = load_train_set(cfg);
    const TrainerKind kind = cfg.experiment.trainer;
    if (kind == TrainerKind::universum || kind == TrainerKind::model_select)
        ec.universum_pool = load_universum_set(cfg);

    std::optional<Dataset> test_pool;
    for (const PopulationConfig& pop : cfg.populations) {
        Dataset samples;
        if (!pop.file.empty()) {
            samples = load_sparse(pop.file);
        } else {
            if (!test_pool) test_pool = load_idx(cfg.data.test_images, cfg.data.test_labels);
            samples = filter_by_label(*test_pool, pop.labels);
        }
        ec.test_populations.push_back({pop.name, std::move(samples), pop.abnormal});
    }

    ec.n_train = cfg.experiment.n_train;
    ec.n_validation = cfg.experiment.n_validation;
    ec.n_universum = cfg.experiment.n_universum;
    ec.n_runs = cfg.experiment.runs;
    ec.seed = cfg.seed;
    ec.trainer = kind;
    ec.params = cfg.params;
    ec.selection = cfg.selection;
    ec.selection.epsilon = cfg.params.epsilon;
    ec.options = TrainOptions{cfg.qp, cfg.threads};
    ec.report_train_fn = cfg.experiment.report_train_fn;
    ec.report_validation_fn = cfg.experiment.report_validation_fn;

    if (cfg.calibration.enabled) {
        const Split first = split(ec.normal_pool, {ec.n_train, ec.n_validation,
                                                   Rng::derive_seed(cfg.seed, 0)});
        const std::vector<double> grid =
            cfg.calibration.costs.empty() ? default_cost_grid() : cfg.calibration.costs;
        ec.params.c = calibrate_cost(first.train, cfg.calibration.target_train_fn,
                                     cfg.params.kernel, grid, ec.options);
        out << "calibrated cost: c = " << fmt(ec.params.c) << " (training FN target "
            << fmt2(100.0 * cfg.calibration.target_train_fn) << "%)\n";
    }

    const EvalReport report = run_experiment(ec);

    out << report.config_summary << "\n";
    write_table(out, report);
    if (!report.chosen_ratios.empty()) {
        out << "chosen ratios per run:";
        for (const double r : report.chosen_ratios) out << ' ' << fmt(r);
        out << "\n";
    }

    if (!cfg.output.report.empty()) {
        const std::string path = resolve_output(cfg, cfg.output.report);
        std::ofstream f = open_output(path);
        write_report_csv(f, report);
        if (!f) throw DataError("cannot write " + path);
        out << "wrote report: " << path << "\n";
    }
    if (!cfg.output.summary.empty()) {
        const std::string path = resolve_output(cfg, cfg.output.summary);
        std::ofstream f = open_output(path);
        write_summary_csv(f, report);
        if (!f) throw DataError("cannot write " + path);
        out << "wrote summary: " << path << "\n";
    }
    if (!cfg.output.table.empty()) {
        const std::string path = resolve_output(cfg, cfg.output.table);
        std::ofstream f = open_output(path);
        write_table(f, report);
        if (!f) throw DataError("cannot write " + path);
        out << "wrote table: " << path << "\n";
    }
}

} // namespace

void run_command(const RunConfig& cfg, std::ostream& out) {
    switch (cfg.mode) {
    case Mode::train_nu:
    case Mode::train_c:
    case Mode::train_universum: cmd_train(cfg, out); break;
    case Mode::predict: cmd_predict(cfg, out); break;
    case Mode::model_select: cmd_model_select(cfg, out); break;
    case Mode::benchmark: cmd_benchmark(cfg, out); break;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"single-class SVM training, prediction and benchmarking"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides ov;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "configuration file");
        sub->add_option("--set", ov.sets,
                        "override a config value (section.key=value), repeatable");
        sub->add_option("--seed", ov.seed, "override [run] seed");
        sub->add_option("--out-dir", ov.out_dir, "directory for relative output paths");
        sub->add_option("--threads", ov.threads, "override [run] threads");
        return sub;
    };

    CLI::App* train = add_common(app.add_subcommand(
        "train", "train a model (config picks train-nu, train-c or train-universum)"));
    CLI::App* predict =
        add_common(app.add_subcommand("predict", "score a dataset with a saved model"));
    CLI::App* select = add_common(
        app.add_subcommand("model-select", "pick the universum cost ratio on a validation set"));
    CLI::App* bench = add_common(
        app.add_subcommand("benchmark", "repeated-split error-rate study from one config"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "error [config] " << e.what() << "\n";
        return 2;
    }

    try {
        static constexpr Mode kTrainModes[] = {Mode::train_nu, Mode::train_c,
                                               Mode::train_universum};
        static constexpr Mode kPredict[] = {Mode::predict};
        static constexpr Mode kSelect[] = {Mode::model_select};
        static constexpr Mode kBench[] = {Mode::benchmark};

        std::span<const Mode> allowed;
        if (app.got_subcommand(train)) allowed = kTrainModes;
        if (app.got_subcommand(predict)) allowed = kPredict;
        if (app.got_subcommand(select)) allowed = kSelect;
        if (app.got_subcommand(bench)) allowed = kBench;

        IniFile file;
        if (!config_path.empty()) file = IniFile::parse_file(config_path);
        const RunConfig cfg = build_config(std::move(file), allowed, ov);
        run_command(cfg, out);
        return 0;
    } catch (const ConfigError& e) {
        err << "error [config] " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        err << "error [data] " << e.what() << "\n";
        return 3;
    } catch (const SolverError& e) {
        err << "error [solver] " << e.what() << "\n";
        return 4;
    }
}

int run_cli(int argc, const char* const* argv) {
    return run_cli(argc, argv, std::cout, std::cerr);
}

} // namespace ocsvm::cli
