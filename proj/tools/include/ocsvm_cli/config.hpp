#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ocsvm/eval.hpp"
#include "ocsvm/kernel.hpp"
#include "ocsvm/model.hpp"
#include "ocsvm/modelsel.hpp"
#include "ocsvm/qp.hpp"

namespace ocsvm::cli {

// ---- config file ------------------------------------------------------
//
// The file format is deliberately small: `[section]` headers, `key = value`
// pairs, and full-line comments starting with `#` or `;`. Values are taken
// verbatim after trimming; there are no quotes, escapes or inline comments.
// Sections and keys within a section must be unique.

class IniFile {
public:
    IniFile() = default;

    // `name` labels error messages (usually the path).
    static IniFile parse(std::istream& in, const std::string& name);
    static IniFile parse_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    // line the key was defined on, 0 for values set programmatically
    int line_of(const std::string& section, const std::string& key) const;

    // Inserts or replaces; creates the section if needed. Used for --set and
    // environment overrides.
    void set(const std::string& section, const std::string& key, std::string value);

    std::vector<std::string> section_names() const; // in appearance order
    std::vector<std::string> keys(const std::string& section) const;

    const std::string& name() const { return name_; }

private:
    struct Entry {
        std::string key;
        std::string value;
        int line = 0;
    };
    struct Section {
        std::string name;
        std::vector<Entry> entries;
    };

    Section* find_section(const std::string& name);
    const Section* find_section(const std::string& name) const;

    std::string name_ = "<config>";
    std::vector<Section> sections_;
};

// ---- run configuration --------------------------------------------------

enum class Mode {
    train_nu,
    train_c,
    train_universum,
    model_select,
    benchmark,
    predict,
};

std::string to_string(Mode mode);

struct DataConfig {
    std::string format = "sparse"; // "sparse" or "idx"

    // sparse text sources
    std::string train;
    std::string validation;
    std::string universum;

    // idx sources: one labeled pool plus an optional fixed test set
    std::string images;
    std::string labels;
    std::string test_images;
    std::string test_labels;
    std::vector<int> normal_labels;    // pool rows forming the normal class
    std::vector<int> universum_labels; // pool rows forming the universum
};

// A fixed test population for benchmark mode, defined either by a sparse
// file or by a label selection over the idx test set.
struct PopulationConfig {
    std::string name;
    std::string file;
    std::vector<int> labels;
    bool abnormal = false;
};

// Optional cost tuning before a benchmark: picks the training cost whose
// training FN rate is closest to target_train_fn on the first run's split.
struct CalibrationConfig {
    bool enabled = false;
    double target_train_fn = 0.0;
    std::vector<double> costs; // empty = default_cost_grid()
};

struct ExperimentSpec {
    TrainerKind trainer = TrainerKind::reflected;
    std::size_t n_train = 0;
    std::size_t n_validation = 0;
    std::size_t n_universum = 0; // 0 = n_train
    std::size_t runs = 1;
    bool report_train_fn = true;
    bool report_validation_fn = true;
};

struct PredictConfig {
    std::string model;
    std::string data;
    int histogram_bins = 30;
};

// All output keys are paths, resolved against out_dir when relative.
struct OutputConfig {
    std::string model;       // trained model file
    std::string predictions; // predict: row,decision_value,prediction CSV
    std::string histogram;   // predict: bin_low,bin_high,count CSV
    std::string report;      // benchmark: per-run CSV
    std::string summary;     // benchmark: mean/std CSV
    std::string table;       // benchmark: aligned text table
    std::string trace;       // model-select: per-ratio CSV
};

struct RunConfig {
    Mode mode = Mode::train_c;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out_dir = ".";

    DataConfig data;
    HyperParams params;
    SolveOptions qp{1e-8, 10'000'000};
    SelectionConfig selection;
    CalibrationConfig calibration;
    ExperimentSpec experiment;
    PredictConfig predict;
    std::vector<PopulationConfig> populations;
    OutputConfig output;
};

// Command-line layer on top of the file: --set entries plus the dedicated
// flags, which take precedence over both the file and the environment.
struct Overrides {
    std::vector<std::string> sets; // "section.key=value"
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
};

// Environment variables override path-valued keys only. The variable for
// key `k` of section `s` is OCSVM_<S>_<K> with non-alphanumerics mapped
// to '_' (e.g. OCSVM_DATA_TRAIN, OCSVM_POPULATION_OTHERS_FILE).
bool is_path_key(const std::string& section, const std::string& key);
std::string env_var_name(const std::string& section, const std::string& key);

// Applies --set entries and environment overrides to `file`, resolves the
// mode (the [run] mode key must name one of `allowed`; it may be omitted
// only when `allowed` has a single entry), then builds the typed config.
// Every problem found is reported at once in a single ConfigError, one
// line per problem.
RunConfig build_config(IniFile file, std::span<const Mode> allowed, const Overrides& overrides);

} // namespace ocsvm::cli
