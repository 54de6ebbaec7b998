#include "ocsvm_cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <climits>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <utility>

namespace ocsvm::cli {

namespace {

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_f64(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (errno != 0 || end != s.c_str() + s.size()) return false;
    out = v;
    return true;
}

bool parse_i64(const std::string& s, long long& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size()) return false;
    out = v;
    return true;
}

bool parse_u64(const std::string& s, unsigned long long& out) {
    if (s.empty() || s[0] == '-') return false;
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (errno != 0 || end != s.c_str() + s.size()) return false;
    out = v;
    return true;
}

bool parse_flag(const std::string& s, bool& out) {
    if (s == "true" || s == "yes" || s == "on" || s == "1") {
        out = true;
        return true;
    }
    if (s == "false" || s == "no" || s == "off" || s == "0") {
        out = false;
        return true;
    }
    return false;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        const std::size_t end = comma == std::string::npos ? s.size() : comma;
        parts.push_back(trim(s.substr(start, end - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return parts;
}

constexpr const char* kPopulationPrefix = "population ";

bool is_population_section(const std::string& section) {
    return section.rfind(kPopulationPrefix, 0) == 0;
}

// every section/key pair the format defines
const std::pair<const char*, const char*> kKnownKeys[] = {
    {"run", "mode"},
    {"run", "seed"},
    {"run", "threads"},
    {"run", "out_dir"},
    {"data", "format"},
    {"data", "train"},
    {"data", "validation"},
    {"data", "universum"},
    {"data", "images"},
    {"data", "labels"},
    {"data", "test_images"},
    {"data", "test_labels"},
    {"data", "normal_labels"},
    {"data", "universum_labels"},
    {"model", "kernel"},
    {"model", "nu"},
    {"model", "c"},
    {"model", "c_star"},
    {"model", "epsilon"},
    {"solver", "tolerance"},
    {"solver", "max_iterations"},
    {"selection", "ratios"},
    {"selection", "fn_slack"},
    {"calibration", "target_train_fn"},
    {"calibration", "costs"},
    {"experiment", "trainer"},
    {"experiment", "n_train"},
    {"experiment", "n_validation"},
    {"experiment", "n_universum"},
    {"experiment", "runs"},
    {"experiment", "report_train_fn"},
    {"experiment", "report_validation_fn"},
    {"predict", "model"},
    {"predict", "data"},
    {"predict", "histogram_bins"},
    {"output", "model"},
    {"output", "predictions"},
    {"output", "histogram"},
    {"output", "report"},
    {"output", "summary"},
    {"output", "table"},
    {"output", "trace"},
};

const char* kPopulationKeys[] = {"file", "labels", "abnormal"};

bool known_key(const std::string& section, const std::string& key) {
    if (is_population_section(section)) {
        for (const char* k : kPopulationKeys)
            if (key == k) return true;
        return false;
    }
    for (const auto& [s, k] : kKnownKeys)
        if (section == s && key == k) return true;
    return false;
}

bool known_section(const std::string& section) {
    if (is_population_section(section)) return true;
    for (const auto& [s, k] : kKnownKeys)
        if (section == s) return true;
    return false;
}

std::optional<Mode> parse_mode(const std::string& s) {
    if (s == "train-nu") return Mode::train_nu;
    if (s == "train-c") return Mode::train_c;
    if (s == "train-universum") return Mode::train_universum;
    if (s == "model-select") return Mode::model_select;
    if (s == "benchmark") return Mode::benchmark;
    if (s == "predict") return Mode::predict;
    return std::nullopt;
}

std::optional<TrainerKind> parse_trainer(const std::string& s) {
    if (s == "nu") return TrainerKind::nu_single_class;
    if (s == "c") return TrainerKind::reflected;
    if (s == "universum") return TrainerKind::universum;
    if (s == "model-select") return TrainerKind::model_select;
    return std::nullopt;
}

} // namespace

std::string to_string(Mode mode) {
    switch (mode) {
    case Mode::train_nu: return "train-nu";
    case Mode::train_c: return "train-c";
    case Mode::train_universum: return "train-universum";
    case Mode::model_select: return "model-select";
    case Mode::benchmark: return "benchmark";
    case Mode::predict: return "predict";
    }
    return "?";
}

// ---- IniFile -----------------------------------------------------------

IniFile IniFile::parse(std::istream& in, const std::string& name) {
    IniFile file;
    file.name_ = name;
    std::string raw;
    int line_no = 0;
    Section* current = nullptr;
    std::vector<std::string> problems;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                problems.push_back(name + ":" + std::to_string(line_no) +
                                   ": unterminated section header");
                continue;
            }
            const std::string sec = trim(line.substr(1, line.size() - 2));
            if (sec.empty()) {
                problems.push_back(name + ":" + std::to_string(line_no) +
                                   ": empty section name");
                continue;
            }
            if (file.find_section(sec)) {
                problems.push_back(name + ":" + std::to_string(line_no) + ": duplicate section [" +
                                   sec + "]");
                continue;
            }
            file.sections_.push_back({sec, {}});
            current = &file.sections_.back();
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            problems.push_back(name + ":" + std::to_string(line_no) +
                               ": expected `key = value` or `[section]`");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            problems.push_back(name + ":" + std::to_string(line_no) + ": empty key");
            continue;
        }
        if (!current) {
            problems.push_back(name + ":" + std::to_string(line_no) + ": key `" + key +
                               "` appears before any [section]");
            continue;
        }
        bool dup = false;
        for (const Entry& e : current->entries)
            if (e.key == key) {
                problems.push_back(name + ":" + std::to_string(line_no) + ": duplicate key `" +
                                   key + "` in [" + current->name + "]");
                dup = true;
                break;
            }
        if (!dup) current->entries.push_back({key, value, line_no});
    }
    if (!problems.empty()) {
        std::string all;
        for (std::size_t i = 0; i < problems.size(); ++i) {
            if (i) all += '\n';
            all += problems[i];
        }
        throw ConfigError(all);
    }
    return file;
}

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    return parse(in, path);
}

IniFile::Section* IniFile::find_section(const std::string& name) {
    for (Section& s : sections_)
        if (s.name == name) return &s;
    return nullptr;
}

const IniFile::Section* IniFile::find_section(const std::string& name) const {
    for (const Section& s : sections_)
        if (s.name == name) return &s;
    return nullptr;
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    return get(section, key).has_value();
}

std::optional<std::string> IniFile::get(const std::string& section, const std::string& key) const {
    const Section* s = find_section(section);
    if (!s) return std::nullopt;
    for (const Entry& e : s->entries)
        if (e.key == key) return e.value;
    return std::nullopt;
}

int IniFile::line_of(const std::string& section, const std::string& key) const {
    const Section* s = find_section(section);
    if (!s) return 0;
    for (const Entry& e : s->entries)
        if (e.key == key) return e.line;
    return 0;
}

void IniFile::set(const std::string& section, const std::string& key, std::string value) {
    Section* s = find_section(section);
    if (!s) {
        sections_.push_back({section, {}});
        s = &sections_.back();
    }
    for (Entry& e : s->entries)
        if (e.key == key) {
            e.value = std::move(value);
            e.line = 0;
            return;
        }
    s->entries.push_back({key, std::move(value), 0});
}

std::vector<std::string> IniFile::section_names() const {
    std::vector<std::string> names;
    names.reserve(sections_.size());
    for (const Section& s : sections_) names.push_back(s.name);
    return names;
}

std::vector<std::string> IniFile::keys(const std::string& section) const {
    std::vector<std::string> out;
    if (const Section* s = find_section(section))
        for (const Entry& e : s->entries) out.push_back(e.key);
    return out;
}

// ---- environment overrides ----------------------------------------------

bool is_path_key(const std::string& section, const std::string& key) {
    if (section == "run") return key == "out_dir";
    if (section == "data")
        return key == "train" || key == "validation" || key == "universum" || key == "images" ||
               key == "labels" || key == "test_images" || key == "test_labels";
    if (section == "predict") return key == "model" || key == "data";
    if (section == "output") return known_key("output", key);
    if (is_population_section(section)) return key == "file";
    return false;
}

std::string env_var_name(const std::string& section, const std::string& key) {
    std::string name = "OCSVM_" + section + "_" + key;
    for (char& c : name)
        c = std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(
                                                              static_cast<unsigned char>(c)))
                                                        : '_';
    return name;
}

namespace {

void apply_env_overrides(IniFile& file) {
    for (const auto& [s, k] : kKnownKeys) {
        if (!is_path_key(s, k)) continue;
        if (const char* v = std::getenv(env_var_name(s, k).c_str())) file.set(s, k, v);
    }
    for (const std::string& section : file.section_names()) {
        if (!is_population_section(section)) continue;
        if (const char* v = std::getenv(env_var_name(section, "file").c_str()))
            file.set(section, "file", v);
    }
}

} // namespace

// ---- typed config ---------------------------------------------------------

namespace {

class Builder {
public:
    explicit Builder(const IniFile& file) : file_(file) {}

    void problem(const std::string& section, const std::string& key, const std::string& msg) {
        std::string loc = "[" + section + "] " + key;
        const int line = file_.line_of(section, key);
        if (line > 0) loc += " (" + file_.name() + ":" + std::to_string(line) + ")";
        problems_.push_back(loc + ": " + msg);
    }

    void problem(const std::string& msg) { problems_.push_back(msg); }

    bool take_string(const std::string& sec, const std::string& key, std::string& out) {
        if (auto v = file_.get(sec, key)) {
            out = *v;
            return true;
        }
        return false;
    }

    void take_double(const std::string& sec, const std::string& key, double& out) {
        if (auto v = file_.get(sec, key)) {
            if (!parse_f64(*v, out)) problem(sec, key, "not a number: `" + *v + "`");
        }
    }

    void take_count(const std::string& sec, const std::string& key, std::size_t& out) {
        if (auto v = file_.get(sec, key)) {
            unsigned long long u = 0;
            if (!parse_u64(*v, u))
                problem(sec, key, "not a nonnegative integer: `" + *v + "`");
            else
                out = static_cast<std::size_t>(u);
        }
    }

    void take_u64(const std::string& sec, const std::string& key, std::uint64_t& out) {
        if (auto v = file_.get(sec, key)) {
            unsigned long long u = 0;
            if (!parse_u64(*v, u))
                problem(sec, key, "not a nonnegative integer: `" + *v + "`");
            else
                out = u;
        }
    }

    void take_int(const std::string& sec, const std::string& key, int& out) {
        if (auto v = file_.get(sec, key)) {
            long long i = 0;
            if (!parse_i64(*v, i) || i < INT_MIN || i > INT_MAX)
                problem(sec, key, "not an integer: `" + *v + "`");
            else
                out = static_cast<int>(i);
        }
    }

    void take_bool(const std::string& sec, const std::string& key, bool& out) {
        if (auto v = file_.get(sec, key)) {
            if (!parse_flag(*v, out))
                problem(sec, key, "not a boolean (true/false): `" + *v + "`");
        }
    }

    void take_int_list(const std::string& sec, const std::string& key, std::vector<int>& out) {
        if (auto v = file_.get(sec, key)) {
            std::vector<int> values;
            for (const std::string& part : split_list(*v)) {
                long long i = 0;
                if (part.empty() || !parse_i64(part, i) || i < INT_MIN || i > INT_MAX) {
                    problem(sec, key, "not a comma-separated integer list: `" + *v + "`");
                    return;
                }
                values.push_back(static_cast<int>(i));
            }
            out = std::move(values);
        }
    }

    void take_double_list(const std::string& sec, const std::string& key,
                          std::vector<double>& out) {
        if (auto v = file_.get(sec, key)) {
            std::vector<double> values;
            for (const std::string& part : split_list(*v)) {
                double d = 0;
                if (part.empty() || !parse_f64(part, d)) {
                    problem(sec, key, "not a comma-separated number list: `" + *v + "`");
                    return;
                }
                values.push_back(d);
            }
            out = std::move(values);
        }
    }

    const std::vector<std::string>& problems() const { return problems_; }

private:
    const IniFile& file_;
    std::vector<std::string> problems_;
};

void check_grid(Builder& b, const std::string& sec, const std::string& key,
                const std::vector<double>& grid) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) {
            b.problem(sec, key, "entries must be > 0");
            return;
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            b.problem(sec, key, "entries must be strictly increasing");
            return;
        }
    }
}

} // namespace

RunConfig build_config(IniFile file, std::span<const Mode> allowed, const Overrides& overrides) {
    apply_env_overrides(file);

    Builder b(file);

    for (const std::string& raw : overrides.sets) {
        const std::size_t eq = raw.find('=');
        if (eq == std::string::npos) {
            b.problem("--set `" + raw + "`: expected section.key=value");
            continue;
        }
        const std::string target = trim(raw.substr(0, eq));
        const std::size_t dot = target.rfind('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == target.size()) {
            b.problem("--set `" + raw + "`: expected section.key=value");
            continue;
        }
        file.set(target.substr(0, dot), target.substr(dot + 1), trim(raw.substr(eq + 1)));
    }

    // reject unknown sections and keys before anything else
    for (const std::string& section : file.section_names()) {
        if (!known_section(section)) {
            b.problem("unknown section [" + section + "]");
            continue;
        }
        if (is_population_section(section) &&
            trim(section.substr(std::string(kPopulationPrefix).size())).empty())
            b.problem("population section needs a name: [population <name>]");
        for (const std::string& key : file.keys(section))
            if (!known_key(section, key)) b.problem(section, key, "unknown key");
    }

    RunConfig cfg;

    // ---- mode ----
    std::optional<Mode> mode;
    if (auto v = file.get("run", "mode")) {
        mode = parse_mode(*v);
        if (!mode) {
            b.problem("run", "mode", "unknown mode `" + *v + "`");
        } else if (std::find(allowed.begin(), allowed.end(), *mode) == allowed.end()) {
            std::string names;
            for (std::size_t i = 0; i < allowed.size(); ++i)
                names += (i ? ", " : "") + to_string(allowed[i]);
            b.problem("run", "mode", "mode " + to_string(*mode) +
                                         " is not valid here (expected " + names + ")");
            mode.reset();
        }
    } else if (allowed.size() == 1) {
        mode = allowed[0];
    } else {
        std::string names;
        for (std::size_t i = 0; i < allowed.size(); ++i)
            names += (i ? ", " : "") + to_string(allowed[i]);
        b.problem("[run] mode: required (one of " + names + ")");
    }

    // ---- generic sections ----
    b.take_u64("run", "seed", cfg.seed);
    b.take_int("run", "threads", cfg.threads);
    b.take_string("run", "out_dir", cfg.out_dir);

    b.take_string("data", "format", cfg.data.format);
    b.take_string("data", "train", cfg.data.train);
    b.take_string("data", "validation", cfg.data.validation);
    b.take_string("data", "universum", cfg.data.universum);
    b.take_string("data", "images", cfg.data.images);
    b.take_string("data", "labels", cfg.data.labels);
    b.take_string("data", "test_images", cfg.data.test_images);
    b.take_string("data", "test_labels", cfg.data.test_labels);
    b.take_int_list("data", "normal_labels", cfg.data.normal_labels);
    b.take_int_list("data", "universum_labels", cfg.data.universum_labels);

    if (auto v = file.get("model", "kernel")) {
        try {
            cfg.params.kernel = KernelSpec::parse(*v);
        } catch (const ConfigError& e) {
            b.problem("model", "kernel", e.what());
        }
    }
    b.take_double("model", "nu", cfg.params.nu);
    b.take_double("model", "c", cfg.params.c);
    b.take_double("model", "c_star", cfg.params.c_star);
    b.take_double("model", "epsilon", cfg.params.epsilon);

    b.take_double("solver", "tolerance", cfg.qp.tol);
    b.take_u64("solver", "max_iterations", cfg.qp.max_iter);

    b.take_double_list("selection", "ratios", cfg.selection.ratio_grid);
    b.take_double("selection", "fn_slack", cfg.selection.fn_slack);

    if (file.has("calibration", "target_train_fn") || file.has("calibration", "costs")) {
        cfg.calibration.enabled = true;
        if (!file.has("calibration", "target_train_fn"))
            b.problem("[calibration] target_train_fn: required when the section is present");
        b.take_double("calibration", "target_train_fn", cfg.calibration.target_train_fn);
        b.take_double_list("calibration", "costs", cfg.calibration.costs);
    }

    if (auto v = file.get("experiment", "trainer")) {
        if (auto t = parse_trainer(*v))
            cfg.experiment.trainer = *t;
        else
            b.problem("experiment", "trainer",
                      "unknown trainer `" + *v + "` (nu, c, universum, model-select)");
    }
    b.take_count("experiment", "n_train", cfg.experiment.n_train);
    b.take_count("experiment", "n_validation", cfg.experiment.n_validation);
    b.take_count("experiment", "n_universum", cfg.experiment.n_universum);
    b.take_count("experiment", "runs", cfg.experiment.runs);
    b.take_bool("experiment", "report_train_fn", cfg.experiment.report_train_fn);
    b.take_bool("experiment", "report_validation_fn", cfg.experiment.report_validation_fn);

    b.take_string("predict", "model", cfg.predict.model);
    b.take_string("predict", "data", cfg.predict.data);
    b.take_int("predict", "histogram_bins", cfg.predict.histogram_bins);

    b.take_string("output", "model", cfg.output.model);
    b.take_string("output", "predictions", cfg.output.predictions);
    b.take_string("output", "histogram", cfg.output.histogram);
    b.take_string("output", "report", cfg.output.report);
    b.take_string("output", "summary", cfg.output.summary);
    b.take_string("output", "table", cfg.output.table);
    b.take_string("output", "trace", cfg.output.trace);

    for (const std::string& section : file.section_names()) {
        if (!is_population_section(section)) continue;
        PopulationConfig pop;
        pop.name = trim(section.substr(std::string(kPopulationPrefix).size()));
        b.take_string(section, "file", pop.file);
        b.take_int_list(section, "labels", pop.labels);
        b.take_bool(section, "abnormal", pop.abnormal);
        cfg.populations.push_back(std::move(pop));
    }

    // ---- dedicated flags win over file and environment ----
    if (overrides.seed) cfg.seed = *overrides.seed;
    if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
    if (overrides.threads) cfg.threads = *overrides.threads;

    // ---- cross-field validation ----
    const bool idx = cfg.data.format == "idx";
    const bool sparse = cfg.data.format == "sparse";
    if (!idx && !sparse)
        b.problem("data", "format", "must be `sparse` or `idx`, got `" + cfg.data.format + "`");

    if (cfg.threads < 1) b.problem("run", "threads", "must be >= 1");
    if (!(cfg.qp.tol > 0.0)) b.problem("solver", "tolerance", "must be > 0");
    if (cfg.qp.max_iter < 1) b.problem("solver", "max_iterations", "must be >= 1");

    if (cfg.selection.ratio_grid.empty())
        b.problem("selection", "ratios", "must not be empty");
    else
        check_grid(b, "selection", "ratios", cfg.selection.ratio_grid);
    if (cfg.selection.fn_slack < 0.0 || cfg.selection.fn_slack >= 1.0)
        b.problem("selection", "fn_slack", "must be in [0, 1)");

    if (cfg.calibration.enabled) {
        if (cfg.calibration.target_train_fn < 0.0 || cfg.calibration.target_train_fn >= 1.0)
            b.problem("calibration", "target_train_fn", "must be in [0, 1)");
        check_grid(b, "calibration", "costs", cfg.calibration.costs);
    }

    if (sparse) {
        for (const char* key : {"images", "labels", "test_images", "test_labels"})
            if (file.has("data", key)) b.problem("data", key, "only meaningful with format=idx");
        if (!cfg.data.normal_labels.empty())
            b.problem("data", "normal_labels", "only meaningful with format=idx");
        if (!cfg.data.universum_labels.empty())
            b.problem("data", "universum_labels", "only meaningful with format=idx");
    }
    if (idx) {
        for (const char* key : {"train", "validation", "universum"})
            if (file.has("data", key))
                b.problem("data", key, "only meaningful with format=sparse");
        if (cfg.data.images.empty()) b.problem("[data] images: required with format=idx");
        if (cfg.data.labels.empty()) b.problem("[data] labels: required with format=idx");
        if (cfg.data.test_images.empty() != cfg.data.test_labels.empty())
            b.problem("[data] test_images and test_labels must be given together");
    }

    if (!mode) {
        if (!b.problems().empty()) {
            std::string all;
            for (std::size_t i = 0; i < b.problems().size(); ++i) {
                if (i) all += '\n';
                all += b.problems()[i];
            }
            throw ConfigError(all);
        }
        throw ConfigError("mode could not be resolved"); // unreachable
    }
    cfg.mode = *mode;

    // ---- mode-specific validation ----
    auto require_train_source = [&] {
        if (sparse && cfg.data.train.empty()) b.problem("[data] train: required");
        if (idx && cfg.data.normal_labels.empty())
            b.problem("[data] normal_labels: required with format=idx");
    };
    auto require_universum_source = [&] {
        if (sparse && cfg.data.universum.empty()) b.problem("[data] universum: required");
        if (idx && cfg.data.universum_labels.empty())
            b.problem("[data] universum_labels: required with format=idx");
    };
    auto require_cost = [&] {
        if (!file.has("model", "c"))
            b.problem("[model] c: required");
        else if (!(cfg.params.c > 0.0))
            b.problem("model", "c", "must be > 0");
    };

    // sections that only one mode reads
    auto reject_section = [&](const std::string& section, const std::string& owner) {
        for (const std::string& name : file.section_names())
            if (name == section)
                b.problem("section [" + section + "] applies to " + owner + " only");
    };
    if (cfg.mode != Mode::benchmark) {
        reject_section("experiment", "benchmark mode");
        reject_section("calibration", "benchmark mode");
        for (const std::string& name : file.section_names())
            if (is_population_section(name))
                b.problem("section [" + name + "] applies to benchmark mode only");
    }
    if (cfg.mode != Mode::model_select && cfg.mode != Mode::benchmark)
        reject_section("selection", "model-select and benchmark modes");
    if (cfg.mode != Mode::predict) reject_section("predict", "predict mode");

    switch (cfg.mode) {
    case Mode::train_nu:
        require_train_source();
        if (!file.has("model", "nu"))
            b.problem("[model] nu: required");
        else if (!(cfg.params.nu > 0.0 && cfg.params.nu <= 1.0))
            b.problem("model", "nu", "must be in (0, 1]");
        break;
    case Mode::train_c:
        require_train_source();
        require_cost();
        break;
    case Mode::train_universum:
        require_train_source();
        require_universum_source();
        require_cost();
        if (!file.has("model", "c_star"))
            b.problem("[model] c_star: required");
        else if (cfg.params.c_star < 0.0)
            b.problem("model", "c_star", "must be >= 0");
        if (cfg.params.epsilon < 0.0) b.problem("model", "epsilon", "must be >= 0");
        break;
    case Mode::model_select:
        if (idx) b.problem("data", "format", "model-select mode reads sparse files only");
        if (cfg.data.train.empty()) b.problem("[data] train: required");
        if (cfg.data.validation.empty()) b.problem("[data] validation: required");
        if (cfg.data.universum.empty()) b.problem("[data] universum: required");
        require_cost();
        if (cfg.params.epsilon < 0.0) b.problem("model", "epsilon", "must be >= 0");
        break;
    case Mode::predict:
        if (cfg.predict.model.empty()) b.problem("[predict] model: required");
        if (cfg.predict.data.empty()) b.problem("[predict] data: required");
        if (cfg.predict.histogram_bins < 1)
            b.problem("predict", "histogram_bins", "must be >= 1");
        break;
    case Mode::benchmark: {
        require_train_source();
        if (cfg.experiment.n_train < 1) b.problem("[experiment] n_train: required and >= 1");
        if (cfg.experiment.runs < 1) b.problem("experiment", "runs", "must be >= 1");
        const TrainerKind t = cfg.experiment.trainer;
        if (t == TrainerKind::nu_single_class) {
            if (!file.has("model", "nu"))
                b.problem("[model] nu: required for trainer=nu");
            else if (!(cfg.params.nu > 0.0 && cfg.params.nu <= 1.0))
                b.problem("model", "nu", "must be in (0, 1]");
            if (cfg.calibration.enabled)
                b.problem("[calibration] does not apply to trainer=nu");
        } else if (!cfg.calibration.enabled) {
            require_cost();
        }
        if (t == TrainerKind::universum) {
            require_universum_source();
            if (!file.has("model", "c_star"))
                b.problem("[model] c_star: required for trainer=universum");
            else if (cfg.params.c_star < 0.0)
                b.problem("model", "c_star", "must be >= 0");
        }
        if (t == TrainerKind::model_select) {
            require_universum_source();
            if (cfg.experiment.n_validation < 1)
                b.problem("[experiment] n_validation: required and >= 1 for trainer=model-select");
        }
        if (cfg.populations.empty())
            b.problem("benchmark mode needs at least one [population <name>] section");
        for (const PopulationConfig& pop : cfg.populations) {
            const std::string section = std::string(kPopulationPrefix) + pop.name;
            const bool has_file = !pop.file.empty();
            const bool has_labels = !pop.labels.empty();
            if (has_file == has_labels)
                b.problem("[" + section + "]: set exactly one of `file` and `labels`");
            if (has_labels && !idx)
                b.problem(section, "labels", "label selection requires format=idx");
            if (has_labels && cfg.data.test_images.empty())
                b.problem(section, "labels",
                          "label selection requires [data] test_images and test_labels");
        }
        for (std::size_t i = 0; i < cfg.populations.size(); ++i)
            for (std::size_t j = i + 1; j < cfg.populations.size(); ++j)
                if (cfg.populations[i].name == cfg.populations[j].name)
                    b.problem("duplicate population name `" + cfg.populations[i].name + "`");
        break;
    }
    }

    if (!b.problems().empty()) {
        std::string all;
        for (std::size_t i = 0; i < b.problems().size(); ++i) {
            if (i) all += '\n';
            all += b.problems()[i];
        }
        throw ConfigError(all);
    }
    return cfg;
}

} // namespace ocsvm::cli
