#include "ocsvm/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "text_util.hpp"

namespace ocsvm {

using detail::fmt_double;
using detail::fnv1a64;

namespace {

constexpr double kPruneTol = 1e-12;
constexpr double kBiasTol = 1e-6;

double parse_double(const std::string& tok, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw DataError(std::string("model file: bad ") + what + " value '" + tok + "'");
    return v;
}

long long parse_int(const std::string& tok, const char* what) {
    char* end = nullptr;
    const long long v = std::strtoll(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0')
        throw DataError(std::string("model file: bad ") + what + " value '" + tok + "'");
    return v;
}

} // namespace

std::string to_string(Provenance p) {
    switch (p) {
    case Provenance::nu_single_class: return "nu_single_class";
    case Provenance::reflected_single_class: return "reflected_single_class";
    case Provenance::universum_single_class: return "universum_single_class";
    }
    throw ConfigError("to_string: bad provenance value");
}

Provenance parse_provenance(const std::string& text) {
    if (text == "nu_single_class") return Provenance::nu_single_class;
    if (text == "reflected_single_class") return Provenance::reflected_single_class;
    if (text == "universum_single_class") return Provenance::universum_single_class;
    throw DataError("unknown provenance '" + text + "'");
}

OneClassModel::OneClassModel(Provenance provenance, HyperParams params, Dataset base,
                             std::vector<SignedIndex> indices,
                             std::vector<double> coefficients, double bias, double threshold)
    : provenance_(provenance), params_(std::move(params)), bias_(bias), threshold_(threshold) {
    if (indices.size() != coefficients.size())
        throw ConfigError("OneClassModel: " + std::to_string(indices.size()) + " indices vs " +
                          std::to_string(coefficients.size()) + " coefficients");
    if (!(threshold_ > 0.0))
        throw ConfigError("OneClassModel: threshold must be > 0, got " +
                          std::to_string(threshold_));
    if (provenance_ != Provenance::nu_single_class && std::abs(bias_) > kBiasTol)
        throw ConfigError("OneClassModel: offset " + std::to_string(bias_) +
                          " exceeds the zero-offset guarantee for this trainer");
    for (const SignedIndex& si : indices) {
        if (si.index >= base.size())
            throw ConfigError("OneClassModel: coefficient index " + std::to_string(si.index) +
                              " out of range for " + std::to_string(base.size()) +
                              " base samples");
        if (si.sign != 1 && si.sign != -1)
            throw ConfigError("OneClassModel: coefficient sign must be +1 or -1");
    }

    // Prune negligible coefficients, then keep only the referenced base rows.
    std::vector<std::size_t> kept_rows;
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
        if (std::abs(coefficients[k]) <= kPruneTol) continue;
        kept_rows.push_back(indices[k].index);
    }
    std::sort(kept_rows.begin(), kept_rows.end());
    kept_rows.erase(std::unique(kept_rows.begin(), kept_rows.end()), kept_rows.end());
    base_ = base.take(kept_rows);
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
        if (std::abs(coefficients[k]) <= kPruneTol) continue;
        const auto it = std::lower_bound(kept_rows.begin(), kept_rows.end(), indices[k].index);
        indices_.push_back({static_cast<std::size_t>(it - kept_rows.begin()), indices[k].sign});
        coefficients_.push_back(coefficients[k]);
    }

    if (params_.kernel.family() == KernelFamily::linear) {
        linear_w_.assign(base_.dim(), 0.0);
        for (std::size_t k = 0; k < coefficients_.size(); ++k) {
            const double beta = coefficients_[k];
            const FeatureView row = base_.row(indices_[k].index);
            if (row.is_sparse()) {
                for (const SparseEntry& cell : row.cells())
                    linear_w_[static_cast<std::size_t>(cell.col)] += beta * cell.value;
            } else {
                const auto vals = row.dense_values();
                for (std::size_t d = 0; d < vals.size(); ++d) linear_w_[d] += beta * vals[d];
            }
        }
    }
}

double OneClassModel::decision_value(const FeatureView& x) const {
    if (x.dim() != base_.dim())
        throw DataError("decision_value: sample dimension " + std::to_string(x.dim()) +
                        " does not match model dimension " + std::to_string(base_.dim()));
    if (params_.kernel.family() == KernelFamily::linear)
        return x.dot(FeatureView::of_dense(linear_w_)) + bias_;
    double f = bias_;
    for (std::size_t k = 0; k < coefficients_.size(); ++k)
        f += coefficients_[k] * eval_kernel(params_.kernel, base_.row(indices_[k].index), x);
    return f;
}

std::vector<double> OneClassModel::decision_values(const Dataset& samples) const {
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = decision_value(samples.row(i));
    return out;
}

std::vector<int> OneClassModel::predict(const Dataset& samples) const {
    std::vector<int> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = predict(samples.row(i));
    return out;
}

// ---- serialization ------------------------------------------------------

void OneClassModel::save(std::ostream& out) const {
    std::ostringstream body;
    body << "ocsvm-model 1\n";
    body << "provenance " << to_string(provenance_) << '\n';
    body << "kernel " << params_.kernel.to_string() << '\n';
    body << "nu " << fmt_double(params_.nu) << '\n';
    body << "c " << fmt_double(params_.c) << '\n';
    body << "c_star " << fmt_double(params_.c_star) << '\n';
    body << "epsilon " << fmt_double(params_.epsilon) << '\n';
    body << "bias " << fmt_double(bias_) << '\n';
    body << "threshold " << fmt_double(threshold_) << '\n';
    body << "base " << base_.size() << ' ' << base_.dim() << ' '
         << (base_.is_sparse() ? "sparse" : "dense") << '\n';
    for (std::size_t i = 0; i < base_.size(); ++i) {
        const FeatureView row = base_.row(i);
        if (row.is_sparse()) {
            bool first = true;
            for (const SparseEntry& cell : row.cells()) {
                if (!first) body << ' ';
                body << cell.col << ':' << fmt_double(cell.value);
                first = false;
            }
        } else {
            const auto vals = row.dense_values();
            for (std::size_t d = 0; d < vals.size(); ++d) {
                if (d) body << ' ';
                body << fmt_double(vals[d]);
            }
        }
        body << '\n';
    }
    body << "coefficients " << coefficients_.size() << '\n';
    for (std::size_t k = 0; k < coefficients_.size(); ++k)
        body << indices_[k].index << ' ' << indices_[k].sign << ' '
             << fmt_double(coefficients_[k]) << '\n';
    const std::string payload = body.str();
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(payload)));
    out << payload << "checksum fnv1a64 " << hex << '\n';
}

namespace {

std::string take_line(std::istringstream& in, const char* what) {
    std::string line;
    if (!std::getline(in, line)) throw DataError(std::string("model file: missing ") + what);
    return line;
}

// Splits "key value..." and checks the key.
std::string keyed_value(std::istringstream& in, const char* key) {
    const std::string line = take_line(in, key);
    const std::string prefix = std::string(key) + " ";
    if (line.rfind(prefix, 0) != 0)
        throw DataError("model file: expected '" + std::string(key) + " ...', got '" + line + "'");
    return line.substr(prefix.size());
}

} // namespace

OneClassModel OneClassModel::load(std::istream& in) {
    std::ostringstream slurp;
    slurp << in.rdbuf();
    std::string text = slurp.str();

    // Verify the trailing checksum line first, over all bytes before it.
    if (!text.empty() && text.back() == '\n') text.pop_back();
    const std::size_t nl = text.rfind('\n');
    if (nl == std::string::npos) throw DataError("model file: truncated");
    const std::string check_line = text.substr(nl + 1);
    const std::string payload = text.substr(0, nl + 1);
    std::istringstream check(check_line);
    std::string word, algo, hex;
    check >> word >> algo >> hex;
    if (word != "checksum" || algo != "fnv1a64" || hex.size() != 16)
        throw DataError("model file: missing checksum trailer");
    char expect[17];
    std::snprintf(expect, sizeof(expect), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(payload)));
    if (hex != expect)
        throw DataError("model file: checksum mismatch (stored " + hex + ", computed " +
                        expect + ")");

    std::istringstream body(payload);
    const std::string header = take_line(body, "header");
    if (header != "ocsvm-model 1")
        throw DataError("model file: unsupported format '" + header + "'");

    const Provenance provenance = parse_provenance(keyed_value(body, "provenance"));
    HyperParams params;
    params.kernel = KernelSpec::parse(keyed_value(body, "kernel"));
    params.nu = parse_double(keyed_value(body, "nu"), "nu");
    params.c = parse_double(keyed_value(body, "c"), "c");
    params.c_star = parse_double(keyed_value(body, "c_star"), "c_star");
    params.epsilon = parse_double(keyed_value(body, "epsilon"), "epsilon");
    const double bias = parse_double(keyed_value(body, "bias"), "bias");
    const double threshold = parse_double(keyed_value(body, "threshold"), "threshold");

    std::istringstream base_head(keyed_value(body, "base"));
    long long n = -1, dim = -1;
    std::string kind;
    base_head >> n >> dim >> kind;
    if (n < 0 || dim < 0 || (kind != "dense" && kind != "sparse"))
        throw DataError("model file: bad base header");
    Dataset base;
    if (kind == "dense") {
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(n * dim));
        for (long long i = 0; i < n; ++i) {
            std::istringstream row(take_line(body, "base row"));
            std::string tok;
            long long got = 0;
            while (row >> tok) {
                values.push_back(parse_double(tok, "base value"));
                ++got;
            }
            if (got != dim)
                throw DataError("model file: base row " + std::to_string(i) + " has " +
                                std::to_string(got) + " values, expected " + std::to_string(dim));
        }
        base = Dataset::dense(static_cast<std::size_t>(dim), std::move(values));
    } else {
        std::vector<std::size_t> offsets{0};
        std::vector<SparseEntry> cells;
        for (long long i = 0; i < n; ++i) {
            std::istringstream row(take_line(body, "base row"));
            std::string tok;
            while (row >> tok) {
                const std::size_t colon = tok.find(':');
                if (colon == std::string::npos)
                    throw DataError("model file: bad cell '" + tok + "' in base row " +
                                    std::to_string(i));
                const long long col = parse_int(tok.substr(0, colon), "cell column");
                const double val = parse_double(tok.substr(colon + 1), "cell value");
                cells.push_back({static_cast<std::int32_t>(col), val});
            }
            offsets.push_back(cells.size());
        }
        base = Dataset::sparse(static_cast<std::size_t>(dim), std::move(offsets),
                               std::move(cells));
    }

    const long long n_coeff = parse_int(keyed_value(body, "coefficients"), "coefficient count");
    if (n_coeff < 0) throw DataError("model file: negative coefficient count");
    std::vector<SignedIndex> indices;
    std::vector<double> coefficients;
    for (long long k = 0; k < n_coeff; ++k) {
        std::istringstream row(take_line(body, "coefficient"));
        std::string idx_tok, sign_tok, beta_tok;
        if (!(row >> idx_tok >> sign_tok >> beta_tok))
            throw DataError("model file: short coefficient line " + std::to_string(k));
        indices.push_back({static_cast<std::size_t>(parse_int(idx_tok, "coefficient index")),
                           static_cast<int>(parse_int(sign_tok, "coefficient sign"))});
        coefficients.push_back(parse_double(beta_tok, "coefficient"));
    }

    return OneClassModel(provenance, std::move(params), std::move(base), std::move(indices),
                         std::move(coefficients), bias, threshold);
}

void OneClassModel::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    save(out);
    out.flush();
    if (!out) throw DataError("write failed for '" + path + "'");
}

OneClassModel OneClassModel::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    return load(in);
}

} // namespace ocsvm
