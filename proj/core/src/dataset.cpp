#include "ocsvm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ocsvm/rng.hpp"
#include "text_util.hpp"

namespace ocsvm {

using detail::fmt_double;

// ---- FeatureView -------------------------------------------------------

double FeatureView::dot(const FeatureView& other) const {
    if (dim_ != other.dim_)
        throw DataError("dot: dimension mismatch (" + std::to_string(dim_) + " vs " +
                        std::to_string(other.dim_) + ")");
    if (!sparse_ && !other.sparse_) {
        double s = 0.0;
        const double* a = dense_.data();
        const double* b = other.dense_.data();
        for (std::size_t k = 0; k < dim_; ++k) s += a[k] * b[k];
        return s;
    }
    if (sparse_ && other.sparse_) {
        double s = 0.0;
        auto a = cells_;
        auto b = other.cells_;
        std::size_t i = 0, j = 0;
        while (i < a.size() && j < b.size()) {
            if (a[i].col == b[j].col) {
                s += a[i].value * b[j].value;
                ++i;
                ++j;
            } else if (a[i].col < b[j].col) {
                ++i;
            } else {
                ++j;
            }
        }
        return s;
    }
    const FeatureView& sp = sparse_ ? *this : other;
    const FeatureView& de = sparse_ ? other : *this;
    double s = 0.0;
    for (const SparseEntry& c : sp.cells_) s += c.value * de.dense_[static_cast<std::size_t>(c.col)];
    return s;
}

double FeatureView::squared_norm() const {
    double s = 0.0;
    if (sparse_) {
        for (const SparseEntry& c : cells_) s += c.value * c.value;
    } else {
        for (double v : dense_) s += v * v;
    }
    return s;
}

double FeatureView::squared_distance(const FeatureView& other) const {
    if (dim_ != other.dim_)
        throw DataError("squared_distance: dimension mismatch (" + std::to_string(dim_) +
                        " vs " + std::to_string(other.dim_) + ")");
    if (!sparse_ && !other.sparse_) {
        double s = 0.0;
        const double* a = dense_.data();
        const double* b = other.dense_.data();
        for (std::size_t k = 0; k < dim_; ++k) {
            const double d = a[k] - b[k];
            s += d * d;
        }
        return s;
    }
    const double s = squared_norm() + other.squared_norm() - 2.0 * dot(other);
    return s < 0.0 ? 0.0 : s;
}

// ---- Dataset -----------------------------------------------------------

Dataset Dataset::dense(std::size_t dim, std::vector<double> row_major,
                       std::vector<int> labels, std::string meta) {
    if (dim == 0 && !row_major.empty())
        throw DataError("Dataset::dense: zero dimension with nonempty rows");
    if (dim != 0 && row_major.size() % dim != 0)
        throw DataError("Dataset::dense: row buffer size " + std::to_string(row_major.size()) +
                        " is not a multiple of dimension " + std::to_string(dim));
    Dataset d;
    d.n_ = dim == 0 ? 0 : row_major.size() / dim;
    d.dim_ = dim;
    d.sparse_ = false;
    d.dense_ = std::move(row_major);
    if (!labels.empty() && labels.size() != d.n_)
        throw DataError("Dataset::dense: " + std::to_string(labels.size()) + " labels for " +
                        std::to_string(d.n_) + " samples");
    d.labels_ = std::move(labels);
    d.meta_ = std::move(meta);
    return d;
}

Dataset Dataset::sparse(std::size_t dim, std::vector<std::size_t> row_offsets,
                        std::vector<SparseEntry> cells, std::vector<int> labels,
                        std::string meta) {
    if (row_offsets.empty() || row_offsets.front() != 0 || row_offsets.back() != cells.size())
        throw DataError("Dataset::sparse: malformed row offsets");
    for (std::size_t i = 1; i < row_offsets.size(); ++i)
        if (row_offsets[i] < row_offsets[i - 1])
            throw DataError("Dataset::sparse: decreasing row offsets");
    for (const SparseEntry& c : cells)
        if (c.col < 0 || static_cast<std::size_t>(c.col) >= dim)
            throw DataError("Dataset::sparse: column " + std::to_string(c.col) +
                            " outside dimension " + std::to_string(dim));
    Dataset d;
    d.n_ = row_offsets.size() - 1;
    d.dim_ = dim;
    d.sparse_ = true;
    d.offsets_ = std::move(row_offsets);
    d.cells_ = std::move(cells);
    if (!labels.empty() && labels.size() != d.n_)
        throw DataError("Dataset::sparse: " + std::to_string(labels.size()) + " labels for " +
                        std::to_string(d.n_) + " samples");
    d.labels_ = std::move(labels);
    d.meta_ = std::move(meta);
    return d;
}

FeatureView Dataset::row(std::size_t i) const {
    if (i >= n_) throw DataError("Dataset::row: index " + std::to_string(i) + " out of range");
    if (sparse_) {
        const std::size_t begin = offsets_[i];
        const std::size_t end = offsets_[i + 1];
        return FeatureView::of_sparse({cells_.data() + begin, end - begin}, dim_);
    }
    return FeatureView::of_dense({dense_.data() + i * dim_, dim_});
}

Dataset Dataset::take(std::span<const std::size_t> indices) const {
    for (std::size_t i : indices)
        if (i >= n_) throw DataError("Dataset::take: index " + std::to_string(i) + " out of range");
    std::vector<int> labels;
    if (has_labels()) {
        labels.reserve(indices.size());
        for (std::size_t i : indices) labels.push_back(labels_[i]);
    }
    if (!sparse_) {
        std::vector<double> rows;
        rows.reserve(indices.size() * dim_);
        for (std::size_t i : indices)
            rows.insert(rows.end(), dense_.begin() + static_cast<std::ptrdiff_t>(i * dim_),
                        dense_.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_));
        return Dataset::dense(dim_, std::move(rows), std::move(labels), meta_);
    }
    std::vector<std::size_t> offsets{0};
    std::vector<SparseEntry> cells;
    for (std::size_t i : indices) {
        cells.insert(cells.end(), cells_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]),
                     cells_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]));
        offsets.push_back(cells.size());
    }
    return Dataset::sparse(dim_, std::move(offsets), std::move(cells), std::move(labels), meta_);
}

Dataset Dataset::concat(const Dataset& a, const Dataset& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.dim_ != b.dim_)
        throw DataError("Dataset::concat: dimension mismatch (" + std::to_string(a.dim_) +
                        " vs " + std::to_string(b.dim_) + ")");
    if (a.sparse_ != b.sparse_)
        throw DataError("Dataset::concat: cannot mix dense and sparse datasets");
    std::vector<int> labels;
    if (a.has_labels() && b.has_labels()) {
        labels = a.labels_;
        labels.insert(labels.end(), b.labels_.begin(), b.labels_.end());
    }
    if (!a.sparse_) {
        std::vector<double> rows = a.dense_;
        rows.insert(rows.end(), b.dense_.begin(), b.dense_.end());
        return Dataset::dense(a.dim_, std::move(rows), std::move(labels), a.meta_);
    }
    std::vector<std::size_t> offsets = a.offsets_;
    std::vector<SparseEntry> cells = a.cells_;
    for (std::size_t i = 1; i < b.offsets_.size(); ++i) offsets.push_back(b.offsets_[i] + a.cells_.size());
    cells.insert(cells.end(), b.cells_.begin(), b.cells_.end());
    return Dataset::sparse(a.dim_, std::move(offsets), std::move(cells), std::move(labels), a.meta_);
}

// ---- IDX loading -------------------------------------------------------

namespace {

std::uint32_t read_be_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw DataError(path + ": truncated header");
    return (static_cast<std::uint32_t>(b[0]) << 24) | (static_cast<std::uint32_t>(b[1]) << 16) |
           (static_cast<std::uint32_t>(b[2]) << 8) | static_cast<std::uint32_t>(b[3]);
}

} // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw DataError(images_path + ": cannot open");
    const std::uint32_t img_magic = read_be_u32(img, images_path);
    if (img_magic != 0x00000803u)
        throw DataError(images_path + ": bad magic " + std::to_string(img_magic) +
                        " (expected 2051 for an IDX image file)");
    const std::uint32_t n_images = read_be_u32(img, images_path);
    const std::uint32_t rows = read_be_u32(img, images_path);
    const std::uint32_t cols = read_be_u32(img, images_path);

    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw DataError(labels_path + ": cannot open");
    const std::uint32_t lab_magic = read_be_u32(lab, labels_path);
    if (lab_magic != 0x00000801u)
        throw DataError(labels_path + ": bad magic " + std::to_string(lab_magic) +
                        " (expected 2049 for an IDX label file)");
    const std::uint32_t n_labels = read_be_u32(lab, labels_path);

    if (n_images != n_labels)
        throw DataError("IDX count mismatch: " + std::to_string(n_images) + " images in " +
                        images_path + " vs " + std::to_string(n_labels) + " labels in " +
                        labels_path);

    const std::size_t dim = static_cast<std::size_t>(rows) * cols;
    std::vector<unsigned char> raw(static_cast<std::size_t>(n_images) * dim);
    img.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(img.gcount()) != raw.size())
        throw DataError(images_path + ": truncated image data (expected " +
                        std::to_string(raw.size()) + " bytes, got " +
                        std::to_string(img.gcount()) + ")");

    std::vector<unsigned char> raw_labels(n_labels);
    lab.read(reinterpret_cast<char*>(raw_labels.data()), static_cast<std::streamsize>(raw_labels.size()));
    if (static_cast<std::size_t>(lab.gcount()) != raw_labels.size())
        throw DataError(labels_path + ": truncated label data (expected " +
                        std::to_string(raw_labels.size()) + " bytes, got " +
                        std::to_string(lab.gcount()) + ")");

    std::vector<double> pixels(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) pixels[i] = raw[i] / 255.0;
    std::vector<int> labels(raw_labels.begin(), raw_labels.end());
    return Dataset::dense(dim, std::move(pixels), std::move(labels), images_path);
}

// ---- sparse text loading ----------------------------------------------

Dataset load_sparse(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(path + ": cannot open");

    std::vector<std::size_t> offsets{0};
    std::vector<SparseEntry> cells;
    std::vector<int> labels;
    std::int64_t declared_dim = -1;
    std::int32_t max_col = 0; // 1-based

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            std::istringstream hs(line.substr(first + 1));
            std::string word;
            if (hs >> word && word == "dim") {
                std::int64_t d;
                if (!(hs >> d) || d <= 0)
                    throw DataError(path + ":" + std::to_string(line_no) +
                                    ": malformed dimension header");
                declared_dim = d;
            }
            continue;
        }
        std::istringstream ls(line);
        long label;
        if (!(ls >> label))
            throw DataError(path + ":" + std::to_string(line_no) + ": missing label");
        labels.push_back(static_cast<int>(label));

        std::int32_t prev = 0;
        std::string tok;
        while (ls >> tok) {
            const std::size_t colon = tok.find(':');
            if (colon == std::string::npos)
                throw DataError(path + ":" + std::to_string(line_no) + ": malformed entry '" +
                                tok + "' (expected idx:val)");
            std::int64_t idx;
            double val;
            try {
                std::size_t used;
                idx = std::stoll(tok.substr(0, colon), &used);
                if (used != colon) throw std::invalid_argument("");
                const std::string vs = tok.substr(colon + 1);
                val = std::stod(vs, &used);
                if (used != vs.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw DataError(path + ":" + std::to_string(line_no) + ": malformed entry '" +
                                tok + "'");
            }
            if (idx < 1)
                throw DataError(path + ":" + std::to_string(line_no) + ": index " +
                                std::to_string(idx) + " must be >= 1");
            if (idx <= prev)
                throw DataError(path + ":" + std::to_string(line_no) + ": index " +
                                std::to_string(idx) + " not strictly increasing after " +
                                std::to_string(prev));
            prev = static_cast<std::int32_t>(idx);
            max_col = std::max(max_col, prev);
            cells.push_back({prev - 1, val});
        }
        offsets.push_back(cells.size());
    }

    std::size_t dim;
    if (declared_dim >= 0) {
        if (max_col > declared_dim)
            throw DataError(path + ": index " + std::to_string(max_col) +
                            " exceeds declared dimension " + std::to_string(declared_dim));
        dim = static_cast<std::size_t>(declared_dim);
    } else {
        dim = static_cast<std::size_t>(max_col);
    }
    return Dataset::sparse(dim, std::move(offsets), std::move(cells), std::move(labels), path);
}

void write_csv(std::ostream& out, const Dataset& data) {
    if (data.is_sparse()) throw DataError("write_csv: dense datasets only");
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.has_labels()) out << data.label(i) << (data.dim() ? "," : "");
        const auto vals = data.row(i).dense_values();
        for (std::size_t j = 0; j < vals.size(); ++j) {
            if (j) out << ',';
            out << fmt_double(vals[j]);
        }
        out << '\n';
    }
}

void write_sparse(std::ostream& out, const Dataset& data) {
    out << "# dim " << data.dim() << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << (data.has_labels() ? data.label(i) : 0);
        const FeatureView row = data.row(i);
        if (row.is_sparse()) {
            for (const SparseEntry& cell : row.cells())
                out << ' ' << cell.col + 1 << ':' << fmt_double(cell.value);
        } else {
            const auto vals = row.dense_values();
            for (std::size_t j = 0; j < vals.size(); ++j)
                if (vals[j] != 0.0) out << ' ' << j + 1 << ':' << fmt_double(vals[j]);
        }
        out << '\n';
    }
}

// ---- splitting ---------------------------------------------------------

Split split(const Dataset& data, const SplitSpec& spec) {
    if (spec.n_train + spec.n_validation > data.size())
        throw DataError("split: n_train + n_validation = " +
                        std::to_string(spec.n_train + spec.n_validation) + " exceeds " +
                        std::to_string(data.size()) + " samples");
    std::vector<std::size_t> perm(data.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    Rng rng(spec.seed);
    rng.shuffle(perm);
    const std::span<const std::size_t> all(perm);
    Split out;
    out.train = data.take(all.subspan(0, spec.n_train));
    out.validation = data.take(all.subspan(spec.n_train, spec.n_validation));
    out.rest = data.take(all.subspan(spec.n_train + spec.n_validation));
    return out;
}

Dataset filter_by_label(const Dataset& data, std::span<const int> keep) {
    if (!data.has_labels()) throw DataError("filter_by_label: dataset has no labels");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < data.size(); ++i)
        if (std::find(keep.begin(), keep.end(), data.label(i)) != keep.end()) idx.push_back(i);
    return data.take(idx);
}

Dataset subsample(const Dataset& data, std::size_t count, std::uint64_t seed) {
    if (count >= data.size()) return data;
    std::vector<std::size_t> perm(data.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    Rng rng(seed);
    rng.shuffle(perm);
    perm.resize(count);
    return data.take(perm);
}

// ---- synthetic gaussians ------------------------------------------------

namespace {

// Lower Cholesky factor tolerant of positive semidefinite input: zero pivots
// are allowed when the rest of their column is consistently zero.
std::vector<double> psd_cholesky(const std::vector<double>& cov, std::size_t d) {
    std::vector<double> L(d * d, 0.0);
    double scale = 0.0;
    for (std::size_t i = 0; i < d; ++i) scale = std::max(scale, std::abs(cov[i * d + i]));
    const double tol = 1e-10 * std::max(scale, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        double diag = cov[j * d + j];
        for (std::size_t k = 0; k < j; ++k) diag -= L[j * d + k] * L[j * d + k];
        if (diag < -tol)
            throw DataError("synth_gaussian: covariance is not positive semidefinite (pivot " +
                            std::to_string(diag) + " at " + std::to_string(j) + ")");
        if (diag <= tol) {
            for (std::size_t i = j + 1; i < d; ++i) {
                double rest = cov[i * d + j];
                for (std::size_t k = 0; k < j; ++k) rest -= L[i * d + k] * L[j * d + k];
                if (std::abs(rest) > 1e-8 * std::max(scale, 1.0))
                    throw DataError("synth_gaussian: covariance is not positive semidefinite "
                                    "(rank-deficient column " + std::to_string(j) +
                                    " with nonzero remainder)");
            }
            continue; // column of L stays zero
        }
        L[j * d + j] = std::sqrt(diag);
        for (std::size_t i = j + 1; i < d; ++i) {
            double v = cov[i * d + j];
            for (std::size_t k = 0; k < j; ++k) v -= L[i * d + k] * L[j * d + k];
            L[i * d + j] = v / L[j * d + j];
        }
    }
    return L;
}

} // namespace

Dataset synth_gaussian(std::span<const GaussianComponent> components, std::uint64_t seed) {
    if (components.empty()) return {};
    const std::size_t d = components.front().mean.size();
    for (const GaussianComponent& c : components) {
        if (c.mean.size() != d)
            throw DataError("synth_gaussian: component dimension mismatch (" +
                            std::to_string(c.mean.size()) + " vs " + std::to_string(d) + ")");
        if (c.covariance.size() != d * d)
            throw DataError("synth_gaussian: covariance must be dim x dim");
    }
    Rng rng(seed);
    std::vector<double> rows;
    std::vector<int> labels;
    std::vector<double> z(d);
    for (const GaussianComponent& c : components) {
        const std::vector<double> L = psd_cholesky(c.covariance, d);
        for (std::size_t s = 0; s < c.count; ++s) {
            for (std::size_t k = 0; k < d; ++k) z[k] = rng.gaussian();
            for (std::size_t i = 0; i < d; ++i) {
                double v = c.mean[i];
                for (std::size_t k = 0; k <= i; ++k) v += L[i * d + k] * z[k];
                rows.push_back(v);
            }
            labels.push_back(c.label);
        }
    }
    return Dataset::dense(d, std::move(rows), std::move(labels), "synth_gaussian");
}

} // namespace ocsvm
