#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ocsvm/error.hpp"

namespace ocsvm {

// One nonzero cell of a sparse row; `col` is 0-based.
struct SparseEntry {
    std::int32_t col = 0;
    double value = 0.0;
};

// Non-owning view of one feature vector, dense or sparse. The backing
// storage (a Dataset row or a caller-supplied buffer) must outlive the view.
class FeatureView {
public:
    FeatureView() = default;

    static FeatureView of_dense(std::span<const double> values) {
        FeatureView v;
        v.dense_ = values;
        v.dim_ = values.size();
        return v;
    }

    static FeatureView of_sparse(std::span<const SparseEntry> cells, std::size_t dim) {
        FeatureView v;
        v.cells_ = cells;
        v.sparse_ = true;
        v.dim_ = dim;
        return v;
    }

    std::size_t dim() const { return dim_; }
    bool is_sparse() const { return sparse_; }
    std::span<const double> dense_values() const { return dense_; }
    std::span<const SparseEntry> cells() const { return cells_; }

    double dot(const FeatureView& other) const;
    double squared_norm() const;
    // Exact loop for dense pairs; ||a||^2 + ||b||^2 - 2 a.b when sparse rows
    // are involved.
    double squared_distance(const FeatureView& other) const;

private:
    std::span<const double> dense_{};
    std::span<const SparseEntry> cells_{};
    bool sparse_ = false;
    std::size_t dim_ = 0;
};

// In-memory sample collection. Rows are either all dense or all sparse;
// labels are optional and live alongside the feature rows.
class Dataset {
public:
    Dataset() = default;

    static Dataset dense(std::size_t dim, std::vector<double> row_major,
                         std::vector<int> labels = {}, std::string meta = "");
    static Dataset sparse(std::size_t dim, std::vector<std::size_t> row_offsets,
                          std::vector<SparseEntry> cells,
                          std::vector<int> labels = {}, std::string meta = "");

    std::size_t size() const { return n_; }
    std::size_t dim() const { return dim_; }
    bool is_sparse() const { return sparse_; }
    bool empty() const { return n_ == 0; }

    FeatureView row(std::size_t i) const;

    bool has_labels() const { return !labels_.empty(); }
    int label(std::size_t i) const { return labels_[i]; }
    const std::vector<int>& labels() const { return labels_; }

    const std::string& meta() const { return meta_; }

    // New dataset holding the given rows, in order (labels follow when present).
    Dataset take(std::span<const std::size_t> indices) const;

    // Row-wise concatenation; dimensions and storage kinds must match.
    // The result carries labels only when both inputs do.
    static Dataset concat(const Dataset& a, const Dataset& b);

private:
    std::size_t n_ = 0;
    std::size_t dim_ = 0;
    bool sparse_ = false;
    std::vector<double> dense_;            // n * dim when dense
    std::vector<std::size_t> offsets_;     // n + 1 when sparse
    std::vector<SparseEntry> cells_;       // when sparse
    std::vector<int> labels_;              // empty or size n
    std::string meta_;
};

// ---- loading ---------------------------------------------------------

// Reads an IDX image/label file pair (the classic MNIST container format:
// big-endian magic + dimension header, then raw bytes). Pixels are scaled
// to [0, 1] by dividing by 255. Image and label counts must agree.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

// Reads sparse text: one sample per line, "label idx:val idx:val ...",
// 1-based strictly increasing indices. An optional leading "# dim <d>"
// comment declares the dimension; otherwise it is the maximum index seen.
// Other "#" lines and blank lines are ignored.
Dataset load_sparse(const std::string& path);

// Writes a dense dataset as CSV, one row per sample, label first when present.
void write_csv(std::ostream& out, const Dataset& data);

// Writes any dataset in the sparse text format load_sparse reads, starting
// with a "# dim <d>" header so the dimension survives trailing zero columns.
// Values use enough digits to reload bit-exactly. Unlabeled rows get label 0.
void write_sparse(std::ostream& out, const Dataset& data);

// ---- splitting and subsetting ----------------------------------------

struct SplitSpec {
    std::size_t n_train = 0;
    std::size_t n_validation = 0;
    std::uint64_t seed = 0;
};

struct Split {
    Dataset train;
    Dataset validation;
    Dataset rest;
};

// Seeded shuffle of row indices (Fisher-Yates over the documented RNG in
// rng.hpp, hence identical on every platform), then the first n_train rows
// become `train`, the next n_validation become `validation`, the remainder
// `rest`.
Split split(const Dataset& data, const SplitSpec& spec);

// Keeps samples whose label is in `keep`. Requires labels.
Dataset filter_by_label(const Dataset& data, std::span<const int> keep);

// Seeded random subset of `count` rows (all rows, unshuffled, when
// count >= size).
Dataset subsample(const Dataset& data, std::size_t count, std::uint64_t seed);

// ---- synthetic data ---------------------------------------------------

struct GaussianComponent {
    std::vector<double> mean;
    std::vector<double> covariance; // dim x dim, row major, PSD
    std::size_t count = 0;
    int label = 0;
};

// Draws each component from N(mean, covariance) via a Cholesky factor and
// the documented RNG; components are generated in order from one stream.
// A zero covariance yields rows exactly equal to the mean.
Dataset synth_gaussian(std::span<const GaussianComponent> components, std::uint64_t seed);

} // namespace ocsvm
