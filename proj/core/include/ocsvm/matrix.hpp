#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ocsvm {

// Dense square matrix, row major. Used for kernel Gram matrices and QP
// quadratic terms; symmetry is a property of how it is filled, not enforced
// by the type.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    std::size_t size() const { return n_; }

    double& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    std::span<const double> row(std::size_t i) const { return {a_.data() + i * n_, n_}; }
    std::span<double> row(std::size_t i) { return {a_.data() + i * n_, n_}; }

    const std::vector<double>& data() const { return a_; }

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

} // namespace ocsvm
