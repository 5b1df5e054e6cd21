#ifndef MWCUT_MATRIX_HPP
#define MWCUT_MATRIX_HPP

#include <cstddef>
#include <vector>

#include "mwcut/errors.hpp"

namespace mwcut {

/// Minimal dense row-major matrix. Used for weight-matrix preprocessing and
/// small reference computations; the solver itself works on sparse storage.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}
    explicit DenseMatrix(int n) : DenseMatrix(n, n) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    bool operator==(const DenseMatrix&) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> a_;
};

}  // namespace mwcut

#endif  // MWCUT_MATRIX_HPP
