#pragma once

#include <cstddef>
#include <initializer_list>
#include <vector>

namespace msda {

// Dense row-major matrix of doubles. Small on purpose: everything in this
// project fits in memory and runs on one core, so plain loops beat a BLAS
// dependency.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
    const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// out = a (m x k) * b (k x n)
Matrix matmul(const Matrix& a, const Matrix& b);
// out = a (m x k) * b^T, b is (n x k)
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// out = a^T (k x m -> m x k transposed) * b, a is (k x m), b is (k x n)
Matrix matmul_tn(const Matrix& a, const Matrix& b);

Matrix transpose(const Matrix& m);

// Stack rows of a on top of rows of b (same column count).
Matrix vstack(const Matrix& a, const Matrix& b);

// Copy the given rows of m into a new matrix.
Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& idx);

} // namespace msda
