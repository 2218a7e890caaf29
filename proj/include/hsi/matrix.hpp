#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hsi {

/// Dense row-major double matrix. Just enough linear algebra for a shallow
/// network and LDA; products are written so the inner loop runs over
/// contiguous memory.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), d_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return d_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return d_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return d_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {d_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {d_.data() + r * cols_, cols_}; }

    double* data() { return d_.data(); }
    const double* data() const { return d_.data(); }
    std::size_t size() const { return d_.size(); }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> d_;
};

/// a(m,k) * b(k,n)
Matrix matmul(const Matrix& a, const Matrix& b);
/// transpose(a)(m,k) * b(m,n) -> (k,n)
Matrix matmul_ta(const Matrix& a, const Matrix& b);
/// a(m,k) * transpose(b)(n,k) -> (m,n)
Matrix matmul_tb(const Matrix& a, const Matrix& b);

bool all_finite(const Matrix& m);
bool all_finite(std::span<const double> v);

} // namespace hsi
