#include "hsi/matrix.hpp"

#include <cassert>
#include <cmath>

namespace hsi {

Matrix matmul(const Matrix& a, const Matrix& b) {
    assert(a.cols() == b.rows());
    Matrix c(a.rows(), b.cols());
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = c.data() + i * n;
        const double* ai = a.data() + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ai[p];
            const double* bp = b.data() + p * n;
            for (std::size_t j = 0; j < n; ++j)
                ci[j] += aip * bp[j];
        }
    }
    return c;
}

Matrix matmul_ta(const Matrix& a, const Matrix& b) {
    assert(a.rows() == b.rows());
    Matrix c(a.cols(), b.cols());
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a.data() + i * k;
        const double* bi = b.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ai[p];
            double* cp = c.data() + p * n;
            for (std::size_t j = 0; j < n; ++j)
                cp[j] += aip * bi[j];
        }
    }
    return c;
}

Matrix matmul_tb(const Matrix& a, const Matrix& b) {
    assert(a.cols() == b.cols());
    Matrix c(a.rows(), b.rows());
    const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
    for (std::size_t i = 0; i < m; ++i) {
        const double* ai = a.data() + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b.data() + j * k;
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p)
                s += ai[p] * bj[p];
            c(i, j) = s;
        }
    }
    return c;
}

bool all_finite(std::span<const double> v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool all_finite(const Matrix& m) {
    return all_finite(std::span<const double>{m.data(), m.size()});
}

} // namespace hsi
