#include "nsd/core/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nsd {

std::string to_string(Shape s) {
    return "(" + std::to_string(s.rows) + "x" + std::to_string(s.cols) + ")";
}

ShapeError::ShapeError(std::string op, Shape lhs, Shape rhs)
    : std::invalid_argument(op + ": incompatible shapes " + to_string(lhs) + " and " +
                            to_string(rhs)),
      op_(std::move(op)),
      lhs_(lhs),
      rhs_(rhs) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw std::invalid_argument("Matrix::from_rows: ragged rows");
        }
        data.insert(data.end(), row.begin(), row.end());
    }
    return from_data(r, c, std::move(data));
}

Matrix Matrix::from_data(std::size_t rows, std::size_t cols, std::vector<double> data) {
    if (data.size() != rows * cols) {
        throw std::invalid_argument("Matrix::from_data: expected " + std::to_string(rows * cols) +
                                    " values, got " + std::to_string(data.size()));
    }
    if (!all_finite(data)) {
        throw std::invalid_argument("Matrix::from_data: non-finite entry");
    }
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool all_finite(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) t(c, r) = m(r, c);
    return t;
}

// Zero terms are skipped in the kernels below. Accumulators start at +0.0 and
// entries are finite, so skipping a 0 * b term never changes the result.

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("matmul", a.shape(), b.shape());
    Matrix c(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* out = c.row(i).data();
        const double* arow = a.row(i).data();
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.row(k).data();
            for (std::size_t j = 0; j < n; ++j) out[j] += aik * brow[j];
        }
    }
    return c;
}

Matrix matmul_transpose_a(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw ShapeError("matmul_transpose_a", a.shape(), b.shape());
    Matrix c(a.cols(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const double* arow = a.row(r).data();
        const double* brow = b.row(r).data();
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double ari = arow[i];
            if (ari == 0.0) continue;
            double* out = c.row(i).data();
            for (std::size_t j = 0; j < n; ++j) out[j] += ari * brow[j];
        }
    }
    return c;
}

Matrix matmul_transpose_b(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw ShapeError("matmul_transpose_b", a.shape(), b.shape());
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row(i).data();
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.row(j).data();
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += arow[k] * brow[k];
            c(i, j) = acc;
        }
    }
    return c;
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= m.rows()) throw std::out_of_range("gather_rows: row index out of range");
        std::copy_n(m.row(rows[i]).begin(), m.cols(), out.row(i).begin());
    }
    return out;
}

std::vector<std::size_t> argsort_by_key(std::span<const int> keys) {
    std::vector<std::size_t> perm(keys.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t x, std::size_t y) { return keys[x] < keys[y]; });
    return perm;
}

std::vector<double> row_mean(const Matrix& m, std::span<const std::size_t> rows) {
    if (rows.empty()) throw std::invalid_argument("row_mean: empty row subset");
    std::vector<double> mean(m.cols(), 0.0);
    for (std::size_t r : rows) {
        if (r >= m.rows()) throw std::out_of_range("row_mean: row index out of range");
        const auto src = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) mean[c] += src[c];
    }
    const double n = static_cast<double>(rows.size());
    for (double& v : mean) v /= n;
    // Second pass adds the mean residual. For a constant column every residual
    // is the same few-bit value, so the correction is exact and so is the mean.
    std::vector<double> residual(m.cols(), 0.0);
    for (std::size_t r : rows) {
        const auto src = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) residual[c] += src[c] - mean[c];
    }
    for (std::size_t c = 0; c < m.cols(); ++c) mean[c] += residual[c] / n;
    return mean;
}

std::vector<std::size_t> top_k_indices(std::span<const double> values, std::size_t k) {
    if (k > values.size()) {
        throw std::out_of_range("top_k_indices: k=" + std::to_string(k) + " exceeds length " +
                                std::to_string(values.size()));
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return values[x] > values[y]; });
    order.resize(k);
    std::sort(order.begin(), order.end());
    return order;
}

std::vector<int> argmax_rows(const Matrix& m) {
    std::vector<int> out(m.rows(), 0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        out[r] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return out;
}

}  // namespace nsd
