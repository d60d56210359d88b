#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nsd {

struct Shape {
    std::size_t rows = 0;
    std::size_t cols = 0;

    bool operator==(const Shape&) const = default;
};

std::string to_string(Shape s);

/// Raised when two operands have incompatible dimensions. Carries both shapes.
class ShapeError : public std::invalid_argument {
public:
    ShapeError(std::string op, Shape lhs, Shape rhs);

    const std::string& op() const { return op_; }
    Shape lhs() const { return lhs_; }
    Shape rhs() const { return rhs_; }

private:
    std::string op_;
    Shape lhs_;
    Shape rhs_;
};

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    /// Builds from nested rows; every row must have the same length.
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    /// Takes ownership of external data. Rejects a length mismatch and
    /// any NaN or infinite entry.
    static Matrix from_data(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    Shape shape() const { return {rows_, cols_}; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> values() { return data_; }
    std::span<const double> values() const { return data_; }

    void fill(double v);

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

bool all_finite(std::span<const double> values);

Matrix identity(std::size_t n);
Matrix transpose(const Matrix& m);

/// a * b. The per-element summation runs over k in ascending order, so the
/// result is bitwise equal to a plain triple loop.
Matrix matmul(const Matrix& a, const Matrix& b);
/// transpose(a) * b without materializing the transpose.
Matrix matmul_transpose_a(const Matrix& a, const Matrix& b);
/// a * transpose(b) without materializing the transpose.
Matrix matmul_transpose_b(const Matrix& a, const Matrix& b);

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows);

/// Stable permutation that sorts `keys` ascending.
std::vector<std::size_t> argsort_by_key(std::span<const int> keys);

/// Per-column mean over the selected rows.
std::vector<double> row_mean(const Matrix& m, std::span<const std::size_t> rows);

/// Indices of the k largest values, returned in ascending index order.
/// Equal values rank the lower index as larger.
std::vector<std::size_t> top_k_indices(std::span<const double> values, std::size_t k);

std::vector<int> argmax_rows(const Matrix& m);

}  // namespace nsd
