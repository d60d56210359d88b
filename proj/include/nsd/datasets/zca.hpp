#pragma once

#include <vector>

#include "nsd/core/matrix.hpp"

namespace nsd::data {

inline constexpr double default_zca_epsilon = 1e-5;

struct SymmetricEigen {
    std::vector<double> values;  // ascending
    Matrix vectors;              // column k pairs with values[k]
};

/// Cyclic Jacobi rotations. Sweeps until the off-diagonal Frobenius norm
/// falls below `tolerance` times the matrix norm.
SymmetricEigen symmetric_eigen(const Matrix& a, double tolerance = 1e-14, int max_sweeps = 100);

/// Fitted ZCA whitening: x -> (x - mean) * U diag(1 / sqrt(lambda + eps)) U^T.
struct ZcaTransform {
    std::vector<double> mean;
    Matrix transform;  // symmetric, dim x dim

    Matrix apply(const Matrix& x) const;
};

Matrix covariance(const Matrix& x);  // population covariance (divides by N)

ZcaTransform zca_fit(const Matrix& train, double epsilon = default_zca_epsilon);

struct ZcaResult {
    Matrix whitened;
    ZcaTransform transform;
};

ZcaResult zca_whiten(const Matrix& train, double epsilon = default_zca_epsilon);

}  // namespace nsd::data
