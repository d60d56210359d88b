#include "nsd/datasets/zca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nsd::data {

SymmetricEigen symmetric_eigen(const Matrix& input, double tolerance, int max_sweeps) {
    if (input.rows() != input.cols()) throw ShapeError("symmetric_eigen", input.shape(), input.shape());
    const std::size_t n = input.rows();
    Matrix a = input;
    Matrix v = identity(n);

    double total = 0.0;
    for (double x : a.values()) total += x * x;
    const double threshold = tolerance * tolerance * std::max(total, 1e-300);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
        if (off <= threshold) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
    SymmetricEigen out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

Matrix covariance(const Matrix& x) {
    const std::size_t n = x.rows();
    std::vector<double> mean(x.cols(), 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) mean[c] += x(r, c);
    for (double& m : mean) m /= static_cast<double>(n);
    Matrix centered = x;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) centered(r, c) -= mean[c];
    Matrix cov = matmul_transpose_a(centered, centered);
    for (double& v : cov.values()) v /= static_cast<double>(n);
    return cov;
}

Matrix ZcaTransform::apply(const Matrix& x) const {
    if (x.cols() != mean.size()) throw ShapeError("ZcaTransform::apply", x.shape(), transform.shape());
    Matrix centered = x;
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) centered(r, c) -= mean[c];
    return matmul(centered, transform);
}

ZcaTransform zca_fit(const Matrix& train, double epsilon) {
    if (train.rows() < 2) throw std::invalid_argument("zca_fit: need at least two samples");
    const std::size_t d = train.cols();
    ZcaTransform out{std::vector<double>(d, 0.0), Matrix(d, d)};
    for (std::size_t r = 0; r < train.rows(); ++r)
        for (std::size_t c = 0; c < d; ++c) out.mean[c] += train(r, c);
    for (double& m : out.mean) m /= static_cast<double>(train.rows());

    const auto eig = symmetric_eigen(covariance(train));
    std::vector<double> scale(d);
    for (std::size_t k = 0; k < d; ++k) {
        const double lambda = std::max(eig.values[k], 0.0);
        scale[k] = 1.0 / std::sqrt(lambda + epsilon);
        if (!std::isfinite(eig.values[k]) || !std::isfinite(scale[k])) {
            throw std::runtime_error("zca_fit: non-finite eigenvalue");
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < d; ++k) acc += eig.vectors(i, k) * scale[k] * eig.vectors(j, k);
            out.transform(i, j) = acc;
            out.transform(j, i) = acc;
        }
    }
    return out;
}

ZcaResult zca_whiten(const Matrix& train, double epsilon) {
    auto transform = zca_fit(train, epsilon);
    auto whitened = transform.apply(train);
    return {std::move(whitened), std::move(transform)};
}

}  // namespace nsd::data
