#include "nsd/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nsd::nn {

namespace {

LossResult compute(const Matrix& logits, std::span<const int> labels, bool with_grad) {
    if (labels.size() != logits.rows()) {
        throw std::invalid_argument("softmax_xent: " + std::to_string(labels.size()) +
                                    " labels for " + std::to_string(logits.rows()) + " rows");
    }
    if (logits.rows() == 0) throw std::invalid_argument("softmax_xent: empty batch");
    const std::size_t classes = logits.cols();
    LossResult out;
    if (with_grad) out.dlogits = Matrix(logits.rows(), classes);
    const double inv_batch = 1.0 / static_cast<double>(logits.rows());
    double total = 0.0;
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const int y = labels[r];
        if (y < 0 || static_cast<std::size_t>(y) >= classes) {
            throw std::out_of_range("softmax_xent: label " + std::to_string(y) + " outside [0, " +
                                    std::to_string(classes) + ")");
        }
        const auto row = logits.row(r);
        const double max = *std::max_element(row.begin(), row.end());
        double sum = 0.0;
        for (double v : row) sum += std::exp(v - max);
        const double log_sum = std::log(sum);
        total += log_sum - (row[static_cast<std::size_t>(y)] - max);
        if (with_grad) {
            auto g = out.dlogits.row(r);
            for (std::size_t c = 0; c < classes; ++c) {
                const double prob = std::exp(row[c] - max - log_sum);
                g[c] = (prob - (static_cast<int>(c) == y ? 1.0 : 0.0)) * inv_batch;
            }
        }
    }
    out.loss = total * inv_batch;
    return out;
}

}  // namespace

LossResult softmax_xent(const Matrix& logits, std::span<const int> labels) {
    return compute(logits, labels, true);
}

double softmax_xent_loss(const Matrix& logits, std::span<const int> labels) {
    return compute(logits, labels, false).loss;
}

}  // namespace nsd::nn
