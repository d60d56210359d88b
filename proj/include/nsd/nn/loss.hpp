#pragma once

#include <span>

#include "nsd/core/matrix.hpp"

namespace nsd::nn {

struct LossResult {
    double loss = 0.0;
    Matrix dlogits;
};

/// Mean softmax cross-entropy over rows. dlogits = (softmax - onehot) / rows.
/// Row maxima are subtracted before exponentiation.
LossResult softmax_xent(const Matrix& logits, std::span<const int> labels);

/// Loss value only; same arithmetic as softmax_xent.
double softmax_xent_loss(const Matrix& logits, std::span<const int> labels);

}  // namespace nsd::nn
