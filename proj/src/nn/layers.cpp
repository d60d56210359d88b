#include "nsd/nn/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace nsd::nn {

DenseLayer::DenseLayer(std::size_t in_units, std::size_t out_units)
    : weights(in_units, out_units),
      bias(out_units, 0.0),
      grad_weights(in_units, out_units),
      grad_bias(out_units, 0.0),
      vel_weights(in_units, out_units),
      vel_bias(out_units, 0.0) {}

DenseLayer DenseLayer::he_init(std::size_t in_units, std::size_t out_units, Rng& rng) {
    DenseLayer layer(in_units, out_units);
    const double scale = std::sqrt(2.0 / static_cast<double>(in_units));
    for (double& w : layer.weights.values()) w = rng.next_normal() * scale;
    return layer;
}

Matrix DenseLayer::forward(const Matrix& x) {
    if (x.cols() != in_units()) throw ShapeError("DenseLayer::forward", x.shape(), weights.shape());
    Matrix out = matmul(x, weights);
    for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias[c];
    }
    input_ = x;
    has_input_ = true;
    return out;
}

Matrix DenseLayer::backward(const Matrix& dy, bool input_grad) {
    if (!has_input_) throw std::logic_error("DenseLayer::backward called before forward");
    if (dy.rows() != input_.rows() || dy.cols() != out_units()) {
        throw ShapeError("DenseLayer::backward", dy.shape(), {input_.rows(), out_units()});
    }
    grad_weights = matmul_transpose_a(input_, dy);
    std::fill(grad_bias.begin(), grad_bias.end(), 0.0);
    for (std::size_t r = 0; r < dy.rows(); ++r) {
        const auto row = dy.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) grad_bias[c] += row[c];
    }
    if (!input_grad) return {};
    return matmul_transpose_b(dy, weights);
}

Matrix ReluLayer::forward(const Matrix& x) {
    if (x.cols() != units_) throw ShapeError("ReluLayer::forward", x.shape(), {x.rows(), units_});
    input_ = x;
    has_input_ = true;
    Matrix out = x;
    for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
    return out;
}

Matrix ReluLayer::backward(const Matrix& dy) const {
    if (!has_input_) throw std::logic_error("ReluLayer::backward called before forward");
    if (dy.shape() != input_.shape()) throw ShapeError("ReluLayer::backward", dy.shape(), input_.shape());
    Matrix dx = dy;
    auto dv = dx.values();
    const auto xv = input_.values();
    for (std::size_t k = 0; k < dv.size(); ++k) {
        if (!(xv[k] > 0.0)) dv[k] = 0.0;
    }
    return dx;
}

DropoutLayer::DropoutLayer(std::size_t units, double drop_prob)
    : units_(units), drop_prob_(drop_prob) {
    if (!(drop_prob >= 0.0 && drop_prob < 1.0)) {
        throw std::invalid_argument("DropoutLayer: drop_prob must lie in [0, 1), got " +
                                    std::to_string(drop_prob));
    }
}

Matrix DropoutLayer::forward(const Matrix& x, bool train, Rng& rng) {
    if (x.cols() != units_) throw ShapeError("DropoutLayer::forward", x.shape(), {x.rows(), units_});
    has_forward_ = true;
    train_pass_ = train;
    if (!train) return x;
    const bool reuse = frozen_ && mask_.shape() == x.shape();
    if (!reuse) {
        mask_ = Matrix(x.rows(), x.cols(), 1.0);
        // drop_prob == 0 draws nothing, leaving the stream untouched.
        if (drop_prob_ > 0.0) {
            const double scale = 1.0 / (1.0 - drop_prob_);
            for (double& m : mask_.values()) m = rng.next_uniform() < drop_prob_ ? 0.0 : scale;
        }
    }
    Matrix out = x;
    auto ov = out.values();
    const auto mv = mask_.values();
    for (std::size_t k = 0; k < ov.size(); ++k) ov[k] *= mv[k];
    return out;
}

Matrix DropoutLayer::backward(const Matrix& dy) const {
    if (!has_forward_) throw std::logic_error("DropoutLayer::backward called before forward");
    if (!train_pass_) return dy;
    if (dy.shape() != mask_.shape()) throw ShapeError("DropoutLayer::backward", dy.shape(), mask_.shape());
    Matrix dx = dy;
    auto dv = dx.values();
    const auto mv = mask_.values();
    for (std::size_t k = 0; k < dv.size(); ++k) dv[k] *= mv[k];
    return dx;
}

}  // namespace nsd::nn
