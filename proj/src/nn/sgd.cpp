#include "nsd/nn/sgd.hpp"

#include <cmath>

namespace nsd::nn {

void SgdConfig::validate() const {
    if (!std::isfinite(learning_rate) || learning_rate <= 0.0) {
        throw std::invalid_argument("learning_rate must be finite and positive");
    }
    if (!std::isfinite(momentum) || momentum < 0.0 || momentum > 1.0) {
        throw std::invalid_argument("momentum must lie in [0, 1]");
    }
    if (!std::isfinite(l2_decay) || l2_decay < 0.0) {
        throw std::invalid_argument("l2_decay must be finite and non-negative");
    }
    if (anneal && (!std::isfinite(*anneal) || *anneal <= 0.0)) {
        throw std::invalid_argument("anneal factor must be finite and positive");
    }
}

NonFiniteGradientError::NonFiniteGradientError(std::size_t dense_index, const std::string& tensor)
    : std::runtime_error("non-finite gradient in dense layer " + std::to_string(dense_index) + " (" +
                         tensor + ")"),
      dense_index_(dense_index) {}

namespace {

void update(std::span<double> param, std::span<const double> grad, std::span<double> vel,
            const SgdConfig& config, double lr) {
    for (std::size_t k = 0; k < param.size(); ++k) {
        vel[k] = config.momentum * vel[k] - lr * (grad[k] + config.l2_decay * param[k]);
        param[k] += vel[k];
    }
}

}  // namespace

void sgd_step(Network& network, const SgdConfig& config, double learning_rate) {
    auto dense = network.dense_layers();
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (!all_finite(dense[i]->grad_weights.values())) throw NonFiniteGradientError(i, "weights");
        if (!all_finite(dense[i]->grad_bias)) throw NonFiniteGradientError(i, "bias");
    }
    for (auto* d : dense) {
        update(d->weights.values(), d->grad_weights.values(), d->vel_weights.values(), config,
               learning_rate);
        update(d->bias, d->grad_bias, d->vel_bias, config, learning_rate);
    }
}

Sgd::Sgd(SgdConfig config) : config_(config), lr_(config.learning_rate) { config_.validate(); }

void Sgd::end_epoch() {
    if (config_.anneal) lr_ *= *config_.anneal;
}

}  // namespace nsd::nn
