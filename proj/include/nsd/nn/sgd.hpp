#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "nsd/nn/network.hpp"

namespace nsd::nn {

struct SgdConfig {
    double learning_rate = 0.02;
    double momentum = 0.9;
    double l2_decay = 0.0;
    /// Multiplies the learning rate once per epoch when set.
    std::optional<double> anneal;

    void validate() const;
};

class NonFiniteGradientError : public std::runtime_error {
public:
    NonFiniteGradientError(std::size_t dense_index, const std::string& tensor);
    std::size_t dense_index() const { return dense_index_; }

private:
    std::size_t dense_index_;
};

/// One momentum step on every dense layer:
///   vel <- momentum * vel - lr * (grad + l2_decay * param)
///   param <- param + vel
void sgd_step(Network& network, const SgdConfig& config, double learning_rate);

/// Tracks the annealed learning rate across epochs.
class Sgd {
public:
    explicit Sgd(SgdConfig config);

    double learning_rate() const { return lr_; }
    const SgdConfig& config() const { return config_; }

    void step(Network& network) const { sgd_step(network, config_, lr_); }
    void end_epoch();

private:
    SgdConfig config_;
    double lr_;
};

}  // namespace nsd::nn
