#pragma once

#include <cstddef>
#include <vector>

#include "nsd/core/matrix.hpp"
#include "nsd/core/rng.hpp"

namespace nsd::nn {

/// Fully connected layer computing x * W + b. W is in_units x out_units.
struct DenseLayer {
    Matrix weights;
    std::vector<double> bias;
    Matrix grad_weights;
    std::vector<double> grad_bias;
    Matrix vel_weights;
    std::vector<double> vel_bias;

    DenseLayer(std::size_t in_units, std::size_t out_units);

    /// He initialization: N(0, 1) * sqrt(2 / in_units), zero bias.
    static DenseLayer he_init(std::size_t in_units, std::size_t out_units, Rng& rng);

    std::size_t in_units() const { return weights.rows(); }
    std::size_t out_units() const { return weights.cols(); }

    Matrix forward(const Matrix& x);
    /// Accumulates nothing: overwrites grad_* from dy. Returns dL/dx when
    /// `input_grad` is set, an empty matrix otherwise.
    Matrix backward(const Matrix& dy, bool input_grad = true);

private:
    Matrix input_;
    bool has_input_ = false;
};

class ReluLayer {
public:
    explicit ReluLayer(std::size_t units) : units_(units) {}
    std::size_t units() const { return units_; }

    Matrix forward(const Matrix& x);
    /// Passes dy where the forward input was strictly positive.
    Matrix backward(const Matrix& dy) const;

private:
    std::size_t units_;
    Matrix input_;
    bool has_input_ = false;
};

/// Inverted dropout: kept entries are scaled by 1 / (1 - drop_prob) at train
/// time, so evaluation is the identity.
class DropoutLayer {
public:
    DropoutLayer(std::size_t units, double drop_prob);

    std::size_t units() const { return units_; }
    double drop_prob() const { return drop_prob_; }

    /// While frozen, train-mode passes reuse the last sampled mask.
    void set_frozen(bool frozen) { frozen_ = frozen; }
    bool frozen() const { return frozen_; }
    const Matrix& last_mask() const { return mask_; }

    Matrix forward(const Matrix& x, bool train, Rng& rng);
    Matrix backward(const Matrix& dy) const;

private:
    std::size_t units_;
    double drop_prob_;
    bool frozen_ = false;
    bool train_pass_ = false;
    bool has_forward_ = false;
    Matrix mask_;
};

}  // namespace nsd::nn
