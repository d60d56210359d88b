#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "nsd/core/batch.hpp"
#include "nsd/core/matrix.hpp"
#include "nsd/core/rng.hpp"
#include "nsd/nn/layers.hpp"
#include "nsd/nsdropout/layer.hpp"

namespace nsd::nn {

enum class Regularizer { none, dropout, nsdropout };

std::string to_string(Regularizer r);
Regularizer parse_regularizer(const std::string& name);

/// Architecture of a ReLU multilayer perceptron.
///
/// `units` lists input width, hidden widths and class count, e.g.
/// {784, 128, 128, 128, 10}. Regularization slots are addressed by position:
/// 0 is the raw input, k >= 1 is the output of the k-th hidden activation.
struct NetworkSpec {
    std::vector<std::size_t> units;
    Regularizer regularizer = Regularizer::none;
    std::map<std::size_t, double> drop_at;
    ns::DeviationMetric metric = ns::DeviationMetric::absolute;

    std::size_t hidden_layers() const { return units.size() < 2 ? 0 : units.size() - 2; }
    int class_count() const { return units.empty() ? 0 : static_cast<int>(units.back()); }
    /// Width of the activations at a regularization position.
    std::size_t width_at(std::size_t position) const { return units.at(position); }
    void validate() const;
};

using Layer = std::variant<DenseLayer, ReluLayer, DropoutLayer, ns::NsDropoutLayer>;

/// Options for one forward pass.
struct PassOptions {
    bool train = false;
    /// Row-to-mask routing for NSDropout layers; nullptr means masking off.
    const ns::MaskRouting* routing = nullptr;
    /// Drives standard dropout in train passes.
    Rng* rng = nullptr;
};

/// Ordered layer stack ending in logits. Loss is softmax cross-entropy.
///
/// Layers cache forward state, so an instance must not be shared between
/// threads during a pass.
class Network {
public:
    Network(std::vector<Layer> layers, int class_count);

    static Network build(const NetworkSpec& spec, Rng& init_rng);

    int class_count() const { return class_count_; }
    std::size_t input_units() const;

    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }

    std::vector<DenseLayer*> dense_layers();
    std::vector<const DenseLayer*> dense_layers() const;
    std::vector<ns::NsDropoutLayer*> ns_layers();
    std::vector<const ns::NsDropoutLayer*> ns_layers() const;
    bool has_ns_layers() const;

    Matrix forward(const Matrix& x, const PassOptions& options);
    Matrix backward(const Matrix& dlogits);

    /// Train pass; NSDropout rows use the masks of their labels.
    Matrix forward_train(const Matrix& x, std::span<const int> labels, Rng& rng);

    /// Eval-mode logits. Predicted mode runs an unmasked pass first and routes
    /// each row to the mask of its argmax class.
    Matrix predict(const Matrix& x, ns::EvalMode mode, std::span<const int> labels = {});

    /// Inputs seen by each NSDropout layer in an eval pass with masking off.
    std::vector<Matrix> ns_layer_inputs(const Matrix& x);

    /// Rebuilds every NSDropout layer's masks from class means of `train`
    /// against class means of `reference`.
    void refresh_ns_masks(const LabeledBatch& train, const LabeledBatch& reference);

    void set_dropout_frozen(bool frozen);

private:
    std::vector<Layer> layers_;
    int class_count_;
};

}  // namespace nsd::nn
