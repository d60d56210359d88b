#include "nsd/nn/network.hpp"

#include <stdexcept>

namespace nsd::nn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t layer_width(const Layer& layer, bool input_side) {
    return std::visit(overloaded{
                          [&](const DenseLayer& d) { return input_side ? d.in_units() : d.out_units(); },
                          [](const ReluLayer& r) { return r.units(); },
                          [](const DropoutLayer& d) { return d.units(); },
                          [](const ns::NsDropoutLayer& n) { return n.units(); },
                      },
                      layer);
}

}  // namespace

std::string to_string(Regularizer r) {
    switch (r) {
        case Regularizer::none: return "none";
        case Regularizer::dropout: return "dropout";
        case Regularizer::nsdropout: return "nsdropout";
    }
    return "?";
}

Regularizer parse_regularizer(const std::string& name) {
    if (name == "none") return Regularizer::none;
    if (name == "dropout") return Regularizer::dropout;
    if (name == "nsdropout") return Regularizer::nsdropout;
    throw std::invalid_argument("unknown regularizer '" + name + "'");
}

void NetworkSpec::validate() const {
    if (units.size() < 2) throw std::invalid_argument("architecture needs at least input and output widths");
    for (std::size_t u : units) {
        if (u == 0) throw std::invalid_argument("architecture widths must be positive");
    }
    if (units.back() < 2) throw std::invalid_argument("architecture needs at least two classes");
    if (regularizer == Regularizer::none) return;
    for (const auto& [position, p] : drop_at) {
        if (position > hidden_layers()) {
            throw std::invalid_argument("regularization position " + std::to_string(position) +
                                        " exceeds hidden layer count " +
                                        std::to_string(hidden_layers()));
        }
        if (!(p >= 0.0 && p < 1.0)) {
            throw std::invalid_argument("p at position " + std::to_string(position) +
                                        " must lie in [0, 1), got " + std::to_string(p));
        }
        if (regularizer == Regularizer::nsdropout &&
            ns::drop_count(width_at(position), p) >= width_at(position)) {
            throw std::invalid_argument("p=" + std::to_string(p) + " would drop all " +
                                        std::to_string(width_at(position)) +
                                        " units at position " + std::to_string(position));
        }
    }
}

Network::Network(std::vector<Layer> layers, int class_count)
    : layers_(std::move(layers)), class_count_(class_count) {
    if (layers_.empty()) throw std::invalid_argument("Network: no layers");
    for (std::size_t i = 1; i < layers_.size(); ++i) {
        const auto out = layer_width(layers_[i - 1], false);
        const auto in = layer_width(layers_[i], true);
        if (out != in) throw ShapeError("Network: layer " + std::to_string(i), {1, out}, {1, in});
    }
    if (layer_width(layers_.back(), false) != static_cast<std::size_t>(class_count)) {
        throw std::invalid_argument("Network: output width does not match class count");
    }
}

Network Network::build(const NetworkSpec& spec, Rng& init_rng) {
    spec.validate();
    std::vector<Layer> layers;
    const int classes = spec.class_count();
    auto add_regularizer = [&](std::size_t position) {
        if (spec.regularizer == Regularizer::none) return;
        const auto it = spec.drop_at.find(position);
        if (it == spec.drop_at.end()) return;
        const std::size_t width = spec.width_at(position);
        if (spec.regularizer == Regularizer::dropout) {
            layers.emplace_back(DropoutLayer(width, it->second));
        } else {
            layers.emplace_back(ns::NsDropoutLayer(width, classes, it->second, spec.metric));
        }
    };
    add_regularizer(0);
    for (std::size_t l = 0; l + 1 < spec.units.size(); ++l) {
        layers.emplace_back(DenseLayer::he_init(spec.units[l], spec.units[l + 1], init_rng));
        if (l + 2 < spec.units.size()) {
            layers.emplace_back(ReluLayer(spec.units[l + 1]));
            add_regularizer(l + 1);
        }
    }
    return Network(std::move(layers), classes);
}

std::size_t Network::input_units() const { return layer_width(layers_.front(), true); }

std::vector<DenseLayer*> Network::dense_layers() {
    std::vector<DenseLayer*> out;
    for (auto& l : layers_)
        if (auto* d = std::get_if<DenseLayer>(&l)) out.push_back(d);
    return out;
}

std::vector<const DenseLayer*> Network::dense_layers() const {
    std::vector<const DenseLayer*> out;
    for (const auto& l : layers_)
        if (const auto* d = std::get_if<DenseLayer>(&l)) out.push_back(d);
    return out;
}

std::vector<ns::NsDropoutLayer*> Network::ns_layers() {
    std::vector<ns::NsDropoutLayer*> out;
    for (auto& l : layers_)
        if (auto* n = std::get_if<ns::NsDropoutLayer>(&l)) out.push_back(n);
    return out;
}

std::vector<const ns::NsDropoutLayer*> Network::ns_layers() const {
    std::vector<const ns::NsDropoutLayer*> out;
    for (const auto& l : layers_)
        if (const auto* n = std::get_if<ns::NsDropoutLayer>(&l)) out.push_back(n);
    return out;
}

bool Network::has_ns_layers() const { return !ns_layers().empty(); }

Matrix Network::forward(const Matrix& x, const PassOptions& options) {
    static const ns::MaskRouting off = ns::MaskRouting::off_routing();
    const ns::MaskRouting& routing = options.routing ? *options.routing : off;
    Matrix h = x;
    for (auto& layer : layers_) {
        h = std::visit(overloaded{
                           [&](DenseLayer& d) { return d.forward(h); },
                           [&](ReluLayer& r) { return r.forward(h); },
                           [&](DropoutLayer& d) {
                               if (options.train && options.rng == nullptr) {
                                   throw std::invalid_argument("dropout train pass needs an Rng");
                               }
                               Rng dummy(0);
                               return d.forward(h, options.train, options.rng ? *options.rng : dummy);
                           },
                           [&](ns::NsDropoutLayer& n) { return n.forward(h, routing); },
                       },
                       layer);
    }
    return h;
}

Matrix Network::backward(const Matrix& dlogits) {
    Matrix g = dlogits;
    for (std::size_t i = layers_.size(); i-- > 0;) {
        const bool first = (i == 0);
        g = std::visit(overloaded{
                           [&](DenseLayer& d) { return d.backward(g, !first); },
                           [&](ReluLayer& r) { return r.backward(g); },
                           [&](DropoutLayer& d) { return d.backward(g); },
                           [&](ns::NsDropoutLayer& n) { return n.backward(g); },
                       },
                       layers_[i]);
        if (g.empty() && !first) throw std::logic_error("Network::backward: lost gradient");
    }
    return g;
}

Matrix Network::forward_train(const Matrix& x, std::span<const int> labels, Rng& rng) {
    const auto routing = ns::MaskRouting::by_class(labels);
    return forward(x, {true, &routing, &rng});
}

Matrix Network::predict(const Matrix& x, ns::EvalMode mode, std::span<const int> labels) {
    if (!has_ns_layers() || mode == ns::EvalMode::off) return forward(x, {});
    if (mode == ns::EvalMode::predicted) {
        const Matrix unmasked = forward(x, {});
        const auto routing = ns::resolve_eval_routing(mode, labels, &unmasked);
        return forward(x, {false, &routing, nullptr});
    }
    const auto routing = ns::resolve_eval_routing(mode, labels, nullptr);
    return forward(x, {false, &routing, nullptr});
}

std::vector<Matrix> Network::ns_layer_inputs(const Matrix& x) {
    std::vector<Matrix> captured;
    std::size_t remaining = ns_layers().size();
    Matrix h = x;
    const auto off = ns::MaskRouting::off_routing();
    Rng dummy(0);
    for (auto& layer : layers_) {
        if (remaining == 0) break;
        h = std::visit(overloaded{
                           [&](DenseLayer& d) { return d.forward(h); },
                           [&](ReluLayer& r) { return r.forward(h); },
                           [&](DropoutLayer& d) { return d.forward(h, false, dummy); },
                           [&](ns::NsDropoutLayer& n) {
                               captured.push_back(h);
                               --remaining;
                               return n.forward(h, off);
                           },
                       },
                       layer);
    }
    return captured;
}

void Network::refresh_ns_masks(const LabeledBatch& train, const LabeledBatch& reference) {
    auto layers = ns_layers();
    if (layers.empty()) return;
    const auto train_in = ns_layer_inputs(train.inputs);
    const auto ref_in = ns_layer_inputs(reference.inputs);
    for (std::size_t i = 0; i < layers.size(); ++i) {
        layers[i]->refresh(train_in[i], train.labels, ref_in[i], reference.labels);
    }
}

void Network::set_dropout_frozen(bool frozen) {
    for (auto& l : layers_)
        if (auto* d = std::get_if<DropoutLayer>(&l)) d->set_frozen(frozen);
}

}  // namespace nsd::nn
