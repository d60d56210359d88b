#include "nsd/nsdropout/layer.hpp"

#include <stdexcept>

namespace nsd::ns {

std::string to_string(EvalMode mode) {
    switch (mode) {
        case EvalMode::labeled: return "labeled";
        case EvalMode::predicted: return "predicted";
        case EvalMode::union_: return "union";
        case EvalMode::intersection: return "intersection";
        case EvalMode::off: return "off";
    }
    return "?";
}

EvalMode parse_eval_mode(const std::string& name) {
    if (name == "labeled") return EvalMode::labeled;
    if (name == "predicted") return EvalMode::predicted;
    if (name == "union") return EvalMode::union_;
    if (name == "intersection") return EvalMode::intersection;
    if (name == "off") return EvalMode::off;
    throw std::invalid_argument("unknown eval mode '" + name + "'");
}

std::string to_string(RefreshPolicy policy) {
    switch (policy) {
        case RefreshPolicy::per_epoch: return "per-epoch";
        case RefreshPolicy::per_batch: return "per-batch";
        case RefreshPolicy::once: return "once";
    }
    return "?";
}

RefreshPolicy parse_refresh_policy(const std::string& name) {
    if (name == "per-epoch") return RefreshPolicy::per_epoch;
    if (name == "per-batch") return RefreshPolicy::per_batch;
    if (name == "once") return RefreshPolicy::once;
    throw std::invalid_argument("unknown refresh policy '" + name + "'");
}

MaskRouting MaskRouting::by_class(std::span<const int> classes) {
    MaskRouting r;
    r.kind = Kind::per_row_class;
    r.classes.assign(classes.begin(), classes.end());
    return r;
}

MaskRouting resolve_eval_routing(EvalMode mode, std::span<const int> labels,
                                 const Matrix* unmasked_logits) {
    switch (mode) {
        case EvalMode::labeled:
            if (labels.empty()) throw std::invalid_argument("labeled eval mode needs labels");
            return MaskRouting::by_class(labels);
        case EvalMode::predicted: {
            if (unmasked_logits == nullptr) {
                throw std::invalid_argument("predicted eval mode needs unmasked logits");
            }
            const auto predicted = argmax_rows(*unmasked_logits);
            return MaskRouting::by_class(predicted);
        }
        case EvalMode::union_: return {MaskRouting::Kind::union_, {}};
        case EvalMode::intersection: return {MaskRouting::Kind::intersection, {}};
        case EvalMode::off: return MaskRouting::off_routing();
    }
    return MaskRouting::off_routing();
}

NsDropoutLayer::NsDropoutLayer(std::size_t units, int class_count, double p,
                               DeviationMetric metric)
    : units_(units),
      class_count_(class_count),
      p_(p),
      metric_(metric),
      current_(all_ones_masks(class_count, units)) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("NsDropoutLayer: p must lie in [0, 1]");
    if (class_count <= 0) throw std::invalid_argument("NsDropoutLayer: class_count must be positive");
    current_.p = p;
}

void NsDropoutLayer::set_masks(MaskSet masks) {
    if (masks.masks.shape() != current_.masks.shape()) {
        throw ShapeError("NsDropoutLayer::set_masks", masks.masks.shape(), current_.masks.shape());
    }
    previous_ = std::move(current_);
    current_ = std::move(masks);
}

const MaskSet& NsDropoutLayer::refresh(const Matrix& train_inputs,
                                       std::span<const int> train_labels,
                                       const Matrix& reference_inputs,
                                       std::span<const int> reference_labels) {
    if (train_inputs.cols() != units_) {
        throw ShapeError("NsDropoutLayer::refresh", train_inputs.shape(), {1, units_});
    }
    if (reference_inputs.cols() != units_) {
        throw ShapeError("NsDropoutLayer::refresh", reference_inputs.shape(), {1, units_});
    }
    const auto train_means = class_means(train_inputs, class_group(train_labels, class_count_));
    const auto ref_means =
        class_means(reference_inputs, class_group(reference_labels, class_count_));
    set_masks(build_masks(train_means, ref_means, p_, metric_));
    return current_;
}

std::vector<double> NsDropoutLayer::combined_mask(MaskRouting::Kind kind) const {
    std::vector<double> out(units_, kind == MaskRouting::Kind::union_ ? 0.0 : 1.0);
    if (kind == MaskRouting::Kind::off || kind == MaskRouting::Kind::per_row_class) {
        std::fill(out.begin(), out.end(), 1.0);
        return out;
    }
    for (int c = 0; c < class_count_; ++c) {
        const auto m = current_.mask(c);
        for (std::size_t i = 0; i < units_; ++i) {
            if (kind == MaskRouting::Kind::union_ && m[i] != 0.0) out[i] = 1.0;
            if (kind == MaskRouting::Kind::intersection && m[i] == 0.0) out[i] = 0.0;
        }
    }
    return out;
}

Matrix NsDropoutLayer::forward(const Matrix& y, const MaskRouting& routing) {
    if (y.cols() != units_) throw ShapeError("NsDropoutLayer::forward", y.shape(), {1, units_});
    row_masks_ = Matrix(y.rows(), units_, 1.0);
    if (routing.kind == MaskRouting::Kind::per_row_class) {
        if (routing.classes.size() != y.rows()) {
            throw std::invalid_argument("NsDropoutLayer::forward: " +
                                        std::to_string(routing.classes.size()) +
                                        " row classes for " + std::to_string(y.rows()) + " rows");
        }
        for (std::size_t b = 0; b < y.rows(); ++b) {
            const int c = routing.classes[b];
            if (c < 0 || c >= class_count_) {
                throw std::out_of_range("NsDropoutLayer::forward: class " + std::to_string(c) +
                                        " out of range");
            }
            const auto m = current_.mask(c);
            std::copy(m.begin(), m.end(), row_masks_.row(b).begin());
        }
    } else if (routing.kind != MaskRouting::Kind::off) {
        const auto shared = combined_mask(routing.kind);
        for (std::size_t b = 0; b < y.rows(); ++b) {
            std::copy(shared.begin(), shared.end(), row_masks_.row(b).begin());
        }
    }
    Matrix out = y;
    auto ov = out.values();
    const auto mv = row_masks_.values();
    for (std::size_t k = 0; k < ov.size(); ++k) ov[k] *= mv[k];
    has_forward_ = true;
    return out;
}

Matrix NsDropoutLayer::backward(const Matrix& dy) const {
    if (!has_forward_) throw std::logic_error("NsDropoutLayer::backward called before forward");
    if (dy.shape() != row_masks_.shape()) {
        throw ShapeError("NsDropoutLayer::backward", dy.shape(), row_masks_.shape());
    }
    Matrix dx = dy;
    auto dv = dx.values();
    const auto mv = row_masks_.values();
    for (std::size_t k = 0; k < dv.size(); ++k) dv[k] *= mv[k];
    return dx;
}

}  // namespace nsd::ns
