#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsd/core/matrix.hpp"
#include "nsd/nsdropout/masks.hpp"

namespace nsd::ns {

/// How evaluation rows pick a class mask.
enum class EvalMode {
    labeled,       // mask of the true label
    predicted,     // mask of the argmax class of an unmasked first pass
    union_,        // one mask keeping units kept by any class
    intersection,  // one mask keeping units kept by every class
    off,           // no masking
};

std::string to_string(EvalMode mode);
EvalMode parse_eval_mode(const std::string& name);

enum class RefreshPolicy { per_epoch, per_batch, once };

std::string to_string(RefreshPolicy policy);
RefreshPolicy parse_refresh_policy(const std::string& name);

/// Resolved mapping from batch rows to masks for one pass.
struct MaskRouting {
    enum class Kind { per_row_class, union_, intersection, off };
    Kind kind = Kind::off;
    std::vector<int> classes;  // per row, when kind == per_row_class

    static MaskRouting by_class(std::span<const int> classes);
    static MaskRouting off_routing() { return {}; }
};

/// Picks the routing for `mode`. `labels` is required by labeled mode and
/// `unmasked_logits` (output of a pass with masking off) by predicted mode.
MaskRouting resolve_eval_routing(EvalMode mode, std::span<const int> labels,
                                 const Matrix* unmasked_logits);

/// Deterministic per-class masking of a layer's activations.
///
/// Kept units are not rescaled: masks persist into evaluation, so the train
/// and eval activation scales already agree.
class NsDropoutLayer {
public:
    NsDropoutLayer(std::size_t units, int class_count, double p,
                   DeviationMetric metric = DeviationMetric::absolute);

    std::size_t units() const { return units_; }
    int class_count() const { return class_count_; }
    double p() const { return p_; }
    DeviationMetric metric() const { return metric_; }

    const MaskSet& masks() const { return current_; }
    const std::optional<MaskSet>& previous_masks() const { return previous_; }

    /// Replaces the current masks; the old ones become `previous_masks()`.
    void set_masks(MaskSet masks);

    /// Builds masks from the layer-input activations of a training batch and
    /// of the reference (unseen validation) set, then installs them.
    const MaskSet& refresh(const Matrix& train_inputs, std::span<const int> train_labels,
                           const Matrix& reference_inputs, std::span<const int> reference_labels);

    /// Multiplies each row by the mask its routing selects and keeps the
    /// per-row masks for backward.
    Matrix forward(const Matrix& y, const MaskRouting& routing);
    Matrix backward(const Matrix& dy) const;

    /// The single shared mask used by union / intersection routing.
    std::vector<double> combined_mask(MaskRouting::Kind kind) const;

private:
    std::size_t units_;
    int class_count_;
    double p_;
    DeviationMetric metric_;
    MaskSet current_;
    std::optional<MaskSet> previous_;
    Matrix row_masks_;
    bool has_forward_ = false;
};

}  // namespace nsd::ns
