#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nsd/core/matrix.hpp"

namespace nsd::ns {

/// Row indices of each class, in their original (stable) batch order.
/// Classes without samples get an empty list.
using ClassGroups = std::vector<std::vector<std::size_t>>;

ClassGroups class_group(std::span<const int> labels, int class_count);

/// Per-class, per-unit mean activation table (classes x units).
/// Rows of absent classes are zero and flagged by count == 0.
struct ClassMeans {
    Matrix means;
    std::vector<std::size_t> counts;

    int class_count() const { return static_cast<int>(counts.size()); }
    std::size_t units() const { return means.cols(); }
    bool present(int c) const { return counts[static_cast<std::size_t>(c)] > 0; }
};

ClassMeans class_means(const Matrix& z, const ClassGroups& groups);

enum class DeviationMetric {
    absolute,  // |train - reference|, largest dropped
    signed_,   // train - reference, largest dropped
};

/// round_half_up(units * p), clamped to [0, units]. A 1e-9 slack absorbs
/// binary representation error in p, so 25 * 0.3 counts as 7.5 -> 8.
std::size_t drop_count(std::size_t units, double p);

/// One keep/drop vector per class: 1 keeps a unit, 0 drops it.
struct MaskSet {
    Matrix masks;
    std::size_t drop_count = 0;
    double p = 0.0;
    /// Classes missing from the training or the reference means; their mask is all ones.
    std::vector<int> absent_classes;

    int class_count() const { return static_cast<int>(masks.rows()); }
    std::size_t units() const { return masks.cols(); }
    std::span<const double> mask(int c) const { return masks.row(static_cast<std::size_t>(c)); }

    bool operator==(const MaskSet&) const = default;
};

MaskSet all_ones_masks(int class_count, std::size_t units);

/// Drops, per class, the drop_count(units, p) units whose training mean
/// deviates most from the reference mean. Ties drop the lower unit index.
MaskSet build_masks(const ClassMeans& train, const ClassMeans& reference, double p,
                    DeviationMetric metric = DeviationMetric::absolute);

struct MaskChurn {
    std::vector<std::size_t> changed;  // per class
    double mean = 0.0;
};

/// Per-class count of units whose keep/drop state differs.
MaskChurn mask_churn(const MaskSet& current, const MaskSet& previous);

/// Kept-bitmap as hex. Digit j covers units 4j..4j+3 with unit 4j in the
/// most significant bit, so "c" is the mask 1,1,0,0.
std::string mask_to_hex(std::span<const double> mask);
std::vector<double> mask_from_hex(const std::string& hex, std::size_t units);

}  // namespace nsd::ns
