#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "nsd/core/matrix.hpp"

namespace nsd {

/// Inputs with one integer class label per row.
struct LabeledBatch {
    Matrix inputs;
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }

    void validate(int class_count) const {
        if (inputs.rows() != labels.size()) {
            throw std::invalid_argument("LabeledBatch: " + std::to_string(inputs.rows()) +
                                        " rows but " + std::to_string(labels.size()) + " labels");
        }
        for (int y : labels) {
            if (y < 0 || y >= class_count) {
                throw std::out_of_range("LabeledBatch: label " + std::to_string(y) +
                                        " outside [0, " + std::to_string(class_count) + ")");
            }
        }
    }
};

inline LabeledBatch select_rows(const LabeledBatch& batch, std::span<const std::size_t> rows) {
    LabeledBatch out{gather_rows(batch.inputs, rows), {}};
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) out.labels.push_back(batch.labels[r]);
    return out;
}

}  // namespace nsd
