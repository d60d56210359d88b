#include "nsd/datasets/dataset.hpp"

#include <numeric>

namespace nsd::data {

Matrix Dataset::images() const {
    std::vector<std::size_t> rows(size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return batch(rows).inputs;
}

LabeledBatch Dataset::batch(std::span<const std::size_t> rows) const {
    LabeledBatch out{Matrix(rows.size(), dim), {}};
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= size()) {
            throw DataError(DataError::Code::bad_request, "Dataset::batch: row out of range");
        }
        const auto src = image(rows[i]);
        auto dst = out.inputs.row(i);
        for (std::size_t k = 0; k < dim; ++k) dst[k] = static_cast<double>(src[k]) / 255.0;
        out.labels.push_back(labels[rows[i]]);
    }
    return out;
}

LabeledBatch Dataset::all() const {
    std::vector<std::size_t> rows(size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return batch(rows);
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out{name, dim, class_count, {}, {}};
    out.pixels.reserve(rows.size() * dim);
    out.labels.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= size()) throw DataError(DataError::Code::bad_request, "Dataset::subset: row out of range");
        const auto src = image(r);
        out.pixels.insert(out.pixels.end(), src.begin(), src.end());
        out.labels.push_back(labels[r]);
    }
    return out;
}

void Dataset::validate() const {
    if (pixels.size() != labels.size() * dim) {
        throw DataError(DataError::Code::count_mismatch,
                        name + ": pixel buffer does not match " + std::to_string(size()) + " x " +
                            std::to_string(dim));
    }
    for (int y : labels) {
        if (y < 0 || y >= class_count) {
            throw DataError(DataError::Code::bad_label,
                            name + ": label " + std::to_string(y) + " outside [0, " +
                                std::to_string(class_count) + ")");
        }
    }
}

std::vector<std::size_t> class_histogram(std::span<const int> labels, int class_count) {
    std::vector<std::size_t> counts(static_cast<std::size_t>(class_count), 0);
    for (int y : labels) ++counts.at(static_cast<std::size_t>(y));
    return counts;
}

}  // namespace nsd::data
