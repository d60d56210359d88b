#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsd/core/batch.hpp"
#include "nsd/core/matrix.hpp"

namespace nsd::data {

class DataError : public std::runtime_error {
public:
    enum class Code { io, bad_magic, truncated, count_mismatch, bad_size, bad_label, bad_request };

    DataError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

/// Image classification set. Pixels stay as the raw bytes the files hold;
/// features are scaled to [0, 1] (divided by 255) when materialized.
struct Dataset {
    std::string name;
    std::size_t dim = 0;
    int class_count = 0;
    std::vector<std::uint8_t> pixels;  // size() * dim, row-major
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }
    std::span<const std::uint8_t> image(std::size_t i) const { return {pixels.data() + i * dim, dim}; }

    /// All images as an N x dim matrix in [0, 1].
    Matrix images() const;
    /// Selected rows, scaled to [0, 1], with their labels.
    LabeledBatch batch(std::span<const std::size_t> rows) const;
    LabeledBatch all() const;

    /// Rows copied into a new dataset, in the given order.
    Dataset subset(std::span<const std::size_t> rows) const;

    void validate() const;
};

std::vector<std::size_t> class_histogram(std::span<const int> labels, int class_count);

}  // namespace nsd::data
