#pragma once

#include <cstdint>

#include "nsd/datasets/dataset.hpp"

namespace nsd::data {

/// Image-like synthetic classification data for offline runs and tests.
/// Each class has a random sparse prototype in [0, 255]; samples add
/// per-pixel Gaussian noise and clip to bytes. Fully determined by `seed`.
struct SyntheticSpec {
    std::size_t samples = 1000;
    std::size_t dim = 784;
    int classes = 10;
    double noise = 60.0;      // pixel noise standard deviation
    double density = 0.25;    // fraction of lit prototype pixels
    std::uint64_t seed = 1;
    /// Prototype seed; train and test sets sharing it come from the same distribution.
    std::uint64_t prototype_seed = 1;
};

Dataset make_synthetic(const SyntheticSpec& spec, std::string name = "synthetic");

}  // namespace nsd::data
