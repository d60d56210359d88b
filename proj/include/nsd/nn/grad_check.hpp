#pragma once

#include <cstddef>
#include <cstdint>

#include "nsd/core/batch.hpp"
#include "nsd/nn/network.hpp"

namespace nsd::nn {

struct GradCheckOptions {
    double epsilon = 1e-5;
    /// Parameters sampled per weight matrix and per bias vector.
    std::size_t samples_per_tensor = 40;
    std::uint64_t seed = 7;
};

struct GradCheckResult {
    double max_relative_error = 0.0;
    std::size_t checked = 0;
};

/// |a - n| / max(|a|, |n|), defined as 0 when both are exactly zero.
double relative_error(double analytic, double numeric);

/// Sets every bias to a uniform draw from [-scale, scale]. Freshly built
/// networks have zero biases, so a row whose inputs are all zero (dropped or
/// dead) sits exactly on a ReLU kink where finite differences are invalid.
void move_off_kinks(Network& network, std::uint64_t seed, double scale = 0.1);

/// Compares backprop gradients against central differences
/// (L(theta + eps) - L(theta - eps)) / (2 eps) on sampled parameters.
///
/// The pass runs in train mode. Standard dropout masks are sampled once and
/// frozen for the whole check; NSDropout masks are used as currently
/// installed, routed by the batch labels.
GradCheckResult grad_check(Network& network, const LabeledBatch& batch,
                           const GradCheckOptions& options = {});

}  // namespace nsd::nn
