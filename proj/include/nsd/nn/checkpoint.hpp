#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsd/nn/network.hpp"

namespace nsd::nn {

/// Model checkpoint, all integers little-endian u32, all reals little-endian
/// IEEE-754 binary64:
///
///   "NSDW"  version=1  layer_count  class_count
///   per layer: kind, then
///     0 dense      in, out, W[in*out] (row-major), b[out]
///     1 relu       units
///     2 dropout    units, drop_prob
///     3 nsdropout  units, classes, p, metric (0 abs, 1 signed), drop_count,
///                  masks[classes*units] (row per class, 1 keep / 0 drop)
inline constexpr std::uint32_t checkpoint_version = 1;

class CheckpointError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode_checkpoint(const Network& network);
Network decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const Network& network, const std::filesystem::path& path);
Network load_checkpoint(const std::filesystem::path& path);

}  // namespace nsd::nn
