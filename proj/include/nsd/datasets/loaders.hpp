#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nsd/datasets/dataset.hpp"

namespace nsd::data {

inline constexpr std::uint32_t idx_images_magic = 0x00000803;
inline constexpr std::uint32_t idx_labels_magic = 0x00000801;
inline constexpr std::size_t cifar_record_bytes = 3073;
inline constexpr std::size_t cifar_image_bytes = 3072;

/// Big-endian IDX pair (MNIST / Fashion-MNIST layout):
///   images: magic 0x00000803, u32 count, u32 rows, u32 cols, count*rows*cols bytes
///   labels: magic 0x00000801, u32 count, count bytes
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path, std::string name = "idx",
                 int class_count = 10);

/// CIFAR-10 binary batches: 3073-byte records of one label byte followed by
/// 1024 red, 1024 green and 1024 blue bytes. Records keep the stored
/// channel-major order and files are concatenated in argument order.
Dataset load_cifar10(const std::vector<std::filesystem::path>& batch_paths,
                     std::string name = "cifar10");

void write_idx(const Dataset& dataset, std::size_t rows, std::size_t cols,
               const std::filesystem::path& images_path, const std::filesystem::path& labels_path);
void write_cifar10(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace nsd::data
