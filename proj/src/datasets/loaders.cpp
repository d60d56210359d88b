#include "nsd/datasets/loaders.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>

namespace nsd::data {

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(DataError::Code::io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(DataError::Code::io, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError(DataError::Code::io, "failed writing " + path.string());
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t at,
                        const std::filesystem::path& path) {
    if (b.size() < at + 4) {
        throw DataError(DataError::Code::truncated, path.string() + ": header truncated");
    }
    return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
           (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
}

void put_be32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) b.push_back(static_cast<std::uint8_t>(v >> shift));
}

void check_magic(std::uint32_t got, std::uint32_t want, const std::filesystem::path& path) {
    if (got != want) {
        char buf[64];
        std::snprintf(buf, sizeof buf, ": bad magic 0x%08x (expected 0x%08x)", got, want);
        throw DataError(DataError::Code::bad_magic, path.string() + buf);
    }
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path, std::string name, int class_count) {
    const auto img = read_file(images_path);
    check_magic(read_be32(img, 0, images_path), idx_images_magic, images_path);
    const std::size_t count = read_be32(img, 4, images_path);
    const std::size_t rows = read_be32(img, 8, images_path);
    const std::size_t cols = read_be32(img, 12, images_path);
    const std::size_t dim = rows * cols;
    if (img.size() - 16 < count * dim) {
        throw DataError(DataError::Code::truncated,
                        images_path.string() + ": expected " + std::to_string(count * dim) +
                            " pixel bytes, found " + std::to_string(img.size() - 16));
    }

    const auto lab = read_file(labels_path);
    check_magic(read_be32(lab, 0, labels_path), idx_labels_magic, labels_path);
    const std::size_t label_count = read_be32(lab, 4, labels_path);
    if (lab.size() - 8 < label_count) {
        throw DataError(DataError::Code::truncated,
                        labels_path.string() + ": expected " + std::to_string(label_count) +
                            " label bytes, found " + std::to_string(lab.size() - 8));
    }
    if (label_count != count) {
        throw DataError(DataError::Code::count_mismatch,
                        "IDX count mismatch: " + std::to_string(count) + " images vs " +
                            std::to_string(label_count) + " labels");
    }

    Dataset ds{std::move(name), dim, class_count, {}, {}};
    ds.pixels.assign(img.begin() + 16, img.begin() + 16 + static_cast<std::ptrdiff_t>(count * dim));
    ds.labels.reserve(count);
    for (std::size_t i = 0; i < count; ++i) ds.labels.push_back(lab[8 + i]);
    ds.validate();
    return ds;
}

Dataset load_cifar10(const std::vector<std::filesystem::path>& batch_paths, std::string name) {
    Dataset ds{std::move(name), cifar_image_bytes, 10, {}, {}};
    for (const auto& path : batch_paths) {
        const auto bytes = read_file(path);
        if (bytes.size() % cifar_record_bytes != 0) {
            throw DataError(DataError::Code::bad_size,
                            path.string() + ": size " + std::to_string(bytes.size()) +
                                " is not a multiple of 3073");
        }
        for (std::size_t at = 0; at < bytes.size(); at += cifar_record_bytes) {
            ds.labels.push_back(bytes[at]);
            ds.pixels.insert(ds.pixels.end(), bytes.begin() + static_cast<std::ptrdiff_t>(at + 1),
                             bytes.begin() + static_cast<std::ptrdiff_t>(at + cifar_record_bytes));
        }
    }
    ds.validate();
    return ds;
}

void write_idx(const Dataset& dataset, std::size_t rows, std::size_t cols,
               const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
    if (rows * cols != dataset.dim) {
        throw DataError(DataError::Code::bad_request, "write_idx: rows * cols must equal dim");
    }
    std::vector<std::uint8_t> img;
    put_be32(img, idx_images_magic);
    put_be32(img, static_cast<std::uint32_t>(dataset.size()));
    put_be32(img, static_cast<std::uint32_t>(rows));
    put_be32(img, static_cast<std::uint32_t>(cols));
    img.insert(img.end(), dataset.pixels.begin(), dataset.pixels.end());
    write_file(images_path, img);

    std::vector<std::uint8_t> lab;
    put_be32(lab, idx_labels_magic);
    put_be32(lab, static_cast<std::uint32_t>(dataset.size()));
    for (int y : dataset.labels) lab.push_back(static_cast<std::uint8_t>(y));
    write_file(labels_path, lab);
}

void write_cifar10(const Dataset& dataset, const std::filesystem::path& path) {
    if (dataset.dim != cifar_image_bytes) {
        throw DataError(DataError::Code::bad_request, "write_cifar10: images must have 3072 bytes");
    }
    std::vector<std::uint8_t> bytes;
    bytes.reserve(dataset.size() * cifar_record_bytes);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        bytes.push_back(static_cast<std::uint8_t>(dataset.labels[i]));
        const auto img = dataset.image(i);
        bytes.insert(bytes.end(), img.begin(), img.end());
    }
    write_file(path, bytes);
}

}  // namespace nsd::data
