#include "nsd/nsdropout/masks.hpp"

#include <cmath>
#include <stdexcept>
#include <string_view>

namespace nsd::ns {

ClassGroups class_group(std::span<const int> labels, int class_count) {
    if (class_count <= 0) throw std::invalid_argument("class_group: class_count must be positive");
    ClassGroups groups(static_cast<std::size_t>(class_count));
    for (std::size_t b = 0; b < labels.size(); ++b) {
        const int c = labels[b];
        if (c < 0 || c >= class_count) {
            throw std::out_of_range("class_group: label " + std::to_string(c) + " at row " +
                                    std::to_string(b) + " outside [0, " +
                                    std::to_string(class_count) + ")");
        }
        groups[static_cast<std::size_t>(c)].push_back(b);
    }
    return groups;
}

ClassMeans class_means(const Matrix& z, const ClassGroups& groups) {
    ClassMeans out{Matrix(groups.size(), z.cols()), std::vector<std::size_t>(groups.size(), 0)};
    for (std::size_t c = 0; c < groups.size(); ++c) {
        if (groups[c].empty()) continue;
        const auto mean = row_mean(z, groups[c]);
        std::copy(mean.begin(), mean.end(), out.means.row(c).begin());
        out.counts[c] = groups[c].size();
    }
    return out;
}

std::size_t drop_count(std::size_t units, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("drop_count: p must lie in [0, 1]");
    const double scaled = std::floor(static_cast<double>(units) * p + 0.5 + 1e-9);
    const auto k = static_cast<std::size_t>(scaled);
    return k > units ? units : k;
}

MaskSet all_ones_masks(int class_count, std::size_t units) {
    MaskSet m;
    m.masks = Matrix(static_cast<std::size_t>(class_count), units, 1.0);
    return m;
}

MaskSet build_masks(const ClassMeans& train, const ClassMeans& reference, double p,
                    DeviationMetric metric) {
    if (train.means.shape() != reference.means.shape() ||
        train.counts.size() != reference.counts.size()) {
        throw ShapeError("build_masks", train.means.shape(), reference.means.shape());
    }
    const std::size_t units = train.units();
    MaskSet out = all_ones_masks(train.class_count(), units);
    out.p = p;
    out.drop_count = drop_count(units, p);

    std::vector<double> deviation(units);
    for (int c = 0; c < train.class_count(); ++c) {
        if (!train.present(c) || !reference.present(c)) {
            out.absent_classes.push_back(c);
            continue;
        }
        const auto t = train.means.row(static_cast<std::size_t>(c));
        const auto v = reference.means.row(static_cast<std::size_t>(c));
        for (std::size_t i = 0; i < units; ++i) {
            const double d = t[i] - v[i];
            deviation[i] = metric == DeviationMetric::absolute ? std::abs(d) : d;
        }
        auto row = out.masks.row(static_cast<std::size_t>(c));
        for (std::size_t i : top_k_indices(deviation, out.drop_count)) row[i] = 0.0;
    }
    return out;
}

MaskChurn mask_churn(const MaskSet& current, const MaskSet& previous) {
    if (current.masks.shape() != previous.masks.shape()) {
        throw ShapeError("mask_churn", current.masks.shape(), previous.masks.shape());
    }
    MaskChurn out;
    out.changed.assign(static_cast<std::size_t>(current.class_count()), 0);
    std::size_t total = 0;
    for (std::size_t c = 0; c < out.changed.size(); ++c) {
        const auto a = current.masks.row(c);
        const auto b = previous.masks.row(c);
        for (std::size_t i = 0; i < a.size(); ++i) out.changed[c] += (a[i] != b[i]) ? 1 : 0;
        total += out.changed[c];
    }
    if (!out.changed.empty()) out.mean = static_cast<double>(total) / out.changed.size();
    return out;
}

std::string mask_to_hex(std::span<const double> mask) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string hex((mask.size() + 3) / 4, '0');
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i] == 0.0) continue;
        const auto nibble = static_cast<int>(std::string_view(digits).find(hex[i / 4]));
        hex[i / 4] = digits[nibble | (8 >> (i % 4))];
    }
    return hex;
}

std::vector<double> mask_from_hex(const std::string& hex, std::size_t units) {
    if (hex.size() != (units + 3) / 4) {
        throw std::invalid_argument("mask_from_hex: expected " + std::to_string((units + 3) / 4) +
                                    " hex digits for " + std::to_string(units) + " units");
    }
    std::vector<double> mask(units, 0.0);
    for (std::size_t j = 0; j < hex.size(); ++j) {
        const char ch = hex[j];
        int nibble;
        if (ch >= '0' && ch <= '9') nibble = ch - '0';
        else if (ch >= 'a' && ch <= 'f') nibble = ch - 'a' + 10;
        else if (ch >= 'A' && ch <= 'F') nibble = ch - 'A' + 10;
        else throw std::invalid_argument(std::string("mask_from_hex: bad digit '") + ch + "'");
        for (std::size_t b = 0; b < 4; ++b) {
            const std::size_t unit = 4 * j + b;
            const bool set = (nibble & (8 >> b)) != 0;
            if (unit >= units) {
                if (set) throw std::invalid_argument("mask_from_hex: padding bits set");
                continue;
            }
            mask[unit] = set ? 1.0 : 0.0;
        }
    }
    return mask;
}

}  // namespace nsd::ns
