#include "nsd/datasets/split.hpp"

#include <cmath>
#include <numeric>

#include "nsd/core/rng.hpp"

namespace nsd::data {

std::vector<std::size_t> draw_indices(std::span<const int> labels, int class_count, std::size_t n,
                                      std::uint64_t seed, bool stratified) {
    if (n > labels.size()) {
        throw DataError(DataError::Code::bad_request,
                        "cannot draw " + std::to_string(n) + " rows from " +
                            std::to_string(labels.size()));
    }
    Rng rng(seed);
    if (!stratified) {
        std::vector<std::size_t> perm(labels.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        rng.shuffle(std::span<std::size_t>(perm));
        perm.resize(n);
        return perm;
    }

    const auto classes = static_cast<std::size_t>(class_count);
    if (n < classes) {
        throw DataError(DataError::Code::bad_request,
                        "stratified draw of " + std::to_string(n) + " rows cannot cover " +
                            std::to_string(classes) + " classes");
    }
    std::vector<std::vector<std::size_t>> pools(classes);
    for (std::size_t i = 0; i < labels.size(); ++i) pools.at(static_cast<std::size_t>(labels[i])).push_back(i);
    for (auto& pool : pools) rng.shuffle(std::span<std::size_t>(pool));

    std::vector<std::size_t> class_order(classes);
    std::iota(class_order.begin(), class_order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(class_order));

    // Round-robin over the shuffled class order; a class that runs out is
    // skipped, so the draw stays as balanced as the pool allows.
    std::vector<std::size_t> out;
    out.reserve(n);
    for (std::size_t round = 0; out.size() < n; ++round) {
        for (std::size_t c : class_order) {
            if (out.size() == n) break;
            if (round < pools[c].size()) out.push_back(pools[c][round]);
        }
    }
    return out;
}

Split split(const Dataset& dataset, const SplitSpec& spec) {
    if (!(spec.train_frac > 0.0 && spec.train_frac <= 1.0)) {
        throw DataError(DataError::Code::bad_request, "train_frac must lie in (0, 1]");
    }
    if (spec.budget > dataset.size()) {
        throw DataError(DataError::Code::bad_request,
                        "budget " + std::to_string(spec.budget) + " exceeds " + dataset.name +
                            " size " + std::to_string(dataset.size()));
    }
    const auto drawn =
        draw_indices(dataset.labels, dataset.class_count, spec.budget, spec.seed, spec.stratified);
    auto train_count = static_cast<std::size_t>(
        std::floor(static_cast<double>(spec.budget) * spec.train_frac + 0.5 + 1e-9));
    if (train_count > spec.budget) train_count = spec.budget;
    if (train_count == spec.budget) {
        throw DataError(DataError::Code::bad_request,
                        "split leaves the unseen validation set empty (budget " +
                            std::to_string(spec.budget) + ", train_frac " +
                            std::to_string(spec.train_frac) + ")");
    }
    if (train_count == 0) {
        throw DataError(DataError::Code::bad_request, "split leaves the training set empty");
    }
    Split out;
    out.train_indices.assign(drawn.begin(), drawn.begin() + static_cast<std::ptrdiff_t>(train_count));
    out.unseen_indices.assign(drawn.begin() + static_cast<std::ptrdiff_t>(train_count), drawn.end());
    out.train = dataset.subset(out.train_indices);
    out.unseen = dataset.subset(out.unseen_indices);
    return out;
}

Dataset subsample(const Dataset& dataset, std::size_t n, std::uint64_t seed, bool stratified) {
    return dataset.subset(draw_indices(dataset.labels, dataset.class_count, n, seed, stratified));
}

}  // namespace nsd::data
