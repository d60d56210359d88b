#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nsd/datasets/dataset.hpp"

namespace nsd::data {

/// How a training budget is drawn and partitioned into the training part and
/// the unseen validation part (never used for weight updates).
struct SplitSpec {
    std::size_t budget = 0;
    double train_frac = 0.8;  // unseen fraction is 1 - train_frac
    std::uint64_t seed = 0;
    bool stratified = false;

    double unseen_frac() const { return 1.0 - train_frac; }
};

/// `n` row indices drawn without replacement, in a seeded random order.
///
/// Plain draws take the first n rows of a seeded Fisher-Yates shuffle.
/// Stratified draws interleave the classes round-robin in a seeded class
/// order, so every class gets n / C or n / C + 1 rows and any prefix is
/// balanced as well. A class with too few rows contributes all it has and
/// the others make up the difference.
std::vector<std::size_t> draw_indices(std::span<const int> labels, int class_count, std::size_t n,
                                      std::uint64_t seed, bool stratified);

struct Split {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> unseen_indices;
    Dataset train;
    Dataset unseen;
};

/// Draws `budget` rows and gives the first round_half_up(budget * train_frac)
/// to training and the rest to unseen validation. An empty unseen part is an
/// error.
Split split(const Dataset& dataset, const SplitSpec& spec);

Dataset subsample(const Dataset& dataset, std::size_t n, std::uint64_t seed, bool stratified);

}  // namespace nsd::data
