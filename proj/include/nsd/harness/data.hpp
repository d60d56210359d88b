#pragma once

#include <vector>

#include "nsd/core/batch.hpp"
#include "nsd/datasets/dataset.hpp"
#include "nsd/harness/config.hpp"

namespace nsd::harness {

/// Source training pool and test set for a dataset configuration.
struct DataSource {
    data::Dataset pool;
    data::Dataset test;
};

/// Loads from files (mnist, fashion-mnist, idx, cifar10) or generates
/// (synthetic). Default file names under the data root:
///   mnist/, fashion-mnist/   train-images-idx3-ubyte, train-labels-idx1-ubyte,
///                            t10k-images-idx3-ubyte, t10k-labels-idx1-ubyte
///   cifar-10-batches-bin/    data_batch_1.bin .. data_batch_5.bin, test_batch.bin
DataSource load_source(const DatasetConfig& config);

/// Materialized features for one run.
struct PreparedData {
    LabeledBatch train;
    LabeledBatch unseen;
    LabeledBatch test;
    std::vector<std::size_t> train_indices;   // rows of the source pool
    std::vector<std::size_t> unseen_indices;
    int class_count = 0;
};

/// Draws the budget, splits it into train / unseen validation and applies
/// the optional centering and ZCA whitening fitted on the training part.
PreparedData prepare(const DataSource& source, const ExperimentConfig& config);

}  // namespace nsd::harness
