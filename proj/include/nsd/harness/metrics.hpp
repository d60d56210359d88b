#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nsd/nsdropout/layer.hpp"

namespace nsd::harness {

struct MetricsRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double train_acc = 0.0;
    double unseen_val_acc = 0.0;
    std::vector<double> test_acc;  // one per configured eval mode
    double mask_churn = 0.0;
    double wall_time = 0.0;        // seconds; kept out of metrics.csv
};

/// metrics.csv: header
///   epoch,train_loss,train_acc,unseen_val_acc,test_acc_<mode>...,mask_churn
/// then one row per epoch. Reals print with fixed precision so identical runs
/// give identical bytes. Wall time is written separately (timing.csv).
std::string metrics_csv(std::span<const MetricsRecord> records, std::span<const ns::EvalMode> modes);
std::string timing_csv(std::span<const MetricsRecord> records);

/// 1-based epoch with the highest unseen validation accuracy; earliest wins ties.
std::size_t select_best_epoch(std::span<const MetricsRecord> records);

using ConfusionMatrix = std::vector<std::vector<std::size_t>>;  // [true][predicted]

ConfusionMatrix confusion_matrix(std::span<const int> truth, std::span<const int> predicted,
                                 int class_count);
double accuracy(const ConfusionMatrix& m);
double accuracy(std::span<const int> truth, std::span<const int> predicted);
std::string confusion_csv(const ConfusionMatrix& m);

std::string format_real(double v);

}  // namespace nsd::harness
