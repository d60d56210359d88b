#include "nsd/harness/metrics.hpp"

#include <cstdio>
#include <stdexcept>

namespace nsd::harness {

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10f", v);
    return buf;
}

std::string metrics_csv(std::span<const MetricsRecord> records, std::span<const ns::EvalMode> modes) {
    std::string out = "epoch,train_loss,train_acc,unseen_val_acc";
    for (auto m : modes) out += ",test_acc_" + ns::to_string(m);
    out += ",mask_churn\n";
    for (const auto& r : records) {
        if (r.test_acc.size() != modes.size()) {
            throw std::invalid_argument("metrics_csv: record has wrong number of test accuracies");
        }
        out += std::to_string(r.epoch) + ',' + format_real(r.train_loss) + ',' +
               format_real(r.train_acc) + ',' + format_real(r.unseen_val_acc);
        for (double a : r.test_acc) out += ',' + format_real(a);
        out += ',' + format_real(r.mask_churn) + '\n';
    }
    return out;
}

std::string timing_csv(std::span<const MetricsRecord> records) {
    std::string out = "epoch,wall_seconds\n";
    for (const auto& r : records) out += std::to_string(r.epoch) + ',' + format_real(r.wall_time) + '\n';
    return out;
}

std::size_t select_best_epoch(std::span<const MetricsRecord> records) {
    if (records.empty()) throw std::invalid_argument("select_best_epoch: no records");
    const MetricsRecord* best = &records.front();
    for (const auto& r : records)
        if (r.unseen_val_acc > best->unseen_val_acc) best = &r;
    return best->epoch;
}

ConfusionMatrix confusion_matrix(std::span<const int> truth, std::span<const int> predicted,
                                 int class_count) {
    if (truth.size() != predicted.size()) throw std::invalid_argument("confusion_matrix: length mismatch");
    const auto n = static_cast<std::size_t>(class_count);
    ConfusionMatrix m(n, std::vector<std::size_t>(n, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++m.at(static_cast<std::size_t>(truth[i])).at(static_cast<std::size_t>(predicted[i]));
    }
    return m;
}

double accuracy(const ConfusionMatrix& m) {
    std::size_t diag = 0, total = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m[i].size(); ++j) total += m[i][j];
        diag += m[i][i];
    }
    return total == 0 ? 0.0 : static_cast<double>(diag) / static_cast<double>(total);
}

double accuracy(std::span<const int> truth, std::span<const int> predicted) {
    if (truth.size() != predicted.size()) throw std::invalid_argument("accuracy: length mismatch");
    if (truth.empty()) return 0.0;
    std::size_t hit = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == predicted[i] ? 1 : 0;
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

std::string confusion_csv(const ConfusionMatrix& m) {
    std::string out = "true\\pred";
    for (std::size_t j = 0; j < m.size(); ++j) out += ',' + std::to_string(j);
    out += '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out += std::to_string(i);
        for (std::size_t v : m[i]) out += ',' + std::to_string(v);
        out += '\n';
    }
    return out;
}

}  // namespace nsd::harness
