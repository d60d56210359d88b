#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nsd/harness/config.hpp"
#include "nsd/harness/data.hpp"
#include "nsd/harness/metrics.hpp"
#include "nsd/harness/trace.hpp"
#include "nsd/nn/network.hpp"

namespace nsd::harness {

/// Non-finite loss or gradient. Carries the records emitted before it.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(std::size_t epoch, const std::string& what, std::vector<MetricsRecord> records);
    std::size_t epoch() const { return epoch_; }
    const std::vector<MetricsRecord>& records() const { return records_; }

private:
    std::size_t epoch_;
    std::vector<MetricsRecord> records_;
};

/// Seeds of the independent random streams of one run.
struct RunSeeds {
    std::uint64_t split, init, dropout, shuffle;
};
RunSeeds run_seeds(std::uint64_t seed);

struct RunResult {
    std::vector<MetricsRecord> records;
    nn::Network model;
    std::vector<MaskTraceRecord> trace;
    std::vector<ConfusionMatrix> confusion;  // test set, one per eval mode
    std::size_t best_epoch = 0;
    std::size_t absent_class_events = 0;     // class masks left all-ones
};

/// Trains from scratch for config.epochs, or up to `stop_epoch` when given.
RunResult run_training(const ExperimentConfig& config, const PreparedData& data,
                       std::optional<std::size_t> stop_epoch = std::nullopt);

struct RetrainResult {
    RunResult phase1;
    RunResult phase2;
    std::size_t best_epoch = 0;
};

/// Full run, then a fresh run with the same seed stopped at the phase-1 best
/// unseen-validation epoch.
RetrainResult run_retrain_schedule(const ExperimentConfig& config, const PreparedData& data);

/// Writes metrics.csv, timing.csv, run.json, confusion_<mode>.csv and, when
/// enabled, mask_trace.csv, mask_churn.csv and model.nsdw into `dir`.
void write_run_outputs(const RunResult& run, const ExperimentConfig& config, const PreparedData& data,
                       const std::filesystem::path& dir);

/// Run metadata: every config field plus resolved values. No timestamps.
nlohmann::json run_metadata(const RunResult& run, const ExperimentConfig& config, const PreparedData& data);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace nsd::harness
