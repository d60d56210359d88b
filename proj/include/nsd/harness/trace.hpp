#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace nsd::harness {

/// One class mask as installed by one refresh.
/// `refresh` counts refreshes within the epoch from 0; `layer` indexes the
/// network's NSDropout layers in order.
struct MaskTraceRecord {
    std::size_t epoch = 0;
    std::size_t refresh = 0;
    std::size_t layer = 0;
    int class_id = 0;
    std::size_t units = 0;
    std::string kept_hex;

    bool operator==(const MaskTraceRecord&) const = default;
};

// mask_trace.csv: epoch,refresh,layer,class,units,kept_hex
std::string mask_trace_csv(std::span<const MaskTraceRecord> records);
std::vector<MaskTraceRecord> parse_mask_trace(const std::string& text);
std::vector<MaskTraceRecord> read_mask_trace(const std::filesystem::path& path);

struct ChurnPoint {
    std::size_t epoch = 0;  // churn between epoch-1 and epoch
    std::size_t layer = 0;
    double mean_changed = 0.0;
};

/// Replays a trace: the masks in force at the end of each epoch are those of
/// its last refresh, carried forward through epochs without one. Emits one
/// point per layer for every epoch pair (2..epochs).
std::vector<ChurnPoint> churn_series(std::span<const MaskTraceRecord> records, std::size_t epochs);

// mask_churn.csv: epoch,layer,mean_changed
std::string churn_csv(std::span<const ChurnPoint> points);

}  // namespace nsd::harness
