#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nsd/harness/config.hpp"
#include "nsd/harness/data.hpp"

namespace nsd::harness {

/// Rectangular CSV table.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv() const;
    std::size_t column(const std::string& name) const;
};

/// One run per p for each of nsdropout and dropout, plus a shared
/// unregularized baseline, all on one split. Every value in `drop_at` of
/// the base config is replaced by a single entry {position: p}. Errors are
/// taken at each run's best unseen-validation epoch.
///
/// Columns: p, baseline_*, ns_*, dropout_* where * is best_epoch, train_err,
/// unseen_err and test_err_<mode> per eval mode.
/// Throws ConfigError for a p outside [0, 1) or one that would drop every unit.
Table sweep_p(const ExperimentConfig& base, const DataSource& source, std::span<const double> p_list,
              std::size_t position = 1, const std::filesystem::path& run_dir = {});

/// One split per budget, drawn stratified unless the base config says
/// `never`; nsdropout and dropout train on the identical split.
///
/// Columns: n, train_rows, unseen_rows, min_class_train, then ns_* and dropout_*.
Table sweep_size(const ExperimentConfig& base, const DataSource& source, std::span<const std::size_t> sizes,
                 const std::filesystem::path& run_dir = {});

}  // namespace nsd::harness
