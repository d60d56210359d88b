#include "nsd/harness/sweeps.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "nsd/harness/metrics.hpp"
#include "nsd/harness/trainer.hpp"
#include "nsd/nsdropout/masks.hpp"

namespace nsd::harness {

std::string Table::to_csv() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw std::logic_error("Table: ragged row");
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + row[i];
        out += '\n';
    }
    return out;
}

std::size_t Table::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::out_of_range("Table: no column " + name);
    return static_cast<std::size_t>(it - header.begin());
}

namespace {

void add_columns(std::vector<std::string>& header, const std::string& prefix, const ExperimentConfig& c) {
    header.push_back(prefix + "_best_epoch");
    header.push_back(prefix + "_train_err");
    header.push_back(prefix + "_unseen_err");
    for (auto m : c.eval_modes) header.push_back(prefix + "_test_err_" + ns::to_string(m));
}

void add_values(std::vector<std::string>& row, const RunResult& run) {
    const auto& r = run.records.at(run.best_epoch - 1);
    row.push_back(std::to_string(run.best_epoch));
    row.push_back(format_real(1.0 - r.train_acc));
    row.push_back(format_real(1.0 - r.unseen_val_acc));
    for (double a : r.test_acc) row.push_back(format_real(1.0 - a));
}

RunResult run_and_store(const ExperimentConfig& c, const PreparedData& data, const std::filesystem::path& run_dir,
                        const std::string& name) {
    auto run = run_training(c, data);
    if (!run_dir.empty()) {
        ExperimentConfig quiet = c;
        quiet.write_checkpoint = false;
        write_run_outputs(run, quiet, data, run_dir / name);
    }
    return run;
}

std::string p_label(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", p);
    return buf;
}

}  // namespace

Table sweep_p(const ExperimentConfig& base, const DataSource& source, std::span<const double> p_list,
              std::size_t position, const std::filesystem::path& run_dir) {
    const auto spec = base.network_spec();
    if (position > spec.hidden_layers()) {
        throw ConfigError("sweep position " + std::to_string(position) + " is past the last hidden layer");
    }
    const std::size_t width = spec.width_at(position);
    for (double p : p_list) {
        if (!(p >= 0.0 && p < 1.0)) throw ConfigError("sweep p " + p_label(p) + " outside [0, 1)");
        if (ns::drop_count(width, p) >= width) {
            throw ConfigError("p " + p_label(p) + " would drop all " + std::to_string(width) + " units");
        }
    }

    const PreparedData data = prepare(source, base);

    Table t;
    t.header.push_back("p");
    add_columns(t.header, "baseline", base);
    add_columns(t.header, "ns", base);
    add_columns(t.header, "dropout", base);

    ExperimentConfig baseline = base;
    baseline.regularizer = nn::Regularizer::none;
    baseline.drop_at.clear();
    const auto base_run = run_and_store(baseline, data, run_dir, "baseline");

    for (double p : p_list) {
        std::vector<std::string> row{p_label(p)};
        add_values(row, base_run);
        for (auto reg : {nn::Regularizer::nsdropout, nn::Regularizer::dropout}) {
            ExperimentConfig c = base;
            c.regularizer = reg;
            c.drop_at = {{position, p}};
            add_values(row, run_and_store(c, data, run_dir, "p" + p_label(p) + "_" + nn::to_string(reg)));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table sweep_size(const ExperimentConfig& base, const DataSource& source, std::span<const std::size_t> sizes,
                 const std::filesystem::path& run_dir) {
    for (std::size_t n : sizes) {
        if (n > source.pool.size()) {
            throw ConfigError("size " + std::to_string(n) + " exceeds the " + std::to_string(source.pool.size()) +
                              " available samples");
        }
    }
    Table t;
    t.header = {"n", "train_rows", "unseen_rows", "min_class_train"};
    add_columns(t.header, "ns", base);
    add_columns(t.header, "dropout", base);

    for (std::size_t n : sizes) {
        ExperimentConfig c = base;
        c.budget = n;
        if (c.stratify == Stratify::auto_) c.stratify = Stratify::always;
        const PreparedData data = prepare(source, c);
        std::vector<std::size_t> counts(static_cast<std::size_t>(data.class_count), 0);
        for (int y : data.train.labels) ++counts[static_cast<std::size_t>(y)];
        std::vector<std::string> row{std::to_string(n), std::to_string(data.train.size()),
                                     std::to_string(data.unseen.size()),
                                     std::to_string(*std::min_element(counts.begin(), counts.end()))};
        for (auto reg : {nn::Regularizer::nsdropout, nn::Regularizer::dropout}) {
            ExperimentConfig rc = c;
            rc.regularizer = reg;
            add_values(row, run_and_store(rc, data, run_dir, "n" + std::to_string(n) + "_" + nn::to_string(reg)));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace nsd::harness
