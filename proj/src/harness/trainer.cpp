#include "nsd/harness/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>

#include "nsd/core/rng.hpp"
#include "nsd/nn/checkpoint.hpp"
#include "nsd/nn/loss.hpp"
#include "nsd/nn/sgd.hpp"

namespace nsd::harness {

DivergenceError::DivergenceError(std::size_t epoch, const std::string& what, std::vector<MetricsRecord> records)
    : std::runtime_error("diverged at epoch " + std::to_string(epoch) + ": " + what),
      epoch_(epoch),
      records_(std::move(records)) {}

RunSeeds run_seeds(std::uint64_t seed) {
    return {Rng::derive_seed(seed, 1), Rng::derive_seed(seed, 2), Rng::derive_seed(seed, 3),
            Rng::derive_seed(seed, 4)};
}

namespace {

void trace_refresh(nn::Network& net, std::size_t epoch, std::size_t refresh, bool enabled,
                   std::vector<MaskTraceRecord>& trace, std::size_t& absent) {
    const auto layers = net.ns_layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& set = layers[l]->masks();
        absent += set.absent_classes.size();
        if (!enabled) continue;
        for (int c = 0; c < set.class_count(); ++c) {
            trace.push_back({epoch, refresh, l, c, set.units(), ns::mask_to_hex(set.mask(c))});
        }
    }
}

std::vector<int> predictions(const Matrix& logits) { return argmax_rows(logits); }

double mode_accuracy(nn::Network& net, const LabeledBatch& batch, ns::EvalMode mode) {
    const auto pred = predictions(net.predict(batch.inputs, mode, batch.labels));
    return accuracy(batch.labels, pred);
}

}  // namespace

RunResult run_training(const ExperimentConfig& config, const PreparedData& data,
                       std::optional<std::size_t> stop_epoch) {
    config.validate();
    data.train.validate(data.class_count);
    data.unseen.validate(data.class_count);
    data.test.validate(data.class_count);

    const auto seeds = run_seeds(config.seed);
    Rng init_rng(seeds.init);
    Rng dropout_rng(seeds.dropout);
    Rng shuffle_rng(seeds.shuffle);

    RunResult run{{}, nn::Network::build(config.network_spec(), init_rng), {}, {}, 0, 0};
    nn::Network& net = run.model;
    const bool ns = net.has_ns_layers();

    nn::SgdConfig sgd_cfg = config.sgd;
    sgd_cfg.learning_rate = config.effective_learning_rate();
    nn::Sgd sgd(sgd_cfg);

    const std::size_t epochs = stop_epoch ? std::min(*stop_epoch, config.epochs) : config.epochs;
    const std::size_t n = data.train.size();
    const std::size_t batch = (config.batch_size == 0 || config.batch_size >= n) ? n : config.batch_size;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::vector<ns::MaskSet> last_epoch_masks;

    for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        std::size_t refresh = 0;
        if (ns && (config.refresh == ns::RefreshPolicy::per_epoch ||
                   (config.refresh == ns::RefreshPolicy::once && epoch == 1))) {
            net.refresh_ns_masks(data.train, data.unseen);
            trace_refresh(net, epoch, refresh++, config.trace_masks, run.trace, run.absent_class_events);
        }

        if (batch < n) shuffle_rng.shuffle(std::span<std::size_t>(order));
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t stop = std::min(n, start + batch);
            LabeledBatch mb;
            const LabeledBatch* cur = &data.train;
            if (batch < n) {
                mb = select_rows(data.train, std::span<const std::size_t>(order).subspan(start, stop - start));
                cur = &mb;
            }
            if (ns && config.refresh == ns::RefreshPolicy::per_batch) {
                net.refresh_ns_masks(*cur, data.unseen);
                trace_refresh(net, epoch, refresh++, config.trace_masks, run.trace, run.absent_class_events);
            }
            const Matrix logits = net.forward_train(cur->inputs, cur->labels, dropout_rng);
            auto loss = nn::softmax_xent(logits, cur->labels);
            if (!std::isfinite(loss.loss)) {
                throw DivergenceError(epoch, "non-finite training loss", run.records);
            }
            loss_sum += loss.loss * static_cast<double>(stop - start);
            net.backward(loss.dlogits);
            try {
                sgd.step(net);
            } catch (const nn::NonFiniteGradientError& e) {
                throw DivergenceError(epoch, e.what(), run.records);
            }
        }
        sgd.end_epoch();

        MetricsRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<double>(n);
        rec.train_acc = mode_accuracy(net, data.train, ns::EvalMode::labeled);
        rec.unseen_val_acc = mode_accuracy(net, data.unseen, ns::EvalMode::labeled);
        for (auto mode : config.eval_modes) rec.test_acc.push_back(mode_accuracy(net, data.test, mode));

        std::vector<ns::MaskSet> now;
        for (const auto* l : net.ns_layers()) now.push_back(l->masks());
        if (!last_epoch_masks.empty()) {
            double sum = 0.0;
            for (std::size_t l = 0; l < now.size(); ++l) sum += ns::mask_churn(now[l], last_epoch_masks[l]).mean;
            rec.mask_churn = now.empty() ? 0.0 : sum / static_cast<double>(now.size());
        }
        last_epoch_masks = std::move(now);

        rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        run.records.push_back(std::move(rec));
    }

    for (auto mode : config.eval_modes) {
        const auto pred = predictions(net.predict(data.test.inputs, mode, data.test.labels));
        run.confusion.push_back(confusion_matrix(data.test.labels, pred, data.class_count));
    }
    run.best_epoch = select_best_epoch(run.records);
    if (run.absent_class_events > 0) {
        std::cerr << "warning: " << run.absent_class_events
                  << " class mask(s) left all-ones because a class was missing from a batch or the reference set\n";
    }
    return run;
}

RetrainResult run_retrain_schedule(const ExperimentConfig& config, const PreparedData& data) {
    auto phase1 = run_training(config, data);
    const std::size_t best = phase1.best_epoch;
    auto phase2 = run_training(config, data, best);
    return {std::move(phase1), std::move(phase2), best};
}

nlohmann::json run_metadata(const RunResult& run, const ExperimentConfig& config, const PreparedData& data) {
    const auto seeds = run_seeds(config.seed);
    nlohmann::json j;
    j["config"] = to_json(config);
    j["resolved"] = {
        {"data_root", config.dataset.resolved_root().string()},
        {"stratified", config.stratified()},
        {"effective_learning_rate", config.effective_learning_rate()},
        {"train_rows", data.train.size()},
        {"unseen_rows", data.unseen.size()},
        {"test_rows", data.test.size()},
        {"class_count", data.class_count},
        {"seeds", {{"split", seeds.split}, {"init", seeds.init}, {"dropout", seeds.dropout}, {"shuffle", seeds.shuffle}}},
        {"loss", "softmax cross-entropy, mean over rows"},
        {"init", "He normal weights, zero biases"},
        {"optimizer", "SGD momentum, L2 on weights and biases"},
        {"epochs_run", run.records.size()},
        {"best_epoch", run.best_epoch},
        {"absent_class_events", run.absent_class_events},
    };
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_run_outputs(const RunResult& run, const ExperimentConfig& config, const PreparedData& data,
                       const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_text(dir / "metrics.csv", metrics_csv(run.records, config.eval_modes));
    write_text(dir / "timing.csv", timing_csv(run.records));
    write_text(dir / "run.json", run_metadata(run, config, data).dump(2) + "\n");
    for (std::size_t m = 0; m < config.eval_modes.size(); ++m) {
        write_text(dir / ("confusion_" + ns::to_string(config.eval_modes[m]) + ".csv"), confusion_csv(run.confusion[m]));
    }
    if (config.trace_masks && run.model.has_ns_layers()) {
        write_text(dir / "mask_trace.csv", mask_trace_csv(run.trace));
        write_text(dir / "mask_churn.csv", churn_csv(churn_series(run.trace, run.records.size())));
    }
    if (config.write_checkpoint) nn::save_checkpoint(run.model, dir / "model.nsdw");
}

}  // namespace nsd::harness
