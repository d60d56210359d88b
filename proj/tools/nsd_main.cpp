// nsd: train, retrain, sweep and evaluate NSDropout / dropout / baseline MLPs.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nsd/harness/config.hpp"
#include "nsd/harness/data.hpp"
#include "nsd/harness/sweeps.hpp"
#include "nsd/harness/trainer.hpp"
#include "nsd/nn/checkpoint.hpp"
#include "nsd/nn/grad_check.hpp"

namespace {

using namespace nsd;
using namespace nsd::harness;

constexpr int exit_ok = 0;
constexpr int exit_config = 1;
constexpr int exit_divergence = 2;

// Every ExperimentConfig field as an optional override.
struct Overrides {
    std::optional<std::string> config_file;
    std::optional<std::string> dataset, data_root, train_images, train_labels, test_images, test_labels;
    std::vector<std::string> cifar_train, cifar_test;
    std::optional<std::size_t> synthetic_train, synthetic_test, synthetic_dim;
    std::optional<int> synthetic_classes;
    std::optional<double> synthetic_noise;
    std::optional<bool> center, zca;
    std::optional<double> zca_epsilon;
    std::optional<std::string> architecture, regularizer, drop_at, stratify, refresh, deviation;
    std::optional<std::size_t> budget, epochs, batch_size;
    std::optional<double> train_frac, lr, momentum, l2, anneal, ns_lr_multiplier;
    bool no_anneal = false;
    std::vector<std::string> eval_modes;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<bool> trace_masks, write_checkpoint;
};

void add_config_flags(CLI::App* app, Overrides& o) {
    app->add_option("--config", o.config_file, "JSON config file; flags override its values");
    app->add_option("--dataset", o.dataset, "mnist | fashion-mnist | cifar10 | synthetic | idx");
    app->add_option("--data-root", o.data_root, "dataset directory (default $NSD_DATA_ROOT, else ./data)");
    app->add_option("--train-images", o.train_images);
    app->add_option("--train-labels", o.train_labels);
    app->add_option("--test-images", o.test_images);
    app->add_option("--test-labels", o.test_labels);
    app->add_option("--cifar-train", o.cifar_train, "CIFAR-10 training batch files");
    app->add_option("--cifar-test", o.cifar_test, "CIFAR-10 test batch files");
    app->add_option("--synthetic-train", o.synthetic_train);
    app->add_option("--synthetic-test", o.synthetic_test);
    app->add_option("--synthetic-dim", o.synthetic_dim);
    app->add_option("--synthetic-classes", o.synthetic_classes);
    app->add_option("--synthetic-noise", o.synthetic_noise);
    app->add_option("--center", o.center, "subtract the training mean (true/false)");
    app->add_option("--zca", o.zca, "ZCA whitening fitted on the training split (true/false)");
    app->add_option("--zca-epsilon", o.zca_epsilon);
    app->add_option("--arch", o.architecture, "unit counts, e.g. 784-128-128-128-10");
    app->add_option("--regularizer", o.regularizer, "none | dropout | nsdropout");
    app->add_option("--p", o.drop_at, "position:p list, e.g. 1:0.5,2:0.2 (0 = input)");
    app->add_option("--budget", o.budget, "training pool size before the 80/20 split");
    app->add_option("--train-frac", o.train_frac);
    app->add_option("--stratify", o.stratify, "auto | always | never");
    app->add_option("--epochs", o.epochs);
    app->add_option("--batch-size", o.batch_size, "0 = full batch");
    app->add_option("--lr", o.lr);
    app->add_option("--momentum", o.momentum);
    app->add_option("--l2", o.l2);
    app->add_option("--anneal", o.anneal, "per-epoch learning-rate factor");
    app->add_flag("--no-anneal", o.no_anneal);
    app->add_option("--ns-lr-multiplier", o.ns_lr_multiplier);
    app->add_option("--refresh", o.refresh, "per-epoch | per-batch | once");
    app->add_option("--deviation", o.deviation, "absolute | signed");
    app->add_option("--eval-modes", o.eval_modes, "labeled predicted union intersection off")->delimiter(',');
    app->add_option("--seed", o.seed);
    app->add_option("--out", o.output_dir, "output directory");
    app->add_option("--trace-masks", o.trace_masks);
    app->add_option("--checkpoint", o.write_checkpoint, "write model.nsdw (true/false)");
}

ExperimentConfig resolve(const Overrides& o) {
    ExperimentConfig c;
    if (o.config_file) {
        c = load_config_file(*o.config_file);
        if (o.dataset && *o.dataset != c.dataset.name) {
            // switching dataset on the command line re-bases onto its defaults
            auto j = to_json(c);
            c = defaults_for(*o.dataset);
            j["dataset"]["name"] = *o.dataset;
            j.erase("architecture");
            j.erase("drop_at");
            j.erase("budget");
            apply_json(c, j);
        }
    } else {
        c = defaults_for(o.dataset.value_or("mnist"));
    }
    auto& d = c.dataset;
    if (o.dataset) d.name = *o.dataset;
    if (o.data_root) d.root = *o.data_root;
    if (o.train_images) d.train_images = *o.train_images;
    if (o.train_labels) d.train_labels = *o.train_labels;
    if (o.test_images) d.test_images = *o.test_images;
    if (o.test_labels) d.test_labels = *o.test_labels;
    if (!o.cifar_train.empty()) d.cifar_train = o.cifar_train;
    if (!o.cifar_test.empty()) d.cifar_test = o.cifar_test;
    if (o.synthetic_train) d.synthetic_train = *o.synthetic_train;
    if (o.synthetic_test) d.synthetic_test = *o.synthetic_test;
    if (o.synthetic_dim) d.synthetic_dim = *o.synthetic_dim;
    if (o.synthetic_classes) d.synthetic_classes = *o.synthetic_classes;
    if (o.synthetic_noise) d.synthetic_noise = *o.synthetic_noise;
    if (o.center) d.center = *o.center;
    if (o.zca) d.zca = *o.zca;
    if (o.zca_epsilon) d.zca_epsilon = *o.zca_epsilon;
    if (o.architecture) c.architecture = parse_architecture(*o.architecture);
    try {
        if (o.regularizer) c.regularizer = nn::parse_regularizer(*o.regularizer);
        if (o.refresh) c.refresh = ns::parse_refresh_policy(*o.refresh);
        if (!o.eval_modes.empty()) {
            c.eval_modes.clear();
            for (const auto& m : o.eval_modes) c.eval_modes.push_back(ns::parse_eval_mode(m));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (o.drop_at) c.drop_at = parse_drop_at(*o.drop_at);
    if (o.stratify) c.stratify = parse_stratify(*o.stratify);
    if (o.deviation) {
        if (*o.deviation == "absolute") c.deviation = ns::DeviationMetric::absolute;
        else if (*o.deviation == "signed") c.deviation = ns::DeviationMetric::signed_;
        else throw ConfigError("unknown deviation metric '" + *o.deviation + "'");
    }
    if (o.budget) c.budget = *o.budget;
    if (o.train_frac) c.train_frac = *o.train_frac;
    if (o.epochs) c.epochs = *o.epochs;
    if (o.batch_size) c.batch_size = *o.batch_size;
    if (o.lr) c.sgd.learning_rate = *o.lr;
    if (o.momentum) c.sgd.momentum = *o.momentum;
    if (o.l2) c.sgd.l2_decay = *o.l2;
    if (o.anneal) c.sgd.anneal = *o.anneal;
    if (o.no_anneal) c.sgd.anneal.reset();
    if (o.ns_lr_multiplier) c.ns_lr_multiplier = *o.ns_lr_multiplier;
    if (o.seed) c.seed = *o.seed;
    if (o.output_dir) c.output_dir = *o.output_dir;
    if (o.trace_masks) c.trace_masks = *o.trace_masks;
    if (o.write_checkpoint) c.write_checkpoint = *o.write_checkpoint;
    if (c.regularizer == nn::Regularizer::none) c.drop_at.clear();
    c.validate();
    return c;
}

std::filesystem::path out_dir(const ExperimentConfig& c, const std::string& fallback) {
    return c.output_dir.empty() ? std::filesystem::path("runs") / fallback : std::filesystem::path(c.output_dir);
}

void print_summary(const RunResult& run, const ExperimentConfig& c) {
    const auto& last = run.records.back();
    const auto& best = run.records.at(run.best_epoch - 1);
    std::cout << "epochs " << run.records.size() << "  best epoch " << run.best_epoch
              << " (unseen acc " << format_real(best.unseen_val_acc) << ")\n";
    std::cout << "final train acc " << format_real(last.train_acc) << "  unseen acc "
              << format_real(last.unseen_val_acc) << '\n';
    for (std::size_t m = 0; m < c.eval_modes.size(); ++m) {
        std::cout << "final test acc [" << ns::to_string(c.eval_modes[m]) << "] " << format_real(last.test_acc[m])
                  << '\n';
    }
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            if constexpr (std::is_same_v<T, double>) out.push_back(std::stod(item));
            else out.push_back(static_cast<T>(std::stoull(item)));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse list item '" + item + "'");
        }
    }
    if (out.empty()) throw ConfigError("empty list '" + text + "'");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NSDropout experiment runner"};
    app.require_subcommand(1);

    Overrides train_o, retrain_o, sweep_p_o, sweep_size_o, eval_o, grad_o;
    auto* train = app.add_subcommand("train", "train one model and write metrics, confusion matrices, mask trace, checkpoint");
    auto* retrain = app.add_subcommand("retrain", "train, then retrain from scratch up to the best unseen-validation epoch");
    auto* sweep_p_cmd = app.add_subcommand("sweep-p", "nsdropout vs dropout error across p values");
    auto* sweep_size_cmd = app.add_subcommand("sweep-size", "nsdropout vs dropout error across training budgets");
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the test set");
    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check on a small batch");
    add_config_flags(train, train_o);
    add_config_flags(retrain, retrain_o);
    add_config_flags(sweep_p_cmd, sweep_p_o);
    add_config_flags(sweep_size_cmd, sweep_size_o);
    add_config_flags(eval, eval_o);
    add_config_flags(gradcheck, grad_o);

    std::string p_list = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
    std::size_t position = 1;
    sweep_p_cmd->add_option("--p-list", p_list, "comma-separated p values");
    sweep_p_cmd->add_option("--position", position, "regularization position swept");
    std::string sizes = "50,100,500,750,1000,5000,10000";
    sweep_size_cmd->add_option("--sizes", sizes, "comma-separated budgets");
    std::string model_path;
    eval->add_option("--model", model_path, "checkpoint file")->required();
    std::size_t grad_rows = 16;
    double grad_eps = 1e-5;
    gradcheck->add_option("--rows", grad_rows, "batch rows");
    gradcheck->add_option("--epsilon", grad_eps);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*train) {
            const auto c = resolve(train_o);
            const auto data = prepare(load_source(c.dataset), c);
            const auto run = run_training(c, data);
            const auto dir = out_dir(c, "train");
            write_run_outputs(run, c, data, dir);
            print_summary(run, c);
            std::cout << "outputs in " << dir.string() << '\n';
        } else if (*retrain) {
            const auto c = resolve(retrain_o);
            const auto data = prepare(load_source(c.dataset), c);
            const auto r = run_retrain_schedule(c, data);
            const auto dir = out_dir(c, "retrain");
            write_run_outputs(r.phase1, c, data, dir / "phase1");
            write_run_outputs(r.phase2, c, data, dir / "phase2");
            std::cout << "best epoch " << r.best_epoch << '\n';
            print_summary(r.phase2, c);
            std::cout << "outputs in " << dir.string() << '\n';
        } else if (*sweep_p_cmd) {
            const auto c = resolve(sweep_p_o);
            const auto ps = parse_list<double>(p_list);
            const auto dir = out_dir(c, "sweep-p");
            const auto table = sweep_p(c, load_source(c.dataset), ps, position, dir);
            write_text(dir / "sweep_p.csv", table.to_csv());
            std::cout << table.to_csv();
        } else if (*sweep_size_cmd) {
            const auto c = resolve(sweep_size_o);
            const auto ns_ = parse_list<std::size_t>(sizes);
            const auto dir = out_dir(c, "sweep-size");
            const auto table = sweep_size(c, load_source(c.dataset), ns_, dir);
            write_text(dir / "sweep_size.csv", table.to_csv());
            std::cout << table.to_csv();
        } else if (*eval) {
            const auto c = resolve(eval_o);
            const auto data = prepare(load_source(c.dataset), c);
            auto model = nn::load_checkpoint(model_path);
            const auto dir = out_dir(c, "eval");
            std::filesystem::create_directories(dir);
            for (auto mode : c.eval_modes) {
                const auto pred = argmax_rows(model.predict(data.test.inputs, mode, data.test.labels));
                const auto cm = confusion_matrix(data.test.labels, pred, data.class_count);
                write_text(dir / ("confusion_" + ns::to_string(mode) + ".csv"), confusion_csv(cm));
                std::cout << "test acc [" << ns::to_string(mode) << "] " << format_real(accuracy(cm)) << '\n';
            }
        } else if (*gradcheck) {
            auto c = resolve(grad_o);
            const auto data = prepare(load_source(c.dataset), c);
            Rng init(run_seeds(c.seed).init);
            auto net = nn::Network::build(c.network_spec(), init);
            nn::move_off_kinks(net, c.seed);
            net.refresh_ns_masks(data.train, data.unseen);
            std::vector<std::size_t> rows;
            for (std::size_t i = 0; i < std::min(grad_rows, data.train.size()); ++i) rows.push_back(i);
            nn::GradCheckOptions opts;
            opts.epsilon = grad_eps;
            const auto r = nn::grad_check(net, select_rows(data.train, rows), opts);
            std::cout << "checked " << r.checked << " parameters, max relative error " << r.max_relative_error
                      << '\n';
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const data::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return exit_config;
    } catch (const nn::CheckpointError& e) {
        std::cerr << "checkpoint error: " << e.what() << '\n';
        return exit_config;
    } catch (const DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << '\n';
        for (const auto* o : {&train_o, &retrain_o}) {
            if (o->output_dir) {
                std::filesystem::create_directories(*o->output_dir);
                nlohmann::json diag = {{"diverged_at_epoch", e.epoch()},
                                       {"epochs_completed", e.records().size()},
                                       {"message", e.what()}};
                write_text(std::filesystem::path(*o->output_dir) / "divergence.json", diag.dump(2) + "\n");
            }
        }
        return exit_divergence;
    }
    return exit_ok;
}
