#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsd/nn/network.hpp"
#include "nsd/nn/sgd.hpp"
#include "nsd/nsdropout/layer.hpp"

#include <json.hpp>

namespace nsd::harness {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Stratify { auto_, always, never };

std::string to_string(Stratify s);
Stratify parse_stratify(const std::string& name);

/// Budgets below this size are drawn stratified under Stratify::auto_.
inline constexpr std::size_t auto_stratify_below = 1000;

/// Environment variable naming the directory that holds the dataset files.
inline constexpr const char* data_root_env = "NSD_DATA_ROOT";

struct DatasetConfig {
    /// mnist | fashion-mnist | cifar10 | synthetic | idx
    std::string name = "mnist";
    /// Empty: $NSD_DATA_ROOT, else ./data.
    std::string root;
    // Explicit IDX paths, used by name == "idx" and overriding the defaults otherwise.
    std::string train_images, train_labels, test_images, test_labels;
    // Explicit CIFAR-10 batch files.
    std::vector<std::string> cifar_train, cifar_test;

    std::size_t synthetic_train = 12000;
    std::size_t synthetic_test = 2000;
    std::size_t synthetic_dim = 784;
    int synthetic_classes = 10;
    double synthetic_noise = 60.0;

    bool center = false;
    bool zca = false;
    double zca_epsilon = 1e-5;

    std::filesystem::path resolved_root() const;
};

/// One training run, fully declared.
struct ExperimentConfig {
    DatasetConfig dataset;
    std::vector<std::size_t> architecture{784, 128, 128, 128, 10};
    nn::Regularizer regularizer = nn::Regularizer::nsdropout;
    /// Regularization position -> p. Position 0 is the raw input, k >= 1 the
    /// output of the k-th hidden activation.
    std::map<std::size_t, double> drop_at{{1, 0.5}, {2, 0.2}, {3, 0.2}};
    std::size_t budget = 10000;
    double train_frac = 0.8;
    Stratify stratify = Stratify::auto_;
    std::size_t epochs = 100;
    /// 0 trains full-batch.
    std::size_t batch_size = 0;
    nn::SgdConfig sgd;
    /// Learning-rate factor applied to NSDropout runs only.
    double ns_lr_multiplier = 1.0;
    ns::RefreshPolicy refresh = ns::RefreshPolicy::per_epoch;
    ns::DeviationMetric deviation = ns::DeviationMetric::absolute;
    std::vector<ns::EvalMode> eval_modes{ns::EvalMode::labeled, ns::EvalMode::predicted};
    std::uint64_t seed = 42;
    std::string output_dir;
    bool trace_masks = true;
    bool write_checkpoint = true;

    nn::NetworkSpec network_spec() const;
    bool stratified() const;
    double effective_learning_rate() const;
    /// Throws ConfigError on the first invalid field.
    void validate() const;
};

/// Defaults for a dataset: architecture, p layout and budget.
ExperimentConfig defaults_for(const std::string& dataset_name);

nlohmann::json to_json(const ExperimentConfig& config);
/// Overlays the keys present in `j` onto `config`.
void apply_json(ExperimentConfig& config, const nlohmann::json& j);
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Parses "1:0.5,2:0.2" into position -> p.
std::map<std::size_t, double> parse_drop_at(const std::string& text);
std::string format_drop_at(const std::map<std::size_t, double>& drop_at);
/// Parses "784-128-128-10".
std::vector<std::size_t> parse_architecture(const std::string& text);
std::string format_architecture(const std::vector<std::size_t>& units);

}  // namespace nsd::harness
