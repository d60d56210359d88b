#include "nsd/harness/data.hpp"

#include "nsd/core/rng.hpp"
#include "nsd/datasets/loaders.hpp"
#include "nsd/datasets/split.hpp"
#include "nsd/datasets/synthetic.hpp"
#include "nsd/datasets/zca.hpp"

namespace nsd::harness {

namespace {

std::filesystem::path pick(const std::string& override_path, const std::filesystem::path& fallback) {
    return override_path.empty() ? fallback : std::filesystem::path(override_path);
}

void center_with(Matrix& x, const std::vector<double>& mean) {
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto row = x.row(r);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] -= mean[c];
    }
}

}  // namespace

DataSource load_source(const DatasetConfig& config) {
    const auto root = config.resolved_root();
    if (config.name == "synthetic") {
        data::SyntheticSpec spec;
        spec.dim = config.synthetic_dim;
        spec.classes = config.synthetic_classes;
        spec.noise = config.synthetic_noise;
        spec.samples = config.synthetic_train;
        spec.seed = 1;
        auto pool = data::make_synthetic(spec, "synthetic");
        spec.samples = config.synthetic_test;
        spec.seed = 2;
        auto test = data::make_synthetic(spec, "synthetic-test");
        return {std::move(pool), std::move(test)};
    }
    if (config.name == "mnist" || config.name == "fashion-mnist" || config.name == "idx") {
        const auto dir = root / (config.name == "idx" ? "" : config.name);
        auto pool = data::load_idx(pick(config.train_images, dir / "train-images-idx3-ubyte"),
                                   pick(config.train_labels, dir / "train-labels-idx1-ubyte"),
                                   config.name);
        auto test = data::load_idx(pick(config.test_images, dir / "t10k-images-idx3-ubyte"),
                                   pick(config.test_labels, dir / "t10k-labels-idx1-ubyte"),
                                   config.name + "-test");
        return {std::move(pool), std::move(test)};
    }
    if (config.name == "cifar10") {
        const auto dir = root / "cifar-10-batches-bin";
        std::vector<std::filesystem::path> train, test;
        for (const auto& p : config.cifar_train) train.emplace_back(p);
        for (const auto& p : config.cifar_test) test.emplace_back(p);
        if (train.empty())
            for (int i = 1; i <= 5; ++i) train.push_back(dir / ("data_batch_" + std::to_string(i) + ".bin"));
        if (test.empty()) test.push_back(dir / "test_batch.bin");
        return {data::load_cifar10(train, "cifar10"), data::load_cifar10(test, "cifar10-test")};
    }
    throw ConfigError("unknown dataset '" + config.name + "'");
}

PreparedData prepare(const DataSource& source, const ExperimentConfig& config) {
    if (source.pool.dim != config.architecture.front()) {
        throw ConfigError("architecture input width " + std::to_string(config.architecture.front()) +
                          " does not match " + source.pool.name + " dimensionality " +
                          std::to_string(source.pool.dim));
    }
    if (static_cast<std::size_t>(source.pool.class_count) != config.architecture.back()) {
        throw ConfigError("architecture output width does not match the class count");
    }
    data::SplitSpec spec;
    spec.budget = config.budget;
    spec.train_frac = config.train_frac;
    spec.seed = Rng::derive_seed(config.seed, 1);
    spec.stratified = config.stratified();
    std::vector<std::size_t> drawn;
    data::Split split;
    try {
        split = data::split(source.pool, spec);
    } catch (const data::DataError& e) {
        throw ConfigError(e.what());
    }

    PreparedData out;
    out.class_count = source.pool.class_count;
    out.train = split.train.all();
    out.unseen = split.unseen.all();
    out.test = source.test.all();
    out.train_indices = std::move(split.train_indices);
    out.unseen_indices = std::move(split.unseen_indices);

    if (config.dataset.zca) {
        const auto zca = data::zca_fit(out.train.inputs, config.dataset.zca_epsilon);
        out.train.inputs = zca.apply(out.train.inputs);
        out.unseen.inputs = zca.apply(out.unseen.inputs);
        out.test.inputs = zca.apply(out.test.inputs);
    } else if (config.dataset.center) {
        std::vector<double> mean(out.train.inputs.cols(), 0.0);
        for (std::size_t r = 0; r < out.train.inputs.rows(); ++r)
            for (std::size_t c = 0; c < mean.size(); ++c) mean[c] += out.train.inputs(r, c);
        for (double& m : mean) m /= static_cast<double>(out.train.inputs.rows());
        center_with(out.train.inputs, mean);
        center_with(out.unseen.inputs, mean);
        center_with(out.test.inputs, mean);
    }
    return out;
}

}  // namespace nsd::harness
