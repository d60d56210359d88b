#include "nsd/harness/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nsd::harness {

using nlohmann::json;

std::string to_string(Stratify s) {
    switch (s) {
        case Stratify::auto_: return "auto";
        case Stratify::always: return "always";
        case Stratify::never: return "never";
    }
    return "?";
}

Stratify parse_stratify(const std::string& name) {
    if (name == "auto") return Stratify::auto_;
    if (name == "always") return Stratify::always;
    if (name == "never") return Stratify::never;
    throw ConfigError("unknown stratify setting '" + name + "'");
}

std::filesystem::path DatasetConfig::resolved_root() const {
    if (!root.empty()) return root;
    if (const char* env = std::getenv(data_root_env); env != nullptr && *env != '\0') return env;
    return "data";
}

nn::NetworkSpec ExperimentConfig::network_spec() const {
    nn::NetworkSpec spec;
    spec.units = architecture;
    spec.regularizer = regularizer;
    spec.drop_at = drop_at;
    spec.metric = deviation;
    return spec;
}

bool ExperimentConfig::stratified() const {
    switch (stratify) {
        case Stratify::always: return true;
        case Stratify::never: return false;
        case Stratify::auto_: return budget < auto_stratify_below;
    }
    return false;
}

double ExperimentConfig::effective_learning_rate() const {
    return regularizer == nn::Regularizer::nsdropout ? sgd.learning_rate * ns_lr_multiplier
                                                     : sgd.learning_rate;
}

void ExperimentConfig::validate() const {
    try {
        network_spec().validate();
        nn::SgdConfig effective = sgd;
        effective.learning_rate = effective_learning_rate();
        effective.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!(ns_lr_multiplier > 0.0) || !std::isfinite(ns_lr_multiplier)) {
        throw ConfigError("ns_lr_multiplier must be finite and positive");
    }
    if (regularizer != nn::Regularizer::none && drop_at.empty()) {
        throw ConfigError("regularizer " + nn::to_string(regularizer) + " needs at least one p position");
    }
    if (epochs == 0) throw ConfigError("epochs must be at least 1");
    if (budget == 0) throw ConfigError("budget must be positive");
    if (!(train_frac > 0.0 && train_frac < 1.0)) {
        throw ConfigError("train_frac must lie in (0, 1); the unseen validation split is mandatory");
    }
    if (eval_modes.empty()) throw ConfigError("at least one eval mode is required");
    if (dataset.zca_epsilon <= 0.0) throw ConfigError("zca_epsilon must be positive");
}

ExperimentConfig defaults_for(const std::string& dataset_name) {
    ExperimentConfig c;
    c.dataset.name = dataset_name;
    if (dataset_name == "fashion-mnist") {
        c.drop_at = {{1, 0.2}, {2, 0.2}, {3, 0.2}};
    } else if (dataset_name == "cifar10") {
        c.architecture = {3072, 256, 256, 256, 10};
        c.drop_at = {{1, 0.5}, {2, 0.2}};
        c.budget = 25000;
    }
    return c;
}

namespace {

json drop_at_json(const std::map<std::size_t, double>& drop_at) {
    json j = json::object();
    for (const auto& [pos, p] : drop_at) j[std::to_string(pos)] = p;
    return j;
}

template <typename T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json to_json(const ExperimentConfig& c) {
    json eval = json::array();
    for (auto m : c.eval_modes) eval.push_back(ns::to_string(m));
    json sgd = {{"learning_rate", c.sgd.learning_rate},
                {"momentum", c.sgd.momentum},
                {"l2_decay", c.sgd.l2_decay}};
    sgd["anneal"] = c.sgd.anneal ? json(*c.sgd.anneal) : json(nullptr);
    const auto& d = c.dataset;
    return {
        {"dataset",
         {{"name", d.name},
          {"root", d.root},
          {"train_images", d.train_images},
          {"train_labels", d.train_labels},
          {"test_images", d.test_images},
          {"test_labels", d.test_labels},
          {"cifar_train", d.cifar_train},
          {"cifar_test", d.cifar_test},
          {"synthetic_train", d.synthetic_train},
          {"synthetic_test", d.synthetic_test},
          {"synthetic_dim", d.synthetic_dim},
          {"synthetic_classes", d.synthetic_classes},
          {"synthetic_noise", d.synthetic_noise},
          {"center", d.center},
          {"zca", d.zca},
          {"zca_epsilon", d.zca_epsilon}}},
        {"architecture", c.architecture},
        {"regularizer", nn::to_string(c.regularizer)},
        {"drop_at", drop_at_json(c.drop_at)},
        {"budget", c.budget},
        {"train_frac", c.train_frac},
        {"stratify", to_string(c.stratify)},
        {"epochs", c.epochs},
        {"batch_size", c.batch_size},
        {"sgd", sgd},
        {"ns_lr_multiplier", c.ns_lr_multiplier},
        {"refresh", ns::to_string(c.refresh)},
        {"deviation", c.deviation == ns::DeviationMetric::absolute ? "absolute" : "signed"},
        {"eval_modes", eval},
        {"seed", c.seed},
        {"output_dir", c.output_dir},
        {"trace_masks", c.trace_masks},
        {"write_checkpoint", c.write_checkpoint},
    };
}

void apply_json(ExperimentConfig& c, const json& j) {
    try {
        if (j.contains("dataset")) {
            const auto& d = j.at("dataset");
            auto& o = c.dataset;
            take(d, "name", o.name);
            take(d, "root", o.root);
            take(d, "train_images", o.train_images);
            take(d, "train_labels", o.train_labels);
            take(d, "test_images", o.test_images);
            take(d, "test_labels", o.test_labels);
            take(d, "cifar_train", o.cifar_train);
            take(d, "cifar_test", o.cifar_test);
            take(d, "synthetic_train", o.synthetic_train);
            take(d, "synthetic_test", o.synthetic_test);
            take(d, "synthetic_dim", o.synthetic_dim);
            take(d, "synthetic_classes", o.synthetic_classes);
            take(d, "synthetic_noise", o.synthetic_noise);
            take(d, "center", o.center);
            take(d, "zca", o.zca);
            take(d, "zca_epsilon", o.zca_epsilon);
        }
        if (j.contains("architecture")) {
            const auto& a = j.at("architecture");
            c.architecture = a.is_string() ? parse_architecture(a.get<std::string>())
                                           : a.get<std::vector<std::size_t>>();
        }
        if (j.contains("regularizer")) c.regularizer = nn::parse_regularizer(j.at("regularizer").get<std::string>());
        if (j.contains("drop_at")) {
            const auto& p = j.at("drop_at");
            if (p.is_string()) {
                c.drop_at = parse_drop_at(p.get<std::string>());
            } else {
                c.drop_at.clear();
                for (const auto& [key, value] : p.items()) c.drop_at[std::stoul(key)] = value.get<double>();
            }
        }
        take(j, "budget", c.budget);
        take(j, "train_frac", c.train_frac);
        if (j.contains("stratify")) c.stratify = parse_stratify(j.at("stratify").get<std::string>());
        take(j, "epochs", c.epochs);
        take(j, "batch_size", c.batch_size);
        if (j.contains("sgd")) {
            const auto& s = j.at("sgd");
            take(s, "learning_rate", c.sgd.learning_rate);
            take(s, "momentum", c.sgd.momentum);
            take(s, "l2_decay", c.sgd.l2_decay);
            if (s.contains("anneal")) {
                if (s.at("anneal").is_null()) c.sgd.anneal.reset();
                else c.sgd.anneal = s.at("anneal").get<double>();
            }
        }
        take(j, "ns_lr_multiplier", c.ns_lr_multiplier);
        if (j.contains("refresh")) c.refresh = ns::parse_refresh_policy(j.at("refresh").get<std::string>());
        if (j.contains("deviation")) {
            const auto d = j.at("deviation").get<std::string>();
            if (d == "absolute") c.deviation = ns::DeviationMetric::absolute;
            else if (d == "signed") c.deviation = ns::DeviationMetric::signed_;
            else throw ConfigError("unknown deviation metric '" + d + "'");
        }
        if (j.contains("eval_modes")) {
            c.eval_modes.clear();
            for (const auto& m : j.at("eval_modes")) c.eval_modes.push_back(ns::parse_eval_mode(m.get<std::string>()));
        }
        take(j, "seed", c.seed);
        take(j, "output_dir", c.output_dir);
        take(j, "trace_masks", c.trace_masks);
        take(j, "write_checkpoint", c.write_checkpoint);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    // run.json nests the config under "config"
    if (j.contains("config") && j.at("config").is_object()) j = json(j.at("config"));
    std::string name = "mnist";
    if (j.contains("dataset") && j.at("dataset").contains("name")) {
        name = j.at("dataset").at("name").get<std::string>();
    }
    ExperimentConfig c = defaults_for(name);
    apply_json(c, j);
    return c;
}

std::map<std::size_t, double> parse_drop_at(const std::string& text) {
    std::map<std::size_t, double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("p entry '" + item + "' must be position:p");
        try {
            out[std::stoul(item.substr(0, colon))] = std::stod(item.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse p entry '" + item + "'");
        }
    }
    return out;
}

std::string format_drop_at(const std::map<std::size_t, double>& drop_at) {
    std::ostringstream os;
    bool first = true;
    for (const auto& [pos, p] : drop_at) {
        if (!first) os << ',';
        os << pos << ':' << p;
        first = false;
    }
    return os.str();
}

std::vector<std::size_t> parse_architecture(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, '-')) {
        try {
            out.push_back(std::stoul(item));
        } catch (const std::exception&) {
            throw ConfigError("cannot parse architecture '" + text + "'");
        }
    }
    return out;
}

std::string format_architecture(const std::vector<std::size_t>& units) {
    std::string s;
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (i) s += '-';
        s += std::to_string(units[i]);
    }
    return s;
}

}  // namespace nsd::harness
