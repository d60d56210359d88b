// Acceptance checks: one PASS / FAIL / BLOCKED line per criterion.
//
// Exit status: 1 if any criterion failed, 77 if none failed but some were
// blocked (missing dataset files), 0 otherwise.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nsd/datasets/loaders.hpp"
#include "nsd/datasets/synthetic.hpp"
#include "nsd/datasets/zca.hpp"
#include "nsd/harness/config.hpp"
#include "nsd/harness/data.hpp"
#include "nsd/harness/metrics.hpp"
#include "nsd/harness/sweeps.hpp"
#include "nsd/harness/trainer.hpp"
#include "nsd/nn/grad_check.hpp"
#include "nsd/nn/layers.hpp"
#include "nsd/nsdropout/masks.hpp"
#include "oracles.hpp"

using namespace nsd;
using namespace nsd::harness;
namespace fs = std::filesystem;

namespace {

// Tolerances and sizes, fixed here.
constexpr double grad_tolerance = 1e-5;
constexpr double grad_epsilon = 1e-5;
constexpr double dropout_mc_tolerance = 0.01;
constexpr int dropout_mc_trials = 100000;
constexpr double zca_tolerance = 1e-6;
constexpr std::size_t oracle_instances = 1000;
constexpr std::size_t cardinality_max_units = 128;

enum class Status { pass, fail, blocked };

struct Outcome {
    Status status;
    std::string detail;
};

Outcome pass(std::string d) { return {Status::pass, std::move(d)}; }
Outcome fail(std::string d) { return {Status::fail, std::move(d)}; }
Outcome blocked(std::string d) { return {Status::blocked, std::move(d)}; }
Outcome check(bool ok, std::string d) { return {ok ? Status::pass : Status::fail, std::move(d)}; }

std::string num(double v, const char* fmt = "%.3g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path artifacts = "acceptance_artifacts";

fs::path data_root() {
    if (const char* env = std::getenv(data_root_env); env != nullptr && *env != '\0') return env;
    return "data";
}

bool have_idx(const fs::path& dir) {
    for (const char* f : {"train-images-idx3-ubyte", "train-labels-idx1-ubyte", "t10k-images-idx3-ubyte",
                          "t10k-labels-idx1-ubyte"})
        if (!fs::exists(dir / f)) return false;
    return true;
}

bool have_cifar(const fs::path& dir) {
    for (int i = 1; i <= 5; ++i)
        if (!fs::exists(dir / ("data_batch_" + std::to_string(i) + ".bin"))) return false;
    return fs::exists(dir / "test_batch.bin");
}

std::string missing_note(const fs::path& dir) {
    return "dataset files not found under " + dir.string() + " (set " + data_root_env + ")";
}

// MNIST-shaped synthetic source for the runs that do not need real data.
DataSource mnist_shaped(std::size_t pool, std::size_t test) {
    data::SyntheticSpec s;
    s.samples = pool;
    s.dim = 784;
    s.classes = 10;
    s.noise = 90.0;
    s.seed = 11;
    auto train = data::make_synthetic(s, "synthetic-784");
    s.samples = test;
    s.seed = 12;
    return {std::move(train), data::make_synthetic(s, "synthetic-784-test")};
}

// ---------------------------------------------------------------- criteria

Outcome gradient_correctness() {
    Rng rng(2718);
    LabeledBatch batch{oracle::random_matrix(rng, 16, 784, 0.0, 1.0), oracle::random_labels(rng, 16, 3)};
    LabeledBatch reference{oracle::random_matrix(rng, 12, 784, 0.0, 1.0), oracle::random_labels(rng, 12, 3)};
    std::string detail;
    bool ok = true;
    for (auto reg : {nn::Regularizer::none, nn::Regularizer::dropout, nn::Regularizer::nsdropout}) {
        nn::NetworkSpec spec;
        spec.units = {784, 8, 8, 3};
        spec.regularizer = reg;
        if (reg == nn::Regularizer::dropout) spec.drop_at = {{1, 0.5}, {2, 0.2}};
        if (reg == nn::Regularizer::nsdropout) spec.drop_at = {{1, 0.5}, {2, 0.25}};
        Rng init(static_cast<std::uint64_t>(reg) + 1);
        auto net = nn::Network::build(spec, init);
        nn::move_off_kinks(net, 99);
        net.refresh_ns_masks(batch, reference);
        nn::GradCheckOptions opts;
        opts.epsilon = grad_epsilon;
        opts.samples_per_tensor = 400;
        const auto r = nn::grad_check(net, batch, opts);
        ok = ok && r.max_relative_error < grad_tolerance;
        detail += nn::to_string(reg) + "=" + num(r.max_relative_error) + " (" + std::to_string(r.checked) + " params) ";
    }
    return check(ok, detail + "limit " + num(grad_tolerance));
}

Outcome mask_cardinality() {
    Rng rng(31415);
    const int classes = 4;
    std::size_t masks = 0, bad = 0;
    for (std::size_t units = 1; units <= cardinality_max_units; ++units) {
        for (int tenth = 0; tenth <= 10; ++tenth) {
            const double p = tenth / 10.0;
            const auto want = oracle::round_half_up_count(units, tenth);
            // p = 1 drops every unit; a layer refresh is only exercised where units remain
            ns::ClassMeans t{oracle::random_matrix(rng, classes, units), std::vector<std::size_t>(classes, 1)};
            ns::ClassMeans v{oracle::random_matrix(rng, classes, units), t.counts};
            const auto set = ns::build_masks(t, v, p);
            for (int c = 0; c < classes; ++c, ++masks) {
                const auto m = set.mask(c);
                if (static_cast<std::size_t>(std::count(m.begin(), m.end(), 0.0)) != want) ++bad;
            }
            if (want < units) {
                ns::NsDropoutLayer layer(units, classes, p);
                const auto z = oracle::random_matrix(rng, 24, units);
                const auto zl = oracle::random_labels(rng, 24, classes);
                const auto r = oracle::random_matrix(rng, 16, units);
                const auto rl = oracle::random_labels(rng, 16, classes);
                layer.refresh(z, zl, r, rl);
                for (int c = 0; c < classes; ++c, ++masks) {
                    const auto m = layer.masks().mask(c);
                    const bool absent = std::find(layer.masks().absent_classes.begin(),
                                                  layer.masks().absent_classes.end(), c) != layer.masks().absent_classes.end();
                    const auto z0 = static_cast<std::size_t>(std::count(m.begin(), m.end(), 0.0));
                    if (z0 != (absent ? 0 : want)) ++bad;
                }
            }
        }
    }
    ns::ClassMeans t20{oracle::random_matrix(rng, 1, 20), {1}}, v20{oracle::random_matrix(rng, 1, 20), {1}};
    const auto anchor = ns::build_masks(t20, v20, 0.2);
    const auto az = std::count(anchor.mask(0).begin(), anchor.mask(0).end(), 0.0);
    return check(bad == 0 && az == 4, std::to_string(masks) + " masks checked, " + std::to_string(bad) +
                                          " wrong; I=20 p=0.2 drops " + std::to_string(az));
}

Outcome oracle_equivalence() {
    Rng rng(1618);
    std::size_t mismatches = 0, ties = 0;
    for (std::size_t trial = 0; trial < oracle_instances; ++trial) {
        const std::size_t units = 1 + rng.next_below(12);
        const int classes = 1 + static_cast<int>(rng.next_below(5));
        const bool tie_heavy = trial % 2 == 0;
        const bool signed_metric = trial % 5 == 4;
        std::vector<std::vector<double>> t, v;
        std::vector<bool> present;
        ns::ClassMeans tm{Matrix(static_cast<std::size_t>(classes), units), {}};
        ns::ClassMeans vm{Matrix(static_cast<std::size_t>(classes), units), {}};
        for (int c = 0; c < classes; ++c) {
            auto tr = tie_heavy ? oracle::tie_heavy(rng, units, 3) : std::vector<double>(units);
            auto vr = tie_heavy ? oracle::tie_heavy(rng, units, 3) : std::vector<double>(units);
            if (!tie_heavy) {
                for (auto& x : tr) x = rng.next_uniform();
                for (auto& x : vr) x = rng.next_uniform();
            }
            const bool here = rng.next_uniform() > 0.05;
            for (std::size_t u = 0; u < units; ++u) {
                tm.means(static_cast<std::size_t>(c), u) = tr[u];
                vm.means(static_cast<std::size_t>(c), u) = vr[u];
            }
            tm.counts.push_back(here ? 3 : 0);
            vm.counts.push_back(2);
            present.push_back(here);
            t.push_back(tr);
            v.push_back(vr);
        }
        const int tenth = static_cast<int>(rng.next_below(11));
        const auto got = ns::build_masks(tm, vm, tenth / 10.0,
                                         signed_metric ? ns::DeviationMetric::signed_ : ns::DeviationMetric::absolute);
        const auto want = oracle::exhaustive_masks(t, v, present, oracle::round_half_up_count(units, tenth), signed_metric);
        for (int c = 0; c < classes; ++c) {
            for (std::size_t u = 0; u < units; ++u)
                if ((got.masks(static_cast<std::size_t>(c), u) == 1.0) != (want[static_cast<std::size_t>(c)][u] == 1)) {
                    ++mismatches;
                    break;
                }
            std::set<double> distinct;
            for (std::size_t u = 0; u < units; ++u) distinct.insert(std::abs(t[static_cast<std::size_t>(c)][u] - v[static_cast<std::size_t>(c)][u]));
            if (distinct.size() < units) ++ties;
        }
    }
    return check(mismatches == 0, std::to_string(oracle_instances) + " instances, " + std::to_string(ties) +
                                      " class rows with tied deviations, " + std::to_string(mismatches) + " mismatches");
}

ExperimentConfig small_mnist_shaped_config() {
    ExperimentConfig c = defaults_for("mnist");
    c.dataset.name = "synthetic";
    c.budget = 2000;
    c.epochs = 20;
    c.write_checkpoint = true;
    return c;
}

Outcome p_zero_equivalence() {
    const auto src = mnist_shaped(3000, 1000);
    auto base = small_mnist_shaped_config();
    base.regularizer = nn::Regularizer::none;
    base.drop_at.clear();
    auto zero = small_mnist_shaped_config();
    zero.drop_at = {{1, 0.0}, {2, 0.0}, {3, 0.0}};
    const auto data = prepare(src, base);
    const auto a = run_training(base, data);
    const auto b = run_training(zero, data);
    write_run_outputs(a, base, data, artifacts / "c4_baseline");
    write_run_outputs(b, zero, data, artifacts / "c4_nsdropout_p0");
    const auto ma = slurp(artifacts / "c4_baseline" / "metrics.csv");
    const auto mb = slurp(artifacts / "c4_nsdropout_p0" / "metrics.csv");
    return check(!ma.empty() && ma == mb, std::to_string(a.records.size()) + " epochs, metrics.csv " +
                                              std::to_string(ma.size()) + " bytes, " +
                                              (ma == mb ? "identical" : "differs"));
}

Outcome determinism() {
    const auto src = mnist_shaped(3000, 1000);
    std::size_t files = 0;
    std::vector<std::string> differing;
    struct Variant {
        std::string name;
        nn::Regularizer reg;
        std::size_t batch;
        ns::RefreshPolicy refresh;
    };
    for (const auto& v : {Variant{"nsdropout_full", nn::Regularizer::nsdropout, 0, ns::RefreshPolicy::per_epoch},
                          Variant{"nsdropout_minibatch", nn::Regularizer::nsdropout, 200, ns::RefreshPolicy::per_batch},
                          Variant{"dropout_minibatch", nn::Regularizer::dropout, 200, ns::RefreshPolicy::per_epoch}}) {
        auto c = small_mnist_shaped_config();
        c.epochs = 8;
        c.regularizer = v.reg;
        c.batch_size = v.batch;
        c.refresh = v.refresh;
        c.eval_modes = {ns::EvalMode::labeled, ns::EvalMode::predicted, ns::EvalMode::union_};
        const auto data = prepare(src, c);
        const auto d1 = artifacts / ("c5_" + v.name + "_1"), d2 = artifacts / ("c5_" + v.name + "_2");
        write_run_outputs(run_training(c, data), c, data, d1);
        const auto data2 = prepare(src, c);
        write_run_outputs(run_training(c, data2), c, data2, d2);
        for (const auto& entry : fs::directory_iterator(d1)) {
            const auto name = entry.path().filename();
            if (name == "timing.csv") continue;
            ++files;
            if (slurp(entry.path()) != slurp(d2 / name)) differing.push_back(v.name + "/" + name.string());
        }
    }
    std::string detail = std::to_string(files) + " output files compared (timing.csv excluded)";
    for (const auto& d : differing) detail += "; differs: " + d;
    return check(differing.empty() && files > 0, detail);
}

Outcome dropout_expectation() {
    std::string detail;
    bool ok = true;
    for (double q : {0.2, 0.5}) {
        nn::DropoutLayer layer(16, q);
        Rng rng(q == 0.2 ? 5 : 6);
        Rng inputs(7);
        Matrix x(1, 16);
        for (auto& v : x.values()) v = 0.5 + inputs.next_uniform();
        std::vector<double> sum(16, 0.0);
        for (int t = 0; t < dropout_mc_trials; ++t) {
            const auto y = layer.forward(x, true, rng);
            for (std::size_t u = 0; u < 16; ++u) sum[u] += y(0, u);
        }
        double worst = 0.0;
        for (std::size_t u = 0; u < 16; ++u)
            worst = std::max(worst, std::abs(sum[u] / dropout_mc_trials - x(0, u)) / x(0, u));
        ok = ok && worst < dropout_mc_tolerance;
        detail += "q=" + num(q) + " worst rel dev " + num(worst) + " ";
    }
    return check(ok, detail + "limit " + num(dropout_mc_tolerance));
}

struct ComparativeRuns {
    std::optional<RunResult> ns, dropout;
    std::string error;
};

ComparativeRuns& comparative() {
    static ComparativeRuns runs;
    static bool done = false;
    if (done) return runs;
    done = true;
    const auto root = data_root() / "mnist";
    if (!have_idx(root)) {
        runs.error = missing_note(root);
        return runs;
    }
    auto c = defaults_for("mnist");
    c.dataset.root = data_root().string();
    const auto src = load_source(c.dataset);
    const auto data = prepare(src, c);
    runs.ns = run_training(c, data);
    write_run_outputs(*runs.ns, c, data, artifacts / "c7_nsdropout");
    auto d = c;
    d.regularizer = nn::Regularizer::dropout;
    runs.dropout = run_training(d, data);
    write_run_outputs(*runs.dropout, d, data, artifacts / "c7_dropout");
    return runs;
}

Outcome desk_scale_mnist() {
    const auto& runs = comparative();
    if (!runs.ns) return blocked(runs.error);
    const double ns_acc = runs.ns->records.back().test_acc[0];
    const double ns_pred = runs.ns->records.back().test_acc[1];
    const double do_acc = runs.dropout->records.back().test_acc[0];
    double secs = 0;
    for (const auto& r : runs.ns->records) secs += r.wall_time;
    for (const auto& r : runs.dropout->records) secs += r.wall_time;
    return check(ns_acc >= do_acc, "final test acc nsdropout labeled " + num(ns_acc, "%.4f") + " (predicted " +
                                       num(ns_pred, "%.4f") + ") vs dropout " + num(do_acc, "%.4f") +
                                       ", both runs " + num(secs / 60.0, "%.1f") + " min");
}

Outcome size_sweep() {
    const auto root = data_root() / "mnist";
    if (!have_idx(root)) return blocked(missing_note(root));
    auto c = defaults_for("mnist");
    c.dataset.root = data_root().string();
    c.write_checkpoint = false;
    c.trace_masks = false;
    const std::vector<std::size_t> sizes{50, 100, 500, 750, 1000, 5000, 10000};
    const auto table = sweep_size(c, load_source(c.dataset), sizes, artifacts / "c8_runs");
    fs::create_directories(artifacts);
    write_text(artifacts / "c8_sweep_size.csv", table.to_csv());
    bool ok = table.rows.size() == sizes.size();
    for (const auto& row : table.rows) {
        ok = ok && row.size() == table.header.size();
        for (const auto& cell : row) ok = ok && !cell.empty();
    }
    const auto min_train = std::stoul(table.rows.at(0).at(table.column("min_class_train")));
    ok = ok && min_train >= 1;
    for (const char* col : {"ns_test_err_labeled", "dropout_test_err_labeled"}) table.column(col);
    return check(ok, std::to_string(table.rows.size()) + " rows x " + std::to_string(table.header.size()) +
                         " columns; n=50 smallest class in train split " + std::to_string(min_train));
}

Outcome coupling() {
    const auto& runs = comparative();
    if (!runs.ns) return blocked(runs.error);
    auto gap = [](const RunResult& r) {
        const auto& b = r.records.at(r.best_epoch - 1);
        return std::abs((1.0 - b.train_acc) - (1.0 - b.unseen_val_acc));
    };
    const double g_ns = gap(*runs.ns), g_do = gap(*runs.dropout);
    return check(g_ns <= g_do, "best-epoch |train_err - unseen_err| nsdropout " + num(g_ns, "%.4f") + " (epoch " +
                                   std::to_string(runs.ns->best_epoch) + ") vs dropout " + num(g_do, "%.4f") +
                                   " (epoch " + std::to_string(runs.dropout->best_epoch) + ")");
}

Outcome loader_fixtures() {
    const fs::path fixtures = NSD_FIXTURE_DIR;
    const auto dir = artifacts / "c10";
    fs::create_directories(dir);
    bool ok = true;
    std::string detail;

    const auto tiny = data::load_idx(fixtures / "tiny-images-idx3-ubyte", fixtures / "tiny-labels-idx1-ubyte");
    data::write_idx(tiny, 3, 4, dir / "tiny-img", dir / "tiny-lab");
    ok = ok && slurp(dir / "tiny-img") == slurp(fixtures / "tiny-images-idx3-ubyte") &&
         slurp(dir / "tiny-lab") == slurp(fixtures / "tiny-labels-idx1-ubyte");
    const auto cifar = data::load_cifar10({fixtures / "tiny_cifar.bin"});
    data::write_cifar10(cifar, dir / "tiny.bin");
    ok = ok && slurp(dir / "tiny.bin") == slurp(fixtures / "tiny_cifar.bin");
    detail += "checked-in fixtures re-encode byte-exact: " + std::string(ok ? "yes" : "no");

    data::SyntheticSpec s;
    s.samples = 300;
    s.dim = 784;
    const auto m = data::make_synthetic(s);
    data::write_idx(m, 28, 28, dir / "syn-img", dir / "syn-lab");
    const auto mb = data::load_idx(dir / "syn-img", dir / "syn-lab");
    s.dim = 3072;
    const auto c = data::make_synthetic(s);
    data::write_cifar10(c, dir / "syn.bin");
    const auto cb = data::load_cifar10({dir / "syn.bin"});
    const bool synth = mb.pixels == m.pixels && mb.labels == m.labels && mb.dim == 784 && cb.pixels == c.pixels &&
                       cb.labels == c.labels && cb.dim == 3072;
    ok = ok && synth;
    detail += ", synthetic IDX and CIFAR round trip: " + std::string(synth ? "exact" : "differs");
    return check(ok, detail);
}

Outcome loader_full_size() {
    struct Want {
        std::string name;
        std::size_t train, test, dim;
    };
    std::string detail, missing;
    bool ok = true;
    for (const auto& w : {Want{"mnist", 60000, 10000, 784}, Want{"fashion-mnist", 60000, 10000, 784},
                          Want{"cifar10", 50000, 10000, 3072}}) {
        const auto dir = data_root() / (w.name == "cifar10" ? "cifar-10-batches-bin" : w.name);
        if (!(w.name == "cifar10" ? have_cifar(dir) : have_idx(dir))) {
            missing += (missing.empty() ? "" : ", ") + w.name;
            continue;
        }
        DatasetConfig dc;
        dc.name = w.name;
        dc.root = data_root().string();
        const auto src = load_source(dc);
        const bool good = src.pool.size() == w.train && src.test.size() == w.test && src.pool.dim == w.dim &&
                          src.test.dim == w.dim;
        ok = ok && good;
        detail += w.name + " " + std::to_string(src.pool.size()) + "/" + std::to_string(src.test.size()) + " x " +
                  std::to_string(src.pool.dim) + "; ";
    }
    if (!ok) return fail(detail);
    if (!missing.empty()) return blocked(detail + "missing: " + missing + " under " + data_root().string());
    return pass(detail);
}

Outcome zca_property() {
    Rng rng(1729);
    const std::size_t n = 5000;
    Matrix x(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = rng.next_normal(), b = rng.next_normal();
        x(i, 0) = 40.0 * a + 7.0;
        x(i, 1) = 30.0 * a + 12.0 * b - 3.0;
    }
    const auto eig = data::symmetric_eigen(data::covariance(x));
    const auto r = data::zca_whiten(x, data::default_zca_epsilon);
    const auto cov = data::covariance(r.whitened);
    double worst = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) worst = std::max(worst, std::abs(cov(i, j) - (i == j ? 1.0 : 0.0)));
    const bool symmetric = r.transform.transform == transpose(r.transform.transform);
    return check(worst < zca_tolerance && symmetric,
                 "eigenvalues " + num(eig.values[0]) + ", " + num(eig.values[1]) + "; max |cov - I| " + num(worst) +
                     " (limit " + num(zca_tolerance) + "); transform symmetric: " + (symmetric ? "yes" : "no"));
}

struct Criterion {
    int id;
    std::string group;
    std::string name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::vector<int> only;
    std::string group = "all";
    std::string artifact_dir = artifacts.string();
    app.add_option("--only", only, "criterion ids")->delimiter(',');
    app.add_option("--group", group, "core | datasets | all");
    app.add_option("--artifacts", artifact_dir, "directory for run outputs");
    CLI11_PARSE(app, argc, argv);
    artifacts = artifact_dir;
    fs::create_directories(artifacts);

    const std::vector<Criterion> criteria{
        {1, "core", "gradient correctness, 784-8-8-3", gradient_correctness},
        {2, "core", "mask cardinality", mask_cardinality},
        {3, "core", "build_masks vs exhaustive oracle", oracle_equivalence},
        {4, "core", "p=0 metrics identical to baseline", p_zero_equivalence},
        {5, "core", "byte-identical reruns", determinism},
        {6, "core", "inverted dropout expectation", dropout_expectation},
        {7, "datasets", "desk-scale MNIST nsdropout >= dropout", desk_scale_mnist},
        {8, "datasets", "MNIST size sweep", size_sweep},
        {9, "datasets", "train/unseen coupling at best epoch", coupling},
        {10, "core", "loader fidelity, fixtures", loader_fixtures},
        {10, "datasets", "loader fidelity, full datasets", loader_full_size},
        {11, "core", "ZCA whitening", zca_property},
    };

    int failed = 0, blocked_count = 0, ran = 0;
    for (const auto& c : criteria) {
        if (group != "all" && c.group != group) continue;
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "BLOCKED";
        std::printf("[%s] criterion %d: %s -- %s [%.1fs]\n", tag, c.id, c.name.c_str(), o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.status == Status::fail;
        blocked_count += o.status == Status::blocked;
    }
    std::printf("%d checked, %d failed, %d blocked\n", ran, failed, blocked_count);
    if (failed) return 1;
    if (blocked_count) return 77;
    return 0;
}
