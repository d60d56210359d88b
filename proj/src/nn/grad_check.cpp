#include "nsd/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "nsd/nn/loss.hpp"

namespace nsd::nn {

double relative_error(double analytic, double numeric) {
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    if (scale == 0.0) return 0.0;
    return std::abs(analytic - numeric) / scale;
}

void move_off_kinks(Network& network, std::uint64_t seed, double scale) {
    Rng rng(seed);
    for (auto* d : network.dense_layers())
        for (double& b : d->bias) b = scale * (2.0 * rng.next_uniform() - 1.0);
}

GradCheckResult grad_check(Network& network, const LabeledBatch& batch,
                           const GradCheckOptions& options) {
    std::vector<bool> was_frozen;
    for (auto& l : network.layers())
        if (auto* d = std::get_if<DropoutLayer>(&l)) was_frozen.push_back(d->frozen());
    network.set_dropout_frozen(true);

    Rng dropout_rng(Rng::derive_seed(options.seed, 1));
    auto loss_at = [&]() {
        const Matrix logits = network.forward_train(batch.inputs, batch.labels, dropout_rng);
        return softmax_xent_loss(logits, batch.labels);
    };

    const Matrix logits = network.forward_train(batch.inputs, batch.labels, dropout_rng);
    network.backward(softmax_xent(logits, batch.labels).dlogits);

    GradCheckResult result;
    Rng pick(Rng::derive_seed(options.seed, 2));
    auto check_tensor = [&](std::span<double> params, std::span<const double> grads) {
        const std::size_t n = std::min(options.samples_per_tensor, params.size());
        for (std::size_t s = 0; s < n; ++s) {
            const auto k = static_cast<std::size_t>(pick.next_below(params.size()));
            const double saved = params[k];
            params[k] = saved + options.epsilon;
            const double up = loss_at();
            params[k] = saved - options.epsilon;
            const double down = loss_at();
            params[k] = saved;
            const double numeric = (up - down) / (2.0 * options.epsilon);
            result.max_relative_error =
                std::max(result.max_relative_error, relative_error(grads[k], numeric));
            ++result.checked;
        }
    };

    for (auto* d : network.dense_layers()) {
        // Gradients are copied because every loss evaluation re-runs forward only.
        const Matrix gw = d->grad_weights;
        const std::vector<double> gb = d->grad_bias;
        check_tensor(d->weights.values(), gw.values());
        check_tensor(d->bias, gb);
    }

    std::size_t i = 0;
    for (auto& l : network.layers())
        if (auto* d = std::get_if<DropoutLayer>(&l)) d->set_frozen(was_frozen[i++]);
    return result;
}

}  // namespace nsd::nn
