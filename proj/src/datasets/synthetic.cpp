#include "nsd/datasets/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "nsd/core/rng.hpp"

namespace nsd::data {

Dataset make_synthetic(const SyntheticSpec& spec, std::string name) {
    if (spec.classes < 2 || spec.dim == 0) {
        throw DataError(DataError::Code::bad_request, "synthetic data needs >= 2 classes and dim > 0");
    }
    Rng proto_rng(Rng::derive_seed(spec.prototype_seed, 11));
    std::vector<std::vector<double>> prototypes(static_cast<std::size_t>(spec.classes),
                                                std::vector<double>(spec.dim, 0.0));
    for (auto& proto : prototypes)
        for (double& px : proto)
            if (proto_rng.next_uniform() < spec.density) px = 128.0 + 127.0 * proto_rng.next_uniform();

    Rng rng(Rng::derive_seed(spec.seed, 12));
    Dataset ds{std::move(name), spec.dim, spec.classes, {}, {}};
    ds.pixels.reserve(spec.samples * spec.dim);
    ds.labels.reserve(spec.samples);
    for (std::size_t i = 0; i < spec.samples; ++i) {
        const int label = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(spec.classes)));
        ds.labels.push_back(label);
        for (double base : prototypes[static_cast<std::size_t>(label)]) {
            const double v = std::round(base + spec.noise * rng.next_normal());
            ds.pixels.push_back(static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0)));
        }
    }
    return ds;
}

}  // namespace nsd::data
