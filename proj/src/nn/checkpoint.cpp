#include "nsd/nn/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <iterator>

namespace nsd::nn {

namespace {

enum class Kind : std::uint32_t { dense = 0, relu = 1, dropout = 2, nsdropout = 3 };

class Writer {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
    void f64s(std::span<const double> vs) {
        for (double v : vs) f64(v);
    }
    void raw(const char* s, std::size_t n) { bytes_.insert(bytes_.end(), s, s + n); }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_++]} << (8 * i);
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= std::uint64_t{bytes_[pos_++]} << (8 * i);
        return std::bit_cast<double>(bits);
    }
    std::vector<double> f64s(std::size_t n) {
        if (n > (bytes_.size() - pos_) / 8) throw CheckpointError("checkpoint truncated");
        std::vector<double> out(n);
        for (double& v : out) v = f64();
        return out;
    }
    std::string raw(std::size_t n) {
        need(n);
        std::string s(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                      bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return s;
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw CheckpointError("checkpoint truncated");
    }
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::uint32_t narrow(std::size_t v) { return static_cast<std::uint32_t>(v); }

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Network& network) {
    Writer w;
    w.raw("NSDW", 4);
    w.u32(checkpoint_version);
    w.u32(narrow(network.layers().size()));
    w.u32(narrow(static_cast<std::size_t>(network.class_count())));
    for (const auto& layer : network.layers()) {
        std::visit(overloaded{
                       [&](const DenseLayer& d) {
                           w.u32(static_cast<std::uint32_t>(Kind::dense));
                           w.u32(narrow(d.in_units()));
                           w.u32(narrow(d.out_units()));
                           w.f64s(d.weights.values());
                           w.f64s(d.bias);
                       },
                       [&](const ReluLayer& r) {
                           w.u32(static_cast<std::uint32_t>(Kind::relu));
                           w.u32(narrow(r.units()));
                       },
                       [&](const DropoutLayer& d) {
                           w.u32(static_cast<std::uint32_t>(Kind::dropout));
                           w.u32(narrow(d.units()));
                           w.f64(d.drop_prob());
                       },
                       [&](const ns::NsDropoutLayer& n) {
                           w.u32(static_cast<std::uint32_t>(Kind::nsdropout));
                           w.u32(narrow(n.units()));
                           w.u32(narrow(static_cast<std::size_t>(n.class_count())));
                           w.f64(n.p());
                           w.u32(n.metric() == ns::DeviationMetric::absolute ? 0u : 1u);
                           w.u32(narrow(n.masks().drop_count));
                           w.f64s(n.masks().masks.values());
                       },
                   },
                   layer);
    }
    return w.take();
}

Network decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    if (r.raw(4) != "NSDW") throw CheckpointError("bad checkpoint magic");
    const auto version = r.u32();
    if (version != checkpoint_version) {
        throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
    }
    const auto count = r.u32();
    const auto classes = static_cast<int>(r.u32());
    std::vector<Layer> layers;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto kind = static_cast<Kind>(r.u32());
        switch (kind) {
            case Kind::dense: {
                const auto in = r.u32();
                const auto out = r.u32();
                DenseLayer d(in, out);
                d.weights = Matrix::from_data(in, out, r.f64s(std::size_t{in} * out));
                d.bias = r.f64s(out);
                layers.emplace_back(std::move(d));
                break;
            }
            case Kind::relu: layers.emplace_back(ReluLayer(r.u32())); break;
            case Kind::dropout: {
                const auto units = r.u32();
                layers.emplace_back(DropoutLayer(units, r.f64()));
                break;
            }
            case Kind::nsdropout: {
                const auto units = r.u32();
                const auto layer_classes = static_cast<int>(r.u32());
                const double p = r.f64();
                const auto metric = r.u32() == 0 ? ns::DeviationMetric::absolute
                                                 : ns::DeviationMetric::signed_;
                ns::MaskSet masks;
                masks.p = p;
                masks.drop_count = r.u32();
                masks.masks = Matrix::from_data(static_cast<std::size_t>(layer_classes), units,
                                                r.f64s(std::size_t{units} *
                                                       static_cast<std::size_t>(layer_classes)));
                ns::NsDropoutLayer n(units, layer_classes, p, metric);
                n.set_masks(std::move(masks));
                layers.emplace_back(std::move(n));
                break;
            }
            default: throw CheckpointError("unknown layer kind " + std::to_string(i));
        }
    }
    if (!r.done()) throw CheckpointError("trailing bytes after checkpoint");
    return Network(std::move(layers), classes);
}

void save_checkpoint(const Network& network, const std::filesystem::path& path) {
    const auto bytes = encode_checkpoint(network);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("failed writing " + path.string());
}

Network load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_checkpoint(bytes);
}

}  // namespace nsd::nn
