#include "nsd/harness/trace.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "nsd/harness/metrics.hpp"
#include "nsd/nsdropout/masks.hpp"

namespace nsd::harness {

std::string mask_trace_csv(std::span<const MaskTraceRecord> records) {
    std::string out = "epoch,refresh,layer,class,units,kept_hex\n";
    for (const auto& r : records) {
        out += std::to_string(r.epoch) + ',' + std::to_string(r.refresh) + ',' + std::to_string(r.layer) +
               ',' + std::to_string(r.class_id) + ',' + std::to_string(r.units) + ',' + r.kept_hex + '\n';
    }
    return out;
}

std::vector<MaskTraceRecord> parse_mask_trace(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "epoch,refresh,layer,class,units,kept_hex") {
        throw std::runtime_error("mask trace: missing or unexpected header");
    }
    std::vector<MaskTraceRecord> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::vector<std::string> f;
        std::string cell;
        while (std::getline(fields, cell, ',')) f.push_back(cell);
        if (f.size() != 6) throw std::runtime_error("mask trace line " + std::to_string(lineno) + ": expected 6 fields");
        try {
            MaskTraceRecord r;
            r.epoch = std::stoul(f[0]);
            r.refresh = std::stoul(f[1]);
            r.layer = std::stoul(f[2]);
            r.class_id = std::stoi(f[3]);
            r.units = std::stoul(f[4]);
            r.kept_hex = f[5];
            out.push_back(std::move(r));
        } catch (const std::logic_error&) {
            throw std::runtime_error("mask trace line " + std::to_string(lineno) + ": bad number");
        }
    }
    return out;
}

std::vector<MaskTraceRecord> read_mask_trace(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open mask trace " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_mask_trace(ss.str());
}

std::vector<ChurnPoint> churn_series(std::span<const MaskTraceRecord> records, std::size_t epochs) {
    // (layer, epoch) -> class -> hex of the latest refresh seen so far
    std::map<std::size_t, std::map<std::size_t, std::map<int, std::pair<std::size_t, const MaskTraceRecord*>>>> last;
    for (const auto& r : records) {
        auto& slot = last[r.layer][r.epoch][r.class_id];
        if (slot.second == nullptr || r.refresh >= slot.first) slot = {r.refresh, &r};
    }
    std::vector<ChurnPoint> out;
    for (const auto& [layer, by_epoch] : last) {
        std::map<int, const MaskTraceRecord*> state, prev;
        for (std::size_t e = 1; e <= epochs; ++e) {
            prev = state;
            if (auto it = by_epoch.find(e); it != by_epoch.end())
                for (const auto& [c, rec] : it->second) state[c] = rec.second;
            if (e == 1) continue;
            double total = 0.0;
            std::size_t classes = 0;
            for (const auto& [c, rec] : state) {
                ++classes;
                auto p = prev.find(c);
                if (p == prev.end()) continue;
                const auto a = ns::mask_from_hex(rec->kept_hex, rec->units);
                const auto b = ns::mask_from_hex(p->second->kept_hex, p->second->units);
                for (std::size_t u = 0; u < a.size(); ++u) total += a[u] != b[u] ? 1.0 : 0.0;
            }
            out.push_back({e, layer, classes == 0 ? 0.0 : total / static_cast<double>(classes)});
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ChurnPoint& a, const ChurnPoint& b) { return a.epoch < b.epoch; });
    return out;
}

std::string churn_csv(std::span<const ChurnPoint> points) {
    std::string out = "epoch,layer,mean_changed\n";
    for (const auto& p : points)
        out += std::to_string(p.epoch) + ',' + std::to_string(p.layer) + ',' + format_real(p.mean_changed) + '\n';
    return out;
}

}  // namespace nsd::harness
