#include "nrchain/synth.hpp"

#include "nrchain/csv.hpp"
#include "nrchain/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace nrchain::synth {

double Sampler::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Sampler::below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    std::uint64_t r = rng_();
    while (r < threshold) r = rng_();
    return r % bound;
}

std::vector<SynthRecord> generate(const SynthConfig& config) {
    if (config.categories.empty()) throw std::invalid_argument("synth needs at least one category");
    if (!(config.extent_m > 0) || !(config.duration_days > 0)) {
        throw std::invalid_argument("synth extent and duration must be positive");
    }
    Sampler s(config.seed);
    const double span_seconds = config.duration_days * 86400.0;
    auto clamp01 = [](double v, double hi) { return std::clamp(v, 0.0, hi); };
    auto record = [&](double x, double y, double sec, const std::string& cat) {
        return SynthRecord{config.origin_x + std::round(clamp01(x, config.extent_m) * 1000.0) / 1000.0,
                           config.origin_y + std::round(clamp01(y, config.extent_m) * 1000.0) / 1000.0,
                           config.start_seconds + static_cast<std::int64_t>(std::floor(clamp01(sec, span_seconds))),
                           cat};
    };

    std::vector<SynthRecord> out;
    out.reserve(config.background + config.clusters * config.cluster_size);
    for (std::size_t i = 0; i < config.background; ++i) {
        const auto& cat = config.categories[s.below(config.categories.size())];
        const double x = s.uniform() * config.extent_m;
        const double y = s.uniform() * config.extent_m;
        const double t = s.uniform() * span_seconds;
        out.push_back(record(x, y, t, cat));
    }
    for (std::size_t c = 0; c < config.clusters; ++c) {
        const auto& cat = config.categories[s.below(config.categories.size())];
        const double cx = s.uniform() * config.extent_m;
        const double cy = s.uniform() * config.extent_m;
        const double ct = s.uniform() * span_seconds;
        for (std::size_t i = 0; i < config.cluster_size; ++i) {
            const double x = cx + s.normal() * config.sigma_m;
            const double y = cy + s.normal() * config.sigma_m;
            const double t = ct + s.normal() * config.sigma_days * 86400.0;
            out.push_back(record(x, y, t, cat));
        }
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const std::vector<SynthRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "x,y,timestamp,category\n";
    char buf[96];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.3f,%.3f,", r.x, r.y);
        out << buf << ingest::format_timestamp(r.seconds, "%Y-%m-%d %H:%M:%S") << ','
            << csv::escape_field(r.category) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace nrchain::synth
