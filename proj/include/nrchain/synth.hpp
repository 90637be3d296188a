#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace nrchain::synth {

// Seeded space-time point process: uniform background plus Gaussian blobs.
struct SynthConfig {
    std::size_t background = 1000;
    std::size_t clusters = 10;
    std::size_t cluster_size = 20;
    double extent_m = 10000.0;      // square side
    double duration_days = 365.0;
    double sigma_m = 40.0;          // blob spatial spread
    double sigma_days = 3.0;        // blob temporal spread
    double origin_x = 500000.0;     // easting of the square's corner
    double origin_y = 4500000.0;    // northing of the square's corner
    std::int64_t start_seconds = 1577836800;  // 2020-01-01T00:00:00Z
    std::vector<std::string> categories{"THEFT"};
    std::uint64_t seed = 1;
};

struct SynthRecord {
    double x = 0.0;
    double y = 0.0;
    std::int64_t seconds = 0;
    std::string category;
};

// Uniform doubles in [0, 1) and standard normals from mt19937_64 bits, so
// output does not depend on the standard library's distributions.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}
    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
    double normal();
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::vector<SynthRecord> generate(const SynthConfig& config);

// CSV with header x,y,timestamp,category; timestamps "%Y-%m-%d %H:%M:%S" UTC;
// coordinates with millimetre precision.
void write_csv(const std::filesystem::path& path, const std::vector<SynthRecord>& records);

}  // namespace nrchain::synth
