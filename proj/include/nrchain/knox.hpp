#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nrchain::ingest {
struct Event;
}

namespace nrchain::knox {

struct KnoxError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Overflow { Clamp, Drop };

struct KnoxConfig {
    double distance_step = 100.0;  // meters
    double time_step = 14.0;       // days
    std::size_t n_distance_bins = 0;  // 0: cover the data extent
    std::size_t n_time_bins = 0;      // 0: cover the data extent
    Overflow overflow = Overflow::Clamp;
    std::size_t permutations = 99;
    std::uint64_t rng_seed = 20240601;
    unsigned workers = 1;

    void validate() const;
};

// Row-major dense matrix indexed by (distance bin, time bin).
template <typename T>
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}
    T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    friend bool operator==(const Matrix&, const Matrix&) = default;
};

struct KnoxTable {
    double distance_step = 100.0;
    double time_step = 14.0;
    Overflow overflow = Overflow::Clamp;
    Matrix<std::uint64_t> observed;
    Matrix<double> expected;
    Matrix<double> residuals;
    Matrix<double> p_values;
    std::size_t n_events = 0;
    std::uint64_t total_pairs = 0;  // n(n-1)/2, binned or not
    std::size_t permutations = 0;   // rounds behind p_values

    std::uint64_t observed_sum() const;
};

using Bin = std::pair<std::size_t, std::size_t>;

// Distance bin floor(d / distance_step) of the Euclidean planar distance and
// time bin floor(|dt| / time_step); nullopt when dropped as overflow.
std::optional<Bin> pair_bin(const ingest::Event& a, const ingest::Event& b, const KnoxConfig& config,
                            std::size_t n_distance_bins, std::size_t n_time_bins);

// Bin counts that cover the data: bounding-box diagonal and time span.
std::pair<std::size_t, std::size_t> resolve_bins(std::span<const ingest::Event> events, const KnoxConfig& config);

// Observed counts over all n(n-1)/2 pairs. Throws KnoxError for < 2 events.
KnoxTable build_table(std::span<const ingest::Event> events, const KnoxConfig& config);

// Margin-product expected counts and Pearson residuals (0 where expected is 0).
void expected_and_residuals(KnoxTable& table);

struct MonteCarloHooks {
    // Replaces the seeded shuffle of the time column for one round.
    std::function<void(std::span<double> times, std::size_t round)> permute;
    // Sees every permuted observed table.
    std::function<void(std::size_t round, const Matrix<std::uint64_t>& observed)> on_round;
};

// Shuffles event times across fixed locations for config.permutations rounds;
// round r draws from mt19937_64 seeded with rng_seed + r. p = (1 + #{rounds
// with permuted count >= observed}) / (rounds + 1).
void monte_carlo(std::span<const ingest::Event> events, KnoxTable& table, const KnoxConfig& config,
                 const MonteCarloHooks& hooks = {});

// Full test: table, expectations, residuals, p-values.
KnoxTable run(std::span<const ingest::Event> events, const KnoxConfig& config);

// Fisher-Yates with mt19937_64 and rejection-sampled bounded draws.
void seeded_shuffle(std::span<double> values, std::uint64_t seed);

// Writes observed.csv, expected.csv, residuals.csv, pvalues.csv and
// knox_meta.json into `dir` (created if missing).
void emit_heatmap(const KnoxTable& table, const KnoxConfig& config, const std::filesystem::path& dir,
                  const std::string& category = {});

// Bin-range labels used as CSV headers, e.g. "[0,100)" and "[1400,inf)".
std::vector<std::string> bin_labels(double step, std::size_t bins, Overflow overflow);

template <typename T>
void write_matrix_csv(const std::filesystem::path& path, const Matrix<T>& m, const KnoxTable& table);
Matrix<double> read_matrix_csv(const std::filesystem::path& path);
Matrix<std::uint64_t> read_count_csv(const std::filesystem::path& path);

}  // namespace nrchain::knox
