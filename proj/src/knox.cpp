#include "nrchain/knox.hpp"

#include "nrchain/csv.hpp"
#include "nrchain/ingest.hpp"
#include "nrchain/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>

namespace nrchain::knox {

void KnoxConfig::validate() const {
    if (!(distance_step > 0) || !(time_step > 0)) throw KnoxError("Knox steps must be positive");
}

std::uint64_t KnoxTable::observed_sum() const {
    std::uint64_t s = 0;
    for (auto v : observed.data) s += v;
    return s;
}

namespace {

struct Columns {
    std::vector<double> x, y, t;
};

Columns columns_of(std::span<const ingest::Event> events) {
    Columns c;
    c.x.reserve(events.size());
    c.y.reserve(events.size());
    c.t.reserve(events.size());
    for (const auto& e : events) {
        c.x.push_back(e.x);
        c.y.push_back(e.y);
        c.t.push_back(e.t);
    }
    return c;
}

std::optional<std::size_t> to_bin(double value, double step, std::size_t bins, Overflow overflow) {
    const double raw = std::floor(value / step);
    const std::size_t bin =
        raw >= static_cast<double>(bins) ? bins : static_cast<std::size_t>(raw);
    if (bin < bins) return bin;
    if (overflow == Overflow::Drop) return std::nullopt;
    return bins - 1;
}

// Counts pairs (i, j), i < j, for i in [row_begin, row_end).
void count_rows(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& t,
                std::size_t row_begin, std::size_t row_end, double dstep, double tstep, Overflow overflow,
                Matrix<std::uint64_t>& out) {
    const std::size_t n = x.size();
    for (std::size_t i = row_begin; i < row_end; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[i] - x[j], dy = y[i] - y[j];
            const auto db = to_bin(std::sqrt(dx * dx + dy * dy), dstep, out.rows, overflow);
            if (!db) continue;
            const auto tb = to_bin(std::abs(t[i] - t[j]), tstep, out.cols, overflow);
            if (!tb) continue;
            ++out(*db, *tb);
        }
    }
}

// Row ranges holding roughly equal numbers of pairs. The split depends only
// on n, never on the worker count.
std::vector<std::pair<std::size_t, std::size_t>> pair_chunks(std::size_t n) {
    constexpr std::uint64_t kPairsPerChunk = 1u << 20;
    std::vector<std::pair<std::size_t, std::size_t>> chunks;
    std::size_t begin = 0;
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += n - 1 - i;
        if (acc >= kPairsPerChunk) {
            chunks.emplace_back(begin, i + 1);
            begin = i + 1;
            acc = 0;
        }
    }
    if (begin < n) chunks.emplace_back(begin, n);
    return chunks;
}

Matrix<std::uint64_t> count_table(const Columns& c, std::size_t rows, std::size_t cols, double dstep, double tstep,
                                  Overflow overflow, unsigned workers) {
    const auto chunks = pair_chunks(c.x.size());
    std::vector<Matrix<std::uint64_t>> partial(chunks.size(), Matrix<std::uint64_t>(rows, cols));
    parallel_for(chunks.size(), workers, [&](std::size_t k) {
        count_rows(c.x, c.y, c.t, chunks[k].first, chunks[k].second, dstep, tstep, overflow, partial[k]);
    });
    Matrix<std::uint64_t> total(rows, cols);
    for (const auto& p : partial) {
        for (std::size_t i = 0; i < total.data.size(); ++i) total.data[i] += p.data[i];
    }
    return total;
}

}  // namespace

std::pair<std::size_t, std::size_t> resolve_bins(std::span<const ingest::Event> events, const KnoxConfig& config) {
    std::size_t nd = config.n_distance_bins, nt = config.n_time_bins;
    if ((nd == 0 || nt == 0) && !events.empty()) {
        double x0 = events[0].x, x1 = x0, y0 = events[0].y, y1 = y0, t0 = events[0].t, t1 = t0;
        for (const auto& e : events) {
            x0 = std::min(x0, e.x);
            x1 = std::max(x1, e.x);
            y0 = std::min(y0, e.y);
            y1 = std::max(y1, e.y);
            t0 = std::min(t0, e.t);
            t1 = std::max(t1, e.t);
        }
        const double diag = std::sqrt((x1 - x0) * (x1 - x0) + (y1 - y0) * (y1 - y0));
        if (nd == 0) nd = static_cast<std::size_t>(std::floor(diag / config.distance_step)) + 1;
        if (nt == 0) nt = static_cast<std::size_t>(std::floor((t1 - t0) / config.time_step)) + 1;
    }
    return {std::max<std::size_t>(nd, 1), std::max<std::size_t>(nt, 1)};
}

std::optional<Bin> pair_bin(const ingest::Event& a, const ingest::Event& b, const KnoxConfig& config,
                            std::size_t n_distance_bins, std::size_t n_time_bins) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    const auto db = to_bin(std::sqrt(dx * dx + dy * dy), config.distance_step, n_distance_bins, config.overflow);
    const auto tb = to_bin(std::abs(a.t - b.t), config.time_step, n_time_bins, config.overflow);
    if (!db || !tb) return std::nullopt;
    return Bin{*db, *tb};
}

KnoxTable build_table(std::span<const ingest::Event> events, const KnoxConfig& config) {
    config.validate();
    if (events.size() < 2) throw KnoxError("the Knox table needs at least 2 events");
    const auto [nd, nt] = resolve_bins(events, config);
    KnoxTable table;
    table.distance_step = config.distance_step;
    table.time_step = config.time_step;
    table.overflow = config.overflow;
    table.n_events = events.size();
    table.total_pairs = static_cast<std::uint64_t>(events.size()) * (events.size() - 1) / 2;
    table.observed = count_table(columns_of(events), nd, nt, config.distance_step, config.time_step,
                                 config.overflow, config.workers);
    return table;
}

void expected_and_residuals(KnoxTable& table) {
    const auto& obs = table.observed;
    const double total = static_cast<double>(table.observed_sum());
    if (table.total_pairs == 0 || total == 0) throw KnoxError("Knox table has no binned pairs");
    std::vector<double> row(obs.rows, 0.0), col(obs.cols, 0.0);
    for (std::size_t i = 0; i < obs.rows; ++i) {
        for (std::size_t j = 0; j < obs.cols; ++j) {
            row[i] += static_cast<double>(obs(i, j));
            col[j] += static_cast<double>(obs(i, j));
        }
    }
    table.expected = Matrix<double>(obs.rows, obs.cols);
    table.residuals = Matrix<double>(obs.rows, obs.cols);
    for (std::size_t i = 0; i < obs.rows; ++i) {
        for (std::size_t j = 0; j < obs.cols; ++j) {
            const double e = row[i] * col[j] / total;
            table.expected(i, j) = e;
            table.residuals(i, j) = e > 0 ? (static_cast<double>(obs(i, j)) - e) / std::sqrt(e) : 0.0;
        }
    }
}

void seeded_shuffle(std::span<double> values, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto bounded = [&rng](std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
        std::uint64_t r = rng();
        while (r < threshold) r = rng();
        return r % bound;
    };
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(bounded(i));
        std::swap(values[i - 1], values[j]);
    }
}

void monte_carlo(std::span<const ingest::Event> events, KnoxTable& table, const KnoxConfig& config,
                 const MonteCarloHooks& hooks) {
    const Columns base = columns_of(events);
    const std::size_t rounds = config.permutations;
    const auto& obs = table.observed;
    // exceed[r] marks cells where round r reached the observed count.
    std::vector<std::vector<char>> exceed(rounds);
    std::mutex hook_mutex;
    parallel_for(rounds, config.workers, [&](std::size_t r) {
        Columns c{base.x, base.y, base.t};
        if (hooks.permute) {
            hooks.permute(c.t, r);
        } else {
            seeded_shuffle(c.t, config.rng_seed + r);
        }
        const auto permuted =
            count_table(c, obs.rows, obs.cols, table.distance_step, table.time_step, table.overflow, 1);
        if (hooks.on_round) {
            std::lock_guard lock(hook_mutex);
            hooks.on_round(r, permuted);
        }
        auto& mark = exceed[r];
        mark.resize(obs.data.size());
        for (std::size_t i = 0; i < obs.data.size(); ++i) mark[i] = permuted.data[i] >= obs.data[i];
    });
    table.p_values = Matrix<double>(obs.rows, obs.cols);
    for (std::size_t i = 0; i < obs.data.size(); ++i) {
        std::size_t hits = 0;
        for (const auto& mark : exceed) hits += mark[i] ? 1 : 0;
        table.p_values.data[i] = static_cast<double>(1 + hits) / static_cast<double>(rounds + 1);
    }
    table.permutations = rounds;
}

KnoxTable run(std::span<const ingest::Event> events, const KnoxConfig& config) {
    auto table = build_table(events, config);
    expected_and_residuals(table);
    monte_carlo(events, table, config);
    return table;
}

std::vector<std::string> bin_labels(double step, std::size_t bins, Overflow overflow) {
    std::vector<std::string> labels;
    for (std::size_t b = 0; b < bins; ++b) {
        const std::string lo = csv::format_double(step * static_cast<double>(b));
        const bool open_end = overflow == Overflow::Clamp && b + 1 == bins;
        const std::string hi = open_end ? "inf" : csv::format_double(step * static_cast<double>(b + 1));
        labels.push_back("[" + lo + "," + hi + ")");
    }
    return labels;
}

namespace {

std::string cell_text(std::uint64_t v) { return std::to_string(v); }
std::string cell_text(double v) { return csv::format_double(v); }

std::vector<std::vector<std::string>> read_csv_cells(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw KnoxError("cannot read " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw KnoxError(path.string() + " is empty");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = csv::split_line(line);
        if (!fields || fields->size() < 2) throw KnoxError(path.string() + ": malformed row");
        fields->erase(fields->begin());
        if (!rows.empty() && fields->size() != rows.front().size()) {
            throw KnoxError(path.string() + ": ragged rows");
        }
        rows.push_back(std::move(*fields));
    }
    return rows;
}

}  // namespace

template <typename T>
void write_matrix_csv(const std::filesystem::path& path, const Matrix<T>& m, const KnoxTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw KnoxError("cannot write " + path.string());
    const auto row_labels = bin_labels(table.distance_step, m.rows, table.overflow);
    const auto col_labels = bin_labels(table.time_step, m.cols, table.overflow);
    out << "distance_m\\time_days";
    for (const auto& l : col_labels) out << ',' << csv::escape_field(l);
    out << '\n';
    for (std::size_t i = 0; i < m.rows; ++i) {
        out << csv::escape_field(row_labels[i]);
        for (std::size_t j = 0; j < m.cols; ++j) out << ',' << cell_text(m(i, j));
        out << '\n';
    }
    if (!out) throw KnoxError("write failed for " + path.string());
}

template void write_matrix_csv<std::uint64_t>(const std::filesystem::path&, const Matrix<std::uint64_t>&,
                                              const KnoxTable&);
template void write_matrix_csv<double>(const std::filesystem::path&, const Matrix<double>&, const KnoxTable&);

Matrix<double> read_matrix_csv(const std::filesystem::path& path) {
    const auto cells = read_csv_cells(path);
    Matrix<double> m(cells.size(), cells.empty() ? 0 : cells.front().size());
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            const auto v = csv::parse_double(cells[i][j]);
            if (!v) throw KnoxError(path.string() + ": non-numeric cell");
            m(i, j) = *v;
        }
    }
    return m;
}

Matrix<std::uint64_t> read_count_csv(const std::filesystem::path& path) {
    const auto real = read_matrix_csv(path);
    Matrix<std::uint64_t> m(real.rows, real.cols);
    for (std::size_t i = 0; i < real.data.size(); ++i) {
        if (real.data[i] < 0 || real.data[i] != std::floor(real.data[i])) {
            throw KnoxError(path.string() + ": count cell is not a non-negative integer");
        }
        m.data[i] = static_cast<std::uint64_t>(real.data[i]);
    }
    return m;
}

void emit_heatmap(const KnoxTable& table, const KnoxConfig& config, const std::filesystem::path& dir,
                  const std::string& category) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw KnoxError("cannot create " + dir.string() + ": " + ec.message());
    write_matrix_csv(dir / "observed.csv", table.observed, table);
    write_matrix_csv(dir / "expected.csv", table.expected, table);
    write_matrix_csv(dir / "residuals.csv", table.residuals, table);
    write_matrix_csv(dir / "pvalues.csv", table.p_values, table);

    nlohmann::json meta;
    meta["schema_version"] = 1;
    meta["category"] = category;
    meta["config"] = {
        {"distance_step_m", table.distance_step},
        {"time_step_days", table.time_step},
        {"distance_bins", table.observed.rows},
        {"time_bins", table.observed.cols},
        {"overflow", table.overflow == Overflow::Clamp ? "clamp" : "drop"},
        {"permutations", table.permutations},
        {"rng_seed", config.rng_seed},
        {"rng", "mt19937_64"},
    };
    meta["events"] = table.n_events;
    meta["total_pairs"] = table.total_pairs;
    meta["observed_sum"] = table.observed_sum();
    if (table.observed.rows > 0 && table.observed.cols > 0 && !table.expected.data.empty()) {
        meta["near_cell"] = {
            {"observed", table.observed(0, 0)},
            {"expected", table.expected(0, 0)},
            {"residual", table.residuals(0, 0)},
            {"p_value", table.p_values.data.empty() ? 1.0 : table.p_values(0, 0)},
        };
    }
    std::ofstream out(dir / "knox_meta.json", std::ios::binary);
    if (!out) throw KnoxError("cannot write " + (dir / "knox_meta.json").string());
    out << meta.dump(2) << '\n';
}

}  // namespace nrchain::knox
