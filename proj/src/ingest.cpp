#include "nrchain/ingest.hpp"

#include "nrchain/csv.hpp"
#include "nrchain/utm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

namespace nrchain::ingest {
namespace {

constexpr double kSecondsPerDay = 86400.0;
constexpr double kMetreQuantum = 1e3;  // millimetres
constexpr double kDayQuantum = 1e6;    // micro-days

std::size_t column_index(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (csv::trim(header[i]) == name) return i;
    }
    throw IngestError("header has no column named '" + name + "'");
}

bool inside(double v, double lo, double hi) { return v >= lo && v <= hi; }

}  // namespace

void RangeWindow::validate() const {
    if (!(x_min < x_max) || !(y_min < y_max) || !(t_min < t_max)) {
        throw IngestError("range window requires min < max on every axis");
    }
}

void IngestConfig::validate() const {
    range_window.validate();
    if (utm_zone && (*utm_zone < 1 || *utm_zone > 60)) {
        throw IngestError("utm_zone must be in 1..60");
    }
    if (time_format.empty()) throw IngestError("time_format is empty");
}

std::string_view to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::BadNumber: return "bad-number";
        case RejectReason::BadTimestamp: return "bad-timestamp";
        case RejectReason::MissingField: return "missing-field";
        case RejectReason::OutOfBand: return "out-of-band";
    }
    return "unknown";
}

std::optional<std::int64_t> parse_timestamp(std::string_view text, const std::string& format) {
    const std::string owned(csv::trim(text));
    if (owned.empty()) return std::nullopt;
    std::tm tm{};
    const char* end = strptime(owned.c_str(), format.c_str(), &tm);
    if (end == nullptr) return std::nullopt;
    while (*end == ' ' || *end == '\t') ++end;
    if (*end != '\0') return std::nullopt;
    return static_cast<std::int64_t>(timegm(&tm));
}

std::string format_timestamp(std::int64_t seconds, const std::string& format) {
    const std::time_t tt = static_cast<std::time_t>(seconds);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[128];
    const std::size_t len = std::strftime(buf, sizeof buf, format.c_str(), &tm);
    return std::string(buf, len);
}

ParseResult parse_csv(const std::filesystem::path& path, const IngestConfig& config) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot read input file " + path.string());
    return parse_csv(in, config);
}

ParseResult parse_csv(std::istream& in, const IngestConfig& config) {
    std::string line;
    if (!std::getline(in, line)) throw IngestError("input has no header row");
    const auto header = csv::split_line(line, config.delimiter);
    if (!header) throw IngestError("malformed header row");

    const std::size_t i_first = column_index(*header, config.columns.first);
    const std::size_t i_second = column_index(*header, config.columns.second);
    const std::size_t i_time = column_index(*header, config.columns.timestamp);
    const std::size_t i_cat = column_index(*header, config.columns.category);
    const std::size_t needed = std::max({i_first, i_second, i_time, i_cat}) + 1;

    ParseResult result;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty() || csv::trim(line) == "\r") continue;
        ++result.data_lines;
        auto reject = [&](RejectReason reason, std::string detail) {
            result.rejects.push_back({line_no, reason, std::move(detail)});
        };
        const auto fields = csv::split_line(line, config.delimiter);
        if (!fields || fields->size() < needed) {
            reject(RejectReason::MissingField, "expected at least " + std::to_string(needed) + " fields");
            continue;
        }
        const auto& f = *fields;
        if (csv::trim(f[i_first]).empty() || csv::trim(f[i_second]).empty() ||
            csv::trim(f[i_time]).empty() || csv::trim(f[i_cat]).empty()) {
            reject(RejectReason::MissingField, "empty mapped field");
            continue;
        }
        const auto first = csv::parse_double(f[i_first]);
        const auto second = csv::parse_double(f[i_second]);
        if (!first || !second) {
            reject(RejectReason::BadNumber, "unparseable coordinate");
            continue;
        }
        const auto ts = parse_timestamp(f[i_time], config.time_format);
        if (!ts) {
            reject(RejectReason::BadTimestamp, "timestamp does not match '" + config.time_format + "'");
            continue;
        }
        result.records.push_back({line_no, *first, *second, *ts, std::string(csv::trim(f[i_cat]))});
    }
    return result;
}

double quantize(double value, double scale) { return std::round(value * scale) / scale; }

std::vector<Event> deduplicate(std::vector<Event> events) {
    auto key = [](const Event& e) { return std::tie(e.t, e.x, e.y, e.category); };
    std::sort(events.begin(), events.end(),
              [&](const Event& a, const Event& b) { return key(a) < key(b); });
    std::vector<Event> out;
    out.reserve(events.size());
    for (auto& e : events) {
        if (!out.empty() && key(out.back()) == key(e)) {
            out.back().multiplicity += e.multiplicity;
        } else {
            out.push_back(std::move(e));
        }
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<std::uint32_t>(i);
    return out;
}

std::vector<Event> filter_range(const std::vector<Event>& events, const RangeWindow& w) {
    std::vector<Event> out;
    for (const auto& e : events) {
        if (inside(e.x, w.x_min, w.x_max) && inside(e.y, w.y_min, w.y_max) && inside(e.t, w.t_min, w.t_max)) {
            out.push_back(e);
        }
    }
    return out;
}

CleanResult clean(ParseResult parsed, const IngestConfig& config) {
    config.validate();
    CleanResult result;
    IngestSummary& summary = result.summary;
    summary.data_lines = parsed.data_lines;
    result.rejects = std::move(parsed.rejects);

    std::vector<RawRecord> records;
    records.reserve(parsed.records.size());
    for (auto& r : parsed.records) {
        if (config.category_filter && !config.category_filter->contains(r.category)) {
            ++summary.category_filtered;
            continue;
        }
        records.push_back(std::move(r));
    }

    std::vector<Event> events;
    events.reserve(records.size());
    if (config.coordinate_mode == CoordinateMode::Geographic) {
        std::vector<RawRecord> in_band;
        for (auto& r : records) {
            if (!(r.first > -80.0 && r.first < 84.0) || !(r.second >= -180.0 && r.second < 180.0)) {
                result.rejects.push_back({r.source_line, RejectReason::OutOfBand,
                                          "lat/lon outside the UTM band"});
                continue;
            }
            in_band.push_back(std::move(r));
        }
        int zone = 0;
        if (config.utm_zone) {
            zone = *config.utm_zone;
        } else if (!in_band.empty()) {
            double lon_sum = 0.0;
            for (const auto& r : in_band) lon_sum += r.second;
            zone = utm::zone_for_longitude(lon_sum / static_cast<double>(in_band.size()));
            for (const auto& r : in_band) {
                const int z = utm::zone_for_longitude(r.second);
                if (z != zone) {
                    throw IngestError("dataset spans several UTM zones: line " + std::to_string(r.source_line) +
                                      " is in zone " + std::to_string(z) + ", centroid zone is " +
                                      std::to_string(zone));
                }
            }
        }
        if (zone != 0) summary.utm_zone = zone;
        for (auto& r : in_band) {
            const auto p = utm::project(r.first, r.second, zone);
            events.push_back({0, quantize(p.easting, kMetreQuantum), quantize(p.northing, kMetreQuantum),
                              static_cast<double>(r.timestamp) / kSecondsPerDay, std::move(r.category), 1});
        }
    } else {
        for (auto& r : records) {
            events.push_back({0, quantize(r.first, kMetreQuantum), quantize(r.second, kMetreQuantum),
                              static_cast<double>(r.timestamp) / kSecondsPerDay, std::move(r.category), 1});
        }
    }
    summary.accepted_records = events.size();

    auto kept = filter_range(events, config.range_window);
    summary.out_of_range = events.size() - kept.size();
    if (kept.empty() && !events.empty()) summary.warnings.push_back("range window retained no events");

    auto unique = deduplicate(std::move(kept));
    std::size_t retained = 0;
    for (const auto& e : unique) retained += e.multiplicity;
    summary.duplicates_removed = retained - unique.size();

    if (!unique.empty()) {
        // Times were exact seconds / 86400; rebase on the earliest one.
        const double min_day = unique.front().t;
        summary.epoch_seconds = static_cast<std::int64_t>(std::llround(min_day * kSecondsPerDay));
        for (auto& e : unique) {
            const double seconds = std::round(e.t * kSecondsPerDay) - static_cast<double>(summary.epoch_seconds);
            e.t = quantize(seconds / kSecondsPerDay, kDayQuantum);
        }
    }

    std::set<std::string> categories;
    for (const auto& e : unique) categories.insert(e.category);
    summary.categories = categories.size();
    summary.events = unique.size();
    summary.rejected = result.rejects.size();
    std::sort(result.rejects.begin(), result.rejects.end(),
              [](const Reject& a, const Reject& b) { return a.source_line < b.source_line; });
    if (summary.data_lines > 0 && summary.rejected * 2 > summary.data_lines) {
        summary.warnings.push_back("more than 50% of input lines were rejected");
    }
    result.events = std::move(unique);
    return result;
}

CleanResult ingest_file(const std::filesystem::path& path, const IngestConfig& config) {
    return clean(parse_csv(path, config), config);
}

void write_events_csv(std::ostream& out, const std::vector<Event>& events) {
    out << "id,x,y,t,category,multiplicity\n";
    char buf[160];
    for (const auto& e : events) {
        std::snprintf(buf, sizeof buf, "%u,%.3f,%.3f,%.6f,", e.id, e.x, e.y, e.t);
        out << buf << csv::escape_field(e.category) << ',' << e.multiplicity << '\n';
    }
}

void write_events_csv(const std::filesystem::path& path, const std::vector<Event>& events) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot write " + path.string());
    write_events_csv(out, events);
    if (!out) throw IngestError("write failed for " + path.string());
}

std::vector<Event> read_events_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot read events file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IngestError("events file " + path.string() + " is empty");
    std::vector<Event> events;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto fields = csv::split_line(line);
        auto bad = [&] {
            return IngestError(path.string() + ":" + std::to_string(line_no) + ": malformed event row");
        };
        if (!fields || fields->size() != 6) throw bad();
        const auto& f = *fields;
        const auto id = csv::parse_double(f[0]);
        const auto x = csv::parse_double(f[1]);
        const auto y = csv::parse_double(f[2]);
        const auto t = csv::parse_double(f[3]);
        const auto mult = csv::parse_double(f[5]);
        if (!id || !x || !y || !t || !mult || *id != static_cast<double>(events.size()) || *mult < 1) {
            throw bad();
        }
        events.push_back({static_cast<std::uint32_t>(*id), *x, *y, *t, f[4], static_cast<std::uint32_t>(*mult)});
    }
    return events;
}

void write_rejects_csv(const std::filesystem::path& path, const std::vector<Reject>& rejects) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot write " + path.string());
    out << "line,reason,detail\n";
    for (const auto& r : rejects) {
        out << r.source_line << ',' << to_string(r.reason) << ',' << csv::escape_field(r.detail) << '\n';
    }
}

}  // namespace nrchain::ingest
