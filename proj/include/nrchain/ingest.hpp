#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nrchain::ingest {

struct IngestError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CoordinateMode { Geographic, Planar };

// Closed validity window on cleaned coordinates. x, y are in meters; t is in
// days since the Unix epoch while records are being cleaned.
struct RangeWindow {
    double x_min = -std::numeric_limits<double>::infinity();
    double x_max = std::numeric_limits<double>::infinity();
    double y_min = -std::numeric_limits<double>::infinity();
    double y_max = std::numeric_limits<double>::infinity();
    double t_min = -std::numeric_limits<double>::infinity();
    double t_max = std::numeric_limits<double>::infinity();

    void validate() const;
};

// Header names of the mapped columns. In geographic mode the first coordinate
// column holds latitude and the second longitude; in planar mode they hold
// easting and northing.
struct ColumnMap {
    std::string first = "x";
    std::string second = "y";
    std::string timestamp = "timestamp";
    std::string category = "category";
};

struct IngestConfig {
    CoordinateMode coordinate_mode = CoordinateMode::Planar;
    std::optional<int> utm_zone;  // nullopt: zone of the dataset centroid
    std::string time_format = "%Y-%m-%d %H:%M:%S";
    ColumnMap columns;
    RangeWindow range_window;
    std::optional<std::set<std::string>> category_filter;
    char delimiter = ',';

    void validate() const;
};

struct RawRecord {
    std::size_t source_line = 0;
    double first = 0.0;   // latitude or easting
    double second = 0.0;  // longitude or northing
    std::int64_t timestamp = 0;  // seconds since the Unix epoch, UTC
    std::string category;
};

enum class RejectReason { BadNumber, BadTimestamp, MissingField, OutOfBand };

std::string_view to_string(RejectReason reason);

struct Reject {
    std::size_t source_line = 0;
    RejectReason reason = RejectReason::MissingField;
    std::string detail;
};

struct ParseResult {
    std::vector<RawRecord> records;
    std::vector<Reject> rejects;
    std::size_t data_lines = 0;

    // More than half of the data lines were rejected.
    bool high_reject_rate() const { return rejects.size() * 2 > data_lines; }
};

// Reads a CSV with a header row. Throws IngestError when the file cannot be
// opened or the header lacks a mapped column.
ParseResult parse_csv(const std::filesystem::path& path, const IngestConfig& config);
ParseResult parse_csv(std::istream& in, const IngestConfig& config);

// Parses `text` with a strptime format, interpreting it as UTC.
std::optional<std::int64_t> parse_timestamp(std::string_view text, const std::string& format);
std::string format_timestamp(std::int64_t seconds, const std::string& format);

struct Event {
    std::uint32_t id = 0;
    double x = 0.0;  // easting, meters
    double y = 0.0;  // northing, meters
    double t = 0.0;  // days
    std::string category;
    std::uint32_t multiplicity = 1;

    friend bool operator==(const Event&, const Event&) = default;
};

// Merges events with identical (category, x, y, t), summing multiplicities.
// Output is sorted by (t, x, y, category) with ids 0..n-1.
std::vector<Event> deduplicate(std::vector<Event> events);

// Keeps events inside the closed window. Ids are left untouched.
std::vector<Event> filter_range(const std::vector<Event>& events, const RangeWindow& window);

struct IngestSummary {
    std::size_t data_lines = 0;
    std::size_t accepted_records = 0;
    std::size_t rejected = 0;
    std::size_t category_filtered = 0;
    std::size_t out_of_range = 0;
    std::size_t duplicates_removed = 0;
    std::size_t events = 0;
    std::size_t categories = 0;
    std::optional<int> utm_zone;
    std::int64_t epoch_seconds = 0;  // timestamp of t == 0
    std::vector<std::string> warnings;
};

struct CleanResult {
    std::vector<Event> events;
    std::vector<Reject> rejects;
    IngestSummary summary;
};

// Projects, range-filters and deduplicates parsed records. Times become days
// since the earliest retained record. x, y are quantized to millimetres and t
// to micro-days so the cleaned-events file reloads bit-exactly. Throws
// IngestError for a dataset spanning several UTM zones when the zone is auto.
CleanResult clean(ParseResult parsed, const IngestConfig& config);

// Convenience: parse_csv followed by clean.
CleanResult ingest_file(const std::filesystem::path& path, const IngestConfig& config);

void write_events_csv(const std::filesystem::path& path, const std::vector<Event>& events);
void write_events_csv(std::ostream& out, const std::vector<Event>& events);
std::vector<Event> read_events_csv(const std::filesystem::path& path);
void write_rejects_csv(const std::filesystem::path& path, const std::vector<Reject>& rejects);

double quantize(double value, double scale);

}  // namespace nrchain::ingest
