#pragma once

#include "nrchain/cohesive.hpp"
#include "nrchain/ingest.hpp"
#include "nrchain/knox.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nrchain::pipeline {

// Stage outputs are plain files in one directory, so each stage can be rerun
// and timed on its own.
inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kOutputDirEnv = "NRCHAIN_OUTPUT_DIR";

struct PipelineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PairConfig {
    double r_x = 100.0;  // meters
    double r_y = 100.0;  // meters
    double r_t = 10.0;   // days
    bool write_binary = false;
};

struct DecomposeConfig {
    std::vector<cohesive::Method> methods{cohesive::Method::Core, cohesive::Method::Truss,
                                          cohesive::Method::Dbscan};
    int k_min = cohesive::kDefaultKMin;
    std::size_t clique_max_count = cohesive::kDefaultCliqueLimit;
    bool include_members = false;
    std::optional<std::filesystem::path> timings_path;
};

struct PipelineConfig {
    std::filesystem::path input;
    ingest::IngestConfig ingest;
    PairConfig pairs;
    DecomposeConfig decompose;
    knox::KnoxConfig knox;
    std::optional<std::string> knox_category;  // nullopt: every category
    std::filesystem::path output_dir = "nrchain_out";
    unsigned threads = 0;  // 0: one per hardware thread

    void validate() const;
};

// INI-style file with [general], [ingest], [pairs], [decompose] and [knox]
// sections. Unknown keys are rejected.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(std::istream& in);

// File names inside the output directory.
namespace files {
inline constexpr const char* kEvents = "events.csv";
inline constexpr const char* kRejects = "rejects.csv";
inline constexpr const char* kIngestSummary = "ingest_summary.json";
inline constexpr const char* kEdges = "edges.txt";
inline constexpr const char* kPairsBinary = "pairs.bin";
inline constexpr const char* kPairsSummary = "pairs_summary.json";
inline constexpr const char* kGraphStats = "graph_stats.json";
inline constexpr const char* kDecomposeSummary = "decompose_summary.json";
inline constexpr const char* kKnoxDir = "knox";
inline constexpr const char* kKnoxSummary = "knox_summary.json";
inline constexpr const char* kReport = "report.json";
}  // namespace files

std::filesystem::path decomposition_file(cohesive::Method m);

nlohmann::json run_ingest(const PipelineConfig& config);
nlohmann::json run_pairs(const PipelineConfig& config);
nlohmann::json run_stats(const PipelineConfig& config);
nlohmann::json run_decompose(const PipelineConfig& config);
nlohmann::json run_knox(const PipelineConfig& config);
nlohmann::json run_report(const PipelineConfig& config);

nlohmann::json decomposition_json(const cohesive::DecompositionResult& result, bool include_members);
nlohmann::json graph_stats_json(const graph::GraphStats& stats);

// Writes `value` as indented JSON followed by a newline.
void write_json(const std::filesystem::path& path, const nlohmann::json& value);
nlohmann::json read_json(const std::filesystem::path& path);

// Directory-safe form of a category label.
std::string category_slug(const std::string& category);

}  // namespace nrchain::pipeline
