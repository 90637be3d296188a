#include "nrchain/pipeline.hpp"

#include "nrchain/csv.hpp"
#include "nrchain/graph.hpp"
#include "nrchain/st_index.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <chrono>
#include <cctype>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace nrchain::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

void PipelineConfig::validate() const {
    if (!(pairs.r_x > 0) || !(pairs.r_y > 0) || !(pairs.r_t > 0)) {
        throw PipelineError("r_x, r_y and r_t must be positive");
    }
    if (decompose.k_min < 1) throw PipelineError("k_min must be at least 1");
    ingest.validate();
    knox.validate();
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto t = csv::trim(item);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

double to_number(const std::string& key, const std::string& value) {
    const auto v = csv::parse_double(value);
    if (!v) throw PipelineError("config key '" + key + "' expects a number, got '" + value + "'");
    return *v;
}

std::size_t to_count(const std::string& key, const std::string& value) {
    const double v = to_number(key, value);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
        throw PipelineError("config key '" + key + "' expects a non-negative integer");
    }
    return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw PipelineError("config key '" + key + "' expects true/false");
}

double to_day(const std::string& key, const std::string& value, const std::string& format) {
    const auto ts = ingest::parse_timestamp(value, format);
    if (!ts) throw PipelineError("config key '" + key + "' does not match time_format");
    return static_cast<double>(*ts) / 86400.0;
}

}  // namespace

PipelineConfig parse_config(std::istream& in) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw PipelineError(std::string("config: ") + e.what());
    }
    PipelineConfig c;
    // time_format first: time window keys depend on it.
    if (auto fmt = tree.get_optional<std::string>("ingest.time_format")) c.ingest.time_format = *fmt;

    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw PipelineError("config key '" + section + "' outside a section");
        }
        for (const auto& [key, node] : body) {
            const std::string v = node.data();
            const std::string full = section + "." + key;
            if (section == "general") {
                if (key == "output_dir") c.output_dir = v;
                else if (key == "threads") c.threads = static_cast<unsigned>(to_count(full, v));
                else throw PipelineError("unknown config key '" + full + "'");
            } else if (section == "ingest") {
                auto& g = c.ingest;
                if (key == "input") c.input = v;
                else if (key == "coordinate_mode") {
                    if (v == "geographic") g.coordinate_mode = ingest::CoordinateMode::Geographic;
                    else if (v == "planar") g.coordinate_mode = ingest::CoordinateMode::Planar;
                    else throw PipelineError("coordinate_mode must be geographic or planar");
                } else if (key == "utm_zone") {
                    if (v == "auto") g.utm_zone.reset();
                    else g.utm_zone = static_cast<int>(to_count(full, v));
                } else if (key == "time_format") {
                } else if (key == "first_column" || key == "lat_column" || key == "x_column") {
                    g.columns.first = v;
                } else if (key == "second_column" || key == "lon_column" || key == "y_column") {
                    g.columns.second = v;
                } else if (key == "timestamp_column") g.columns.timestamp = v;
                else if (key == "category_column") g.columns.category = v;
                else if (key == "categories") {
                    const auto list = split_list(v);
                    g.category_filter = std::set<std::string>(list.begin(), list.end());
                } else if (key == "delimiter") {
                    if (v.size() != 1) throw PipelineError("delimiter must be one character");
                    g.delimiter = v[0];
                } else if (key == "x_min") g.range_window.x_min = to_number(full, v);
                else if (key == "x_max") g.range_window.x_max = to_number(full, v);
                else if (key == "y_min") g.range_window.y_min = to_number(full, v);
                else if (key == "y_max") g.range_window.y_max = to_number(full, v);
                else if (key == "t_min") g.range_window.t_min = to_day(full, v, g.time_format);
                else if (key == "t_max") g.range_window.t_max = to_day(full, v, g.time_format);
                else throw PipelineError("unknown config key '" + full + "'");
            } else if (section == "pairs") {
                if (key == "r_x") c.pairs.r_x = to_number(full, v);
                else if (key == "r_y") c.pairs.r_y = to_number(full, v);
                else if (key == "r_t") c.pairs.r_t = to_number(full, v);
                else if (key == "binary") c.pairs.write_binary = to_bool(full, v);
                else throw PipelineError("unknown config key '" + full + "'");
            } else if (section == "decompose") {
                if (key == "methods") {
                    c.decompose.methods.clear();
                    for (const auto& name : split_list(v)) {
                        const auto m = cohesive::parse_method(name);
                        if (!m) throw PipelineError("unknown decomposition method '" + name + "'");
                        c.decompose.methods.push_back(*m);
                    }
                } else if (key == "k_min") c.decompose.k_min = static_cast<int>(to_count(full, v));
                else if (key == "clique_max_count") c.decompose.clique_max_count = to_count(full, v);
                else if (key == "members") c.decompose.include_members = to_bool(full, v);
                else throw PipelineError("unknown config key '" + full + "'");
            } else if (section == "knox") {
                auto& k = c.knox;
                if (key == "distance_step") k.distance_step = to_number(full, v);
                else if (key == "time_step") k.time_step = to_number(full, v);
                else if (key == "distance_bins") k.n_distance_bins = to_count(full, v);
                else if (key == "time_bins") k.n_time_bins = to_count(full, v);
                else if (key == "permutations") k.permutations = to_count(full, v);
                else if (key == "seed") k.rng_seed = to_count(full, v);
                else if (key == "overflow") {
                    if (v == "clamp") k.overflow = knox::Overflow::Clamp;
                    else if (v == "drop") k.overflow = knox::Overflow::Drop;
                    else throw PipelineError("overflow must be clamp or drop");
                } else if (key == "category") c.knox_category = v;
                else throw PipelineError("unknown config key '" + full + "'");
            } else {
                throw PipelineError("unknown config section [" + section + "]");
            }
        }
    }
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw PipelineError("cannot read config " + path.string());
    return parse_config(in);
}

void write_json(const fs::path& path, const json& value) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw PipelineError("cannot write " + path.string());
    out << value.dump(2) << '\n';
    if (!out) throw PipelineError("write failed for " + path.string());
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw PipelineError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw PipelineError(path.string() + ": " + e.what());
    }
}

std::string category_slug(const std::string& category) {
    std::string slug;
    for (char ch : category) {
        const auto c = static_cast<unsigned char>(ch);
        slug.push_back(std::isalnum(c) || ch == '-' || ch == '_' ? ch : '_');
    }
    return slug.empty() ? "_" : slug;
}

fs::path decomposition_file(cohesive::Method m) {
    return "decompose_" + std::string(cohesive::to_string(m)) + ".json";
}

namespace {

void ensure_output_dir(const PipelineConfig& config) {
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) throw PipelineError("cannot create output directory " + config.output_dir.string());
}

std::vector<ingest::Event> load_events(const PipelineConfig& config, const char* stage) {
    const fs::path path = config.output_dir / files::kEvents;
    if (!fs::exists(path)) {
        throw PipelineError(std::string(stage) + ": missing " + path.string() + " (run the ingest stage first)");
    }
    return ingest::read_events_csv(path);
}

graph::EventGraph load_graph(const PipelineConfig& config, std::size_t n, const char* stage) {
    const fs::path path = config.output_dir / files::kEdges;
    if (!fs::exists(path)) {
        throw PipelineError(std::string(stage) + ": missing " + path.string() + " (run the pairs stage first)");
    }
    return graph::EventGraph::build(n, graph::read_edge_list(path));
}

class PhaseTimer {
public:
    void mark(const std::string& phase) {
        const auto now = std::chrono::steady_clock::now();
        const double seconds = std::chrono::duration<double>(now - last_).count();
        phases_.emplace_back(phase, seconds);
        std::cerr << "[timing] " << phase << ": " << seconds << " s\n";
        last_ = now;
    }
    json to_json() const {
        json out = json::array();
        for (const auto& [phase, seconds] : phases_) out.push_back({{"phase", phase}, {"seconds", seconds}});
        return out;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
    std::vector<std::pair<std::string, double>> phases_;
};

}  // namespace

json run_ingest(const PipelineConfig& config) {
    config.validate();
    if (config.input.empty()) throw PipelineError("ingest: no input file configured");
    if (!fs::exists(config.input)) throw PipelineError("ingest: input " + config.input.string() + " does not exist");
    ensure_output_dir(config);
    const auto result = ingest::ingest_file(config.input, config.ingest);
    ingest::write_events_csv(config.output_dir / files::kEvents, result.events);
    ingest::write_rejects_csv(config.output_dir / files::kRejects, result.rejects);

    const auto& s = result.summary;
    std::map<std::string, std::size_t> by_reason;
    for (const auto& r : result.rejects) ++by_reason[std::string(ingest::to_string(r.reason))];
    std::map<std::string, std::size_t> by_category;
    for (const auto& e : result.events) ++by_category[e.category];
    json summary = {
        {"schema_version", kSchemaVersion},
        {"data_lines", s.data_lines},
        {"accepted_records", s.accepted_records},
        {"rejected", s.rejected},
        {"rejects_by_reason", by_reason},
        {"category_filtered", s.category_filtered},
        {"out_of_range", s.out_of_range},
        {"duplicates_removed", s.duplicates_removed},
        {"events", s.events},
        {"categories", s.categories},
        {"events_by_category", by_category},
        {"epoch_seconds", s.epoch_seconds},
        {"epoch_utc", ingest::format_timestamp(s.epoch_seconds, "%Y-%m-%dT%H:%M:%SZ")},
        {"warnings", s.warnings},
    };
    summary["utm_zone"] = s.utm_zone ? json(*s.utm_zone) : json(nullptr);
    write_json(config.output_dir / files::kIngestSummary, summary);
    return summary;
}

json run_pairs(const PipelineConfig& config) {
    config.validate();
    const auto events = load_events(config, "pairs");
    if (events.empty()) throw PipelineError("pairs: the cleaned events file has zero events");
    const auto pairs = st_index::category_pairs(events, config.pairs.r_x, config.pairs.r_y, config.pairs.r_t,
                                                config.threads);
    graph::write_edge_list(config.output_dir / files::kEdges, pairs);
    if (config.pairs.write_binary) st_index::write_pairs_binary(config.output_dir / files::kPairsBinary, pairs);

    const auto g = graph::EventGraph::build(events.size(), pairs);
    const auto cc = graph::connected_components(g);
    std::size_t nontrivial = 0;
    for (const auto& comp : cc.components) nontrivial += comp.size() > 1 ? 1 : 0;
    json summary = {
        {"schema_version", kSchemaVersion},
        {"vertices", g.num_vertices()},
        {"edges", g.num_edges()},
        {"connected_components", nontrivial},
        {"isolated_vertices", cc.count() - nontrivial},
        {"r_x", config.pairs.r_x},
        {"r_y", config.pairs.r_y},
        {"r_t", config.pairs.r_t},
    };
    write_json(config.output_dir / files::kPairsSummary, summary);
    return summary;
}

json graph_stats_json(const graph::GraphStats& stats) {
    json comps = json::array();
    for (const auto& c : stats.per_component) {
        comps.push_back({{"vertices", c.vertices},
                         {"edges", c.edges},
                         {"diameter", c.diameter},
                         {"mean_clustering_coefficient", c.mean_clustering_coefficient}});
    }
    return {
        {"schema_version", kSchemaVersion},
        {"vertices", stats.vertices},
        {"edges", stats.edges},
        {"connected_components", stats.nontrivial_components},
        {"isolated_vertices", stats.components - stats.nontrivial_components},
        {"max_diameter", stats.max_diameter},
        {"mean_clustering_coefficient", stats.mean_clustering_coefficient},
        {"components", comps},
    };
}

json run_stats(const PipelineConfig& config) {
    config.validate();
    const auto events = load_events(config, "stats");
    const auto g = load_graph(config, events.size(), "stats");
    const auto out = graph_stats_json(graph::compute_stats(g, config.threads));
    write_json(config.output_dir / files::kGraphStats, out);
    return out;
}

json decomposition_json(const cohesive::DecompositionResult& result, bool include_members) {
    json levels = json::array();
    for (const auto& [k, subs] : result.per_k) {
        std::map<std::size_t, std::size_t> histogram;
        double coefficient_sum = 0.0;
        json list = json::array();
        for (const auto& s : subs) {
            ++histogram[s.vertices.size()];
            coefficient_sum += s.clustering_coefficient;
            json entry = {{"size", s.vertices.size()},
                          {"edges", s.edges.size()},
                          {"clustering_coefficient", s.clustering_coefficient}};
            if (include_members) entry["vertices"] = s.vertices;
            list.push_back(std::move(entry));
        }
        json hist = json::array();
        for (const auto& [size, count] : histogram) hist.push_back({{"size", size}, {"count", count}});
        levels.push_back({{"k", k},
                          {"subgraph_count", subs.size()},
                          {"mean_clustering_coefficient", coefficient_sum / static_cast<double>(subs.size())},
                          {"size_histogram", hist},
                          {"subgraphs", list}});
    }
    return {
        {"schema_version", kSchemaVersion},
        {"method", cohesive::to_string(result.method)},
        {"k_min", result.k_min},
        {"truncated", result.truncated},
        {"total_subgraphs", result.subgraph_count()},
        {"levels", levels},
    };
}

json run_decompose(const PipelineConfig& config) {
    config.validate();
    if (config.decompose.methods.empty()) throw PipelineError("decompose: no methods requested");
    PhaseTimer timer;
    const auto events = load_events(config, "decompose");
    timer.mark("load");
    const auto g = load_graph(config, events.size(), "decompose");
    timer.mark("build");
    const auto cc = graph::connected_components(g);
    timer.mark("components");

    json methods = json::array();
    for (const auto method : config.decompose.methods) {
        const auto result = cohesive::decompose(method, g, config.decompose.k_min,
                                                config.decompose.clique_max_count, config.threads);
        const fs::path file = decomposition_file(method);
        write_json(config.output_dir / file, decomposition_json(result, config.decompose.include_members));
        timer.mark(std::string(cohesive::to_string(method)));
        if (result.truncated) {
            std::cerr << "warning: clique enumeration truncated at " << config.decompose.clique_max_count
                      << " cliques\n";
        }
        methods.push_back({{"method", cohesive::to_string(method)},
                           {"file", file.string()},
                           {"levels", result.per_k.size()},
                           {"subgraphs", result.subgraph_count()},
                           {"truncated", result.truncated}});
    }
    json summary = {
        {"schema_version", kSchemaVersion},
        {"k_min", config.decompose.k_min},
        {"vertices", g.num_vertices()},
        {"edges", g.num_edges()},
        {"components", cc.count()},
        {"methods", methods},
    };
    write_json(config.output_dir / files::kDecomposeSummary, summary);
    if (config.decompose.timings_path) {
        write_json(*config.decompose.timings_path,
                   {{"schema_version", kSchemaVersion}, {"phases", timer.to_json()}});
    }
    return summary;
}

json run_knox(const PipelineConfig& config) {
    config.validate();
    const auto events = load_events(config, "knox");
    std::map<std::string, std::vector<ingest::Event>> by_category;
    for (const auto& e : events) {
        if (!config.knox_category || e.category == *config.knox_category) by_category[e.category].push_back(e);
    }
    if (config.knox_category && by_category[*config.knox_category].size() < 2) {
        throw PipelineError("knox: category '" + *config.knox_category + "' has fewer than 2 events");
    }
    auto knox_config = config.knox;
    knox_config.workers = config.threads;

    json categories = json::array();
    std::size_t run_count = 0;
    for (const auto& [category, list] : by_category) {
        const std::string dir = std::string(files::kKnoxDir) + "/" + category_slug(category);
        if (list.size() < 2) {
            categories.push_back({{"category", category}, {"events", list.size()}, {"skipped", true}});
            continue;
        }
        const auto table = knox::run(list, knox_config);
        knox::emit_heatmap(table, knox_config, config.output_dir / dir, category);
        ++run_count;
        categories.push_back({
            {"category", category},
            {"dir", dir},
            {"events", list.size()},
            {"skipped", false},
            {"total_pairs", table.total_pairs},
            {"observed_sum", table.observed_sum()},
            {"near_cell",
             {{"observed", table.observed(0, 0)},
              {"expected", table.expected(0, 0)},
              {"residual", table.residuals(0, 0)},
              {"p_value", table.p_values(0, 0)}}},
        });
    }
    if (run_count == 0) throw PipelineError("knox: no category has at least 2 events");
    json summary = {{"schema_version", kSchemaVersion}, {"categories", categories}};
    write_json(config.output_dir / files::kKnoxSummary, summary);
    return summary;
}

json run_report(const PipelineConfig& config) {
    const fs::path dir = config.output_dir;
    auto require = [&](const char* file, const char* stage) {
        if (!fs::exists(dir / file)) {
            throw PipelineError(std::string("report: missing output of stage '") + stage + "' (" +
                                (dir / file).string() + ")");
        }
        return read_json(dir / file);
    };
    json report = {{"schema_version", kSchemaVersion}};
    const json ingest = require(files::kIngestSummary, "ingest");
    report["dataset"] = {
        {"data_lines", ingest.at("data_lines")},
        {"events", ingest.at("events")},
        {"rejected", ingest.at("rejected")},
        {"duplicates_removed", ingest.at("duplicates_removed")},
        {"categories", ingest.at("categories")},
    };
    const json pairs = require(files::kPairsSummary, "pairs");
    report["graph"] = {
        {"vertices", pairs.at("vertices")},
        {"edges", pairs.at("edges")},
        {"connected_components", pairs.at("connected_components")},
        {"r_x", pairs.at("r_x")},
        {"r_y", pairs.at("r_y")},
        {"r_t", pairs.at("r_t")},
    };
    if (fs::exists(dir / files::kGraphStats)) {
        const json stats = read_json(dir / files::kGraphStats);
        report["graph"]["max_diameter"] = stats.at("max_diameter");
        report["graph"]["mean_clustering_coefficient"] = stats.at("mean_clustering_coefficient");
    }
    if (fs::exists(dir / files::kDecomposeSummary)) {
        const json summary = read_json(dir / files::kDecomposeSummary);
        json methods = json::object();
        for (const auto& m : summary.at("methods")) {
            const std::string file = m.at("file");
            const json detail = require(file.c_str(), "decompose");
            json levels = json::array();
            for (const auto& level : detail.at("levels")) {
                levels.push_back({{"k", level.at("k")},
                                  {"subgraph_count", level.at("subgraph_count")},
                                  {"mean_clustering_coefficient", level.at("mean_clustering_coefficient")}});
            }
            methods[m.at("method").get<std::string>()] = {{"truncated", detail.at("truncated")},
                                                          {"total_subgraphs", detail.at("total_subgraphs")},
                                                          {"levels", levels}};
        }
        if (!methods.empty()) report["decompose"] = methods;
    }
    if (fs::exists(dir / files::kKnoxSummary)) {
        const json knox = read_json(dir / files::kKnoxSummary);
        json highlights = json::array();
        for (const auto& c : knox.at("categories")) {
            if (c.at("skipped").get<bool>()) continue;
            highlights.push_back({{"category", c.at("category")},
                                  {"events", c.at("events")},
                                  {"total_pairs", c.at("total_pairs")},
                                  {"near_cell", c.at("near_cell")}});
        }
        report["knox"] = highlights;
    }
    write_json(dir / files::kReport, report);
    return report;
}

}  // namespace nrchain::pipeline
