// nrchain: near-repeat event-chain pipeline.
//
//   nrchain synth     --out raw.csv [generator options]
//   nrchain ingest    --config run.ini
//   nrchain pairs     --config run.ini
//   nrchain stats     --config run.ini
//   nrchain decompose --config run.ini --methods core,truss
//   nrchain knox      --config run.ini --permutations 999
//   nrchain report    --config run.ini
//
// Flags override config values; NRCHAIN_OUTPUT_DIR overrides the configured
// output directory and --output-dir overrides both.

#include "nrchain/pipeline.hpp"
#include "nrchain/synth.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

using nrchain::pipeline::PipelineConfig;

struct Overrides {
    std::string config_path;
    std::optional<std::string> output_dir;
    std::optional<unsigned> threads;

    std::optional<std::string> input;
    std::optional<std::string> coordinate_mode;
    std::optional<std::string> time_format;
    std::optional<int> utm_zone;

    std::optional<double> r_x, r_y, r_t;
    bool binary = false;

    std::optional<std::string> methods;
    std::optional<int> k_min;
    std::optional<std::size_t> clique_limit;
    bool members = false;
    std::optional<std::string> timings;

    std::optional<double> distance_step, time_step;
    std::optional<std::size_t> distance_bins, time_bins, permutations;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> overflow;
    std::optional<std::string> knox_category;
};

PipelineConfig resolve(const Overrides& o) {
    PipelineConfig c;
    if (!o.config_path.empty()) c = nrchain::pipeline::load_config(o.config_path);
    if (const char* env = std::getenv(nrchain::pipeline::kOutputDirEnv); env && *env) c.output_dir = env;
    if (o.output_dir) c.output_dir = *o.output_dir;
    if (o.threads) c.threads = *o.threads;

    if (o.input) c.input = *o.input;
    if (o.coordinate_mode) {
        c.ingest.coordinate_mode = *o.coordinate_mode == "geographic" ? nrchain::ingest::CoordinateMode::Geographic
                                                                      : nrchain::ingest::CoordinateMode::Planar;
    }
    if (o.time_format) c.ingest.time_format = *o.time_format;
    if (o.utm_zone) c.ingest.utm_zone = *o.utm_zone;

    if (o.r_x) c.pairs.r_x = *o.r_x;
    if (o.r_y) c.pairs.r_y = *o.r_y;
    if (o.r_t) c.pairs.r_t = *o.r_t;
    if (o.binary) c.pairs.write_binary = true;

    if (o.methods) {
        c.decompose.methods.clear();
        std::string list = *o.methods;
        std::size_t start = 0;
        while (start <= list.size()) {
            const auto end = list.find(',', start);
            const std::string name = list.substr(start, end == std::string::npos ? std::string::npos : end - start);
            if (!name.empty()) {
                const auto m = nrchain::cohesive::parse_method(name);
                if (!m) throw nrchain::pipeline::PipelineError("unknown decomposition method '" + name + "'");
                c.decompose.methods.push_back(*m);
            }
            if (end == std::string::npos) break;
            start = end + 1;
        }
    }
    if (o.k_min) c.decompose.k_min = *o.k_min;
    if (o.clique_limit) c.decompose.clique_max_count = *o.clique_limit;
    if (o.members) c.decompose.include_members = true;
    if (o.timings) c.decompose.timings_path = *o.timings;

    if (o.distance_step) c.knox.distance_step = *o.distance_step;
    if (o.time_step) c.knox.time_step = *o.time_step;
    if (o.distance_bins) c.knox.n_distance_bins = *o.distance_bins;
    if (o.time_bins) c.knox.n_time_bins = *o.time_bins;
    if (o.permutations) c.knox.permutations = *o.permutations;
    if (o.seed) c.knox.rng_seed = *o.seed;
    if (o.overflow) {
        c.knox.overflow = *o.overflow == "drop" ? nrchain::knox::Overflow::Drop : nrchain::knox::Overflow::Clamp;
    }
    if (o.knox_category) c.knox_category = *o.knox_category;
    return c;
}

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("-c,--config", o.config_path, "Pipeline config file")->check(CLI::ExistingFile);
    cmd->add_option("-o,--output-dir", o.output_dir, "Output directory");
    cmd->add_option("-j,--threads", o.threads, "Worker threads (0 = one per core)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Near-repeat event-chain detection: R-tree pairing, cohesive subgraphs, Knox test"};
    app.require_subcommand(1);
    Overrides o;

    auto* ingest = app.add_subcommand("ingest", "Parse, project, range-filter and deduplicate raw events");
    add_common(ingest, o);
    ingest->add_option("-i,--input", o.input, "Raw CSV input");
    ingest->add_option("--coordinate-mode", o.coordinate_mode, "geographic or planar")
        ->check(CLI::IsMember({"geographic", "planar"}));
    ingest->add_option("--time-format", o.time_format, "strptime format of the timestamp column");
    ingest->add_option("--utm-zone", o.utm_zone, "Force a UTM zone (default: centroid zone)")->check(CLI::Range(1, 60));

    auto* pairs = app.add_subcommand("pairs", "Build near-repeat pairs with per-category R-trees");
    add_common(pairs, o);
    pairs->add_option("--rx", o.r_x, "Easting limit, meters");
    pairs->add_option("--ry", o.r_y, "Northing limit, meters");
    pairs->add_option("--rt", o.r_t, "Time limit, days");
    pairs->add_flag("--binary", o.binary, "Also write pairs.bin");

    auto* stats = app.add_subcommand("stats", "Graph statistics per connected component");
    add_common(stats, o);

    auto* decompose = app.add_subcommand("decompose", "Cohesive subgraph decompositions");
    add_common(decompose, o);
    decompose->add_option("--methods", o.methods, "Comma list of core,truss,dbscan,clique");
    decompose->add_option("--k-min", o.k_min, "Smallest k reported")->check(CLI::PositiveNumber);
    decompose->add_option("--clique-limit", o.clique_limit, "Stop clique enumeration after this many cliques");
    decompose->add_flag("--members", o.members, "List member vertex ids of every subgraph");
    decompose->add_option("--timings", o.timings, "Write per-phase timings to this JSON file");

    auto* knox = app.add_subcommand("knox", "Knox space-time contingency test per category");
    add_common(knox, o);
    knox->add_option("--distance-step", o.distance_step, "Distance bin width, meters");
    knox->add_option("--time-step", o.time_step, "Time bin width, days");
    knox->add_option("--distance-bins", o.distance_bins, "Distance bins (0 = cover the data)");
    knox->add_option("--time-bins", o.time_bins, "Time bins (0 = cover the data)");
    knox->add_option("--permutations", o.permutations, "Monte-Carlo rounds");
    knox->add_option("--seed", o.seed, "Monte-Carlo seed");
    knox->add_option("--overflow", o.overflow, "clamp or drop")->check(CLI::IsMember({"clamp", "drop"}));
    knox->add_option("--category", o.knox_category, "Run only this category");

    auto* report = app.add_subcommand("report", "Merge stage summaries into report.json");
    add_common(report, o);

    nrchain::synth::SynthConfig synth_config;
    std::string synth_out;
    std::string synth_categories = "THEFT";
    auto* synth = app.add_subcommand("synth", "Write a seeded synthetic raw-event CSV (planar coordinates)");
    synth->add_option("--out", synth_out, "Output CSV path")->required();
    synth->add_option("--background", synth_config.background, "Uniform background events");
    synth->add_option("--clusters", synth_config.clusters, "Number of space-time blobs");
    synth->add_option("--cluster-size", synth_config.cluster_size, "Events per blob");
    synth->add_option("--extent", synth_config.extent_m, "Square side, meters");
    synth->add_option("--days", synth_config.duration_days, "Time span, days");
    synth->add_option("--sigma-m", synth_config.sigma_m, "Blob spatial sigma, meters");
    synth->add_option("--sigma-days", synth_config.sigma_days, "Blob temporal sigma, days");
    synth->add_option("--categories", synth_categories, "Comma list of category labels");
    synth->add_option("--seed", synth_config.seed, "Generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            synth_config.categories.clear();
            std::size_t start = 0;
            while (true) {
                const auto end = synth_categories.find(',', start);
                const auto name = synth_categories.substr(start, end == std::string::npos ? end : end - start);
                if (!name.empty()) synth_config.categories.push_back(name);
                if (end == std::string::npos) break;
                start = end + 1;
            }
            nrchain::synth::write_csv(synth_out, nrchain::synth::generate(synth_config));
            return 0;
        }
        const PipelineConfig config = resolve(o);
        nlohmann::json summary;
        if (ingest->parsed()) {
            summary = nrchain::pipeline::run_ingest(config);
            for (const auto& w : summary.at("warnings")) std::cerr << "warning: " << w.get<std::string>() << '\n';
        } else if (pairs->parsed()) {
            summary = nrchain::pipeline::run_pairs(config);
        } else if (stats->parsed()) {
            summary = nrchain::pipeline::run_stats(config);
        } else if (decompose->parsed()) {
            summary = nrchain::pipeline::run_decompose(config);
        } else if (knox->parsed()) {
            summary = nrchain::pipeline::run_knox(config);
        } else if (report->parsed()) {
            summary = nrchain::pipeline::run_report(config);
        }
        std::cout << summary.dump(2) << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
