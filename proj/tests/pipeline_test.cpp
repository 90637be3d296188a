#include "nrchain/pipeline.hpp"
#include "nrchain/st_index.hpp"
#include "nrchain/synth.hpp"

#include "json_schema.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace pl = nrchain::pipeline;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kData = NRCHAIN_TEST_DATA;
const fs::path kSchema = NRCHAIN_SCHEMA_DIR;

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class PipelineTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("nrchain_pipeline_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        config_.output_dir = dir_ / "out";
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write_raw(const std::string& text) {
        const fs::path p = dir_ / "raw.csv";
        std::ofstream(p, std::ios::binary) << text;
        config_.input = p;
        return p;
    }

    fs::path dir_;
    pl::PipelineConfig config_;
};

}  // namespace

TEST(Config, ParsesAllSections) {
    std::istringstream in(R"(
[general]
output_dir = results
threads = 3
[ingest]
input = data.csv
coordinate_mode = geographic
utm_zone = 17
time_format = %Y/%m/%d
lat_column = LAT
lon_column = LON
timestamp_column = DATE
category_column = TYPE
categories = THEFT, ROBBERY
t_min = 2020/01/01
t_max = 2020/12/31
x_min = 1
x_max = 2
[pairs]
r_x = 50
r_y = 60
r_t = 7
binary = true
[decompose]
methods = core, clique
k_min = 4
clique_max_count = 99
members = yes
[knox]
distance_step = 200
time_step = 7
distance_bins = 10
time_bins = 5
permutations = 49
seed = 123
overflow = drop
category = THEFT
)");
    const auto c = pl::parse_config(in);
    EXPECT_EQ(c.output_dir, "results");
    EXPECT_EQ(c.threads, 3u);
    EXPECT_EQ(c.input, "data.csv");
    EXPECT_EQ(c.ingest.coordinate_mode, nrchain::ingest::CoordinateMode::Geographic);
    EXPECT_EQ(c.ingest.utm_zone, 17);
    EXPECT_EQ(c.ingest.columns.first, "LAT");
    EXPECT_EQ(c.ingest.columns.category, "TYPE");
    EXPECT_EQ(c.ingest.category_filter, (std::set<std::string>{"THEFT", "ROBBERY"}));
    EXPECT_DOUBLE_EQ(c.ingest.range_window.t_min, 18262.0);
    EXPECT_DOUBLE_EQ(c.ingest.range_window.x_max, 2.0);
    EXPECT_EQ(c.pairs.r_y, 60.0);
    EXPECT_TRUE(c.pairs.write_binary);
    EXPECT_EQ(c.decompose.methods,
              (std::vector<nrchain::cohesive::Method>{nrchain::cohesive::Method::Core,
                                                      nrchain::cohesive::Method::Clique}));
    EXPECT_EQ(c.decompose.k_min, 4);
    EXPECT_EQ(c.decompose.clique_max_count, 99u);
    EXPECT_TRUE(c.decompose.include_members);
    EXPECT_EQ(c.knox.distance_step, 200.0);
    EXPECT_EQ(c.knox.n_time_bins, 5u);
    EXPECT_EQ(c.knox.permutations, 49u);
    EXPECT_EQ(c.knox.rng_seed, 123u);
    EXPECT_EQ(c.knox.overflow, nrchain::knox::Overflow::Drop);
    EXPECT_EQ(c.knox_category, "THEFT");
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    for (const char* text : {"[pairs]\nradius = 3\n", "[extra]\na = 1\n", "[pairs]\nr_x = abc\n",
                             "[decompose]\nmethods = core,quux\n", "[knox]\noverflow = wrap\n",
                             "[ingest]\nutm_zone = 99\n"}) {
        std::istringstream in(text);
        EXPECT_THROW(pl::parse_config(in).validate(), std::exception) << text;
    }
    pl::PipelineConfig c;
    c.pairs.r_t = 0;
    EXPECT_THROW(c.validate(), pl::PipelineError);
}

TEST(Config, CitySliceFixtureLoads) {
    const auto c = pl::load_config(kData / "city_slice.ini");
    EXPECT_EQ(c.ingest.columns.timestamp, "date");
    EXPECT_FALSE(c.ingest.utm_zone);
}

TEST_F(PipelineTest, IngestThreeRows) {
    config_.input = kData / "well_formed.csv";
    const auto s = pl::run_ingest(config_);
    EXPECT_EQ(s.at("events"), 3);
    EXPECT_EQ(s.at("schema_version"), pl::kSchemaVersion);
    EXPECT_TRUE(fs::exists(config_.output_dir / pl::files::kEvents));
    EXPECT_TRUE(fs::exists(config_.output_dir / pl::files::kRejects));
    EXPECT_EQ(pl::read_json(config_.output_dir / pl::files::kIngestSummary), s);
}

TEST_F(PipelineTest, IngestDuplicatesOnly) {
    config_.input = kData / "duplicates_only.csv";
    const auto s = pl::run_ingest(config_);
    EXPECT_EQ(s.at("events"), 1);
    EXPECT_EQ(s.at("duplicates_removed"), 3);
}

TEST_F(PipelineTest, IngestCitySliceTally) {
    auto c = pl::load_config(kData / "city_slice.ini");
    c.input = kData / "city_slice.csv";
    c.output_dir = config_.output_dir;
    const auto s = pl::run_ingest(c);
    EXPECT_EQ(s.at("data_lines"), 12);
    EXPECT_EQ(s.at("rejected"), 3);
    EXPECT_EQ(s.at("out_of_range"), 1);
    EXPECT_EQ(s.at("duplicates_removed"), 2);
    EXPECT_EQ(s.at("events"), 6);
    EXPECT_EQ(s.at("categories"), 3);
    EXPECT_EQ(s.at("utm_zone"), 18);
    EXPECT_EQ(s.at("epoch_utc"), "2021-03-01T10:00:00Z");
    EXPECT_EQ(s.at("rejects_by_reason"), (json{{"bad-timestamp", 1}, {"missing-field", 1}, {"out-of-band", 1}}));
    EXPECT_EQ(slurp(c.output_dir / pl::files::kRejects).substr(0, 18), "line,reason,detail");
}

TEST_F(PipelineTest, MissingInputIsError) {
    config_.input = dir_ / "nope.csv";
    EXPECT_THROW(pl::run_ingest(config_), pl::PipelineError);
}

TEST_F(PipelineTest, PairsNearAndFar) {
    write_raw("x,y,timestamp,category\n0,0,2021-01-01 00:00:00,A\n50,0,2021-01-02 00:00:00,A\n");
    pl::run_ingest(config_);
    auto s = pl::run_pairs(config_);
    EXPECT_EQ(s.at("edges"), 1);
    EXPECT_EQ(slurp(config_.output_dir / pl::files::kEdges), "0 1\n");

    write_raw("x,y,timestamp,category\n0,0,2021-01-01 00:00:00,A\n5000,0,2021-01-02 00:00:00,A\n");
    pl::run_ingest(config_);
    s = pl::run_pairs(config_);
    EXPECT_EQ(s.at("edges"), 0);
    EXPECT_EQ(slurp(config_.output_dir / pl::files::kEdges), "");
}

TEST_F(PipelineTest, PairsNeedEvents) {
    EXPECT_THROW(pl::run_pairs(config_), pl::PipelineError);
    write_raw("x,y,timestamp,category\n");
    pl::run_ingest(config_);
    EXPECT_THROW(pl::run_pairs(config_), pl::PipelineError);
}

TEST_F(PipelineTest, TriangleAllMethods) {
    write_raw(
        "x,y,timestamp,category\n0,0,2021-01-01 00:00:00,A\n10,0,2021-01-01 01:00:00,A\n0,10,2021-01-01 "
        "02:00:00,A\n");
    pl::run_ingest(config_);
    pl::run_pairs(config_);
    config_.decompose.methods = {nrchain::cohesive::Method::Core, nrchain::cohesive::Method::Truss,
                                 nrchain::cohesive::Method::Dbscan, nrchain::cohesive::Method::Clique};
    config_.decompose.k_min = 2;
    pl::run_decompose(config_);
    // k-core and dbscan need degree >= k; the triangle has degree 2, so compare
    // at the level each method reaches for a triangle.
    for (auto m : config_.decompose.methods) {
        const auto d = pl::read_json(config_.output_dir / pl::decomposition_file(m));
        bool found = false;
        for (const auto& level : d.at("levels"))
            for (const auto& s : level.at("subgraphs")) found = found || s.at("size") == 3;
        EXPECT_TRUE(found) << nrchain::cohesive::to_string(m);
    }
    config_.decompose.k_min = 3;
    pl::run_decompose(config_);
    for (auto m : {nrchain::cohesive::Method::Truss, nrchain::cohesive::Method::Clique}) {
        const auto d = pl::read_json(config_.output_dir / pl::decomposition_file(m));
        ASSERT_EQ(d.at("levels").size(), 1u);
        EXPECT_EQ(d.at("levels")[0].at("k"), 3);
        EXPECT_EQ(d.at("levels")[0].at("subgraph_count"), 1);
        EXPECT_EQ(d.at("levels")[0].at("subgraphs")[0].at("size"), 3);
    }
}

TEST_F(PipelineTest, EmptyGraphGivesEmptyReports) {
    write_raw("x,y,timestamp,category\n0,0,2021-01-01 00:00:00,A\n9000,0,2021-01-01 00:00:00,A\n");
    pl::run_ingest(config_);
    pl::run_pairs(config_);
    const auto s = pl::run_decompose(config_);
    for (const auto& m : s.at("methods")) EXPECT_EQ(m.at("subgraphs"), 0);
    const auto core = pl::read_json(config_.output_dir / "decompose_core.json");
    EXPECT_TRUE(core.at("levels").empty());
}

TEST_F(PipelineTest, KnoxTwoEvents) {
    write_raw("x,y,timestamp,category\n0,0,2021-01-01 00:00:00,A\n50,0,2021-01-02 00:00:00,A\n");
    pl::run_ingest(config_);
    const auto s = pl::run_knox(config_);
    ASSERT_EQ(s.at("categories").size(), 1u);
    EXPECT_EQ(s.at("categories")[0].at("total_pairs"), 1);
    EXPECT_EQ(s.at("categories")[0].at("near_cell").at("observed"), 1);
    EXPECT_TRUE(fs::exists(config_.output_dir / "knox" / "A" / "observed.csv"));
}

TEST_F(PipelineTest, KnoxNeedsTwoEvents) {
    write_raw("x,y,timestamp,category\n0,0,2021-01-01 00:00:00,A\n");
    pl::run_ingest(config_);
    EXPECT_THROW(pl::run_knox(config_), pl::PipelineError);
}

TEST_F(PipelineTest, ReportNamesMissingStage) {
    try {
        pl::run_report(config_);
        FAIL() << "expected an error";
    } catch (const pl::PipelineError& e) {
        EXPECT_NE(std::string(e.what()).find("'ingest'"), std::string::npos);
    }
    config_.input = kData / "well_formed.csv";
    pl::run_ingest(config_);
    try {
        pl::run_report(config_);
        FAIL() << "expected an error";
    } catch (const pl::PipelineError& e) {
        EXPECT_NE(std::string(e.what()).find("'pairs'"), std::string::npos);
    }
    pl::run_pairs(config_);
    const auto r = pl::run_report(config_);
    EXPECT_FALSE(r.contains("decompose"));
    EXPECT_FALSE(r.contains("knox"));
}

TEST_F(PipelineTest, FullFixturePipeline) {
    nrchain::synth::SynthConfig sc;
    sc.background = 600;
    sc.clusters = 8;
    sc.categories = {"THEFT", "ROBBERY"};
    sc.extent_m = 4000;
    sc.seed = 99;
    const fs::path raw = dir_ / "synth.csv";
    nrchain::synth::write_csv(raw, nrchain::synth::generate(sc));
    config_.input = raw;
    config_.knox.permutations = 19;
    config_.decompose.methods.push_back(nrchain::cohesive::Method::Clique);
    config_.decompose.include_members = true;
    config_.threads = 2;

    const auto ingest = pl::run_ingest(config_);
    const auto pairs = pl::run_pairs(config_);
    const auto stats = pl::run_stats(config_);
    const auto decompose = pl::run_decompose(config_);
    const auto knox = pl::run_knox(config_);
    const auto report = pl::run_report(config_);

    const auto schema = pl::read_json(kSchema / "report.schema.json");
    const auto errors = schema_check::validate(report, schema);
    EXPECT_TRUE(errors.empty()) << errors.front();
    for (const char* f : {pl::files::kIngestSummary, pl::files::kPairsSummary, pl::files::kGraphStats,
                          pl::files::kDecomposeSummary, pl::files::kKnoxSummary, pl::files::kReport})
        EXPECT_EQ(pl::read_json(config_.output_dir / f).at("schema_version"), pl::kSchemaVersion) << f;

    // Report values equal the per-stage files.
    EXPECT_EQ(report.at("dataset").at("events"), ingest.at("events"));
    EXPECT_EQ(report.at("dataset").at("duplicates_removed"), ingest.at("duplicates_removed"));
    EXPECT_EQ(report.at("graph").at("edges"), pairs.at("edges"));
    EXPECT_EQ(report.at("graph").at("max_diameter"), stats.at("max_diameter"));
    EXPECT_EQ(report.at("graph").at("mean_clustering_coefficient"), stats.at("mean_clustering_coefficient"));
    EXPECT_EQ(report.at("decompose").size(), decompose.at("methods").size());
    for (const auto& m : decompose.at("methods")) {
        const auto detail = pl::read_json(config_.output_dir / m.at("file").get<std::string>());
        const auto& summary = report.at("decompose").at(m.at("method").get<std::string>());
        EXPECT_EQ(summary.at("total_subgraphs"), detail.at("total_subgraphs"));
        ASSERT_EQ(summary.at("levels").size(), detail.at("levels").size());
        for (std::size_t i = 0; i < detail.at("levels").size(); ++i) {
            EXPECT_EQ(summary.at("levels")[i].at("subgraph_count"), detail.at("levels")[i].at("subgraph_count"));
            EXPECT_EQ(summary.at("levels")[i].at("mean_clustering_coefficient"),
                      detail.at("levels")[i].at("mean_clustering_coefficient"));
        }
    }
    ASSERT_EQ(report.at("knox").size(), 2u);
    for (const auto& k : knox.at("categories")) {
        const auto meta = pl::read_json(config_.output_dir / k.at("dir").get<std::string>() / "knox_meta.json");
        EXPECT_EQ(meta.at("near_cell"), k.at("near_cell"));
        EXPECT_EQ(meta.at("observed_sum"), meta.at("total_pairs"));
    }

    // Edge count equals the brute-force count over the cleaned events.
    const auto events = nrchain::ingest::read_events_csv(config_.output_dir / pl::files::kEvents);
    std::size_t brute = 0;
    for (std::size_t i = 0; i < events.size(); ++i)
        for (std::size_t j = i + 1; j < events.size(); ++j)
            brute += events[i].category == events[j].category && std::abs(events[i].x - events[j].x) <= 100 &&
                     std::abs(events[i].y - events[j].y) <= 100 && std::abs(events[i].t - events[j].t) <= 10;
    EXPECT_EQ(pairs.at("edges"), brute);

    // Every decomposition validates against the graph.
    const auto g = nrchain::graph::EventGraph::build(
        events.size(), nrchain::graph::read_edge_list(config_.output_dir / pl::files::kEdges));
    for (auto m : config_.decompose.methods) {
        const auto result = nrchain::cohesive::decompose(m, g);
        EXPECT_TRUE(nrchain::cohesive::validate(result, g).ok);
        EXPECT_EQ(pl::decomposition_json(result, true),
                  pl::read_json(config_.output_dir / pl::decomposition_file(m)));
    }

    // Reruns and other thread counts reproduce every file byte for byte.
    std::map<std::string, std::string> first;
    for (const auto& e : fs::recursive_directory_iterator(config_.output_dir))
        if (e.is_regular_file()) first[fs::relative(e.path(), config_.output_dir).string()] = slurp(e.path());
    for (unsigned threads : {1u, 5u}) {
        config_.threads = threads;
        pl::run_ingest(config_);
        pl::run_pairs(config_);
        pl::run_stats(config_);
        pl::run_decompose(config_);
        pl::run_knox(config_);
        pl::run_report(config_);
        for (const auto& [name, bytes] : first) EXPECT_EQ(slurp(config_.output_dir / name), bytes) << name;
    }
}

TEST(Slug, ReplacesUnsafeCharacters) {
    EXPECT_EQ(pl::category_slug("ASSAULT, AGG"), "ASSAULT__AGG");
    EXPECT_EQ(pl::category_slug("a/b"), "a_b");
    EXPECT_EQ(pl::category_slug(""), "_");
}
