#include "nrchain/graph.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>
#include <sstream>

namespace gr = nrchain::graph;
using gr::EventGraph;

namespace {

EventGraph make(std::size_t n, const std::vector<oracle::Pair>& edges) { return EventGraph::build(n, edges); }

EventGraph complete(std::size_t n) {
    std::vector<oracle::Pair> e;
    for (std::uint32_t u = 0; u < n; ++u)
        for (std::uint32_t v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return make(n, e);
}

EventGraph path(std::size_t n) {
    std::vector<oracle::Pair> e;
    for (std::uint32_t u = 0; u + 1 < n; ++u) e.emplace_back(u, u + 1);
    return make(n, e);
}

std::vector<gr::Vertex> all_vertices(const EventGraph& g) {
    std::vector<gr::Vertex> v(g.num_vertices());
    std::iota(v.begin(), v.end(), 0u);
    return v;
}

}  // namespace

TEST(Build, Triangle) {
    const auto g = make(3, {{0, 1}, {1, 2}, {0, 2}});
    for (gr::Vertex v = 0; v < 3; ++v) EXPECT_EQ(g.degree(v), 2u);
    EXPECT_EQ(g.num_edges(), 3u);
    EXPECT_EQ(g.edge(0), (gr::EdgePair{0, 1}));
    EXPECT_EQ(g.edge(2), (gr::EdgePair{1, 2}));
}

TEST(Build, ExampleGraphDegrees) {
    const auto g = make(8, oracle::example_graph_edges());
    EXPECT_EQ(g.num_edges(), 13u);
    EXPECT_EQ(g.degree(1), 5u);
    EXPECT_EQ(g.degree(5), 2u);
}

TEST(Build, Errors) {
    const std::vector<oracle::Pair> out_of_range{{0, 3}};
    EXPECT_THROW(EventGraph::build(3, out_of_range), gr::GraphError);
    const std::vector<oracle::Pair> loop{{1, 1}};
    EXPECT_THROW(EventGraph::build(3, loop), gr::GraphError);
    const std::vector<oracle::Pair> repeat{{0, 1}, {1, 0}};
    EXPECT_THROW(EventGraph::build(3, repeat), gr::GraphError);
}

TEST(Build, RandomMatchesMatrix) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng() % 64;
        auto edges = oracle::random_edges(n, 0.15, rng);
        std::shuffle(edges.begin(), edges.end(), rng);
        for (auto& e : edges)
            if (rng() & 1) std::swap(e.first, e.second);
        const auto g = make(n, edges);
        const oracle::Matrix m(n, edges);
        std::size_t degree_sum = 0;
        for (gr::Vertex u = 0; u < n; ++u) {
            EXPECT_EQ(g.degree(u), m.degree(u));
            degree_sum += g.degree(u);
            const auto row = g.neighbors(u);
            EXPECT_TRUE(std::adjacent_find(row.begin(), row.end(), std::greater_equal<>()) == row.end());
            for (gr::Vertex v = 0; v < n; ++v) EXPECT_EQ(g.adjacent(u, v), m.has(u, v));
            for (std::size_t i = 0; i < row.size(); ++i) {
                const auto& e = g.edge(g.incident_edges(u)[i]);
                EXPECT_EQ(e, (gr::EdgePair{std::min(u, row[i]), std::max(u, row[i])}));
            }
        }
        EXPECT_EQ(degree_sum, 2 * g.num_edges());
        EXPECT_EQ(g.edges(), m.edges());
    }
}

TEST(Components, EdgelessAndTriangle) {
    EXPECT_EQ(gr::connected_components(make(5, {})).count(), 5u);
    EXPECT_EQ(gr::connected_components(complete(3)).count(), 1u);
}

TEST(Components, RandomMatchClosure) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 64;
        const auto edges = oracle::random_edges(n, 0.04, rng);
        const auto cc = gr::connected_components(make(n, edges));
        const auto label = oracle::closure_components(oracle::Matrix(n, edges));
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t v = 0; v < n; ++v) EXPECT_EQ(cc.label[u] == cc.label[v], label[u] == label[v]);
        std::size_t total = 0;
        for (std::size_t c = 0; c < cc.count(); ++c) {
            total += cc.components[c].size();
            if (c > 0) EXPECT_LT(cc.components[c - 1].front(), cc.components[c].front());
        }
        EXPECT_EQ(total, n);
    }
}

TEST(Supports, CompleteGraphAndExample) {
    for (auto s : gr::compute_supports(complete(4))) EXPECT_EQ(s, 2u);
    const auto g = make(8, oracle::example_graph_edges());
    const auto sup = gr::compute_supports(g);
    EXPECT_EQ(sup[*g.find_edge(1, 2)], 3u);
    EXPECT_EQ(sup[*g.find_edge(2, 7)], 1u);
}

TEST(Supports, RandomMatchTripleLoop) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 63;
        const auto edges = oracle::planted_edges(n, 0.1, rng);
        const auto g = make(n, edges);
        const oracle::Matrix m(n, edges);
        const auto sup = gr::compute_supports(g, 1 + trial % 4);
        std::uint64_t sum = 0;
        for (gr::EdgeId e = 0; e < g.num_edges(); ++e) {
            const auto [u, v] = g.edge(e);
            EXPECT_EQ(sup[e], oracle::triangles_on_edge(m, u, v));
            EXPECT_LE(sup[e] + 1, std::min(g.degree(u), g.degree(v)));
            sum += sup[e];
        }
        const auto tri = gr::vertex_triangles(g);
        EXPECT_EQ(sum, std::accumulate(tri.begin(), tri.end(), std::uint64_t{0}));  // both 3x triangles
    }
}

TEST(Clustering, CliqueStarAndRandom) {
    for (std::size_t n : {3u, 4u, 7u}) EXPECT_EQ(gr::clustering_coefficient(complete(n)), 1.0);
    EXPECT_EQ(gr::clustering_coefficient(make(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}})), 0.0);
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng() % 40;
        const auto edges = oracle::planted_edges(n, 0.2, rng);
        const double c = gr::clustering_coefficient(make(n, edges));
        EXPECT_NEAR(c, oracle::mean_clustering(oracle::Matrix(n, edges)), 1e-12);
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, 1.0);
    }
}

TEST(Clustering, ScopedUsesInducedSubgraph) {
    const auto g = make(8, oracle::example_graph_edges());
    const std::vector<gr::Vertex> clique{0, 1, 3, 4};
    EXPECT_EQ(gr::clustering_coefficient(g, clique), 1.0);
    EXPECT_THROW(gr::clustering_coefficient(g, std::vector<gr::Vertex>{}), gr::GraphError);
}

TEST(Diameter, SimpleShapes) {
    const auto k5 = complete(5);
    EXPECT_EQ(gr::diameter(k5, all_vertices(k5)), 1u);
    const auto p4 = path(4);
    EXPECT_EQ(gr::diameter(p4, all_vertices(p4)), 3u);
    EXPECT_EQ(gr::diameter_bfs(p4), 3u);
    const auto two = make(4, {{0, 1}, {2, 3}});
    EXPECT_THROW(gr::diameter(two, all_vertices(two)), gr::GraphError);
    EXPECT_THROW(gr::diameter(two, std::vector<gr::Vertex>{}), gr::GraphError);
}

TEST(Diameter, FloydWarshallEqualsBfs) {
    std::mt19937_64 rng(5);
    int checked = 0;
    while (checked < 60) {
        const std::size_t n = 2 + rng() % 127;
        auto edges = oracle::random_edges(n, 3.0 / static_cast<double>(n), rng);
        for (std::uint32_t v = 1; v < n; ++v) {  // random spanning tree keeps it connected
            const std::uint32_t u = static_cast<std::uint32_t>(rng() % v);
            if (!oracle::Matrix(n, edges).has(u, v)) edges.emplace_back(u, v);
        }
        const auto g = make(n, edges);
        const auto fw = gr::diameter_floyd_warshall(g);
        EXPECT_EQ(fw, gr::diameter_bfs(g));
        const auto d = oracle::hop_distances(oracle::Matrix(n, edges));
        int expect = 0;
        for (const auto& row : d) expect = std::max(expect, *std::max_element(row.begin(), row.end()));
        EXPECT_EQ(fw, static_cast<std::uint32_t>(expect));
        ++checked;
    }
}

TEST(Diameter, LargeComponentUsesBfsPath) {
    const auto g = path(700);
    EXPECT_EQ(gr::diameter(g, all_vertices(g)), 699u);
}

TEST(Induced, ExampleCliqueAndFilter) {
    const auto g = make(8, oracle::example_graph_edges());
    const std::vector<gr::Vertex> s{0, 1, 3, 4};
    const auto sub = gr::induced_subgraph(g, s);
    EXPECT_EQ(sub.graph.num_vertices(), 4u);
    EXPECT_EQ(sub.graph.num_edges(), 6u);
    EXPECT_EQ(sub.original, s);

    const auto full = gr::induced_subgraph(g, all_vertices(g));
    EXPECT_EQ(full.graph.edges(), g.edges());

    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng() % 50;
        const auto edges = oracle::random_edges(n, 0.2, rng);
        const auto gg = make(n, edges);
        std::vector<gr::Vertex> pick;
        for (gr::Vertex v = 0; v < n; ++v)
            if (rng() & 1) pick.push_back(v);
        const auto sub2 = gr::induced_subgraph(gg, pick);
        std::vector<gr::EdgePair> expect;
        for (auto [u, v] : edges)
            if (std::binary_search(pick.begin(), pick.end(), u) && std::binary_search(pick.begin(), pick.end(), v))
                expect.emplace_back(u, v);
        std::vector<gr::EdgePair> got;
        for (auto [a, b] : sub2.graph.edges()) got.emplace_back(sub2.original[a], sub2.original[b]);
        EXPECT_EQ(got, expect);

        // Rebuilding from the emitted edge list reproduces the subgraph.
        std::ostringstream text;
        gr::write_edge_list(text, sub2.graph.edges());
        const auto path_ = std::filesystem::temp_directory_path() / "nrchain_induced_edges.txt";
        gr::write_edge_list(path_, sub2.graph.edges());
        const auto rebuilt = EventGraph::build(sub2.graph.num_vertices(), gr::read_edge_list(path_));
        EXPECT_EQ(rebuilt.edges(), sub2.graph.edges());
        std::filesystem::remove(path_);
    }
}

TEST(EdgeList, Format) {
    std::ostringstream out;
    const std::vector<gr::EdgePair> e{{0, 1}, {2, 5}};
    gr::write_edge_list(out, e);
    EXPECT_EQ(out.str(), "0 1\n2 5\n");
}

TEST(Stats, PerComponent) {
    // A triangle, a path of three, and an isolated vertex.
    const auto g = make(7, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}});
    const auto s = gr::compute_stats(g, 2);
    EXPECT_EQ(s.components, 3u);
    EXPECT_EQ(s.nontrivial_components, 2u);
    ASSERT_EQ(s.per_component.size(), 2u);
    EXPECT_EQ(s.per_component[0].diameter, 1u);
    EXPECT_EQ(s.per_component[0].mean_clustering_coefficient, 1.0);
    EXPECT_EQ(s.per_component[1].edges, 2u);
    EXPECT_EQ(s.per_component[1].diameter, 2u);
    EXPECT_EQ(s.max_diameter, 2u);
    EXPECT_DOUBLE_EQ(s.mean_clustering_coefficient, 0.5);
}
