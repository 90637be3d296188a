#pragma once

#include "nrchain/graph.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nrchain::cohesive {

using graph::EdgePair;
using graph::EventGraph;
using graph::Vertex;

enum class Method { Core, Truss, Dbscan, Clique };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view name);

inline constexpr int kDefaultKMin = 3;
inline constexpr std::size_t kDefaultCliqueLimit = 10'000'000;

// One reported subgraph. Vertices and edges use the ids of the graph the
// decomposition ran on; edges are (u, v) with u < v, sorted.
struct Subgraph {
    std::vector<Vertex> vertices;
    std::vector<EdgePair> edges;
    double clustering_coefficient = 0.0;  // on this vertex/edge set
};

struct DecompositionResult {
    Method method = Method::Core;
    int k_min = kDefaultKMin;
    // Levels with at least one subgraph; subgraphs ordered by smallest vertex.
    std::map<int, std::vector<Subgraph>> per_k;
    bool truncated = false;  // clique enumeration hit max_count

    std::size_t subgraph_count() const;
};

// Core number of every vertex: the largest k whose k-core contains it.
std::vector<std::uint32_t> core_numbers(const EventGraph& g);

// Truss number of every edge: the largest k whose k-truss contains it (>= 2).
std::vector<std::uint32_t> truss_numbers(const EventGraph& g);

// For each k >= k_min, the connected components of the k-core, until the
// core is empty. Subgraph edges are the induced edges.
DecompositionResult k_core_decompose(const EventGraph& g, int k_min = kDefaultKMin, unsigned workers = 1);

// For each k >= k_min, the connected components of the k-truss. A k-truss
// subgraph carries only the edges of the truss, which can be fewer than the
// edges induced by its vertices.
DecompositionResult k_truss_decompose(const EventGraph& g, int k_min = kDefaultKMin, unsigned workers = 1);

// Degree-seeded density clustering on the graph: vertices with degree >= k
// (core vertices, degree taken in the surviving graph) seed clusters in
// ascending id order and expand breadth-first through core vertices; other
// neighbors attach as border members. Vertices left unvisited at level k are
// removed before level k + 1.
DecompositionResult k_dbscan(const EventGraph& g, int k_min = kDefaultKMin, unsigned workers = 1);

struct CliqueSet {
    std::vector<std::vector<Vertex>> cliques;  // each ascending; list sorted
    std::map<std::size_t, std::size_t> size_histogram;
    bool truncated = false;
};

// Maximal cliques of size >= k_min (Bron-Kerbosch with pivoting over a
// degeneracy order). Stops after max_count cliques and flags truncation.
CliqueSet enumerate_cliques(const EventGraph& g, int k_min = kDefaultKMin,
                            std::size_t max_count = kDefaultCliqueLimit);

// Cliques as a decomposition keyed by clique size.
DecompositionResult clique_decompose(const EventGraph& g, int k_min = kDefaultKMin,
                                     std::size_t max_count = kDefaultCliqueLimit, unsigned workers = 1);

DecompositionResult decompose(Method method, const EventGraph& g, int k_min = kDefaultKMin,
                              std::size_t clique_limit = kDefaultCliqueLimit, unsigned workers = 1);

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> violations;
};

// Re-checks the defining property of every subgraph in `result` against g.
ValidationReport validate(const DecompositionResult& result, const EventGraph& g);

// Builds a Subgraph from an edge set, filling vertices and the coefficient.
Subgraph make_subgraph(std::vector<Vertex> vertices, std::vector<EdgePair> edges);

}  // namespace nrchain::cohesive
