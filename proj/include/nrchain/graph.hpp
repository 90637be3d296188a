#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nrchain::graph {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;
using EdgePair = std::pair<Vertex, Vertex>;

struct GraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Undirected simple graph in compressed-sparse-row layout. Each undirected
// edge {u, v} (u < v) has one id shared by its two CSR slots; ids follow the
// lexicographic order of (u, v).
class EventGraph {
public:
    EventGraph() : offsets_{0} {}

    // Throws GraphError for out-of-range endpoints, self-loops, or repeated
    // pairs. Pair orientation does not matter.
    static EventGraph build(std::size_t n, std::span<const EdgePair> pairs);

    std::size_t num_vertices() const { return offsets_.size() - 1; }
    std::size_t num_edges() const { return edges_.size(); }

    std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
    std::span<const Vertex> neighbors(Vertex v) const {
        return {adjacency_.data() + offsets_[v], degree(v)};
    }
    // Edge ids parallel to neighbors(v).
    std::span<const EdgeId> incident_edges(Vertex v) const {
        return {edge_ids_.data() + offsets_[v], degree(v)};
    }
    const EdgePair& edge(EdgeId e) const { return edges_[e]; }
    const std::vector<EdgePair>& edges() const { return edges_; }

    // Binary search in the sorted row of u.
    std::optional<EdgeId> find_edge(Vertex u, Vertex v) const;
    bool adjacent(Vertex u, Vertex v) const { return find_edge(u, v).has_value(); }

    const std::vector<std::size_t>& row_offsets() const { return offsets_; }
    const std::vector<Vertex>& column_indices() const { return adjacency_; }

private:
    std::vector<std::size_t> offsets_;
    std::vector<Vertex> adjacency_;
    std::vector<EdgeId> edge_ids_;
    std::vector<EdgePair> edges_;
};

struct ComponentLabeling {
    std::vector<std::uint32_t> label;               // per vertex
    std::vector<std::vector<Vertex>> components;    // ascending ids in each
    std::size_t count() const { return components.size(); }
};

// Labels are dense and ordered by the smallest vertex of each component.
ComponentLabeling connected_components(const EventGraph& g);

// support(e) = |nb(u) ∩ nb(v)| by sorted-row intersection.
std::vector<std::uint32_t> compute_supports(const EventGraph& g, unsigned workers = 1);

// Number of triangles through each vertex.
std::vector<std::uint64_t> vertex_triangles(const EventGraph& g);

// Mean local clustering coefficient. Vertices of degree < 2 contribute 0.
double clustering_coefficient(const EventGraph& g);
// Same, over the subgraph induced by `scope`. Throws GraphError if empty.
double clustering_coefficient(const EventGraph& g, std::span<const Vertex> scope);

// Unweighted diameter of the subgraph induced by `component`. Uses
// Floyd-Warshall up to kFloydWarshallLimit vertices, BFS from every vertex
// above. Throws GraphError if the vertex set is empty or disconnected.
inline constexpr std::size_t kFloydWarshallLimit = 512;
std::uint32_t diameter(const EventGraph& g, std::span<const Vertex> component);
std::uint32_t diameter_floyd_warshall(const EventGraph& g);
std::uint32_t diameter_bfs(const EventGraph& g);

struct InducedSubgraph {
    EventGraph graph;
    std::vector<Vertex> original;  // new id -> original id (ascending)
};

InducedSubgraph induced_subgraph(const EventGraph& g, std::span<const Vertex> vertices);

// Text interchange: one "u v" line per edge with u < v.
void write_edge_list(std::ostream& out, std::span<const EdgePair> edges);
void write_edge_list(const std::filesystem::path& path, std::span<const EdgePair> edges);
std::vector<EdgePair> read_edge_list(const std::filesystem::path& path);

struct ComponentStats {
    std::size_t vertices = 0;
    std::size_t edges = 0;
    std::uint32_t diameter = 0;
    double mean_clustering_coefficient = 0.0;
};

struct GraphStats {
    std::size_t vertices = 0;
    std::size_t edges = 0;
    std::size_t components = 0;            // including isolated vertices
    std::size_t nontrivial_components = 0; // components with at least one edge
    std::uint32_t max_diameter = 0;
    double mean_clustering_coefficient = 0.0;
    std::vector<ComponentStats> per_component;  // non-trivial components, label order
};

GraphStats compute_stats(const EventGraph& g, unsigned workers = 1);

}  // namespace nrchain::graph
