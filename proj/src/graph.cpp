#include "nrchain/graph.hpp"

#include "nrchain/parallel.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>

namespace nrchain::graph {

EventGraph EventGraph::build(std::size_t n, std::span<const EdgePair> pairs) {
    if (n > std::numeric_limits<Vertex>::max()) throw GraphError("too many vertices");
    std::vector<EdgePair> edges;
    edges.reserve(pairs.size());
    for (auto [u, v] : pairs) {
        if (u >= n || v >= n) {
            throw GraphError("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") has an endpoint >= " +
                             std::to_string(n));
        }
        if (u == v) throw GraphError("self-loop on vertex " + std::to_string(u));
        edges.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(edges.begin(), edges.end());
    const auto dup = std::adjacent_find(edges.begin(), edges.end());
    if (dup != edges.end()) {
        throw GraphError("repeated edge (" + std::to_string(dup->first) + ", " + std::to_string(dup->second) + ")");
    }

    EventGraph g;
    g.offsets_.assign(n + 1, 0);
    for (auto [u, v] : edges) {
        ++g.offsets_[u + 1];
        ++g.offsets_[v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    g.adjacency_.resize(2 * edges.size());
    g.edge_ids_.resize(2 * edges.size());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    // Lexicographic edge order fills each row in ascending neighbor order.
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [u, v] = edges[e];
        g.adjacency_[cursor[u]] = v;
        g.edge_ids_[cursor[u]++] = static_cast<EdgeId>(e);
        g.adjacency_[cursor[v]] = u;
        g.edge_ids_[cursor[v]++] = static_cast<EdgeId>(e);
    }
    g.edges_ = std::move(edges);
    return g;
}

std::optional<EdgeId> EventGraph::find_edge(Vertex u, Vertex v) const {
    if (u >= num_vertices() || v >= num_vertices()) return std::nullopt;
    const auto row = neighbors(u);
    const auto it = std::lower_bound(row.begin(), row.end(), v);
    if (it == row.end() || *it != v) return std::nullopt;
    return edge_ids_[offsets_[u] + static_cast<std::size_t>(it - row.begin())];
}

ComponentLabeling connected_components(const EventGraph& g) {
    constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
    ComponentLabeling out;
    out.label.assign(g.num_vertices(), kUnset);
    std::vector<Vertex> queue;
    for (Vertex s = 0; s < g.num_vertices(); ++s) {
        if (out.label[s] != kUnset) continue;
        const auto id = static_cast<std::uint32_t>(out.components.size());
        queue.assign(1, s);
        out.label[s] = id;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            for (Vertex w : g.neighbors(queue[head])) {
                if (out.label[w] == kUnset) {
                    out.label[w] = id;
                    queue.push_back(w);
                }
            }
        }
        std::sort(queue.begin(), queue.end());
        out.components.push_back(queue);
    }
    return out;
}

namespace {

std::uint32_t intersection_size(std::span<const Vertex> a, std::span<const Vertex> b) {
    std::uint32_t count = 0;
    auto i = a.begin(), j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

}  // namespace

std::vector<std::uint32_t> compute_supports(const EventGraph& g, unsigned workers) {
    std::vector<std::uint32_t> support(g.num_edges());
    constexpr std::size_t kChunk = 4096;
    const std::size_t chunks = (g.num_edges() + kChunk - 1) / kChunk;
    parallel_for(chunks, workers, [&](std::size_t c) {
        const std::size_t end = std::min(g.num_edges(), (c + 1) * kChunk);
        for (std::size_t e = c * kChunk; e < end; ++e) {
            const auto [u, v] = g.edge(static_cast<EdgeId>(e));
            support[e] = intersection_size(g.neighbors(u), g.neighbors(v));
        }
    });
    return support;
}

std::vector<std::uint64_t> vertex_triangles(const EventGraph& g) {
    const auto support = compute_supports(g);
    std::vector<std::uint64_t> twice(g.num_vertices(), 0);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        const auto [u, v] = g.edge(e);
        twice[u] += support[e];
        twice[v] += support[e];
    }
    for (auto& t : twice) t /= 2;
    return twice;
}

double clustering_coefficient(const EventGraph& g) {
    if (g.num_vertices() == 0) throw GraphError("clustering coefficient of an empty vertex set");
    const auto triangles = vertex_triangles(g);
    double sum = 0.0;
    for (Vertex v = 0; v < g.num_vertices(); ++v) {
        const double d = static_cast<double>(g.degree(v));
        if (d < 2) continue;
        sum += 2.0 * static_cast<double>(triangles[v]) / (d * (d - 1.0));
    }
    return sum / static_cast<double>(g.num_vertices());
}

double clustering_coefficient(const EventGraph& g, std::span<const Vertex> scope) {
    if (scope.empty()) throw GraphError("clustering coefficient of an empty vertex set");
    return clustering_coefficient(induced_subgraph(g, scope).graph);
}

std::uint32_t diameter_floyd_warshall(const EventGraph& g) {
    const std::size_t n = g.num_vertices();
    if (n == 0) throw GraphError("diameter of an empty vertex set");
    constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max() / 2;
    std::vector<std::uint32_t> dist(n * n, kInf);
    for (std::size_t v = 0; v < n; ++v) {
        dist[v * n + v] = 0;
        for (Vertex w : g.neighbors(static_cast<Vertex>(v))) dist[v * n + w] = 1;
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t dik = dist[i * n + k];
            if (dik == kInf) continue;
            std::uint32_t* row = &dist[i * n];
            const std::uint32_t* krow = &dist[k * n];
            for (std::size_t j = 0; j < n; ++j) row[j] = std::min(row[j], dik + krow[j]);
        }
    }
    const std::uint32_t best = *std::max_element(dist.begin(), dist.end());
    if (best >= kInf) throw GraphError("diameter requested for a disconnected vertex set");
    return best;
}

std::uint32_t diameter_bfs(const EventGraph& g) {
    const std::size_t n = g.num_vertices();
    if (n == 0) throw GraphError("diameter of an empty vertex set");
    constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();
    std::uint32_t best = 0;
    std::vector<std::uint32_t> dist(n);
    std::vector<Vertex> queue;
    queue.reserve(n);
    for (Vertex s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), kUnseen);
        dist[s] = 0;
        queue.assign(1, s);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const Vertex u = queue[head];
            for (Vertex w : g.neighbors(u)) {
                if (dist[w] == kUnseen) {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if (queue.size() != n) throw GraphError("diameter requested for a disconnected vertex set");
        best = std::max(best, dist[queue.back()]);
    }
    return best;
}

std::uint32_t diameter(const EventGraph& g, std::span<const Vertex> component) {
    if (component.empty()) throw GraphError("diameter of an empty vertex set");
    const auto sub = induced_subgraph(g, component);
    return sub.graph.num_vertices() <= kFloydWarshallLimit ? diameter_floyd_warshall(sub.graph)
                                                           : diameter_bfs(sub.graph);
}

InducedSubgraph induced_subgraph(const EventGraph& g, std::span<const Vertex> vertices) {
    InducedSubgraph out;
    out.original.assign(vertices.begin(), vertices.end());
    std::sort(out.original.begin(), out.original.end());
    out.original.erase(std::unique(out.original.begin(), out.original.end()), out.original.end());
    for (Vertex v : out.original) {
        if (v >= g.num_vertices()) throw GraphError("vertex " + std::to_string(v) + " not in graph");
    }
    constexpr auto kAbsent = std::numeric_limits<Vertex>::max();
    std::vector<Vertex> local(g.num_vertices(), kAbsent);
    for (std::size_t i = 0; i < out.original.size(); ++i) local[out.original[i]] = static_cast<Vertex>(i);
    std::vector<EdgePair> edges;
    for (std::size_t i = 0; i < out.original.size(); ++i) {
        for (Vertex w : g.neighbors(out.original[i])) {
            if (w > out.original[i] && local[w] != kAbsent) edges.emplace_back(static_cast<Vertex>(i), local[w]);
        }
    }
    out.graph = EventGraph::build(out.original.size(), edges);
    return out;
}

void write_edge_list(std::ostream& out, std::span<const EdgePair> edges) {
    for (auto [u, v] : edges) out << std::min(u, v) << ' ' << std::max(u, v) << '\n';
}

void write_edge_list(const std::filesystem::path& path, std::span<const EdgePair> edges) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw GraphError("cannot write " + path.string());
    write_edge_list(out, edges);
}

std::vector<EdgePair> read_edge_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw GraphError("cannot read edge list " + path.string());
    std::vector<EdgePair> edges;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        long long u = -1, v = -1;
        std::string extra;
        if (!(fields >> u >> v) || (fields >> extra) || u < 0 || v < 0 ||
            u > std::numeric_limits<Vertex>::max() || v > std::numeric_limits<Vertex>::max()) {
            throw GraphError(path.string() + ":" + std::to_string(line_no) + ": expected 'u v'");
        }
        edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
    return edges;
}

GraphStats compute_stats(const EventGraph& g, unsigned workers) {
    GraphStats stats;
    stats.vertices = g.num_vertices();
    stats.edges = g.num_edges();
    const auto cc = connected_components(g);
    stats.components = cc.count();

    std::vector<const std::vector<Vertex>*> nontrivial;
    for (const auto& comp : cc.components) {
        if (comp.size() > 1) nontrivial.push_back(&comp);
    }
    stats.nontrivial_components = nontrivial.size();
    stats.per_component.resize(nontrivial.size());
    parallel_for(nontrivial.size(), workers, [&](std::size_t i) {
        const auto sub = induced_subgraph(g, *nontrivial[i]);
        auto& cs = stats.per_component[i];
        cs.vertices = sub.graph.num_vertices();
        cs.edges = sub.graph.num_edges();
        cs.diameter = sub.graph.num_vertices() <= kFloydWarshallLimit ? diameter_floyd_warshall(sub.graph)
                                                                      : diameter_bfs(sub.graph);
        cs.mean_clustering_coefficient = clustering_coefficient(sub.graph);
    });

    // Global coefficient: mean over vertices that have at least one edge.
    double weighted = 0.0;
    std::size_t counted = 0;
    for (const auto& cs : stats.per_component) {
        stats.max_diameter = std::max(stats.max_diameter, cs.diameter);
        weighted += cs.mean_clustering_coefficient * static_cast<double>(cs.vertices);
        counted += cs.vertices;
    }
    stats.mean_clustering_coefficient = counted == 0 ? 0.0 : weighted / static_cast<double>(counted);
    return stats;
}

}  // namespace nrchain::graph
