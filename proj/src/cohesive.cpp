#include "nrchain/cohesive.hpp"

#include "nrchain/parallel.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace nrchain::cohesive {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::Core: return "core";
        case Method::Truss: return "truss";
        case Method::Dbscan: return "dbscan";
        case Method::Clique: return "clique";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    for (Method m : {Method::Core, Method::Truss, Method::Dbscan, Method::Clique}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

std::size_t DecompositionResult::subgraph_count() const {
    std::size_t n = 0;
    for (const auto& [k, subs] : per_k) n += subs.size();
    return n;
}

Subgraph make_subgraph(std::vector<Vertex> vertices, std::vector<EdgePair> edges) {
    std::sort(vertices.begin(), vertices.end());
    vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
    std::sort(edges.begin(), edges.end());
    std::vector<EdgePair> local;
    local.reserve(edges.size());
    auto index_of = [&](Vertex v) {
        return static_cast<Vertex>(std::lower_bound(vertices.begin(), vertices.end(), v) - vertices.begin());
    };
    for (auto [u, v] : edges) local.emplace_back(index_of(u), index_of(v));
    Subgraph s;
    s.clustering_coefficient =
        vertices.empty() ? 0.0 : graph::clustering_coefficient(EventGraph::build(vertices.size(), local));
    s.vertices = std::move(vertices);
    s.edges = std::move(edges);
    return s;
}

namespace {

// Fills coefficients of every collected subgraph; the heavy part of each level.
void finish_levels(std::map<int, std::vector<std::pair<std::vector<Vertex>, std::vector<EdgePair>>>>& raw,
                   DecompositionResult& result, unsigned workers) {
    std::vector<std::pair<int, std::size_t>> slots;
    for (auto& [k, subs] : raw) {
        result.per_k[k].resize(subs.size());
        for (std::size_t i = 0; i < subs.size(); ++i) slots.emplace_back(k, i);
    }
    parallel_for(slots.size(), workers, [&](std::size_t s) {
        const auto [k, i] = slots[s];
        auto& [verts, edges] = raw.at(k)[i];
        result.per_k.at(k)[i] = make_subgraph(std::move(verts), std::move(edges));
    });
}

// Components of the subgraph formed by the vertices with keep_vertex(v) and
// the edges with keep_edge(e), seeded in ascending vertex order.
template <typename KeepVertex, typename KeepEdge>
std::vector<std::pair<std::vector<Vertex>, std::vector<EdgePair>>> components_where(const EventGraph& g,
                                                                                   KeepVertex keep_vertex,
                                                                                   KeepEdge keep_edge) {
    std::vector<std::pair<std::vector<Vertex>, std::vector<EdgePair>>> out;
    std::vector<char> seen(g.num_vertices(), 0);
    std::vector<Vertex> queue;
    for (Vertex s = 0; s < g.num_vertices(); ++s) {
        if (seen[s] || !keep_vertex(s)) continue;
        bool has_edge = false;
        for (auto e : g.incident_edges(s)) {
            const auto [a, b] = g.edge(e);
            if (keep_edge(e) && keep_vertex(a) && keep_vertex(b)) {
                has_edge = true;
                break;
            }
        }
        if (!has_edge) continue;
        std::vector<EdgePair> edges;
        queue.assign(1, s);
        seen[s] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const Vertex u = queue[head];
            const auto nbrs = g.neighbors(u);
            const auto ids = g.incident_edges(u);
            for (std::size_t i = 0; i < nbrs.size(); ++i) {
                const Vertex w = nbrs[i];
                if (!keep_vertex(w) || !keep_edge(ids[i])) continue;
                if (u < w) edges.emplace_back(u, w);
                if (!seen[w]) {
                    seen[w] = 1;
                    queue.push_back(w);
                }
            }
        }
        out.emplace_back(std::move(queue), std::move(edges));
        queue = {};
    }
    return out;
}

// Vertices in ascending core number, as produced by bucket peeling.
struct Peeling {
    std::vector<std::uint32_t> core;
    std::vector<Vertex> order;
};

Peeling peel_vertices(const EventGraph& g) {
    const std::size_t n = g.num_vertices();
    Peeling p;
    p.core.resize(n);
    std::size_t max_deg = 0;
    for (Vertex v = 0; v < n; ++v) {
        p.core[v] = static_cast<std::uint32_t>(g.degree(v));
        max_deg = std::max<std::size_t>(max_deg, p.core[v]);
    }
    // Bucket sort by degree with position maps (Batagelj-Zaversnik).
    std::vector<std::size_t> bin(max_deg + 2, 0);
    for (Vertex v = 0; v < n; ++v) ++bin[p.core[v] + 1];
    std::partial_sum(bin.begin(), bin.end(), bin.begin());
    std::vector<std::size_t> pos(n);
    p.order.resize(n);
    {
        auto next = bin;
        for (Vertex v = 0; v < n; ++v) {
            pos[v] = next[p.core[v]]++;
            p.order[pos[v]] = v;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Vertex v = p.order[i];
        for (Vertex u : g.neighbors(v)) {
            if (p.core[u] > p.core[v]) {
                const std::uint32_t du = p.core[u];
                const std::size_t pu = pos[u];
                const std::size_t pw = bin[du];
                const Vertex w = p.order[pw];
                if (u != w) {
                    p.order[pu] = w;
                    pos[w] = pu;
                    p.order[pw] = u;
                    pos[u] = pw;
                }
                ++bin[du];
                --p.core[u];
            }
        }
    }
    return p;
}

}  // namespace

std::vector<std::uint32_t> core_numbers(const EventGraph& g) { return peel_vertices(g).core; }

std::vector<std::uint32_t> truss_numbers(const EventGraph& g) {
    const std::size_t m = g.num_edges();
    auto support = graph::compute_supports(g);
    std::vector<std::uint32_t> truss(m, 2);
    if (m == 0) return truss;

    const std::uint32_t max_sup = *std::max_element(support.begin(), support.end());
    std::vector<std::size_t> bin(max_sup + 2, 0);
    for (auto s : support) ++bin[s + 1];
    std::partial_sum(bin.begin(), bin.end(), bin.begin());
    std::vector<std::size_t> pos(m);
    std::vector<graph::EdgeId> sorted(m);
    {
        auto next = bin;
        for (graph::EdgeId e = 0; e < m; ++e) {
            pos[e] = next[support[e]]++;
            sorted[pos[e]] = e;
        }
    }
    std::vector<char> alive(m, 1);

    // Moves f from its support bin to the one below, keeping bins contiguous.
    auto demote = [&](graph::EdgeId f) {
        const std::uint32_t s = support[f];
        const std::size_t pf = pos[f];
        const std::size_t start = bin[s];
        const graph::EdgeId other = sorted[start];
        if (other != f) {
            sorted[pf] = other;
            pos[other] = pf;
            sorted[start] = f;
            pos[f] = start;
        }
        ++bin[s];
        --support[f];
    };

    std::uint32_t level = 2;  // current k
    for (std::size_t i = 0; i < m; ++i) {
        const graph::EdgeId e = sorted[i];
        if (support[e] + 2 > level) level = support[e] + 2;
        truss[e] = level;
        const auto [u, v] = g.edge(e);
        const auto nu = g.neighbors(u), nv = g.neighbors(v);
        const auto iu = g.incident_edges(u), iv = g.incident_edges(v);
        std::size_t a = 0, b = 0;
        while (a < nu.size() && b < nv.size()) {
            if (nu[a] < nv[b]) {
                ++a;
            } else if (nv[b] < nu[a]) {
                ++b;
            } else {
                const graph::EdgeId eu = iu[a], ev = iv[b];
                if (alive[eu] && alive[ev]) {
                    if (support[eu] + 2 > level) demote(eu);
                    if (support[ev] + 2 > level) demote(ev);
                }
                ++a;
                ++b;
            }
        }
        alive[e] = 0;
    }
    return truss;
}

DecompositionResult k_core_decompose(const EventGraph& g, int k_min, unsigned workers) {
    DecompositionResult result;
    result.method = Method::Core;
    result.k_min = k_min;
    const auto core = core_numbers(g);
    const std::uint32_t max_core = core.empty() ? 0 : *std::max_element(core.begin(), core.end());
    std::map<int, std::vector<std::pair<std::vector<Vertex>, std::vector<EdgePair>>>> raw;
    for (int k = std::max(k_min, 1); k <= static_cast<int>(max_core); ++k) {
        const auto kk = static_cast<std::uint32_t>(k);
        auto comps = components_where(
            g, [&](Vertex v) { return core[v] >= kk; }, [](graph::EdgeId) { return true; });
        if (!comps.empty()) raw[k] = std::move(comps);
    }
    finish_levels(raw, result, workers);
    return result;
}

DecompositionResult k_truss_decompose(const EventGraph& g, int k_min, unsigned workers) {
    DecompositionResult result;
    result.method = Method::Truss;
    result.k_min = k_min;
    const auto truss = truss_numbers(g);
    const std::uint32_t max_truss = truss.empty() ? 0 : *std::max_element(truss.begin(), truss.end());
    std::map<int, std::vector<std::pair<std::vector<Vertex>, std::vector<EdgePair>>>> raw;
    for (int k = std::max(k_min, 2); k <= static_cast<int>(max_truss); ++k) {
        const auto kk = static_cast<std::uint32_t>(k);
        auto comps = components_where(
            g, [](Vertex) { return true; }, [&](graph::EdgeId e) { return truss[e] >= kk; });
        if (!comps.empty()) raw[k] = std::move(comps);
    }
    finish_levels(raw, result, workers);
    return result;
}

DecompositionResult k_dbscan(const EventGraph& g, int k_min, unsigned workers) {
    DecompositionResult result;
    result.method = Method::Dbscan;
    result.k_min = k_min;
    const std::size_t n = g.num_vertices();
    std::vector<char> alive(n, 1);
    std::vector<std::uint32_t> degree(n);
    for (Vertex v = 0; v < n; ++v) degree[v] = static_cast<std::uint32_t>(g.degree(v));
    std::size_t alive_count = n;

    std::map<int, std::vector<std::pair<std::vector<Vertex>, std::vector<EdgePair>>>> raw;
    std::vector<char> visited(n);
    std::vector<Vertex> queue;
    for (int k = std::max(k_min, 1); alive_count > 0; ++k) {
        const auto kk = static_cast<std::uint32_t>(k);
        std::fill(visited.begin(), visited.end(), 0);
        std::vector<std::pair<std::vector<Vertex>, std::vector<EdgePair>>> clusters;
        for (Vertex s = 0; s < n; ++s) {
            if (!alive[s] || visited[s] || degree[s] < kk) continue;
            queue.assign(1, s);
            visited[s] = 1;
            for (std::size_t head = 0; head < queue.size(); ++head) {
                const Vertex u = queue[head];
                if (degree[u] < kk) continue;  // border member: attaches, never expands
                for (Vertex w : g.neighbors(u)) {
                    if (alive[w] && !visited[w]) {
                        visited[w] = 1;
                        queue.push_back(w);
                    }
                }
            }
            std::sort(queue.begin(), queue.end());
            std::vector<EdgePair> edges;
            for (Vertex u : queue) {
                for (Vertex w : g.neighbors(u)) {
                    if (w > u && std::binary_search(queue.begin(), queue.end(), w)) edges.emplace_back(u, w);
                }
            }
            clusters.emplace_back(queue, std::move(edges));
        }
        if (!clusters.empty()) raw[k] = std::move(clusters);

        for (Vertex v = 0; v < n; ++v) {
            if (alive[v] && !visited[v]) {
                alive[v] = 0;
                --alive_count;
            }
        }
        for (Vertex v = 0; v < n; ++v) {
            if (!alive[v]) continue;
            std::uint32_t d = 0;
            for (Vertex w : g.neighbors(v)) d += alive[w] ? 1u : 0u;
            degree[v] = d;
        }
    }
    finish_levels(raw, result, workers);
    return result;
}

namespace {

class CliqueSearch {
public:
    CliqueSearch(const EventGraph& g, std::size_t k_min, std::size_t max_count, CliqueSet& out)
        : g_(g), k_min_(k_min), max_count_(max_count), out_(out) {}

    void run() {
        const auto peel = peel_vertices(g_);
        std::vector<std::size_t> rank(g_.num_vertices());
        for (std::size_t i = 0; i < peel.order.size(); ++i) rank[peel.order[i]] = i;
        for (Vertex v : peel.order) {
            if (stop_) return;
            if (g_.degree(v) + 1 < k_min_) continue;
            std::vector<Vertex> later, earlier;
            for (Vertex w : g_.neighbors(v)) (rank[w] > rank[v] ? later : earlier).push_back(w);
            std::vector<Vertex> r{v};
            expand(r, std::move(later), std::move(earlier));
        }
    }

private:
    std::vector<Vertex> intersect(const std::vector<Vertex>& set, Vertex v) const {
        std::vector<Vertex> out;
        const auto nb = g_.neighbors(v);
        std::set_intersection(set.begin(), set.end(), nb.begin(), nb.end(), std::back_inserter(out));
        return out;
    }

    std::size_t count_common(const std::vector<Vertex>& set, Vertex v) const {
        const auto nb = g_.neighbors(v);
        std::size_t c = 0;
        auto i = set.begin();
        auto j = nb.begin();
        while (i != set.end() && j != nb.end()) {
            if (*i < *j) {
                ++i;
            } else if (*j < *i) {
                ++j;
            } else {
                ++c;
                ++i;
                ++j;
            }
        }
        return c;
    }

    void expand(std::vector<Vertex>& r, std::vector<Vertex> p, std::vector<Vertex> x) {
        if (stop_) return;
        if (p.empty()) {
            if (x.empty() && r.size() >= k_min_) report(r);
            return;
        }
        if (r.size() + p.size() < k_min_) return;

        // Pivot maximizing |P ∩ N(u)| over P ∪ X.
        Vertex pivot = p.front();
        std::size_t best = 0;
        bool first = true;
        for (const auto* set : {&p, &x}) {
            for (Vertex u : *set) {
                const std::size_t c = count_common(p, u);
                if (first || c > best) {
                    best = c;
                    pivot = u;
                    first = false;
                }
            }
        }
        const auto pivot_nb = g_.neighbors(pivot);
        std::vector<Vertex> candidates;
        std::set_difference(p.begin(), p.end(), pivot_nb.begin(), pivot_nb.end(), std::back_inserter(candidates));
        for (Vertex v : candidates) {
            r.push_back(v);
            expand(r, intersect(p, v), intersect(x, v));
            r.pop_back();
            if (stop_) return;
            p.erase(std::lower_bound(p.begin(), p.end(), v));
            x.insert(std::lower_bound(x.begin(), x.end(), v), v);
        }
    }

    void report(const std::vector<Vertex>& r) {
        if (out_.cliques.size() >= max_count_) {
            out_.truncated = true;
            stop_ = true;
            return;
        }
        auto c = r;
        std::sort(c.begin(), c.end());
        out_.cliques.push_back(std::move(c));
    }

    const EventGraph& g_;
    std::size_t k_min_;
    std::size_t max_count_;
    CliqueSet& out_;
    bool stop_ = false;
};

}  // namespace

CliqueSet enumerate_cliques(const EventGraph& g, int k_min, std::size_t max_count) {
    CliqueSet out;
    CliqueSearch(g, static_cast<std::size_t>(std::max(k_min, 1)), max_count, out).run();
    std::sort(out.cliques.begin(), out.cliques.end());
    for (const auto& c : out.cliques) ++out.size_histogram[c.size()];
    return out;
}

DecompositionResult clique_decompose(const EventGraph& g, int k_min, std::size_t max_count, unsigned workers) {
    DecompositionResult result;
    result.method = Method::Clique;
    result.k_min = k_min;
    auto cliques = enumerate_cliques(g, k_min, max_count);
    result.truncated = cliques.truncated;
    std::map<int, std::vector<std::pair<std::vector<Vertex>, std::vector<EdgePair>>>> raw;
    for (auto& c : cliques.cliques) {
        std::vector<EdgePair> edges;
        for (std::size_t i = 0; i < c.size(); ++i) {
            for (std::size_t j = i + 1; j < c.size(); ++j) edges.emplace_back(c[i], c[j]);
        }
        const int k = static_cast<int>(c.size());
        raw[k].emplace_back(std::move(c), std::move(edges));
    }
    finish_levels(raw, result, workers);
    return result;
}

DecompositionResult decompose(Method method, const EventGraph& g, int k_min, std::size_t clique_limit,
                              unsigned workers) {
    switch (method) {
        case Method::Core: return k_core_decompose(g, k_min, workers);
        case Method::Truss: return k_truss_decompose(g, k_min, workers);
        case Method::Dbscan: return k_dbscan(g, k_min, workers);
        case Method::Clique: return clique_decompose(g, k_min, clique_limit, workers);
    }
    throw graph::GraphError("unknown decomposition method");
}

namespace {

class Validator {
public:
    Validator(const DecompositionResult& r, const EventGraph& g) : r_(r), g_(g) {}

    ValidationReport run() {
        for (const auto& [k, subs] : r_.per_k) {
            if (k < r_.k_min) fail(k, 0, "level below k_min " + std::to_string(r_.k_min));
            for (std::size_t i = 0; i < subs.size(); ++i) check_common(k, i, subs[i]);
            if (!report_.ok) continue;
            switch (r_.method) {
                case Method::Core:
                    for (std::size_t i = 0; i < subs.size(); ++i) check_core(k, i, subs[i]);
                    break;
                case Method::Truss:
                    for (std::size_t i = 0; i < subs.size(); ++i) check_truss(k, i, subs[i]);
                    break;
                case Method::Clique:
                    for (std::size_t i = 0; i < subs.size(); ++i) check_clique(k, i, subs[i]);
                    break;
                case Method::Dbscan: check_dbscan_level(k, subs); break;
            }
        }
        return report_;
    }

private:
    void fail(int k, std::size_t index, const std::string& what) {
        std::ostringstream msg;
        msg << to_string(r_.method) << " k=" << k << " subgraph " << index << ": " << what;
        report_.ok = false;
        report_.violations.push_back(msg.str());
    }

    static std::string edge_name(EdgePair e) {
        return "(" + std::to_string(e.first) + ", " + std::to_string(e.second) + ")";
    }

    void check_common(int k, std::size_t i, const Subgraph& s) {
        if (s.vertices.empty()) fail(k, i, "no vertices");
        if (!std::is_sorted(s.vertices.begin(), s.vertices.end()) ||
            std::adjacent_find(s.vertices.begin(), s.vertices.end()) != s.vertices.end()) {
            fail(k, i, "vertex list not strictly ascending");
            return;
        }
        for (Vertex v : s.vertices) {
            if (v >= g_.num_vertices()) fail(k, i, "vertex " + std::to_string(v) + " not in graph");
        }
        for (const auto& e : s.edges) {
            if (e.first >= e.second || !g_.adjacent(e.first, e.second)) {
                fail(k, i, "edge " + edge_name(e) + " not in graph");
            } else if (!contains(s, e.first) || !contains(s, e.second)) {
                fail(k, i, "edge " + edge_name(e) + " leaves the vertex set");
            }
        }
        if (std::adjacent_find(s.edges.begin(), s.edges.end()) != s.edges.end()) fail(k, i, "repeated edge");
        if (!(s.clustering_coefficient >= 0.0 && s.clustering_coefficient <= 1.0)) {
            fail(k, i, "clustering coefficient outside [0, 1]");
        }
    }

    static bool contains(const Subgraph& s, Vertex v) {
        return std::binary_search(s.vertices.begin(), s.vertices.end(), v);
    }

    std::map<Vertex, std::size_t> degrees(const Subgraph& s) const {
        std::map<Vertex, std::size_t> deg;
        for (Vertex v : s.vertices) deg[v] = 0;
        for (const auto& [u, v] : s.edges) {
            ++deg[u];
            ++deg[v];
        }
        return deg;
    }

    void check_core(int k, std::size_t i, const Subgraph& s) {
        for (const auto& [v, d] : degrees(s)) {
            if (d < static_cast<std::size_t>(k)) {
                fail(k, i, "vertex " + std::to_string(v) + " has degree " + std::to_string(d) + " < " +
                               std::to_string(k));
            }
        }
    }

    void check_truss(int k, std::size_t i, const Subgraph& s) {
        std::set<EdgePair> present(s.edges.begin(), s.edges.end());
        std::map<Vertex, std::vector<Vertex>> adj;
        for (const auto& [u, v] : s.edges) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        for (Vertex v : s.vertices) {
            if (!adj.contains(v)) fail(k, i, "vertex " + std::to_string(v) + " has no truss edge");
        }
        for (const auto& [u, v] : s.edges) {
            std::size_t triangles = 0;
            for (Vertex w : adj[u]) {
                if (present.contains({std::min(v, w), std::max(v, w)})) ++triangles;
            }
            if (triangles + 2 < static_cast<std::size_t>(k)) {
                fail(k, i, "edge " + edge_name({u, v}) + " has support " + std::to_string(triangles) + " < " +
                               std::to_string(k - 2));
            }
        }
    }

    void check_clique(int k, std::size_t i, const Subgraph& s) {
        if (static_cast<int>(s.vertices.size()) != k) fail(k, i, "clique size differs from its level");
        for (std::size_t a = 0; a < s.vertices.size(); ++a) {
            for (std::size_t b = a + 1; b < s.vertices.size(); ++b) {
                if (!g_.adjacent(s.vertices[a], s.vertices[b])) {
                    fail(k, i, "vertices " + std::to_string(s.vertices[a]) + " and " +
                                   std::to_string(s.vertices[b]) + " are not adjacent");
                }
            }
        }
        if (s.vertices.empty()) return;
        for (Vertex w : g_.neighbors(s.vertices.front())) {
            if (contains(s, w)) continue;
            const bool all = std::all_of(s.vertices.begin(), s.vertices.end(),
                                         [&](Vertex v) { return g_.adjacent(v, w); });
            if (all) fail(k, i, "not maximal: vertex " + std::to_string(w) + " extends it");
        }
    }

    // Working graph at level k: the whole graph at the first level, the
    // clustered vertices of the previous level afterwards.
    void check_dbscan_level(int k, const std::vector<Subgraph>& clusters) {
        std::vector<char> working(g_.num_vertices(), 0);
        const auto prev = r_.per_k.find(k - 1);
        if (k == std::max(r_.k_min, 1)) {
            std::fill(working.begin(), working.end(), 1);
        } else if (prev != r_.per_k.end()) {
            for (const auto& s : prev->second) {
                for (Vertex v : s.vertices) working[v] = 1;
            }
        } else {
            fail(k, 0, "level follows an empty level");
            return;
        }
        std::vector<std::size_t> degree(g_.num_vertices(), 0);
        for (Vertex v = 0; v < g_.num_vertices(); ++v) {
            if (!working[v]) continue;
            for (Vertex w : g_.neighbors(v)) degree[v] += working[w] ? 1 : 0;
        }
        const auto kk = static_cast<std::size_t>(k);
        auto is_core = [&](Vertex v) { return working[v] && degree[v] >= kk; };

        constexpr auto kNone = std::numeric_limits<std::size_t>::max();
        std::vector<std::size_t> owner(g_.num_vertices(), kNone);
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            for (Vertex v : clusters[i].vertices) {
                if (!working[v]) fail(k, i, "vertex " + std::to_string(v) + " was removed at an earlier level");
                if (owner[v] != kNone) fail(k, i, "vertex " + std::to_string(v) + " is in two clusters");
                owner[v] = i;
            }
        }
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            const auto& s = clusters[i];
            std::vector<Vertex> cores;
            for (Vertex v : s.vertices) {
                if (is_core(v)) cores.push_back(v);
            }
            if (cores.empty()) {
                fail(k, i, "cluster has no vertex of degree >= " + std::to_string(k));
                continue;
            }
            for (Vertex c : cores) {
                for (Vertex w : g_.neighbors(c)) {
                    if (!working[w]) continue;
                    if (owner[w] == kNone) {
                        fail(k, i, "neighbor " + std::to_string(w) + " of core vertex " + std::to_string(c) +
                                       " is unclustered");
                    } else if (is_core(w) && owner[w] != i) {
                        fail(k, i, "core vertices " + std::to_string(c) + " and " + std::to_string(w) +
                                       " are split across clusters");
                    }
                }
            }
            // Every member must be reachable from a core through core vertices.
            std::set<Vertex> reached{cores.front()};
            std::vector<Vertex> queue{cores.front()};
            for (std::size_t head = 0; head < queue.size(); ++head) {
                const Vertex u = queue[head];
                if (!is_core(u)) continue;
                for (Vertex w : g_.neighbors(u)) {
                    if (owner[w] == i && reached.insert(w).second) queue.push_back(w);
                }
            }
            for (Vertex v : s.vertices) {
                if (!reached.contains(v)) {
                    fail(k, i, "vertex " + std::to_string(v) + " is not reachable by core expansion");
                }
            }
        }
        for (Vertex v = 0; v < g_.num_vertices(); ++v) {
            if (is_core(v) && owner[v] == kNone) {
                fail(k, 0, "core vertex " + std::to_string(v) + " belongs to no cluster");
            }
        }
    }

    const DecompositionResult& r_;
    const EventGraph& g_;
    ValidationReport report_;
};

}  // namespace

ValidationReport validate(const DecompositionResult& result, const EventGraph& g) {
    return Validator(result, g).run();
}

}  // namespace nrchain::cohesive
