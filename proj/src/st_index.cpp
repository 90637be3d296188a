#include "nrchain/st_index.hpp"

#include "nrchain/ingest.hpp"
#include "nrchain/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <string>

namespace nrchain::st_index {

Box3 Box3::around(const STPoint& p) { return Box3{{p.x, p.y, p.t}, {p.x, p.y, p.t}}; }

void Box3::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (!(min[a] <= max[a])) throw IndexError("box min exceeds max on axis " + std::to_string(a));
    }
}

bool Box3::contains(const STPoint& p) const {
    return p.x >= min[0] && p.x <= max[0] && p.y >= min[1] && p.y <= max[1] && p.t >= min[2] && p.t <= max[2];
}

bool Box3::contains(const Box3& o) const {
    for (int a = 0; a < 3; ++a) {
        if (o.min[a] < min[a] || o.max[a] > max[a]) return false;
    }
    return true;
}

bool Box3::intersects(const Box3& o) const {
    for (int a = 0; a < 3; ++a) {
        if (o.max[a] < min[a] || o.min[a] > max[a]) return false;
    }
    return true;
}

void Box3::expand(const Box3& o) {
    for (int a = 0; a < 3; ++a) {
        min[a] = std::min(min[a], o.min[a]);
        max[a] = std::max(max[a], o.max[a]);
    }
}

namespace {

// Smallest s with s^dims >= p.
std::size_t slab_count(std::size_t p, int dims) {
    std::size_t s = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(p), 1.0 / dims)));
    s = std::max<std::size_t>(s, 1);
    auto power = [dims](std::size_t v) {
        std::size_t r = 1;
        for (int i = 0; i < dims; ++i) r *= v;
        return r;
    };
    while (power(s) < p) ++s;
    return s;
}

// Orders entries so that node j of `nodes` receives the contiguous slice
// [c*j/p, c*(j+1)/p). Slab boundaries fall on node boundaries, so every node
// holds floor(c/p) or ceil(c/p) entries.
class StrTiler {
public:
    StrTiler(std::vector<std::array<double, 3>> centers, std::size_t nodes)
        : centers_(std::move(centers)), nodes_(nodes), order_(centers_.size()) {
        std::iota(order_.begin(), order_.end(), 0u);
    }

    std::size_t boundary(std::size_t j) const { return centers_.size() * j / nodes_; }

    std::vector<std::uint32_t> run() {
        tile(0, nodes_, 0);
        return order_;
    }

private:
    void sort_range(std::size_t lo, std::size_t hi, int axis) {
        std::sort(order_.begin() + static_cast<std::ptrdiff_t>(lo), order_.begin() + static_cast<std::ptrdiff_t>(hi),
                  [&](std::uint32_t a, std::uint32_t b) {
                      if (centers_[a][axis] != centers_[b][axis]) return centers_[a][axis] < centers_[b][axis];
                      return a < b;
                  });
    }

    void tile(std::size_t j0, std::size_t j1, int axis) {
        const std::size_t lo = boundary(j0), hi = boundary(j1);
        const std::size_t p = j1 - j0;
        if (p <= 1) return;
        sort_range(lo, hi, axis);
        if (axis == 2) return;
        const std::size_t s = slab_count(p, 3 - axis);
        for (std::size_t g = 0; g < s; ++g) {
            const std::size_t ga = j0 + p * g / s, gb = j0 + p * (g + 1) / s;
            if (gb > ga) tile(ga, gb, axis + 1);
        }
    }

    std::vector<std::array<double, 3>> centers_;
    std::size_t nodes_;
    std::vector<std::uint32_t> order_;
};

}  // namespace

RTree3 RTree3::build(std::span<const STPoint> points, std::size_t fanout) {
    if (points.empty()) throw IndexError("cannot build an R-tree over zero points");
    if (fanout < 4) throw IndexError("R-tree fanout must be at least 4");
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.t)) {
            throw IndexError("non-finite coordinate for event " + std::to_string(p.event_id));
        }
    }
    RTree3 tree;
    tree.fanout_ = fanout;
    tree.min_fill_ = std::min(kDefaultMinFill * fanout / kDefaultFanout, fanout / 2);

    auto node_count = [fanout](std::size_t c) { return (c + fanout - 1) / fanout; };

    // Leaf level.
    {
        std::vector<std::array<double, 3>> centers;
        centers.reserve(points.size());
        for (const auto& p : points) centers.push_back({p.x, p.y, p.t});
        const std::size_t p = node_count(points.size());
        StrTiler tiler(std::move(centers), p);
        const auto order = tiler.run();
        tree.points_.reserve(points.size());
        for (auto i : order) tree.points_.push_back(points[i]);
        std::vector<Node> leaves(p);
        for (std::size_t j = 0; j < p; ++j) {
            Node& n = leaves[j];
            n.first = static_cast<std::uint32_t>(tiler.boundary(j));
            n.count = static_cast<std::uint32_t>(tiler.boundary(j + 1) - tiler.boundary(j));
            n.box = Box3::around(tree.points_[n.first]);
            for (std::uint32_t i = n.first; i < n.first + n.count; ++i) n.box.expand(Box3::around(tree.points_[i]));
        }
        tree.levels_.push_back(std::move(leaves));
    }

    // Internal levels until a single root remains.
    while (tree.levels_.back().size() > 1) {
        auto& below = tree.levels_.back();
        std::vector<std::array<double, 3>> centers;
        centers.reserve(below.size());
        for (const auto& n : below) {
            centers.push_back({(n.box.min[0] + n.box.max[0]) / 2, (n.box.min[1] + n.box.max[1]) / 2,
                               (n.box.min[2] + n.box.max[2]) / 2});
        }
        const std::size_t p = node_count(below.size());
        StrTiler tiler(std::move(centers), p);
        const auto order = tiler.run();
        std::vector<Node> reordered;
        reordered.reserve(below.size());
        for (auto i : order) reordered.push_back(below[i]);
        below = std::move(reordered);

        std::vector<Node> parents(p);
        for (std::size_t j = 0; j < p; ++j) {
            Node& n = parents[j];
            n.first = static_cast<std::uint32_t>(tiler.boundary(j));
            n.count = static_cast<std::uint32_t>(tiler.boundary(j + 1) - tiler.boundary(j));
            n.box = below[n.first].box;
            for (std::uint32_t c = n.first; c < n.first + n.count; ++c) n.box.expand(below[c].box);
        }
        tree.levels_.push_back(std::move(parents));
    }
    return tree;
}

std::vector<std::uint32_t> RTree3::range_query(const Box3& box) const {
    box.validate();
    std::vector<std::uint32_t> ids;
    for_each_in(box, [&](const STPoint& p) { ids.push_back(p.event_id); });
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<STPoint> to_points(std::span<const ingest::Event> events) {
    std::vector<STPoint> pts;
    pts.reserve(events.size());
    for (const auto& e : events) pts.push_back({e.id, e.x, e.y, e.t});
    return pts;
}

std::vector<EdgePair> neighbor_pairs(const RTree3& tree, std::span<const STPoint> points, double r_x, double r_y,
                                     double r_t, unsigned workers) {
    if (!(r_x > 0) || !(r_y > 0) || !(r_t > 0)) throw IndexError("pair limits must be positive");
    constexpr std::size_t kChunk = 1024;
    const std::size_t n_chunks = (points.size() + kChunk - 1) / kChunk;
    std::vector<std::vector<EdgePair>> partial(n_chunks);
    parallel_for(n_chunks, workers, [&](std::size_t c) {
        auto& out = partial[c];
        const std::size_t end = std::min(points.size(), (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) {
            const STPoint& p = points[i];
            const Box3 box{{p.x - r_x, p.y - r_y, p.t - r_t}, {p.x + r_x, p.y + r_y, p.t + r_t}};
            tree.for_each_in(box, [&](const STPoint& q) {
                if (q.event_id > p.event_id) out.emplace_back(p.event_id, q.event_id);
            });
        }
    });
    std::vector<EdgePair> pairs;
    std::size_t total = 0;
    for (const auto& part : partial) total += part.size();
    pairs.reserve(total);
    for (auto& part : partial) pairs.insert(pairs.end(), part.begin(), part.end());
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

std::vector<EdgePair> category_pairs(std::span<const ingest::Event> events, double r_x, double r_y, double r_t,
                                     unsigned workers) {
    std::map<std::string, std::vector<STPoint>> by_category;
    for (const auto& e : events) by_category[e.category].push_back({e.id, e.x, e.y, e.t});
    std::vector<EdgePair> pairs;
    for (const auto& [category, pts] : by_category) {
        const auto tree = RTree3::build(pts);
        auto part = neighbor_pairs(tree, pts, r_x, r_y, r_t, workers);
        pairs.insert(pairs.end(), part.begin(), part.end());
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

namespace {

template <typename T>
void put_le(std::ofstream& out, T value) {
    unsigned char bytes[sizeof(T)];
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
bool get_le(std::ifstream& in, T& value) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) return false;
    value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
    return true;
}

}  // namespace

void write_pairs_binary(const std::filesystem::path& path, std::span<const EdgePair> pairs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IndexError("cannot write " + path.string());
    put_le<std::uint64_t>(out, pairs.size());
    for (const auto& [i, j] : pairs) {
        put_le<std::uint32_t>(out, i);
        put_le<std::uint32_t>(out, j);
    }
}

std::vector<EdgePair> read_pairs_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IndexError("cannot read " + path.string());
    std::uint64_t count = 0;
    if (!get_le(in, count)) throw IndexError("truncated pair file " + path.string());
    std::vector<EdgePair> pairs;
    pairs.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 26)));
    for (std::uint64_t k = 0; k < count; ++k) {
        std::uint32_t i = 0, j = 0;
        if (!get_le(in, i) || !get_le(in, j)) throw IndexError("truncated pair file " + path.string());
        pairs.emplace_back(i, j);
    }
    return pairs;
}

}  // namespace nrchain::st_index
