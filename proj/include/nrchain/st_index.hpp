#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nrchain::ingest {
struct Event;
}

namespace nrchain::st_index {

struct IndexError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct STPoint {
    std::uint32_t event_id = 0;
    double x = 0.0;  // meters
    double y = 0.0;  // meters
    double t = 0.0;  // days
};

// Axis-aligned box over (x, y, t) with closed bounds.
struct Box3 {
    std::array<double, 3> min{};
    std::array<double, 3> max{};

    static Box3 around(const STPoint& p);
    // Throws IndexError unless min <= max on each axis.
    void validate() const;
    bool contains(const STPoint& p) const;
    bool contains(const Box3& other) const;
    bool intersects(const Box3& other) const;
    void expand(const Box3& other);
};

using EdgePair = std::pair<std::uint32_t, std::uint32_t>;

// Sort-tile-recursive packed R-tree. Nodes at every level live in one flat
// array; a node's children (or points, for leaves) are a contiguous range of
// the level below.
class RTree3 {
public:
    static constexpr std::size_t kDefaultFanout = 16;
    static constexpr std::size_t kDefaultMinFill = 6;

    struct Node {
        Box3 box;
        std::uint32_t first = 0;  // index of first child node / point
        std::uint32_t count = 0;
    };

    // Throws IndexError for empty input, non-finite coordinates, or a fanout
    // below 4.
    static RTree3 build(std::span<const STPoint> points, std::size_t fanout = kDefaultFanout);

    // Ids of all points inside `box`, ascending.
    std::vector<std::uint32_t> range_query(const Box3& box) const;

    // Calls visit(point) for every point inside `box`, in tree order.
    template <typename Visit>
    void for_each_in(const Box3& box, Visit&& visit) const;

    std::size_t size() const { return points_.size(); }
    std::size_t height() const { return levels_.size() - 1; }  // leaf-only tree has height 0
    std::size_t fanout() const { return fanout_; }
    std::size_t min_fill() const { return min_fill_; }

    // Levels from the leaves (0) up to the root (height()).
    const std::vector<std::vector<Node>>& levels() const { return levels_; }
    const std::vector<STPoint>& points() const { return points_; }
    const Node& root() const { return levels_.back().front(); }

private:
    std::size_t fanout_ = kDefaultFanout;
    std::size_t min_fill_ = kDefaultMinFill;
    std::vector<STPoint> points_;             // leaf entries, in packed order
    std::vector<std::vector<Node>> levels_;
};

template <typename Visit>
void RTree3::for_each_in(const Box3& box, Visit&& visit) const {
    struct Frame {
        std::size_t level;
        std::uint32_t node;
    };
    std::vector<Frame> stack;
    stack.push_back({levels_.size() - 1, 0});
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        const Node& n = levels_[f.level][f.node];
        if (!n.box.intersects(box)) continue;
        if (f.level == 0) {
            for (std::uint32_t i = n.first; i < n.first + n.count; ++i) {
                if (box.contains(points_[i])) visit(points_[i]);
            }
        } else {
            for (std::uint32_t c = n.first + n.count; c-- > n.first;) stack.push_back({f.level - 1, c});
        }
    }
}

std::vector<STPoint> to_points(std::span<const ingest::Event> events);

// All unordered pairs (i, j), i < j, within the per-axis limits. Every event
// issues one box query; each pair is kept from its smaller endpoint, so the
// output is sorted and duplicate-free. The tree must index `points`.
std::vector<EdgePair> neighbor_pairs(const RTree3& tree, std::span<const STPoint> points, double r_x, double r_y,
                                     double r_t, unsigned workers = 1);

// Builds one tree per category and returns the union of within-category pairs.
std::vector<EdgePair> category_pairs(std::span<const ingest::Event> events, double r_x, double r_y, double r_t,
                                     unsigned workers = 1);

// Binary pair dump: little-endian u64 count followed by (u32 i, u32 j) pairs.
void write_pairs_binary(const std::filesystem::path& path, std::span<const EdgePair> pairs);
std::vector<EdgePair> read_pairs_binary(const std::filesystem::path& path);

}  // namespace nrchain::st_index
