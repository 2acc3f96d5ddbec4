#pragma once

#include "mfatopo/types.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mfatopo {

// Uniform bucket grid for radius queries with radius <= cell size.
class SpatialHash {
public:
    explicit SpatialHash(double cell) : cell_(cell) {}

    void insert(const Vec2& x, std::size_t id) { buckets_[{cell_of(x[0]), cell_of(x[1])}].push_back({x, id}); }

    // Calls fn(id, distance) for every entry with distance <= radius.
    template <typename Fn>
    void query(const Vec2& x, double radius, Fn&& fn) const {
        const int reach = static_cast<int>(std::ceil(radius / cell_));
        const std::int64_t cx = cell_of(x[0]), cy = cell_of(x[1]);
        for (std::int64_t dx = -reach; dx <= reach; ++dx)
            for (std::int64_t dy = -reach; dy <= reach; ++dy) {
                auto it = buckets_.find({cx + dx, cy + dy});
                if (it == buckets_.end()) continue;
                for (const auto& e : it->second) {
                    const double d = (e.x - x).norm();
                    if (d <= radius) fn(e.id, d);
                }
            }
    }

private:
    struct Entry {
        Vec2 x;
        std::size_t id;
    };
    std::int64_t cell_of(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
    using Cell = std::pair<std::int64_t, std::int64_t>;
    struct CellHash {
        std::size_t operator()(const Cell& c) const {
            return std::hash<std::uint64_t>{}(static_cast<std::uint64_t>(c.first) * 0x9E3779B97F4A7C15ull ^
                                              static_cast<std::uint64_t>(c.second));
        }
    };

    double cell_;
    std::unordered_map<Cell, std::vector<Entry>, CellHash> buckets_;
};

}  // namespace mfatopo
