#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rdsphere/sphere.hpp"

namespace rdsphere {

// Uniform grid over unit vectors for radius and nearest-neighbour queries.
class SpatialIndex {
public:
    explicit SpatialIndex(double cell = 0.05);

    void insert(std::uint32_t id, const Vec3& u);
    std::size_t size() const { return count_; }

    // Calls f(id) for every stored id whose cell may hold points within the chord radius.
    template <class F>
    void for_each_near(const Vec3& u, double chord, F&& f) const {
        int lo[3], hi[3];
        const double c[3] = {u.x, u.y, u.z};
        for (int a = 0; a < 3; ++a) {
            lo[a] = coord(c[a] - chord);
            hi[a] = coord(c[a] + chord);
        }
        for (int i = lo[0]; i <= hi[0]; ++i)
            for (int j = lo[1]; j <= hi[1]; ++j)
                for (int k = lo[2]; k <= hi[2]; ++k) {
                    auto it = cells_.find(key(i, j, k));
                    if (it == cells_.end()) continue;
                    for (auto id : it->second) f(id);
                }
    }

    // As for_each_near, stopping as soon as f returns true; returns whether it did.
    template <class F>
    bool any_near(const Vec3& u, double chord, F&& f) const {
        int lo[3], hi[3];
        const double c[3] = {u.x, u.y, u.z};
        for (int a = 0; a < 3; ++a) {
            lo[a] = coord(c[a] - chord);
            hi[a] = coord(c[a] + chord);
        }
        for (int i = lo[0]; i <= hi[0]; ++i)
            for (int j = lo[1]; j <= hi[1]; ++j)
                for (int k = lo[2]; k <= hi[2]; ++k) {
                    auto it = cells_.find(key(i, j, k));
                    if (it == cells_.end()) continue;
                    for (auto r = it->second.rbegin(); r != it->second.rend(); ++r)
                        if (f(*r)) return true;
                }
        return false;
    }

    // Nearest stored id to u, ties broken by lower id. units[id] must be the stored vectors.
    std::uint32_t nearest(const Vec3& u, const std::vector<Vec3>& units) const;

private:
    int coord(double x) const;
    static std::uint64_t key(int i, int j, int k) {
        return (std::uint64_t(std::uint32_t(i) & 0x1FFFFF) << 42) |
               (std::uint64_t(std::uint32_t(j) & 0x1FFFFF) << 21) |
               std::uint64_t(std::uint32_t(k) & 0x1FFFFF);
    }

    double h_;
    int nmax_;
    std::size_t count_ = 0;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

}  // namespace rdsphere
