#include "rdsphere/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rdsphere/errors.hpp"

namespace rdsphere {

SpatialIndex::SpatialIndex(double cell) : h_(std::max(cell, 1e-6)) {
    nmax_ = static_cast<int>(std::floor(2.0 / h_)) + 1;
}

int SpatialIndex::coord(double x) const {
    int c = static_cast<int>(std::floor((x + 1.0) / h_));
    return std::clamp(c, 0, nmax_);
}

void SpatialIndex::insert(std::uint32_t id, const Vec3& u) {
    cells_[key(coord(u.x), coord(u.y), coord(u.z))].push_back(id);
    ++count_;
}

std::uint32_t SpatialIndex::nearest(const Vec3& u, const std::vector<Vec3>& units) const {
    if (count_ == 0) throw PreconditionError("nearest query on an empty index");
    const int ci = coord(u.x), cj = coord(u.y), ck = coord(u.z);
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_id = 0;
    for (int ring = 0; ring <= nmax_ + 1; ++ring) {
        for (int i = ci - ring; i <= ci + ring; ++i)
            for (int j = cj - ring; j <= cj + ring; ++j)
                for (int k = ck - ring; k <= ck + ring; ++k) {
                    int cheb = std::max({std::abs(i - ci), std::abs(j - cj), std::abs(k - ck)});
                    if (cheb != ring) continue;
                    if (i < 0 || j < 0 || k < 0 || i > nmax_ || j > nmax_ || k > nmax_) continue;
                    auto it = cells_.find(key(i, j, k));
                    if (it == cells_.end()) continue;
                    for (auto id : it->second) {
                        double c2 = chord2(u, units[id]);
                        if (c2 < best || (c2 == best && id < best_id)) {
                            best = c2;
                            best_id = id;
                        }
                    }
                }
        // Points in unvisited cells lie at least ring*h away along some axis.
        double reach = ring * h_;
        if (best < std::numeric_limits<double>::infinity() && best < reach * reach) break;
    }
    return best_id;
}

}  // namespace rdsphere
