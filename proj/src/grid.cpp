#include "rdsphere/grid.hpp"

#include <algorithm>
#include <cmath>

#include "rdsphere/errors.hpp"

namespace rdsphere {

Grid::Grid(SphereNet net)
    : net_(std::move(net)),
      index_(std::clamp(2.4 / std::sqrt(double(std::max<std::size_t>(net_.size(), 1))), 1e-4, 2.0)) {
    require(!net_.points.empty(), "grid needs at least one point");
    for (std::size_t i = 0; i < net_.size(); ++i) index_.insert(std::uint32_t(i), net_.units[i]);
}

GridPtr Grid::lattice(std::size_t n) { return std::make_shared<const Grid>(lattice_net(n)); }

std::size_t Grid::locate(const Vec3& u) const { return index_.nearest(u, net_.units); }

GridFunction::GridFunction(GridPtr g, double fill) : grid(std::move(g)) { values.assign(grid->size(), fill); }

GridFunction::GridFunction(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    require(grid && values.size() == grid->size(), "grid function needs one value per grid point");
}

double GridFunction::min() const { return *std::min_element(values.begin(), values.end()); }
double GridFunction::max() const { return *std::max_element(values.begin(), values.end()); }

double sup_distance(const GridFunction& a, const GridFunction& b) {
    require(a.size() == b.size(), "grid functions on different grids");
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a.values[i] - b.values[i]));
    return s;
}

double log_oscillation(const GridFunction& a, const GridFunction& b) {
    require(a.size() == b.size(), "grid functions on different grids");
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < a.size(); ++i) {
        require(a.values[i] > 0 && b.values[i] > 0, "log oscillation needs positive functions");
        double r = std::log(a.values[i] / b.values[i]);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return hi - lo;
}

}  // namespace rdsphere
