#pragma once

#include <memory>
#include <vector>

#include "rdsphere/spatial.hpp"
#include "rdsphere/sphere.hpp"

namespace rdsphere {

// A sphere net with nearest-center lookup.
class Grid {
public:
    explicit Grid(SphereNet net);
    static std::shared_ptr<const Grid> lattice(std::size_t n);

    const SphereNet& net() const { return net_; }
    std::size_t size() const { return net_.size(); }
    const SpherePoint& point(std::size_t i) const { return net_.points[i]; }
    const Vec3& unit(std::size_t i) const { return net_.units[i]; }
    double covering_radius() const { return net_.covering_radius; }

    // Nearest net point, ties by lower index.
    std::size_t locate(const SpherePoint& p) const { return locate(to_unit(p)); }
    std::size_t locate(const Vec3& u) const;

private:
    SphereNet net_;
    SpatialIndex index_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Samples on a grid with nearest-center interpolation.
struct GridFunction {
    GridPtr grid;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(GridPtr g, double fill);
    GridFunction(GridPtr g, std::vector<double> v);
    template <class F>
    static GridFunction sample(GridPtr g, F&& f) {
        std::vector<double> v(g->size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g->point(i));
        return GridFunction(std::move(g), std::move(v));
    }

    std::size_t size() const { return values.size(); }
    double operator()(const SpherePoint& p) const { return values[grid->locate(p)]; }
    double min() const;
    double max() const;
    bool positive() const { return !values.empty() && min() > 0; }
};

// sup |a - b| over the grid.
double sup_distance(const GridFunction& a, const GridFunction& b);
// sup - inf of log(a / b); both must be positive.
double log_oscillation(const GridFunction& a, const GridFunction& b);

}  // namespace rdsphere
