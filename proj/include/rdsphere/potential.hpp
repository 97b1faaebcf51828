#pragma once

#include <memory>
#include <string>

#include "rdsphere/grid.hpp"
#include "rdsphere/ratmap.hpp"

namespace rdsphere {

// A real potential on the sphere: a constant, c log((1+|z|^2)/(1+|T(z)|^2)) (singular
// where exactly one of z, T(z) is infinite), a linear form a <u(z), v> in the unit-sphere embedding, or tabulated samples.
class Potential {
public:
    enum class Kind { Constant, LogRatio, Linear, Tabulated };

    Potential() = default;
    static Potential constant(double c);
    static Potential log_ratio(double c, const RationalMap& T);
    static Potential linear(double a, Vec3 v);
    static Potential tabulated(GridFunction f);

    Kind kind() const { return kind_; }
    bool is_constant() const { return kind_ == Kind::Constant; }
    double constant_value() const { return c_; }

    double operator()(const SpherePoint& p) const;

    // Bound (exact for closed forms, estimated on the grid for tables) on
    // sup |phi(x) - phi(y)| / d_s(x, y)^alpha.
    double holder_seminorm(double alpha) const;
    double sup_abs() const;

    // Descriptor round trip: "constant c", "logratio c", "linear a vx vy vz",
    // "tabulated-linear n a vx vy vz" (linear form sampled on an n-point lattice).
    std::string describe() const { return text_; }
    // Identifies equal potentials (tables by identity).
    std::string key() const;
    static Potential parse(const std::string& text, const RationalMap& T);

private:
    Kind kind_ = Kind::Constant;
    double c_ = 0;
    Vec3 v_{};
    std::shared_ptr<const RationalMap> map_;
    std::shared_ptr<const GridFunction> table_;
    std::string text_ = "constant 0";
};

}  // namespace rdsphere
