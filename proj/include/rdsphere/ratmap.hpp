#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rdsphere/poly.hpp"
#include "rdsphere/roots.hpp"
#include "rdsphere/sphere.hpp"

namespace rdsphere {

inline constexpr double kCoprimeThreshold = 1e-10;
inline constexpr double kCoprimeSeparation = 1e-8;
inline constexpr int kDegreeCap = 4096;

// T = f/g with f, g coprime; degree = max(deg f, deg g) >= 1.
class RationalMap {
public:
    // Validates coprimality (relative resultant above threshold) and non-constancy.
    RationalMap(Poly f, Poly g);
    // Skips validation; used for products of already valid maps.
    static RationalMap trusted(Poly f, Poly g);

    static RationalMap identity();
    static RationalMap power(int d, cplx scale = 1.0);          // scale * z^d
    static RationalMap mobius(cplx a, cplx b, cplx c, cplx d);  // (az+b)/(cz+d)
    static RationalMap qc(double c);                             // 3z^2 - 2z^3 + c z^2 (z-1)^2
    static RationalMap quadratic(cplx c);                        // z^2 + c

    int degree() const { return d_; }
    const Poly& num() const { return f_; }
    const Poly& den() const { return g_; }

    SpherePoint eval(const SpherePoint& p) const;
    double sph_deriv(const SpherePoint& p) const;
    // Image and spherical derivative together.
    SpherePoint eval_deriv(const SpherePoint& p, double& deriv) const;

    // Root of f - p g = 0 nearest to start found by Newton's method in the chart of start.
    // Returns nullopt if the iteration fails to converge.
    std::optional<SpherePoint> newton_preimage(const SpherePoint& p, const SpherePoint& start,
                                               int max_iter = 50) const;

    // Binary form f - p g (homogeneous degree d) in chart z, scaled so the larger of 1, |p| is 1.
    Poly preimage_form(const SpherePoint& p) const;

    std::string to_text() const;
    static RationalMap from_text(const std::string& text);

private:
    RationalMap() = default;
    void cache();

    Poly f_, g_;
    int d_ = 0;
    Poly rf_, rg_;      // reversed at formal degree d
    Poly df_, dg_, drf_, drg_;
};

// T2 o T1.
RationalMap compose(const RationalMap& t1, const RationalMap& t2);

// Spherical derivative sup estimate: grid maximum refined locally.
struct SupEstimate {
    double value = 0;
    double grid_max = 0;
    std::size_t grid_points = 0;
};
SupEstimate sup_sph_deriv(const RationalMap& T, std::size_t grid_points = 4096);

Divisor preimages(const RationalMap& T, const SpherePoint& p, const RootOptions& opt = {});
Divisor ramification_divisor(const RationalMap& T, const RootOptions& opt = {});
Divisor branch_divisor(const RationalMap& T, const RootOptions& opt = {});
Divisor fixed_divisor(const RationalMap& T, const RootOptions& opt = {});
std::vector<SpherePoint> totally_ramified(const RationalMap& T, const RootOptions& opt = {});
// Relative Res_{2d-2,d+1}(f'g - fg', f - z g).
double fixed_ramification_resultant(const RationalMap& T);
bool has_fixed_ramification(const RationalMap& T);

// Wronskian f'g - fg' as a form of formal degree 2d-2.
Poly wronskian(const RationalMap& T);

}  // namespace rdsphere
